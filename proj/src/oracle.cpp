#include "qubus/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <type_traits>

#include <bit>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qubus/error.hpp"

namespace qubus {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::vector<cplx>;

constexpr double kLeakTolerance = 1e-6;
constexpr double kTailTolerance = 1e-12;
constexpr std::size_t kMaxSteps = 2'000'000;

Matrix annihilation(std::size_t n_max) {
  const auto n = static_cast<Eigen::Index>(n_max);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// U_v rho U_w^dag over qubit blocks, U chosen per qubit basis state.
JointFockState apply_block_unitaries(JointFockState state, const std::vector<Matrix>& unitaries) {
  const auto n = static_cast<Eigen::Index>(state.n_max());
  const auto d = static_cast<Eigen::Index>(state.qubit_dim());
  Matrix& rho = state.rho();
  for (Eigen::Index v = 0; v < d; ++v) {
    for (Eigen::Index w = 0; w < d; ++w) {
      const auto& uv = unitaries[static_cast<std::size_t>(v)];
      const auto& uw = unitaries[static_cast<std::size_t>(w)];
      rho.block(v * n, w * n, n, n) = uv * rho.block(v * n, w * n, n, n) * uw.adjoint();
    }
  }
  return state;
}

class LindbladRhs {
 public:
  LindbladRhs(std::size_t n_max, std::size_t qubit_dim, double chi, double gamma,
              const std::vector<double>& lambda)
      : n_(n_max), dim_(n_max * qubit_dim), gamma_(gamma), h_(dim_), sqrt_(n_max + 1) {
    for (std::size_t r = 0; r < dim_; ++r) {
      h_[r] = -chi * static_cast<double>(r % n_) * lambda[r / n_];
    }
    for (std::size_t k = 0; k <= n_max; ++k) sqrt_[k] = std::sqrt(static_cast<double>(k));
  }

  // Column-major flattening: entry (r, c) lives at r + c * dim.
  void operator()(const OdeState& x, OdeState& dxdt, double /*t*/) const {
    const cplx minus_i{0.0, -1.0};
    for (std::size_t c = 0; c < dim_; ++c) {
      const std::size_t m = c % n_;
      for (std::size_t r = 0; r < dim_; ++r) {
        const std::size_t n = r % n_;
        const std::size_t idx = r + c * dim_;
        cplx val = minus_i * (h_[r] - h_[c]) * x[idx] -
                   gamma_ * static_cast<double>(n + m) * x[idx];
        if (n + 1 < n_ && m + 1 < n_) {
          val += 2.0 * gamma_ * sqrt_[n + 1] * sqrt_[m + 1] * x[idx + 1 + dim_];
        }
        dxdt[idx] = val;
      }
    }
  }

 private:
  std::size_t n_;
  std::size_t dim_;
  double gamma_;
  std::vector<double> h_;
  std::vector<double> sqrt_;
};

void check_amplitude(double amp, std::size_t step) {
  if (amp > kOracleAmplitudeLimit) {
    std::ostringstream msg;
    msg << "oracle infeasible: amplitude " << amp << " after step " << step << " exceeds "
        << kOracleAmplitudeLimit;
    throw ValidationError(msg.str());
  }
}

}  // namespace

void LindbladConfig::validate() const {
  if (n_max < 2) throw ValidationError("n_max must be at least 2");
  if (!std::isfinite(chi)) throw ValidationError("chi must be finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t must be >= 0");
  if (!(dt_initial > 0.0)) throw ValidationError("dt_initial must be > 0");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-8)) throw ValidationError("rel_tol must be in (0, 1e-8]");
  if (!(abs_tol > 0.0)) throw ValidationError("abs_tol must be > 0");
}

std::size_t required_truncation(double max_amplitude) {
  if (!(max_amplitude >= 0.0) || !std::isfinite(max_amplitude)) {
    throw ValidationError("amplitude must be finite and >= 0");
  }
  return static_cast<std::size_t>(
      std::ceil(max_amplitude * max_amplitude + 10.0 * max_amplitude + 20.0));
}

Vector coherent_vector(cplx alpha, std::size_t n_max) {
  if (n_max == 0) throw ValidationError("n_max must be positive");
  // Poisson weight left above the truncation.
  const double mean = std::norm(alpha);
  double tail = 0.0;
  if (mean > 0.0) {
    double log_p = -mean + static_cast<double>(n_max) * std::log(mean) - std::lgamma(static_cast<double>(n_max) + 1.0);
    for (std::size_t k = n_max; k < n_max + 100000; ++k) {
      const double p = std::exp(log_p);
      tail += p;
      if (static_cast<double>(k) > mean && p <= 1e-18 * tail) break;
      log_p += std::log(mean) - std::log(static_cast<double>(k) + 1.0);
    }
  }
  if (tail > kTailTolerance) {
    throw ValidationError("truncation too small: n_max = " + std::to_string(n_max) + " leaves " +
                          std::to_string(tail) + " of the norm, required n_max = " +
                          std::to_string(required_truncation(std::abs(alpha))));
  }
  Vector v(static_cast<Eigen::Index>(n_max));
  cplx term = std::exp(-0.5 * mean);
  v(0) = term;
  for (std::size_t k = 1; k < n_max; ++k) {
    term *= alpha / std::sqrt(static_cast<double>(k));
    v(static_cast<Eigen::Index>(k)) = term;
  }
  return v;
}

JointFockState::JointFockState(std::size_t n_qubits, std::size_t n_max, Matrix rho)
    : n_qubits_(n_qubits), n_max_(n_max), rho_(std::move(rho)) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) throw ValidationError("qubit count out of range");
  const auto dim = static_cast<Eigen::Index>((std::size_t{1} << n_qubits) * n_max);
  if (rho_.rows() != dim || rho_.cols() != dim) {
    throw ValidationError("joint density has dimension " + std::to_string(rho_.rows()) +
                          ", expected " + std::to_string(dim));
  }
}

JointFockState JointFockState::product(const Matrix& qubit_density, cplx probe_amp,
                                       std::size_t n_max) {
  validate_qubit_density(qubit_density);
  const Vector psi = coherent_vector(probe_amp, n_max);
  const Matrix probe = psi * psi.adjoint();
  Matrix rho = Eigen::kroneckerProduct(qubit_density, probe);
  const auto d = static_cast<std::size_t>(qubit_density.rows());
  return JointFockState(static_cast<std::size_t>(std::countr_zero(d)), n_max, std::move(rho));
}

Matrix JointFockState::reduce_qubits() const {
  const auto n = static_cast<Eigen::Index>(n_max_);
  const auto d = static_cast<Eigen::Index>(qubit_dim());
  Matrix out(d, d);
  for (Eigen::Index v = 0; v < d; ++v) {
    for (Eigen::Index w = 0; w < d; ++w) out(v, w) = rho_.block(v * n, w * n, n, n).trace();
  }
  return out;
}

double JointFockState::trace() const { return rho_.trace().real(); }

double JointFockState::top_level_population() const {
  double pop = 0.0;
  for (std::size_t v = 0; v < qubit_dim(); ++v) {
    const auto idx = static_cast<Eigen::Index>(v * n_max_ + n_max_ - 1);
    pop += rho_(idx, idx).real();
  }
  return pop;
}

void JointFockState::validate(double leak_tol) const {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("joint density is not Hermitian");
  }
  const double tr = trace();
  if (tr > 1.0 + 1e-9 || tr < 1.0 - leak_tol) {
    throw ValidationError("joint density trace " + std::to_string(tr) + " outside tolerance");
  }
}

std::vector<double> pauli_z_eigenvalues(std::size_t n_qubits, std::size_t target) {
  if (target >= n_qubits) throw ValidationError("target qubit out of range");
  std::vector<double> lambda(std::size_t{1} << n_qubits);
  for (std::size_t v = 0; v < lambda.size(); ++v) lambda[v] = BasisIndex(n_qubits, v).z(target);
  return lambda;
}

JointFockState integrate(JointFockState rho0, const LindbladConfig& config,
                         const std::vector<double>& lambda) {
  config.validate();
  if (config.n_max != rho0.n_max()) throw ValidationError("config n_max does not match the state");
  if (lambda.size() != rho0.qubit_dim()) throw ValidationError("lambda size does not match the register");
  if (config.t == 0.0) return rho0;

  const LindbladRhs rhs(rho0.n_max(), rho0.qubit_dim(), config.chi, config.gamma, lambda);
  const Matrix& start = rho0.rho();
  OdeState x(start.data(), start.data() + start.size());

  auto stepper = odeint::make_controlled(config.abs_tol, config.rel_tol,
                                         odeint::runge_kutta_dopri5<OdeState>());
  double t = 0.0;
  double dt = std::min(config.dt_initial, config.t);
  const double dt_floor = 1e-14 * std::max(config.t, 1.0);
  std::size_t steps = 0;
  while (t < config.t) {
    if (++steps > kMaxSteps) throw NumericalError("integration exceeded the step budget");
    const double remaining = config.t - t;
    const bool last = dt >= remaining;
    double trial = last ? remaining : dt;
    if (stepper.try_step(rhs, x, t, trial) == odeint::success) {
      if (last) t = config.t;  // avoid a sliver step from rounding
      dt = std::max(trial, dt);
    } else {
      dt = trial;
    }
    if (dt < dt_floor) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " (dt = " << dt << ")";
      throw NumericalError(msg.str());
    }
  }

  Matrix out = Eigen::Map<const Matrix>(x.data(), start.rows(), start.cols());
  out = 0.5 * (out + out.adjoint()).eval();
  JointFockState result(rho0.n_qubits(), rho0.n_max(), std::move(out));
  const double top = result.top_level_population();
  if (top > kLeakTolerance) {
    std::ostringstream msg;
    msg << "truncation leak: top Fock level holds " << top << " (n_max = " << result.n_max() << ")";
    throw NumericalError(msg.str());
  }
  result.validate(kLeakTolerance);
  return result;
}

JointFockState fock_displacement(JointFockState state, const Displace& step) {
  const Matrix a = annihilation(state.n_max());
  const Matrix gen = step.beta * a.adjoint() - std::conj(step.beta) * a;
  const Matrix up = gen.exp();
  std::vector<Matrix> unitaries(state.qubit_dim(), up);
  if (step.target) {
    const Matrix down = (-gen).exp();
    const auto z = pauli_z_eigenvalues(state.n_qubits(), *step.target);
    for (std::size_t v = 0; v < z.size(); ++v) {
      if (z[v] < 0) unitaries[v] = down;
    }
  }
  return apply_block_unitaries(std::move(state), unitaries);
}

JointFockState fock_rotation(JointFockState state, const Rotate& step) {
  const auto z = pauli_z_eigenvalues(state.n_qubits(), step.target);
  const auto n = static_cast<Eigen::Index>(state.n_max());
  std::vector<Matrix> unitaries;
  unitaries.reserve(z.size());
  for (double zv : z) {
    Matrix u = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      u(k, k) = std::exp(cplx{0.0, step.theta * zv * static_cast<double>(k)});
    }
    unitaries.push_back(std::move(u));
  }
  return apply_block_unitaries(std::move(state), unitaries);
}

JointFockState fock_loss(JointFockState state, const Loss& step, double rel_tol) {
  if (!(step.l >= 0.0)) throw ValidationError("loss l must be >= 0");
  LindbladConfig cfg;
  cfg.n_max = state.n_max();
  cfg.gamma = 1.0;
  cfg.t = step.l;
  cfg.rel_tol = rel_tol;
  const std::vector<double> lambda(state.qubit_dim(), 0.0);
  return integrate(std::move(state), cfg, lambda);
}

JointFockState fock_interaction(JointFockState state, const Interact& step, double rel_tol) {
  step.coupling.validate();
  LindbladConfig cfg;
  cfg.n_max = state.n_max();
  cfg.chi = step.coupling.chi;
  cfg.gamma = step.coupling.gamma;
  cfg.t = step.coupling.t;
  cfg.rel_tol = rel_tol;
  const auto lambda = pauli_z_eigenvalues(state.n_qubits(), step.target);
  return integrate(std::move(state), cfg, lambda);
}

JointFockState fock_step(JointFockState state, const Step& step, double rel_tol) {
  return std::visit(
      [&](const auto& s) -> JointFockState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Displace>) return fock_displacement(std::move(state), s);
        else if constexpr (std::is_same_v<T, Rotate>) return fock_rotation(std::move(state), s);
        else if constexpr (std::is_same_v<T, Loss>) return fock_loss(std::move(state), s, rel_tol);
        else return fock_interaction(std::move(state), s, rel_tol);
      },
      step);
}

OracleComparison compare_with_engine(const Sequence& steps, const Matrix& qubit_density,
                                     cplx probe_amp, double rel_tol) {
  HybridState engine = new_product_state(qubit_density, probe_amp);
  check_sequence(steps, engine.n_qubits());

  // Engine first: it is cheap and fixes the largest amplitude in play.
  OracleComparison out;
  out.max_amplitude = engine.max_amplitude();
  check_amplitude(out.max_amplitude, 0);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    engine = apply_step(std::move(engine), steps[i]);
    out.max_amplitude = std::max(out.max_amplitude, engine.max_amplitude());
    check_amplitude(engine.max_amplitude(), i);
  }
  out.engine = reduce_qubits(engine);
  out.n_max = required_truncation(out.max_amplitude);

  JointFockState fock = JointFockState::product(qubit_density, probe_amp, out.n_max);
  for (const auto& step : steps) {
    fock = fock_step(std::move(fock), step, rel_tol);
    out.max_top_population = std::max(out.max_top_population, fock.top_level_population());
  }
  out.oracle = fock.reduce_qubits();
  out.max_deviation = (out.engine - out.oracle).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace qubus
