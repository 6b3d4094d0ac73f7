#include "qubus/channels.hpp"

#include <cmath>
#include <string>

#include "qubus/detail/complex_math.hpp"
#include "qubus/error.hpp"

namespace qubus {

namespace {

constexpr cplx kI{0.0, 1.0};

// Below this the damping rate is treated as exactly zero (unitary limit).
constexpr double kLosslessGamma = 1e-300;

void check_target(std::size_t target, std::size_t n_qubits) {
  if (target >= n_qubits) {
    throw ValidationError("target qubit " + std::to_string(target) + " out of range for " +
                          std::to_string(n_qubits) + " qubits");
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void CouplingSpec::validate() const {
  if (!std::isfinite(chi)) throw ValidationError("chi must be finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t must be >= 0");
}

cplx interaction_log_factor(cplx ket_amp, cplx bra_amp, const CouplingSpec& spec,
                            EigenvaluePair lambda) {
  spec.validate();
  if (spec.gamma < kLosslessGamma) return 0.0;
  const double g = spec.gamma;
  const double x = 2.0 * g * spec.t;
  const cplx z = cplx(-2.0 * g, spec.chi * lambda.delta()) * spec.t;
  // Jump term integrated along the two damped, rotating amplitudes, minus the
  // renormalization 1 - e^{-2 gamma t} = x phi1(-x) of the coherent states.
  // Both are O(|amp|^2 t), so the mean weight is carried through phi1_diff
  // and only the amplitude mismatch multiplies phi1 itself.
  const double mean = 0.5 * (std::norm(ket_amp) + std::norm(bra_amp));
  const cplx mismatch(-0.5 * std::norm(ket_amp - bra_amp), std::imag(ket_amp * std::conj(bra_amp)));
  return x * (mismatch * detail::phi1(z) + mean * detail::phi1_diff(cplx(-x, 0.0), z));
}

cplx coherence_exponent(cplx alpha, const CouplingSpec& spec, EigenvaluePair lambda) {
  if (lambda.ket == lambda.bra) {
    spec.validate();
    return 0.0;
  }
  return interaction_log_factor(alpha, alpha, spec, lambda);
}

cplx coherence_parameter(cplx alpha, const CouplingSpec& spec, EigenvaluePair lambda) {
  return std::exp(coherence_exponent(alpha, spec, lambda));
}

double coherence_limit(cplx alpha, double gamma_over_chi, double delta) {
  if (!(gamma_over_chi > 0.0)) throw ValidationError("gamma/chi must be > 0");
  const double d2 = delta * delta;
  if (d2 == 0.0) return 1.0;
  return std::exp(-std::norm(alpha) * d2 / (4.0 * gamma_over_chi * gamma_over_chi + d2));
}

CoherenceSplit coherence_split(cplx alpha, const CouplingSpec& spec, int ket_bit, int bra_bit) {
  spec.validate();
  const double zn = 1.0 - 2.0 * ket_bit;
  const double zm = 1.0 - 2.0 * bra_bit;
  const double g = spec.gamma;
  const double c = spec.chi;
  if (g < kLosslessGamma || zn == zm) return {};
  // Both brackets cancel down to O(t^3) at short times; with |alpha|^2 up to
  // 1e8 that costs several digits, so they are evaluated in long double.
  using ld = long double;
  const ld a2 = std::norm(alpha);
  const ld gl = g, cl = c, tl = spec.t;
  const ld e = std::exp(-2.0L * gl * tl);
  const ld lost = -std::expm1(-2.0L * gl * tl);
  const ld ct = cl * tl;
  const ld s = std::sin(ct);
  const ld denom = 2.0L * (gl * gl + cl * cl);
  CoherenceSplit out;
  out.real_part = static_cast<double>(
      -a2 / denom * (cl * cl * lost - 2.0L * gl * gl * e * s * s - cl * gl * e * std::sin(2.0L * ct)) *
      (1.0 - zn * zm));
  // 1 - e cos(2ct) written as lost + 2 e sin^2(ct) to keep precision at small t.
  out.imag_part = static_cast<double>(
      gl * a2 / denom * (cl * (lost + 2.0L * e * s * s) - gl * e * std::sin(2.0L * ct)) * (zn - zm));
  return out;
}

double coherence_split_limit(cplx alpha, double gamma_over_chi, int ket_bit, int bra_bit) {
  if (!(gamma_over_chi > 0.0)) throw ValidationError("gamma/chi must be > 0");
  const double zn = 1.0 - 2.0 * ket_bit;
  const double zm = 1.0 - 2.0 * bra_bit;
  return -std::norm(alpha) / (2.0 * (1.0 + gamma_over_chi * gamma_over_chi)) * (1.0 - zn * zm);
}

HybridState apply_interaction(HybridState state, const Interact& step) {
  check_target(step.target, state.n_qubits());
  const CouplingSpec& spec = step.coupling;
  spec.validate();
  for (Branch& b : state.branches()) {
    const auto lambda =
        EigenvaluePair::pauli_z(b.ket.bit(step.target), b.bra.bit(step.target));
    b.log_gain += interaction_log_factor(b.ket_amp, b.bra_amp, spec, lambda);
    b.ket_amp *= std::exp(cplx(-spec.gamma, lambda.ket * spec.chi) * spec.t);
    b.bra_amp *= std::exp(cplx(-spec.gamma, lambda.bra * spec.chi) * spec.t);
  }
  return state;
}

HybridState apply_displacement(HybridState state, const Displace& step) {
  if (step.target) check_target(*step.target, state.n_qubits());
  for (Branch& b : state.branches()) {
    const double z_ket = step.target ? b.ket.z(*step.target) : 1.0;
    const double z_bra = step.target ? b.bra.z(*step.target) : 1.0;
    const cplx shift_ket = step.beta * z_ket;
    const cplx shift_bra = step.beta * z_bra;
    // D(s)|a> = exp(i Im(conj(a) s)) |a + s>; the bra side takes the conjugate.
    const double phase =
        std::imag(std::conj(b.ket_amp) * shift_ket) - std::imag(std::conj(b.bra_amp) * shift_bra);
    b.log_gain += kI * phase;
    b.ket_amp += shift_ket;
    b.bra_amp += shift_bra;
  }
  return state;
}

HybridState apply_rotation(HybridState state, const Rotate& step) {
  check_target(step.target, state.n_qubits());
  for (Branch& b : state.branches()) {
    b.ket_amp *= std::exp(kI * (step.theta * b.ket.z(step.target)));
    b.bra_amp *= std::exp(kI * (step.theta * b.bra.z(step.target)));
  }
  return state;
}

HybridState apply_loss(HybridState state, const Loss& step) {
  if (!(step.l >= 0.0) || !std::isfinite(step.l)) throw ValidationError("loss l must be >= 0");
  const double eta = -std::expm1(-2.0 * step.l);
  const double damp = std::exp(-step.l);
  for (Branch& b : state.branches()) {
    b.log_gain += eta * log_overlap(b.bra_amp, b.ket_amp);
    b.ket_amp *= damp;
    b.bra_amp *= damp;
  }
  return state;
}

HybridState apply_step(HybridState state, const Step& step) {
  return std::visit(
      Overloaded{
          [&](const Displace& s) { return apply_displacement(std::move(state), s); },
          [&](const Rotate& s) { return apply_rotation(std::move(state), s); },
          [&](const Loss& s) { return apply_loss(std::move(state), s); },
          [&](const Interact& s) { return apply_interaction(std::move(state), s); },
      },
      step);
}

void check_sequence(const Sequence& steps, std::size_t n_qubits) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    try {
      std::visit(Overloaded{
                     [&](const Displace& s) {
                       if (s.target) check_target(*s.target, n_qubits);
                       if (!std::isfinite(std::abs(s.beta))) {
                         throw ValidationError("displacement must be finite");
                       }
                     },
                     [&](const Rotate& s) {
                       check_target(s.target, n_qubits);
                       if (!std::isfinite(s.theta)) throw ValidationError("theta must be finite");
                     },
                     [&](const Loss& s) {
                       if (!(s.l >= 0.0) || !std::isfinite(s.l)) {
                         throw ValidationError("loss l must be >= 0");
                       }
                     },
                     [&](const Interact& s) {
                       check_target(s.target, n_qubits);
                       s.coupling.validate();
                     },
                 },
                 steps[i]);
    } catch (const StepError&) {
      throw;
    } catch (const ValidationError& e) {
      throw StepError(i, e.what());
    }
  }
}

HybridState run_sequence(HybridState state, const Sequence& steps) {
  check_sequence(steps, state.n_qubits());
  for (const Step& step : steps) state = apply_step(std::move(state), step);
  return state;
}

Matrix PhaseFlipChannel::apply(const Matrix& rho, std::size_t target) const {
  if (rho.rows() != rho.cols() || rho.rows() < 2) throw ValidationError("bad density matrix");
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  check_target(target, n);
  Matrix out = rho;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      const double zi = BasisIndex(n, static_cast<std::size_t>(i)).z(target);
      const double zj = BasisIndex(n, static_cast<std::size_t>(j)).z(target);
      out(i, j) = (p_keep + p_flip * zi * zj) * rho(i, j);
    }
  }
  return out;
}

PhaseFlipChannel phase_flip_decompose(double epsilon) {
  if (!(epsilon >= 0.0)) throw ValidationError("dephasing exponent must be >= 0");
  PhaseFlipChannel ch;
  ch.epsilon = epsilon;
  const double decay = std::exp(-2.0 * epsilon);
  ch.p_keep = 0.5 * (1.0 + decay);
  ch.p_flip = -0.5 * std::expm1(-2.0 * epsilon);
  return ch;
}

}  // namespace qubus
