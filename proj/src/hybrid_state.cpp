#include "qubus/hybrid_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qubus/error.hpp"

namespace qubus {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t log2_size(Eigen::Index n) {
  std::size_t k = 0;
  while ((Eigen::Index{1} << k) < n) ++k;
  return k;
}

std::string pair_label(const BasisIndex& ket, const BasisIndex& bra) {
  return "(" + ket.label() + "," + bra.label() + ")";
}

}  // namespace

BasisIndex::BasisIndex(std::size_t n_qubits, std::size_t code) : n_qubits_(n_qubits), code_(code) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw ValidationError("register size must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  if (code >= (std::size_t{1} << n_qubits)) {
    throw ValidationError("basis code " + std::to_string(code) + " out of range");
  }
}

BasisIndex BasisIndex::from_bits(const std::vector<int>& bits) {
  std::size_t code = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw ValidationError("basis bits must be 0 or 1");
    code = (code << 1) | static_cast<std::size_t>(b);
  }
  return BasisIndex(bits.size(), code);
}

int BasisIndex::bit(std::size_t qubit) const {
  if (qubit >= n_qubits_) throw ValidationError("qubit index out of range");
  return static_cast<int>((code_ >> (n_qubits_ - 1 - qubit)) & 1U);
}

std::vector<int> BasisIndex::bits() const {
  std::vector<int> out(n_qubits_);
  for (std::size_t k = 0; k < n_qubits_; ++k) out[k] = bit(k);
  return out;
}

std::string BasisIndex::label() const {
  std::string s;
  for (int b : bits()) s.push_back(b ? '1' : '0');
  return s;
}

HybridState::HybridState(std::size_t n_qubits, std::vector<Branch> branches)
    : n_qubits_(n_qubits), branches_(std::move(branches)) {
  if (n_qubits == 0 || n_qubits > kMaxQubits) {
    throw ValidationError("register size must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  const std::size_t d = dim();
  if (branches_.size() != d * d) throw ValidationError("branch table must hold 4^n entries");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Branch& b = branches_[i * d + j];
      if (b.ket.code() != i || b.bra.code() != j || b.ket.size() != n_qubits ||
          b.bra.size() != n_qubits) {
        throw ValidationError("branch table is not keyed by (ket, bra)");
      }
    }
  }
}

const Branch& HybridState::branch(std::size_t ket, std::size_t bra) const {
  return branches_.at(ket * dim() + bra);
}

Branch& HybridState::branch(std::size_t ket, std::size_t bra) {
  return branches_.at(ket * dim() + bra);
}

void HybridState::validate(double tol) const {
  const std::size_t d = dim();
  cplx trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const Branch& diag = branch(i, i);
    if (!std::isfinite(std::abs(diag.coeff()))) throw ValidationError("non-finite coefficient");
    if (std::abs(diag.ket_amp - diag.bra_amp) > tol) {
      throw ValidationError("diagonal branch " + pair_label(diag.ket, diag.bra) +
                            " has ket_amp != bra_amp");
    }
    trace += diag.coeff();
    for (std::size_t j = i + 1; j < d; ++j) {
      const Branch& up = branch(i, j);
      const Branch& lo = branch(j, i);
      if (std::abs(up.coeff() - std::conj(lo.coeff())) > tol) {
        throw ValidationError("Hermiticity violated at " + pair_label(up.ket, up.bra));
      }
      if (std::abs(up.ket_amp - lo.bra_amp) > tol || std::abs(up.bra_amp - lo.ket_amp) > tol) {
        throw ValidationError("amplitudes not conjugation-consistent at " +
                              pair_label(up.ket, up.bra));
      }
    }
  }
  if (std::abs(trace - 1.0) > tol) {
    std::ostringstream os;
    os << "unit trace violated: trace = " << trace;
    throw ValidationError(os.str());
  }
}

double HybridState::probe_spread() const {
  double worst = 0.0;
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      worst = std::max(worst, std::abs(branch(i, i).ket_amp - branch(j, j).ket_amp));
    }
  }
  for (const Branch& b : branches_) worst = std::max(worst, std::abs(b.ket_amp - b.bra_amp));
  return worst;
}

double HybridState::max_amplitude() const {
  double worst = 0.0;
  for (const Branch& b : branches_) {
    worst = std::max({worst, std::abs(b.ket_amp), std::abs(b.bra_amp)});
  }
  return worst;
}

cplx log_overlap(cplx bra, cplx ket) {
  return -0.5 * std::norm(ket) - 0.5 * std::norm(bra) + std::conj(bra) * ket;
}

DephasingKernel::DephasingKernel(Matrix log_values) : n_qubits_(0), log_values_(std::move(log_values)) {
  if (log_values_.rows() != log_values_.cols() || !is_power_of_two(log_values_.rows()) ||
      log_values_.rows() < 2) {
    throw ValidationError("kernel must be 2^n x 2^n with n >= 1");
  }
  n_qubits_ = log2_size(log_values_.rows());
  if (n_qubits_ > kMaxQubits) throw ValidationError("kernel register too large");
}

DephasingKernel DephasingKernel::identity(std::size_t n_qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  return DephasingKernel(Matrix::Zero(d, d));
}

Matrix DephasingKernel::values() const { return log_values_.array().exp().matrix(); }

double DephasingKernel::min_eigenvalue() const {
  Matrix g = values();
  // Symmetrize away rounding so the Hermitian solver sees an exactly Hermitian input.
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DephasingKernel::validate(double psd_floor, double tol) const {
  const Matrix g = values();
  const Eigen::Index d = g.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(g(i, i) - 1.0) > tol) throw ValidationError("kernel diagonal is not 1");
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(g(i, j) - std::conj(g(j, i))) > tol * std::max(1.0, std::abs(g(i, j)))) {
        throw ValidationError("kernel is not Hermitian");
      }
      if (std::abs(g(i, j)) > 1.0 + tol) throw ValidationError("kernel entry exceeds 1 in modulus");
    }
  }
  const double lo = min_eigenvalue();
  if (lo < psd_floor) {
    std::ostringstream os;
    os << "kernel is not positive semidefinite: min eigenvalue " << lo;
    throw ValidationError(os.str());
  }
}

DephasingKernel DephasingKernel::then(const DephasingKernel& other) const {
  if (other.dim() != dim()) throw ValidationError("kernel dimension mismatch");
  return DephasingKernel(log_values_ + other.log_values_);
}

void validate_qubit_density(const Matrix& rho, double tol) {
  if (rho.rows() != rho.cols() || !is_power_of_two(rho.rows()) || rho.rows() < 2) {
    throw ValidationError("density matrix must be 2^n x 2^n with n >= 1");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("density matrix is not Hermitian");
  }
  const cplx tr = rho.trace();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "density matrix trace is " << tr.real() << ", expected 1";
    throw ValidationError(os.str());
  }
  Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol) {
    throw ValidationError("density matrix is not positive semidefinite");
  }
}

HybridState new_product_state(const Matrix& qubit_density, cplx probe_amp) {
  validate_qubit_density(qubit_density);
  const std::size_t n = log2_size(qubit_density.rows());
  if (n > kMaxQubits) throw ValidationError("register too large for the branch engine");
  const std::size_t d = std::size_t{1} << n;
  std::vector<Branch> branches;
  branches.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      branches.push_back(Branch{BasisIndex(n, i), BasisIndex(n, j),
                                qubit_density(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)),
                                0.0, probe_amp, probe_amp});
    }
  }
  return HybridState(n, std::move(branches));
}

Matrix reduce_qubits(const HybridState& state) {
  const auto d = static_cast<Eigen::Index>(state.dim());
  Matrix rho(d, d);
  for (const Branch& b : state.branches()) {
    rho(static_cast<Eigen::Index>(b.ket.code()), static_cast<Eigen::Index>(b.bra.code())) =
        b.prefactor * std::exp(b.log_gain + log_overlap(b.bra_amp, b.ket_amp));
  }
  return rho;
}

Matrix apply_kernel(const Matrix& density, const DephasingKernel& kernel) {
  if (density.rows() != density.cols() ||
      density.rows() != static_cast<Eigen::Index>(kernel.dim())) {
    throw ValidationError("kernel and density matrix dimensions differ");
  }
  return density.cwiseProduct(kernel.values());
}

DephasingKernel accumulated_kernel(const HybridState& state) {
  const auto d = static_cast<Eigen::Index>(state.dim());
  Matrix log_g(d, d);
  for (const Branch& b : state.branches()) {
    log_g(static_cast<Eigen::Index>(b.ket.code()), static_cast<Eigen::Index>(b.bra.code())) =
        b.log_gain;
  }
  return DephasingKernel(std::move(log_g));
}

Matrix product_density(const std::string& labels) {
  if (labels.empty() || labels.size() > kMaxQubits) {
    throw ValidationError("product state needs 1.." + std::to_string(kMaxQubits) + " labels");
  }
  Vector psi = Vector::Ones(1);
  const double h = 1.0 / std::sqrt(2.0);
  for (char c : labels) {
    Vector q(2);
    switch (c) {
      case '0': q << 1.0, 0.0; break;
      case '1': q << 0.0, 1.0; break;
      case '+': q << h, h; break;
      case '-': q << h, -h; break;
      default: throw ValidationError(std::string("unknown qubit label '") + c + "'");
    }
    Vector next(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next(2 * i) = psi(i) * q(0);
      next(2 * i + 1) = psi(i) * q(1);
    }
    psi = next;
  }
  return psi * psi.adjoint();
}

}  // namespace qubus
