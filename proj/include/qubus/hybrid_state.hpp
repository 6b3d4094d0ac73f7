#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qubus {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest register the branch engine accepts (4^n branches).
inline constexpr std::size_t kMaxQubits = 8;

/// Computational-basis label of an n-qubit register. Qubit 0 is the most
/// significant bit of the matrix index, so for two qubits the ordering is
/// |00>, |01>, |10>, |11> with qubit 0 = a and qubit 1 = b.
class BasisIndex {
 public:
  BasisIndex(std::size_t n_qubits, std::size_t code);

  static BasisIndex from_bits(const std::vector<int>& bits);

  std::size_t code() const noexcept { return code_; }
  std::size_t size() const noexcept { return n_qubits_; }

  int bit(std::size_t qubit) const;
  /// Z eigenvalue (-1)^bit of the given qubit.
  int z(std::size_t qubit) const { return 1 - 2 * bit(qubit); }

  std::vector<int> bits() const;
  std::string label() const;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;

 private:
  std::size_t n_qubits_;
  std::size_t code_;
};

/// One term c |ket><bra| (x) |ket_amp><bra_amp|.
///
/// The coefficient is stored as prefactor * exp(log_gain): channel steps only
/// ever add to log_gain, which keeps large dephasing exponents and unwrapped
/// phases exact until the value is needed.
struct Branch {
  BasisIndex ket;
  BasisIndex bra;
  cplx prefactor;
  cplx log_gain;
  cplx ket_amp;
  cplx bra_amp;

  cplx coeff() const { return prefactor * std::exp(log_gain); }
};

/// An n-qubit register jointly with one coherent-state probe, held as the
/// full set of 4^n branches keyed by (ket, bra).
class HybridState {
 public:
  HybridState(std::size_t n_qubits, std::vector<Branch> branches);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return std::size_t{1} << n_qubits_; }
  std::size_t branch_count() const noexcept { return branches_.size(); }

  const Branch& branch(std::size_t ket, std::size_t bra) const;
  Branch& branch(std::size_t ket, std::size_t bra);

  const std::vector<Branch>& branches() const noexcept { return branches_; }
  std::vector<Branch>& branches() noexcept { return branches_; }

  /// Throws ValidationError naming the first violated invariant.
  void validate(double tol = 1e-9) const;

  /// Largest distance between any two probe amplitudes carried by the branches.
  /// Zero means the probe has factored out of the register.
  double probe_spread() const;

  /// Largest |amplitude| carried by any branch.
  double max_amplitude() const;

 private:
  std::size_t n_qubits_;
  std::vector<Branch> branches_;
};

/// ln <bra|ket> for coherent states: -|ket|^2/2 - |bra|^2/2 + conj(bra) ket.
cplx log_overlap(cplx bra, cplx ket);
inline cplx overlap(cplx bra, cplx ket) { return std::exp(log_overlap(bra, ket)); }

/// Elementwise multiplier g(v, v') on a qubit density matrix, stored as ln g.
class DephasingKernel {
 public:
  explicit DephasingKernel(Matrix log_values);

  static DephasingKernel identity(std::size_t n_qubits);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(log_values_.rows()); }

  const Matrix& log_values() const noexcept { return log_values_; }
  Matrix values() const;
  cplx operator()(std::size_t ket, std::size_t bra) const {
    return std::exp(log_values_(static_cast<Eigen::Index>(ket), static_cast<Eigen::Index>(bra)));
  }

  double min_eigenvalue() const;

  /// Unit diagonal, Hermitian, |g| <= 1 and positive semidefinite; throws
  /// ValidationError otherwise.
  void validate(double psd_floor = -1e-10, double tol = 1e-12) const;

  /// Sequential composition (elementwise product).
  DephasingKernel then(const DephasingKernel& other) const;

 private:
  std::size_t n_qubits_;
  Matrix log_values_;
};

/// Validates a qubit density matrix (square, power-of-two size, Hermitian,
/// unit trace, positive semidefinite) within tol.
void validate_qubit_density(const Matrix& rho, double tol = 1e-9);

HybridState new_product_state(const Matrix& qubit_density, cplx probe_amp);

Matrix reduce_qubits(const HybridState& state);

Matrix apply_kernel(const Matrix& density, const DephasingKernel& kernel);

/// ln of the coefficient multiplier accumulated by each branch since the state
/// was created. This is the qubit channel of the sequence once the probe has
/// factored out.
DephasingKernel accumulated_kernel(const HybridState& state);

/// |psi><psi| for the product of single-qubit labels '0', '1', '+', '-'.
Matrix product_density(const std::string& labels);

}  // namespace qubus
