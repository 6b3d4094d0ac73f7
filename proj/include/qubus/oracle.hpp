#pragma once

#include <cstddef>
#include <vector>

#include "qubus/channels.hpp"
#include "qubus/hybrid_state.hpp"

namespace qubus {

/// Controls for one master-equation integration in a truncated Fock space.
struct LindbladConfig {
  std::size_t n_max = 0;  ///< Fock levels kept, |0> .. |n_max - 1>
  double chi = 0.0;
  double gamma = 0.0;
  double t = 0.0;
  double dt_initial = 1e-3;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;

  void validate() const;
};

/// ceil(|alpha|^2 + 10|alpha| + 20).
std::size_t required_truncation(double max_amplitude);

/// Largest amplitude the oracle accepts.
inline constexpr double kOracleAmplitudeLimit = 3.0;

/// <n|alpha> for n < n_max. Throws ValidationError, citing
/// required_truncation(|alpha|), when the discarded Poisson tail exceeds 1e-12.
Vector coherent_vector(cplx alpha, std::size_t n_max);

/// Density matrix of n qubits and one truncated mode. Row index is
/// qubit_code * n_max + fock_level.
class JointFockState {
 public:
  JointFockState(std::size_t n_qubits, std::size_t n_max, Matrix rho);

  static JointFockState product(const Matrix& qubit_density, cplx probe_amp, std::size_t n_max);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t qubit_dim() const noexcept { return std::size_t{1} << n_qubits_; }
  const Matrix& rho() const noexcept { return rho_; }
  Matrix& rho() noexcept { return rho_; }

  Matrix reduce_qubits() const;
  double trace() const;
  /// Population of the highest kept Fock level, summed over qubit states.
  double top_level_population() const;

  /// Hermitian within 1e-9 and trace in [1 - leak_tol, 1 + 1e-9].
  void validate(double leak_tol = 1e-6) const;

 private:
  std::size_t n_qubits_;
  std::size_t n_max_;
  Matrix rho_;
};

/// Z eigenvalue of `target` for every qubit basis state.
std::vector<double> pauli_z_eigenvalues(std::size_t n_qubits, std::size_t target);

/// Evolves under H = -chi a^dag a Lambda with zero-temperature damping gamma
/// for time config.t. lambda[v] is the eigenvalue of Lambda on qubit basis
/// state v. Throws NumericalError on step-size underflow or when more than
/// 1e-6 of the population reaches the top Fock level.
JointFockState integrate(JointFockState rho0, const LindbladConfig& config,
                         const std::vector<double>& lambda);

JointFockState fock_displacement(JointFockState state, const Displace& step);
JointFockState fock_rotation(JointFockState state, const Rotate& step);
JointFockState fock_loss(JointFockState state, const Loss& step, double rel_tol = 1e-10);
JointFockState fock_interaction(JointFockState state, const Interact& step, double rel_tol = 1e-10);
JointFockState fock_step(JointFockState state, const Step& step, double rel_tol = 1e-10);

struct OracleComparison {
  double max_deviation = 0.0;
  std::size_t n_max = 0;
  double max_amplitude = 0.0;
  double max_top_population = 0.0;
  Matrix engine;
  Matrix oracle;
};

/// Runs the branch engine and the Fock evolution step by step from
/// qubit_density (x) |probe_amp> and compares the reduced qubit states.
/// Throws ValidationError when an amplitude along the way exceeds
/// kOracleAmplitudeLimit.
OracleComparison compare_with_engine(const Sequence& steps, const Matrix& qubit_density,
                                     cplx probe_amp = 0.0, double rel_tol = 1e-10);

}  // namespace qubus
