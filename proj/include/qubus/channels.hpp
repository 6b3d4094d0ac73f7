#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "qubus/error.hpp"
#include "qubus/hybrid_state.hpp"

namespace qubus {

/// Dispersive coupling H = -chi a^dag a Lambda acting for time t while the
/// probe decays at rate gamma.
struct CouplingSpec {
  double chi = 0.0;
  double gamma = 0.0;
  double t = 0.0;

  void validate() const;
};

/// Eigenvalues of Lambda on the ket and bra labels of a matrix element.
/// Z on a qubit gives (+1, -1) for (|0>, |1>); a number operator gives
/// arbitrary integers.
struct EigenvaluePair {
  double ket = 1.0;
  double bra = 1.0;

  static EigenvaluePair pauli_z(int ket_bit, int bra_bit) {
    return {1.0 - 2.0 * ket_bit, 1.0 - 2.0 * bra_bit};
  }
  double delta() const { return ket - bra; }
};

/// ln of the multiplier picked up by c |n><m| (x) |ket_amp><bra_amp| under the
/// damped dispersive evolution (amplitudes taken at the start of the interaction).
/// Reduces to the coherence-parameter exponent when ket_amp == bra_amp.
cplx interaction_log_factor(cplx ket_amp, cplx bra_amp, const CouplingSpec& spec,
                            EigenvaluePair lambda);

/// f_nm with zeta_nm = exp(f_nm) for a probe starting in |alpha>.
cplx coherence_exponent(cplx alpha, const CouplingSpec& spec, EigenvaluePair lambda);

/// zeta_nm. Exactly 1 for gamma = 0 or equal eigenvalues.
cplx coherence_parameter(cplx alpha, const CouplingSpec& spec, EigenvaluePair lambda);

/// |zeta_nm| as t -> infinity.
double coherence_limit(cplx alpha, double gamma_over_chi, double delta);

struct CoherenceSplit {
  double real_part = 0.0;  ///< dephasing exponent Re f_nm
  double imag_part = 0.0;  ///< known phase Im f_nm
};

/// Re and Im of f_nm for Lambda = Z written out in trigonometric form.
CoherenceSplit coherence_split(cplx alpha, const CouplingSpec& spec, int ket_bit, int bra_bit);

/// Re f_nm as t -> infinity for Lambda = Z.
double coherence_split_limit(cplx alpha, double gamma_over_chi, int ket_bit, int bra_bit);

// Sequence steps.

/// D(beta) if target is empty, otherwise D(beta Z_target).
struct Displace {
  std::optional<std::size_t> target;
  cplx beta;
};

/// R(theta Z_target) = exp(i theta a^dag a Z_target).
struct Rotate {
  std::size_t target = 0;
  double theta = 0.0;
};

/// Probe damping with amplitude factor exp(-l).
struct Loss {
  double l = 0.0;
};

/// Lossy dispersive interaction with Lambda = Z on target.
struct Interact {
  std::size_t target = 0;
  CouplingSpec coupling;
};

using Step = std::variant<Displace, Rotate, Loss, Interact>;
using Sequence = std::vector<Step>;

/// Thrown by run_sequence; index() is the 0-based position of the failing step.
class StepError : public ValidationError {
 public:
  StepError(std::size_t index, const std::string& what)
      : ValidationError("step " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

HybridState apply_interaction(HybridState state, const Interact& step);
HybridState apply_displacement(HybridState state, const Displace& step);
HybridState apply_rotation(HybridState state, const Rotate& step);
HybridState apply_loss(HybridState state, const Loss& step);
HybridState apply_step(HybridState state, const Step& step);

/// Throws StepError if any step does not fit the register; no step is applied
/// in that case.
void check_sequence(const Sequence& steps, std::size_t n_qubits);

HybridState run_sequence(HybridState state, const Sequence& steps);

/// rho -> p_keep rho + p_flip Z rho Z.
struct PhaseFlipChannel {
  double epsilon = 0.0;
  double p_keep = 1.0;
  double p_flip = 0.0;

  /// Applies the mixture on one qubit of a register density matrix.
  Matrix apply(const Matrix& rho, std::size_t target) const;
};

PhaseFlipChannel phase_flip_decompose(double epsilon);

}  // namespace qubus
