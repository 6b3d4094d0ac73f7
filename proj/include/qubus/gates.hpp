#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qubus/channels.hpp"
#include "qubus/hybrid_state.hpp"

namespace qubus {

// ---------------------------------------------------------------------------
// Conditional displacement built from rotations and unconditional displacements
// ---------------------------------------------------------------------------

/// D(a3) L R(-theta Z) L D(a2) L R(theta Z) L D(a1), applied right to left,
/// with every loss segment of strength l.
Sequence conditional_displacement_sequence(double alpha1, double alpha2, double alpha3,
                                           double theta, double l, std::size_t target = 0);

/// alpha3 that cancels the z-independent part of the final probe amplitude.
double disentangling_alpha3(double alpha1, double alpha2, double theta, double l);

struct CondDispReport {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double theta = 0.0;
  double l = 0.0;
  double eta = 0.0;

  cplx residual;        ///< z-independent part of the final probe amplitude
  cplx effective_beta;  ///< coefficient of z in the final probe amplitude

  double S = 0.0;          ///< closed-form dephasing coefficient
  double T = 0.0;          ///< closed-form phase coefficient (matches the engine)
  double T_printed = 0.0;  ///< phase coefficient as printed in the source formula
  double geo_phase = 0.0;  ///< displacement phase coefficient of (z - z')

  DephasingKernel kernel = DephasingKernel::identity(1);       ///< from the branch engine
  DephasingKernel closed_form = DephasingKernel::identity(1);  ///< from S, T, geo_phase

  double engine_dephasing = 0.0;  ///< -Re ln g(0,1) / 2, equals eta S
  double engine_phase = 0.0;      ///< Im ln g(0,1) / 2, equals geo_phase + eta T
  double closed_form_deviation = 0.0;  ///< max |ln g_engine - ln g_closed|
};

CondDispReport conditional_displacement(double alpha1, double alpha2, double alpha3, double theta,
                                        double l);

// ---------------------------------------------------------------------------
// CZ gate from four conditional displacements
// ---------------------------------------------------------------------------

/// D(-i b_b'' Z_b) L D(-b_a'' Z_a) L D(i b_b Z_b) L D(b_a Z_a), applied right to
/// left; the second pair is pre-scaled by e^{-2l} so the probe returns to its
/// starting point.
Sequence cz_sequence(double beta_a, double beta_b, double l, std::size_t qubit_a = 0,
                     std::size_t qubit_b = 1);

/// Second pass of the iterated gate: qubit a displaces along the imaginary axis
/// and b along the real axis, with b interacting first so that the geometric
/// phase keeps its sign while the two-qubit overlap term flips.
Sequence swapped_cz_sequence(double beta_a, double beta_b, double l, std::size_t qubit_a = 0,
                             std::size_t qubit_b = 1);

/// ln of the closed-form two-qubit kernel exp[i kappa (z_a z_b - z_a' z_b')] (xi1 xi2 xi3)^eta.
DephasingKernel cz_closed_form(double beta_a, double beta_b, double l);

/// ln of xi2^eta alone (the overlap term holding information on both qubits).
DephasingKernel cz_xi2_kernel(double beta_a, double beta_b, double l);

struct CZChannelReport {
  double beta_a = 0.0;
  double beta_b = 0.0;
  double l = 0.0;
  double eta = 0.0;
  double kappa = 0.0;

  DephasingKernel kernel = DephasingKernel::identity(2);       ///< from the branch engine
  DephasingKernel closed_form = DephasingKernel::identity(2);  ///< from the overlap formulas
  double closed_form_deviation = 0.0;
  double probe_spread = 0.0;

  double x0 = 0.0, x1 = 0.0, x2 = 0.0, x3 = 0.0;
  double c_plus = 0.0, c_minus = 0.0, s_plus = 0.0, s_minus = 0.0;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0, e3 = 0.0;

  double correlated_weight = 0.0;    ///< e^{-2 x3} c_-
  double uncorrelated_weight = 0.0;  ///< e^{-2 x3} (s_+ + s_-)
};

CZChannelReport cz_channel(double beta_a, double beta_b, double l);

/// c_+, c_-, s_+, s_- of exp[x3 (z_a + i z_b)(z_a' - i z_b')].
struct CrossTermCoefficients {
  double c_plus, c_minus, s_plus, s_minus;
};
CrossTermCoefficients cross_term_coefficients(double x3);

/// One term w L rho L^dag of an operator-sum map with diagonal L.
struct DiagonalKrausTerm {
  std::string name;
  double weight;
  Vector diagonal;
};

struct OperatorSum {
  std::vector<DiagonalKrausTerm> terms;

  Matrix apply(const Matrix& rho) const;
  double weight(const std::string& name) const;
};

/// Operator-sum form of xi2^eta over {I, Z_a, Z_b, K, K', K'^dag, J, J^dag}
/// with K = Z_a Z_b, K' = i + K and J = Z_a + i Z_b. When beta_b equals the
/// once-damped beta_a the Z_a, Z_b and K' weights vanish and only four terms
/// are returned.
OperatorSum channel_decomposition(const CZChannelReport& report);

/// First-order low-loss map rho + w J rho J^dag split into the part seen under
/// Z-syndrome measurement (rho + w Z_a rho Z_a + w Z_b rho Z_b) and the
/// unobservable cross terms i w (Z_b rho Z_a - Z_a rho Z_b), with w = eta beta^2.
struct LowLossMap {
  double identity = 1.0;
  double za_weight = 0.0;
  double zb_weight = 0.0;
  double cross_weight = 0.0;

  Matrix apply_observable(const Matrix& rho) const;
  Matrix apply_first_order(const Matrix& rho) const;
  Matrix cross_terms(const Matrix& rho) const;
};

LowLossMap low_loss_observable(double beta, double eta);
/// Uses beta^2 = (once-damped beta_a) * beta_b from the report.
LowLossMap low_loss_observable(const CZChannelReport& report, double eta);

/// Displacement amplitude giving a total conditional phase of pi/4 with loss l
/// per segment; iterated = true halves the phase of each of the two passes.
double calibrate_beta(double l, bool iterated = false);

/// Relative probe intensity lost over three equal segments, 1 - e^{-6 l}.
double l_tot_from_l(double l);
double l_from_l_tot(double l_tot);

// ---------------------------------------------------------------------------
// Diagonal-channel analysis
// ---------------------------------------------------------------------------

/// Process matrix chi_{PQ} of rho -> sum chi_{PQ} P rho Q over Z strings P, Q.
/// Index P is a bitmask using the same qubit ordering as BasisIndex.
Matrix diagonal_process_matrix(const DephasingKernel& kernel);

/// Probability that the given qubit carries a Z error, sum of chi_PP over P
/// acting with Z on that qubit.
double z_error_probability(const DephasingKernel& kernel, std::size_t qubit);

/// Removes exp[i kappa (z_a z_b - z_a' z_b')] from a two-qubit kernel.
DephasingKernel remove_conditional_phase(const DephasingKernel& kernel, double kappa);

/// Removes the known single-qubit phases exp[i phi_k (z_k - z_k')] (least-squares
/// projection of Im ln g onto each (z_k - z_k')).
DephasingKernel remove_single_qubit_phases(const DephasingKernel& kernel);

/// Coefficient x3 of the cross term i x3 (z_b z_a' - z_a z_b') in Im ln g.
double cross_term_exponent(const DephasingKernel& kernel);

/// e^{i pi Z_a Z_b / 4} |++>.
Vector ideal_cz_output();

struct IteratedCZReport {
  double beta_a = 0.0;
  double beta_b = 0.0;
  double l = 0.0;
  double eta = 0.0;
  double inter_sequence_loss = 0.0;
  double kappa_total = 0.0;

  DephasingKernel kernel = DephasingKernel::identity(2);        ///< both passes, engine
  DephasingKernel first_pass = DephasingKernel::identity(2);    ///< S alone, engine
  DephasingKernel second_pass = DephasingKernel::identity(2);   ///< swapped pass alone, engine
  DephasingKernel closed_form = DephasingKernel::identity(2);
  double closed_form_deviation = 0.0;
  double probe_spread = 0.0;

  double p_a = 0.0;  ///< extracted from the engine kernel
  double p_b = 0.0;
  double p_a_closed = 0.0;
  double p_b_closed = 0.0;

  double correlated_residual = 0.0;    ///< deviation of chi from an independent product
  double j_residual = 0.0;             ///< largest off-diagonal |chi_PQ|
  double factorization_residual = 0.0; ///< max |g - g_a g_b| after removing the phase
};

IteratedCZReport iterated_cz(double beta_a, double beta_b, double l,
                             double inter_sequence_loss = 0.0);

// ---------------------------------------------------------------------------
// Loss sweep
// ---------------------------------------------------------------------------

struct LossSweepRow {
  bool iterated = false;
  double l = 0.0;
  double l_tot = 0.0;
  double fidelity = 0.0;
  double concurrence = 0.0;
  double c_minus_norm = 0.0;
  double s_sum_norm = 0.0;
  double p_a = 0.0;
  double p_b = 0.0;
};

/// Calibrated gate at one loss value acting on |++><++|.
LossSweepRow loss_point(double l, bool iterated);

/// loss_point over a grid; rows in input order, computed on up to `jobs` threads.
std::vector<LossSweepRow> loss_sweep(const std::vector<double>& l_grid, bool iterated,
                                     std::size_t jobs = 1);

}  // namespace qubus
