#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qubus/hybrid_state.hpp"

namespace qubus {

using TwoQubitDensity = Eigen::Matrix4cd;

/// Qubit (x) probe state after a lossy Z interaction on (|0>+|1>)/sqrt(2),
/// rewritten in the orthonormal basis {|0x>, |0y>, |1x>, |1y>} spanned by
/// the two probe branches. Alpha is real and positive.
TwoQubitDensity orthogonalize(double alpha, double chi, double gamma, double t);

/// Wootters concurrence. Throws ValidationError for non-physical input.
double concurrence(const TwoQubitDensity& rho);

/// Base-2 von Neumann entropy, eigenvalues below 1e-12 dropped.
double von_neumann_entropy(const Matrix& rho);

/// <phi| rho |phi> for a normalized target.
double fidelity_pure(const Matrix& rho, const Vector& target);

/// Scaled-time grid of a peak scan: the union of a uniform grid on (t_min, t_max]
/// and a log-spaced grid from log_floor to t_max.
struct ScanGrid {
  double t_min = 0.0;
  double t_max = 3.14159265358979323846;
  std::size_t linear_points = 2000;
  std::size_t log_points = 2000;
  double log_floor = 1e-8;

  std::vector<double> points() const;
};

struct PeakReport {
  double t_star = 0.0;  ///< chi t at maximum concurrence
  double c_max = 0.0;
  double entropy_at_peak = 0.0;
};

/// Maximum concurrence of orthogonalize(alpha, 1, gamma_over_chi, chi t) over
/// the grid, refined by golden-section search to relative time tolerance 1e-6.
PeakReport peak_scan(double alpha, double gamma_over_chi, const ScanGrid& grid = {});

}  // namespace qubus
