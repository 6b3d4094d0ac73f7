#include "qubus/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qubus/channels.hpp"
#include "qubus/error.hpp"

namespace qubus {

namespace {

constexpr double kEigenFloor = 1e-12;

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd w = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * w.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

TwoQubitDensity orthogonalize(double alpha, double chi, double gamma, double t) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be real and > 0");
  const CouplingSpec spec{chi, gamma, t};
  spec.validate();
  const cplx zeta01 = coherence_parameter(alpha, spec, EigenvaluePair::pauli_z(0, 1));
  const cplx zeta10 = std::conj(zeta01);
  // |<alpha_0|alpha_1>| = exp(-alpha^2 e^{-2 gamma t} (1 - cos 2 chi t)).
  const double s = std::sin(chi * t);
  const double delta = std::exp(-alpha * alpha * std::exp(-2.0 * gamma * t) * 2.0 * s * s);
  const double a = std::sqrt(0.5 * (1.0 + delta));
  // 1 - delta via expm1 so b stays accurate when the branches barely separate.
  const double b = std::sqrt(-0.5 * std::expm1(-alpha * alpha * std::exp(-2.0 * gamma * t) * 2.0 * s * s));
  const double aa = a * a;
  const double ab = a * b;
  const double bb = b * b;
  TwoQubitDensity rho;
  rho << aa, ab, zeta01 * aa, -zeta01 * ab,
         ab, bb, zeta01 * ab, -zeta01 * bb,
         zeta10 * aa, zeta10 * ab, aa, -ab,
         -zeta10 * ab, -zeta10 * bb, -ab, bb;
  return 0.5 * rho;
}

double concurrence(const TwoQubitDensity& rho) {
  validate_qubit_density(rho, 1e-9);
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  // Y (x) Y = antidiagonal (-1, 1, 1, -1).
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  // The Wootters lambdas are the singular values of sqrt(rho) YY conj(sqrt(rho)),
  // which avoids taking square roots of eigenvalues at rounding level.
  const Eigen::MatrixXcd root = hermitian_sqrt(rho);
  const Eigen::MatrixXcd m = root * yy * root.conjugate();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  Eigen::VectorXd lam = svd.singularValues();
  std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
  const double c = lam(0) - lam(1) - lam(2) - lam(3);
  return std::clamp(c, 0.0, 1.0);
}

double von_neumann_entropy(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = solver.eigenvalues()(i);
    if (p > kEigenFloor) s -= p * std::log2(p);
  }
  return std::max(0.0, s);
}

double fidelity_pure(const Matrix& rho, const Vector& target) {
  if (rho.rows() != rho.cols() || rho.rows() != target.size()) {
    throw ValidationError("target and density matrix dimensions differ");
  }
  if (std::abs(target.squaredNorm() - 1.0) > 1e-9) throw ValidationError("target is not normalized");
  const cplx f = target.dot(rho * target);
  return std::clamp(f.real(), 0.0, 1.0);
}

std::vector<double> ScanGrid::points() const {
  if (!(t_max > t_min) || t_min < 0.0 || (linear_points == 0 && log_points == 0)) {
    throw ValidationError("empty scan grid");
  }
  std::vector<double> pts;
  pts.reserve(linear_points + log_points);
  for (std::size_t i = 1; i <= linear_points; ++i) {
    pts.push_back(t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(linear_points));
  }
  const double lo = std::max(log_floor, t_min);
  if (log_points > 1 && lo > 0.0 && lo < t_max) {
    const double ratio = std::log(t_max / lo);
    for (std::size_t i = 0; i < log_points; ++i) {
      const double t = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(log_points - 1));
      if (t > t_min) pts.push_back(t);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.empty()) throw ValidationError("empty scan grid");
  return pts;
}

PeakReport peak_scan(double alpha, double gamma_over_chi, const ScanGrid& grid) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(gamma_over_chi >= 0.0)) throw ValidationError("gamma/chi must be >= 0");
  const std::vector<double> pts = grid.points();
  auto conc_at = [&](double t) { return concurrence(orthogonalize(alpha, 1.0, gamma_over_chi, t)); };

  std::size_t best = 0;
  double best_c = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double c = conc_at(pts[i]);
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }

  double lo = best == 0 ? std::max(grid.t_min, 0.5 * pts[0]) : pts[best - 1];
  double hi = best + 1 < pts.size() ? pts[best + 1] : pts[best];
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = conc_at(x1);
  double f2 = conc_at(x2);
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-6 * std::max(std::abs(hi), 1e-300); ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = conc_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = conc_at(x1);
    }
  }
  double t_star = 0.5 * (lo + hi);
  double c_star = conc_at(t_star);
  if (c_star < best_c) {
    t_star = pts[best];
    c_star = best_c;
  }
  PeakReport report;
  report.t_star = t_star;
  report.c_max = c_star;
  report.entropy_at_peak = von_neumann_entropy(orthogonalize(alpha, 1.0, gamma_over_chi, t_star));
  return report;
}

}  // namespace qubus
