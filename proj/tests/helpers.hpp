#pragma once

#include <complex>
#include <random>

#include "qubus/hybrid_state.hpp"

namespace qubus::testing {

inline double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Matrix random_density(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx{n(rng), n(rng)};
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline Matrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx{n(rng), n(rng)};
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return s.eigenvalues().minCoeff();
}

}  // namespace qubus::testing
