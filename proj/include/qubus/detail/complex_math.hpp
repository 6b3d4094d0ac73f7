#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace qubus::detail {

/// exp(z) - 1 without cancellation for small |z|.
inline std::complex<double> expm1(std::complex<double> z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// (exp(z) - 1) / z, continuous at z = 0.
inline std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 1e-5) {
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  }
  return expm1(z) / z;
}

/// phi1(z1) - phi1(z0). Near the origin the difference is summed as
/// (z1 - z0) * sum_k h_k(z0, z1) / (k + 2)!, h_k the complete homogeneous
/// polynomial, so close arguments do not cancel.
inline std::complex<double> phi1_diff(std::complex<double> z0, std::complex<double> z1) {
  if (std::max(std::abs(z0), std::abs(z1)) > 2.0) return phi1(z1) - phi1(z0);
  std::complex<double> h = 1.0, z0k = 1.0, sum = 0.0;
  double fact = 2.0;
  for (int k = 0; k < 60; ++k) {
    const std::complex<double> term = h / fact;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    z0k *= z0;
    h = z1 * h + z0k;
    fact *= k + 3;
  }
  return (z1 - z0) * sum;
}

}  // namespace qubus::detail
