#include "qubus/gates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qubus/error.hpp"
#include "qubus/measures.hpp"
#include "qubus/parallel.hpp"

namespace qubus {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

void check_loss(double l) {
  if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("loss l must be >= 0");
}

double eta_of(double l) { return -std::expm1(-2.0 * l); }

// z eigenvalues of qubits a (= 0) and b (= 1) for a two-qubit basis code.
int za_of(std::size_t code) { return (code & 2U) ? -1 : 1; }
int zb_of(std::size_t code) { return (code & 1U) ? -1 : 1; }

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

HybridState vacuum_plus_state(std::size_t n_qubits) {
  return new_product_state(product_density(std::string(n_qubits, '+')), 0.0);
}

}  // namespace

// --- conditional displacement ----------------------------------------------

Sequence conditional_displacement_sequence(double alpha1, double alpha2, double alpha3,
                                           double theta, double l, std::size_t target) {
  check_loss(l);
  // Listed in application order (rightmost operator first).
  return {
      Displace{std::nullopt, alpha1},
      Loss{l},
      Rotate{target, theta},
      Loss{l},
      Displace{std::nullopt, alpha2},
      Loss{l},
      Rotate{target, -theta},
      Loss{l},
      Displace{std::nullopt, alpha3},
  };
}

double disentangling_alpha3(double alpha1, double alpha2, double theta, double l) {
  check_loss(l);
  return -(alpha1 * std::exp(-4.0 * l) + alpha2 * std::exp(-2.0 * l) * std::cos(theta));
}

CondDispReport conditional_displacement(double alpha1, double alpha2, double alpha3, double theta,
                                        double l) {
  check_loss(l);
  CondDispReport r;
  r.alpha1 = alpha1;
  r.alpha2 = alpha2;
  r.alpha3 = alpha3;
  r.theta = theta;
  r.l = l;
  r.eta = eta_of(l);

  const double d = std::exp(-l);
  const double a1_1 = alpha1 * d;
  const double a1_2 = a1_1 * d;
  const double a1_3 = a1_2 * d;
  const double a2_1 = alpha2 * d;
  const double a2_2 = a2_1 * d;
  const double s = std::sin(theta);
  const double c = std::cos(theta);

  r.S = s * s * (a1_1 * a1_1 + a1_2 * a1_2 + a2_1 * a2_1);
  // Sum of the imaginary overlap exponents of the three non-trivial loss
  // segments. The third segment sees the rotation undone, which flips the
  // sign of its two contributions relative to the printed expression.
  r.T = s * (a1_2 * alpha2 - a1_3 * a2_1 + (a1_1 * a1_1 + a1_2 * a1_2 - a2_1 * a2_1) * c);
  r.T_printed = s * (a1_2 * alpha2 + a1_3 * a2_1 + (a1_1 * a1_1 + a1_2 * a1_2 + a2_1 * a2_1) * c);
  r.geo_phase = s * (a2_2 * alpha3 - a1_2 * alpha2);

  const HybridState out =
      run_sequence(vacuum_plus_state(1), conditional_displacement_sequence(alpha1, alpha2, alpha3, theta, l));
  const cplx amp_up = out.branch(0, 0).ket_amp;    // z = +1
  const cplx amp_down = out.branch(1, 1).ket_amp;  // z = -1
  r.residual = 0.5 * (amp_up + amp_down);
  r.effective_beta = 0.5 * (amp_up - amp_down);

  r.kernel = accumulated_kernel(out);
  Matrix closed(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double z = i == 0 ? 1.0 : -1.0;
      const double zp = j == 0 ? 1.0 : -1.0;
      closed(i, j) = -r.eta * r.S * (1.0 - z * zp) + kI * ((r.geo_phase + r.eta * r.T) * (z - zp));
    }
  }
  r.closed_form = DephasingKernel(closed);
  const cplx off = r.kernel.log_values()(0, 1);
  r.engine_dephasing = -0.5 * off.real();
  r.engine_phase = 0.5 * off.imag();
  r.closed_form_deviation = max_abs_diff(r.kernel.log_values(), closed);
  return r;
}

// --- CZ gate ------------------------------------------------------------------

Sequence cz_sequence(double beta_a, double beta_b, double l, std::size_t qubit_a,
                     std::size_t qubit_b) {
  check_loss(l);
  const double dd = std::exp(-2.0 * l);
  return {
      Displace{qubit_a, beta_a},
      Loss{l},
      Displace{qubit_b, kI * beta_b},
      Loss{l},
      Displace{qubit_a, -beta_a * dd},
      Loss{l},
      Displace{qubit_b, -kI * (beta_b * dd)},
  };
}

Sequence swapped_cz_sequence(double beta_a, double beta_b, double l, std::size_t qubit_a,
                             std::size_t qubit_b) {
  check_loss(l);
  const double dd = std::exp(-2.0 * l);
  return {
      Displace{qubit_b, beta_b},
      Loss{l},
      Displace{qubit_a, kI * beta_a},
      Loss{l},
      Displace{qubit_b, -beta_b * dd},
      Loss{l},
      Displace{qubit_a, -kI * (beta_a * dd)},
  };
}

DephasingKernel cz_closed_form(double beta_a, double beta_b, double l) {
  check_loss(l);
  const double eta = eta_of(l);
  const double d = std::exp(-l);
  const double ba1 = beta_a * d;
  const double bb1 = beta_b * d;
  const double kappa = ba1 * beta_b + ba1 * d * bb1;
  Matrix g(4, 4);
  for (std::size_t v = 0; v < 4; ++v) {
    for (std::size_t w = 0; w < 4; ++w) {
      const double za = za_of(v), zb = zb_of(v), zap = za_of(w), zbp = zb_of(w);
      const cplx xi1 = -beta_a * beta_a * (1.0 - za * zap);
      const cplx xi3 = -bb1 * bb1 * (1.0 - zb * zbp);
      const cplx xi2 = -(ba1 * ba1 + beta_b * beta_b) +
                       (ba1 * za + kI * (beta_b * zb)) * (ba1 * zap - kI * (beta_b * zbp));
      g(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) =
          kI * (kappa * (za * zb - zap * zbp)) + eta * (xi1 + xi2 + xi3);
    }
  }
  return DephasingKernel(g);
}

DephasingKernel cz_xi2_kernel(double beta_a, double beta_b, double l) {
  check_loss(l);
  const double eta = eta_of(l);
  const double ba1 = beta_a * std::exp(-l);
  Matrix g(4, 4);
  for (std::size_t v = 0; v < 4; ++v) {
    for (std::size_t w = 0; w < 4; ++w) {
      const double za = za_of(v), zb = zb_of(v), zap = za_of(w), zbp = zb_of(w);
      const cplx xi2 = -(ba1 * ba1 + beta_b * beta_b) +
                       (ba1 * za + kI * (beta_b * zb)) * (ba1 * zap - kI * (beta_b * zbp));
      g(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) = eta * xi2;
    }
  }
  return DephasingKernel(g);
}

CrossTermCoefficients cross_term_coefficients(double x3) {
  const double two = 2.0 * x3;
  return {0.5 * (std::cosh(two) + std::cos(two)), 0.5 * (std::cosh(two) - std::cos(two)),
          0.25 * (std::sinh(two) + std::sin(two)), 0.25 * (std::sinh(two) - std::sin(two))};
}

CZChannelReport cz_channel(double beta_a, double beta_b, double l) {
  check_loss(l);
  CZChannelReport r;
  r.beta_a = beta_a;
  r.beta_b = beta_b;
  r.l = l;
  r.eta = eta_of(l);
  const double d = std::exp(-l);
  const double ba1 = beta_a * d;
  r.kappa = ba1 * beta_b + ba1 * d * (beta_b * d);

  const HybridState out = run_sequence(vacuum_plus_state(2), cz_sequence(beta_a, beta_b, l));
  r.probe_spread = out.probe_spread();
  r.kernel = accumulated_kernel(out);
  r.closed_form = cz_closed_form(beta_a, beta_b, l);
  r.closed_form_deviation = max_abs_diff(r.kernel.log_values(), r.closed_form.log_values());

  r.x0 = r.eta * (ba1 * ba1 + beta_b * beta_b);
  r.x1 = r.eta * ba1 * (ba1 - beta_b);
  r.x2 = r.eta * beta_b * (beta_b - ba1);
  r.x3 = r.eta * ba1 * beta_b;
  const auto cs = cross_term_coefficients(r.x3);
  r.c_plus = cs.c_plus;
  r.c_minus = cs.c_minus;
  r.s_plus = cs.s_plus;
  r.s_minus = cs.s_minus;
  r.e0 = std::cosh(r.x1) * std::cosh(r.x2);
  r.e1 = std::cosh(r.x1) * std::sinh(r.x2);
  r.e2 = std::sinh(r.x1) * std::cosh(r.x2);
  r.e3 = std::sinh(r.x1) * std::sinh(r.x2);
  const double norm = std::exp(-2.0 * r.x3);
  r.correlated_weight = norm * r.c_minus;
  r.uncorrelated_weight = norm * (r.s_plus + r.s_minus);
  return r;
}

Matrix OperatorSum::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& term : terms) {
    if (term.diagonal.size() != rho.rows()) throw ValidationError("operator dimension mismatch");
    out += term.weight * (term.diagonal.asDiagonal() * rho * term.diagonal.conjugate().asDiagonal());
  }
  return out;
}

double OperatorSum::weight(const std::string& name) const {
  for (const auto& term : terms) {
    if (term.name == name) return term.weight;
  }
  return 0.0;
}

OperatorSum channel_decomposition(const CZChannelReport& r) {
  Vector id(4), za(4), zb(4), k(4), kp(4), kpd(4), j(4), jd(4);
  for (Eigen::Index v = 0; v < 4; ++v) {
    const double a = za_of(static_cast<std::size_t>(v));
    const double b = zb_of(static_cast<std::size_t>(v));
    id(v) = 1.0;
    za(v) = a;
    zb(v) = b;
    k(v) = a * b;
    kp(v) = kI + a * b;
    kpd(v) = -kI + a * b;
    j(v) = a + kI * b;
    jd(v) = a - kI * b;
  }
  const double n = std::exp(-r.x0);
  const double cp = r.c_plus, cm = r.c_minus, sp = r.s_plus, sm = r.s_minus;
  OperatorSum map;
  // J rho J^dag carries s_+ (it is the first-order term of the expansion).
  map.terms.push_back({"I", n * (cp * r.e0 + cm * r.e3), id});
  map.terms.push_back({"Za", n * (cp * r.e2 + cm * r.e1), za});
  map.terms.push_back({"Zb", n * (cp * r.e1 + cm * r.e2), zb});
  map.terms.push_back({"K", n * (cp * r.e3 + cm * r.e0), k});
  map.terms.push_back({"Kp", n * (sp * r.e1 + sm * r.e2), kp});
  map.terms.push_back({"Kp_dag", n * (sp * r.e2 + sm * r.e1), kpd});
  map.terms.push_back({"J", n * (sp * r.e0 + sm * r.e3), j});
  map.terms.push_back({"J_dag", n * (sm * r.e0 + sp * r.e3), jd});

  const double ba1 = r.beta_a * std::exp(-r.l);
  if (r.x1 == 0.0 && r.x2 == 0.0 && ba1 == r.beta_b) {
    std::erase_if(map.terms, [](const DiagonalKrausTerm& t) {
      return t.name == "Za" || t.name == "Zb" || t.name == "Kp" || t.name == "Kp_dag";
    });
  }
  return map;
}

Matrix LowLossMap::apply_observable(const Matrix& rho) const {
  Matrix out = identity * rho;
  for (Eigen::Index v = 0; v < rho.rows(); ++v) {
    for (Eigen::Index w = 0; w < rho.cols(); ++w) {
      const double a = za_of(static_cast<std::size_t>(v)) * za_of(static_cast<std::size_t>(w));
      const double b = zb_of(static_cast<std::size_t>(v)) * zb_of(static_cast<std::size_t>(w));
      out(v, w) += (za_weight * a + zb_weight * b) * rho(v, w);
    }
  }
  return out;
}

Matrix LowLossMap::cross_terms(const Matrix& rho) const {
  Matrix out(rho.rows(), rho.cols());
  for (Eigen::Index v = 0; v < rho.rows(); ++v) {
    for (Eigen::Index w = 0; w < rho.cols(); ++w) {
      // i w (Z_b rho Z_a - Z_a rho Z_b)
      const double m = zb_of(static_cast<std::size_t>(v)) * za_of(static_cast<std::size_t>(w)) -
                       za_of(static_cast<std::size_t>(v)) * zb_of(static_cast<std::size_t>(w));
      out(v, w) = kI * (cross_weight * m) * rho(v, w);
    }
  }
  return out;
}

Matrix LowLossMap::apply_first_order(const Matrix& rho) const {
  return apply_observable(rho) + cross_terms(rho);
}

LowLossMap low_loss_observable(double beta, double eta) {
  const double w = eta * beta * beta;
  return {1.0, w, w, w};
}

LowLossMap low_loss_observable(const CZChannelReport& report, double eta) {
  const double b2 = report.beta_a * std::exp(-report.l) * report.beta_b;
  const double w = eta * b2;
  return {1.0, w, w, w};
}

double calibrate_beta(double l, bool iterated) {
  check_loss(l);
  const double sum = std::exp(-l) + std::exp(-3.0 * l);
  return iterated ? std::sqrt(kPi / (8.0 * sum)) : 0.5 * std::sqrt(kPi / sum);
}

double l_tot_from_l(double l) {
  check_loss(l);
  return -std::expm1(-6.0 * l);
}

double l_from_l_tot(double l_tot) {
  if (!(l_tot >= 0.0 && l_tot < 1.0)) throw ValidationError("l_tot must be in [0, 1)");
  return -std::log1p(-l_tot) / 6.0;
}

// --- diagonal-channel analysis ------------------------------------------------

Matrix diagonal_process_matrix(const DephasingKernel& kernel) {
  const auto d = static_cast<Eigen::Index>(kernel.dim());
  Eigen::MatrixXd h(d, d);
  for (Eigen::Index v = 0; v < d; ++v) {
    for (Eigen::Index p = 0; p < d; ++p) {
      h(v, p) = (std::popcount(static_cast<unsigned>(v & p)) % 2) ? -1.0 : 1.0;
    }
  }
  const Matrix hc = h.cast<cplx>();
  return hc.transpose() * kernel.values() * hc / static_cast<double>(d * d);
}

double z_error_probability(const DephasingKernel& kernel, std::size_t qubit) {
  const std::size_t n = kernel.n_qubits();
  if (qubit >= n) throw ValidationError("qubit index out of range");
  const Matrix chi = diagonal_process_matrix(kernel);
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  double p = 0.0;
  for (Eigen::Index i = 0; i < chi.rows(); ++i) {
    if (static_cast<std::size_t>(i) & mask) p += chi(i, i).real();
  }
  return p;
}

DephasingKernel remove_conditional_phase(const DephasingKernel& kernel, double kappa) {
  if (kernel.n_qubits() != 2) throw ValidationError("conditional phase needs a two-qubit kernel");
  Matrix log_g = kernel.log_values();
  for (std::size_t v = 0; v < 4; ++v) {
    for (std::size_t w = 0; w < 4; ++w) {
      log_g(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) -=
          kI * (kappa * (za_of(v) * zb_of(v) - za_of(w) * zb_of(w)));
    }
  }
  return DephasingKernel(log_g);
}

DephasingKernel remove_single_qubit_phases(const DephasingKernel& kernel) {
  const std::size_t n = kernel.n_qubits();
  const std::size_t d = kernel.dim();
  Matrix log_g = kernel.log_values();
  for (std::size_t q = 0; q < n; ++q) {
    double num = 0.0, den = 0.0;
    for (std::size_t v = 0; v < d; ++v) {
      for (std::size_t w = 0; w < d; ++w) {
        const double basis = BasisIndex(n, v).z(q) - BasisIndex(n, w).z(q);
        num += log_g(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)).imag() * basis;
        den += basis * basis;
      }
    }
    const double phi = num / den;
    for (std::size_t v = 0; v < d; ++v) {
      for (std::size_t w = 0; w < d; ++w) {
        const double basis = BasisIndex(n, v).z(q) - BasisIndex(n, w).z(q);
        log_g(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) -= kI * (phi * basis);
      }
    }
  }
  return DephasingKernel(log_g);
}

double cross_term_exponent(const DephasingKernel& kernel) {
  if (kernel.n_qubits() != 2) throw ValidationError("cross term needs a two-qubit kernel");
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < 4; ++v) {
    for (std::size_t w = 0; w < 4; ++w) {
      const double basis = zb_of(v) * za_of(w) - za_of(v) * zb_of(w);
      num += kernel.log_values()(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)).imag() * basis;
      den += basis * basis;
    }
  }
  return num / den;
}

Vector ideal_cz_output() {
  Vector phi(4);
  for (std::size_t v = 0; v < 4; ++v) {
    phi(static_cast<Eigen::Index>(v)) = 0.5 * std::exp(kI * (0.25 * kPi * za_of(v) * zb_of(v)));
  }
  return phi;
}

IteratedCZReport iterated_cz(double beta_a, double beta_b, double l, double inter_sequence_loss) {
  check_loss(l);
  check_loss(inter_sequence_loss);
  IteratedCZReport r;
  r.beta_a = beta_a;
  r.beta_b = beta_b;
  r.l = l;
  r.eta = eta_of(l);
  r.inter_sequence_loss = inter_sequence_loss;
  const double d = std::exp(-l);
  const double ba1 = beta_a * d;
  const double bb1 = beta_b * d;
  const double kappa_first = ba1 * beta_b + ba1 * d * bb1;
  const double kappa_second = beta_a * bb1 + ba1 * bb1 * d;
  r.kappa_total = kappa_first + kappa_second;

  const Sequence first = cz_sequence(beta_a, beta_b, l);
  const Sequence second = swapped_cz_sequence(beta_a, beta_b, l);
  HybridState state = run_sequence(vacuum_plus_state(2), first);
  r.first_pass = accumulated_kernel(state);
  if (inter_sequence_loss > 0.0) state = apply_loss(std::move(state), Loss{inter_sequence_loss});
  state = run_sequence(std::move(state), second);
  r.kernel = accumulated_kernel(state);
  r.probe_spread = state.probe_spread();
  r.second_pass = accumulated_kernel(run_sequence(vacuum_plus_state(2), second));

  Matrix closed(4, 4);
  for (std::size_t v = 0; v < 4; ++v) {
    for (std::size_t w = 0; w < 4; ++w) {
      const double za = za_of(v), zb = zb_of(v), zap = za_of(w), zbp = zb_of(w);
      closed(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) =
          kI * (r.kappa_total * (za * zb - zap * zbp)) -
          2.0 * r.eta * (beta_b * beta_b + bb1 * bb1) * (1.0 - zb * zbp) -
          2.0 * r.eta * (beta_a * beta_a + ba1 * ba1) * (1.0 - za * zap);
    }
  }
  r.closed_form = DephasingKernel(closed);
  r.closed_form_deviation = max_abs_diff(r.kernel.log_values(), closed);

  const DephasingKernel dephasing = remove_conditional_phase(r.kernel, r.kappa_total);
  const Matrix chi = diagonal_process_matrix(dephasing);
  r.p_a = z_error_probability(dephasing, 0);
  r.p_b = z_error_probability(dephasing, 1);
  r.p_a_closed = -0.5 * std::expm1(-4.0 * r.eta * (beta_a * beta_a + ba1 * ba1));
  r.p_b_closed = -0.5 * std::expm1(-4.0 * r.eta * (beta_b * beta_b + bb1 * bb1));

  // Z-string index: bit 1 = Z_a, bit 0 = Z_b.
  const double product[4] = {(1 - r.p_a) * (1 - r.p_b), (1 - r.p_a) * r.p_b, r.p_a * (1 - r.p_b),
                             r.p_a * r.p_b};
  for (Eigen::Index p = 0; p < 4; ++p) {
    r.correlated_residual = std::max(r.correlated_residual, std::abs(chi(p, p) - product[p]));
    for (Eigen::Index q = 0; q < 4; ++q) {
      if (p != q) r.j_residual = std::max(r.j_residual, std::abs(chi(p, q)));
    }
  }
  const Matrix g = dephasing.values();
  for (std::size_t v = 0; v < 4; ++v) {
    for (std::size_t w = 0; w < 4; ++w) {
      const auto a_part = g(static_cast<Eigen::Index>(v & 2U), static_cast<Eigen::Index>(w & 2U));
      const auto b_part = g(static_cast<Eigen::Index>(v & 1U), static_cast<Eigen::Index>(w & 1U));
      r.factorization_residual =
          std::max(r.factorization_residual,
                   std::abs(g(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) - a_part * b_part));
    }
  }
  return r;
}

// --- loss sweep -----------------------------------------------------------------

LossSweepRow loss_point(double l, bool iterated) {
  check_loss(l);
  LossSweepRow row;
  row.iterated = iterated;
  row.l = l;
  row.l_tot = l_tot_from_l(l);
  const double beta = calibrate_beta(l, iterated);
  DephasingKernel kernel = DephasingKernel::identity(2);
  double kappa = 0.0;
  if (iterated) {
    const IteratedCZReport it = iterated_cz(beta, beta, l);
    kernel = it.kernel;
    kappa = it.kappa_total;
  } else {
    const CZChannelReport cz = cz_channel(beta, beta, l);
    kernel = cz.kernel;
    kappa = cz.kappa;
  }
  const DephasingKernel corrected = remove_single_qubit_phases(kernel);
  const Matrix rho = apply_kernel(product_density("++"), corrected);
  row.fidelity = fidelity_pure(rho, ideal_cz_output());
  row.concurrence = concurrence(rho);

  const double x3 = cross_term_exponent(kernel);
  const auto cs = cross_term_coefficients(x3);
  const double norm = std::exp(-2.0 * x3);
  row.c_minus_norm = norm * cs.c_minus;
  row.s_sum_norm = norm * (cs.s_plus + cs.s_minus);

  const DephasingKernel dephasing = remove_conditional_phase(corrected, kappa);
  row.p_a = z_error_probability(dephasing, 0);
  row.p_b = z_error_probability(dephasing, 1);
  return row;
}

std::vector<LossSweepRow> loss_sweep(const std::vector<double>& l_grid, bool iterated,
                                     std::size_t jobs) {
  for (double l : l_grid) check_loss(l);
  return parallel_map<LossSweepRow>(l_grid.size(), jobs,
                                    [&](std::size_t i) { return loss_point(l_grid[i], iterated); });
}

}  // namespace qubus
