#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "helpers.hpp"
#include "qubus/channels.hpp"
#include "qubus/error.hpp"
#include "qubus/measures.hpp"

using namespace qubus;

namespace {

Matrix bell() {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return phi * phi.adjoint();
}

}  // namespace

TEST_CASE("orthogonalized qubit-probe state") {
  SUBCASE("t = 0 is a product state") {
    const auto rho = orthogonalize(3.0, 1.0, 0.5, 0.0);
    CHECK(concurrence(rho) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(rho(1, 1)) < 1e-15);
  }
  SUBCASE("lossless quarter period is maximally entangled") {
    const auto rho = orthogonalize(20.0, 1.0, 0.0, M_PI / 2.0);
    CHECK(concurrence(rho) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(von_neumann_entropy(rho) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("valid density matrix") {
    for (double t : {0.01, 0.3, 1.0, 2.5}) {
      const auto rho = orthogonalize(1.5, 1.0, 0.7, t);
      validate_qubit_density(rho);
      const double c = concurrence(rho);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      const double s = von_neumann_entropy(rho);
      CHECK(s >= 0.0);
      CHECK(s <= 2.0);
    }
  }
  SUBCASE("qubit coherence carries zeta and the branch overlap") {
    for (double t : {0.2, 0.9, 1.7}) {
      const double alpha = 1.3, gamma = 0.6;
      const auto rho = orthogonalize(alpha, 1.0, gamma, t);
      const cplx coherence = rho(0, 2) + rho(1, 3);
      const cplx zeta = coherence_parameter(alpha, {1.0, gamma, t}, EigenvaluePair::pauli_z(0, 1));
      const double overlap = std::exp(-alpha * alpha * std::exp(-2.0 * gamma * t) * (1.0 - std::cos(2.0 * t)));
      CHECK(std::abs(std::abs(coherence) - 0.5 * std::abs(zeta) * overlap) < 1e-12);
    }
  }
  CHECK_THROWS_AS(orthogonalize(0.0, 1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(orthogonalize(-1.0, 1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("concurrence reference states") {
  CHECK(concurrence(bell()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(concurrence(product_density("0+")) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(concurrence(product_density("-1")) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(concurrence(Matrix::Identity(4, 4) / 4.0) == 0.0);
  // Werner state p|Bell> + (1-p) I/4 has C = max(0, (3p - 1)/2).
  for (double p : {0.2, 0.5, 0.8}) {
    const Matrix w = p * bell() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
    CHECK(concurrence(w) == doctest::Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)).epsilon(1e-10));
  }
  Matrix bad = bell();
  bad(0, 0) = 0.9;
  CHECK_THROWS_AS(concurrence(bad), ValidationError);
}

TEST_CASE("concurrence is invariant under local unitaries") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 40; ++k) {
    const Matrix rho = qubus::testing::random_density(4, rng);
    const Matrix u = Eigen::kroneckerProduct(qubus::testing::random_unitary(2, rng),
                                             qubus::testing::random_unitary(2, rng));
    const Matrix moved = u * rho * u.adjoint();
    CHECK(std::abs(concurrence(rho) - concurrence(moved)) < 1e-9);
  }
}

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(bell()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(Matrix::Identity(4, 4) / 4.0) == doctest::Approx(2.0).epsilon(1e-12));
  Matrix half(4, 4);
  half.setZero();
  half(0, 0) = half(2, 2) = 0.5;  // maximally mixed qubit, pure second factor
  CHECK(von_neumann_entropy(half) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pure-state fidelity") {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  CHECK(fidelity_pure(bell(), phi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fidelity_pure(Matrix::Identity(4, 4) / 4.0, phi) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(fidelity_pure(bell(), 2.0 * phi), ValidationError);
  CHECK_THROWS_AS(fidelity_pure(bell(), Vector::Ones(2) / std::sqrt(2.0)), ValidationError);
}

TEST_CASE("scan grid") {
  ScanGrid g;
  const auto pts = g.points();
  CHECK(pts.size() >= 2000);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  CHECK(pts.back() == doctest::Approx(M_PI));
  ScanGrid empty;
  empty.linear_points = 0;
  empty.log_points = 0;
  CHECK_THROWS_AS(peak_scan(10.0, 1.0, empty), ValidationError);
}

TEST_CASE("peak scan orderings") {
  SUBCASE("stronger probes peak higher and earlier") {
    const auto p50 = peak_scan(50.0, 1.0);
    const auto p100 = peak_scan(100.0, 1.0);
    const auto p200 = peak_scan(200.0, 1.0);
    CHECK(p50.c_max < p100.c_max);
    CHECK(p100.c_max < p200.c_max);
    CHECK(p50.t_star > p100.t_star);
    CHECK(p100.t_star > p200.t_star);
    CHECK(p50.entropy_at_peak > p100.entropy_at_peak);
    CHECK(p100.entropy_at_peak > p200.entropy_at_peak);
  }
  SUBCASE("more damping lowers and advances the peak") {
    const auto g1 = peak_scan(100.0, 1.0);
    const auto g7 = peak_scan(100.0, 7.0);
    const auto g21 = peak_scan(100.0, 21.0);
    CHECK(g1.c_max > g7.c_max);
    CHECK(g7.c_max > g21.c_max);
    CHECK(g1.t_star > g7.t_star);
    CHECK(g7.t_star > g21.t_star);
  }
  SUBCASE("entropy at the peak falls for large probes") {
    for (double g : {1.0, 3.0, 5.0, 10.0, 15.0}) {
      double previous = 3.0;
      for (double a : {100.0, 300.0, 1000.0, 3000.0, 10000.0}) {
        const auto p = peak_scan(a, g);
        CHECK(p.entropy_at_peak < previous);
        CHECK(p.c_max <= 1.0);
        CHECK(p.entropy_at_peak >= 0.0);
        previous = p.entropy_at_peak;
      }
    }
  }
  SUBCASE("refinement locates a local maximum") {
    const auto p = peak_scan(100.0, 1.0);
    const double c_left = concurrence(orthogonalize(100.0, 1.0, 1.0, p.t_star * (1.0 - 1e-3)));
    const double c_right = concurrence(orthogonalize(100.0, 1.0, 1.0, p.t_star * (1.0 + 1e-3)));
    CHECK(p.c_max >= c_left);
    CHECK(p.c_max >= c_right);
  }
}

TEST_CASE("large probe amplitude stays finite") {
  const auto p = peak_scan(1e4, 5.0);
  CHECK(p.c_max == doctest::Approx(0.998).epsilon(1e-3));
  CHECK(p.entropy_at_peak > 5e-3);
  CHECK(p.entropy_at_peak < 5e-2);
  CHECK(p.t_star > 0.0);
  CHECK(p.t_star < M_PI / 2000.0);
}
