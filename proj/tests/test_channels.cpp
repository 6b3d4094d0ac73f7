#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qubus/channels.hpp"
#include "qubus/error.hpp"

using namespace qubus;
using qubus::testing::max_diff;

namespace {

// Direct transcription of the closed form, no log-domain tricks.
cplx zeta_reference(double alpha, double chi, double gamma, double t, double delta) {
  const cplx i{0.0, 1.0};
  const cplx num = 1.0 - std::exp((-2.0 * gamma + i * delta * chi) * t);
  const cplx den = 1.0 - i * delta * chi / (2.0 * gamma);
  return std::exp(-alpha * alpha * (1.0 - std::exp(-2.0 * gamma * t) - num / den));
}

double trace_of(const HybridState& s) {
  cplx tr = 0.0;
  for (std::size_t v = 0; v < s.dim(); ++v) tr += s.branch(v, v).coeff();
  return tr.real();
}

}  // namespace

TEST_CASE("coherence parameter edge cases") {
  const CouplingSpec spec{1.0, 0.7, 1.3};
  CHECK(coherence_parameter(2.0, spec, {1.0, 1.0}) == cplx{1.0, 0.0});
  CHECK(coherence_parameter(2.0, {1.0, 0.0, 5.0}, EigenvaluePair::pauli_z(0, 1)) == cplx{1.0, 0.0});
  CHECK_THROWS_AS(coherence_parameter(1.0, {1.0, -0.1, 1.0}, EigenvaluePair::pauli_z(0, 1)), ValidationError);
  CHECK_THROWS_AS(coherence_parameter(1.0, {1.0, 0.1, -1.0}, EigenvaluePair::pauli_z(0, 1)), ValidationError);
}

TEST_CASE("coherence parameter matches the direct formula") {
  for (double alpha : {0.3, 1.0, 2.0}) {
    for (double gamma : {0.1, 1.0, 4.0}) {
      for (double t : {0.05, 0.7, 3.0}) {
        for (double delta : {2.0, -2.0, 3.0}) {
          const cplx expect = zeta_reference(alpha, 1.0, gamma, t, delta);
          const cplx got = coherence_parameter(alpha, {1.0, gamma, t}, {0.5 * delta, -0.5 * delta});
          CHECK(std::abs(got - expect) < 1e-13);
        }
      }
    }
  }
}

TEST_CASE("coherence parameter symmetries") {
  const CouplingSpec spec{0.8, 0.6, 1.7};
  const cplx z01 = coherence_parameter(1.4, spec, EigenvaluePair::pauli_z(0, 1));
  const cplx z10 = coherence_parameter(1.4, spec, EigenvaluePair::pauli_z(1, 0));
  CHECK(std::abs(z01 - std::conj(z10)) < 1e-15);
  CHECK(std::abs(z01) <= 1.0);
}

TEST_CASE("coherence modulus does not grow with time") {
  for (double g : {0.2, 1.0, 5.0}) {
    double previous = 1.0;
    for (int k = 1; k <= 400; ++k) {
      const double m = std::abs(coherence_parameter(1.5, {1.0, g, 0.025 * k}, EigenvaluePair::pauli_z(0, 1)));
      CHECK(m <= previous + 1e-14);
      previous = m;
    }
  }
}

TEST_CASE("asymptotic coherence") {
  CHECK(coherence_limit(1.0, 1.0, 0.0) == 1.0);
  CHECK(coherence_limit(1.0, 1.0, 2.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(coherence_limit(1.0, 1e9, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(coherence_limit(1.0, 0.0, 2.0), ValidationError);
  CHECK_THROWS_AS(coherence_limit(1.0, -1.0, 2.0), ValidationError);
  const double late = std::abs(coherence_parameter(1.0, {1.0, 1.0, 40.0}, EigenvaluePair::pauli_z(0, 1)));
  CHECK(late == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("trigonometric split reproduces the exponent") {
  SUBCASE("diagonal pairs vanish") {
    const auto s = coherence_split(1.2, {1.0, 0.5, 0.8}, 1, 1);
    CHECK(s.real_part == 0.0);
    CHECK(s.imag_part == 0.0);
  }
  SUBCASE("large time limit") {
    const auto s = coherence_split(1.0, {1.0, 1.0, 10.0}, 0, 1);
    CHECK(std::exp(s.real_part) == doctest::Approx(std::exp(-0.5)).epsilon(1e-8));
    CHECK(coherence_split_limit(1.0, 1.0, 0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
  }
  SUBCASE("agreement on a grid") {
    for (double alpha : {0.1, 1.0, 7.0, 100.0}) {
      for (double g : {0.3, 1.0, 5.0}) {
        for (double chit : {1e-3, 0.4, 2.0, 9.0}) {
          for (auto [n, m] : {std::pair{0, 1}, std::pair{1, 0}}) {
            const CouplingSpec spec{1.0, g, chit};
            const auto s = coherence_split(alpha, spec, n, m);
            const cplx f = coherence_exponent(alpha, spec, EigenvaluePair::pauli_z(n, m));
            CHECK(std::abs(s.real_part - f.real()) <= 1e-12 * std::max(1.0, std::abs(f)));
            CHECK(std::abs(s.imag_part - f.imag()) <= 1e-12 * std::max(1.0, std::abs(f)));
          }
        }
      }
    }
  }
}

TEST_CASE("short-time exponent at a large probe amplitude") {
  // 40-digit evaluations of 2 gamma t alpha^2 (phi1(z) - phi1(-2 gamma t)).
  struct Ref {
    double t, re, im;
  };
  for (const Ref r : {Ref{0.0012915496650148838, -5.5270873772836532127, 6446.9836368267336313},
                      Ref{1e-6, -2.666586667946118767e-9, 0.0039998933349319826141}}) {
    const CouplingSpec spec{1.0, 20.0, r.t};
    const cplx f = coherence_exponent(1e4, spec, EigenvaluePair::pauli_z(0, 1));
    CHECK(std::abs(f.real() - r.re) <= 1e-12 * std::max(1.0, std::abs(r.re)));
    CHECK(std::abs(f.imag() - r.im) <= 1e-13 * std::max(1.0, std::abs(r.im)));
    const auto s = coherence_split(1e4, spec, 0, 1);
    CHECK(std::abs(s.real_part - r.re) <= 1e-12 * std::max(1.0, std::abs(r.re)));
    CHECK(std::abs(s.imag_part - r.im) <= 1e-13 * std::max(1.0, std::abs(r.im)));
  }
}

TEST_CASE("interaction step") {
  const HybridState start = new_product_state(product_density("+"), cplx{1.0, 0.0});
  SUBCASE("lossless coupling only rotates") {
    const HybridState s = apply_interaction(start, {0, {1.0, 0.0, 0.4}});
    CHECK(std::abs(s.branch(0, 1).coeff() - 0.5) < 1e-15);
    CHECK(std::abs(s.branch(0, 0).ket_amp - std::exp(cplx{0.0, 0.4})) < 1e-15);
    CHECK(std::abs(s.branch(1, 1).ket_amp - std::exp(cplx{0.0, -0.4})) < 1e-15);
  }
  SUBCASE("pure damping") {
    const HybridState s = apply_interaction(start, {0, {0.0, 0.5, 2.0}});
    CHECK(std::abs(s.branch(0, 0).coeff() - 0.5) < 1e-15);
    CHECK(std::abs(s.branch(0, 1).coeff() - 0.5) < 1e-15);
    CHECK(std::abs(s.branch(1, 0).ket_amp - std::exp(-1.0)) < 1e-15);
  }
  SUBCASE("coefficient equals the coherence parameter from equal amplitudes") {
    const CouplingSpec spec{1.0, 1.0, 0.5};
    const HybridState s = apply_interaction(start, {0, spec});
    const cplx zeta = coherence_parameter(1.0, spec, EigenvaluePair::pauli_z(0, 1));
    CHECK(std::abs(s.branch(0, 1).coeff() - 0.5 * zeta) < 1e-15);
    s.validate();
    CHECK(trace_of(s) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("target out of range") {
    CHECK_THROWS_AS(apply_interaction(start, {1, {1.0, 1.0, 1.0}}), ValidationError);
  }
}

TEST_CASE("displacement step") {
  const HybridState start = new_product_state(product_density("+"), cplx{0.3, 0.2});
  SUBCASE("zero displacement is the identity") {
    const HybridState s = apply_displacement(start, {std::nullopt, 0.0});
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(s.branches()[i].coeff() - start.branches()[i].coeff()) < 1e-15);
      CHECK(s.branches()[i].ket_amp == start.branches()[i].ket_amp);
    }
  }
  SUBCASE("from vacuum there is no phase") {
    const HybridState v = new_product_state(product_density("+"), 0.0);
    const HybridState s = apply_displacement(v, {std::nullopt, 1.7});
    for (const auto& b : s.branches()) {
      CHECK(b.ket_amp == cplx{1.7, 0.0});
      CHECK(std::abs(b.coeff() - 0.5) < 1e-15);
    }
  }
  SUBCASE("conditional phase rule") {
    const cplx beta{0.1, -0.8};
    const HybridState s = apply_displacement(start, {0, beta});
    const cplx a = start.branch(0, 1).ket_amp;
    const cplx ket_phase = std::exp(cplx{0.0, std::imag(std::conj(a) * beta)});
    const cplx bra_phase = std::exp(cplx{0.0, std::imag(std::conj(a) * -beta)});
    CHECK(std::abs(s.branch(0, 1).coeff() - 0.5 * ket_phase * std::conj(bra_phase)) < 1e-15);
    CHECK(std::abs(s.branch(0, 1).ket_amp - (a + beta)) < 1e-15);
    CHECK(std::abs(s.branch(0, 1).bra_amp - (a - beta)) < 1e-15);
    s.validate();
  }
  SUBCASE("target out of range") {
    CHECK_THROWS_AS(apply_displacement(start, {3, 1.0}), ValidationError);
  }
}

TEST_CASE("rotation step") {
  const HybridState start = new_product_state(product_density("+"), cplx{0.9, 0.0});
  const HybridState half = apply_rotation(start, {0, M_PI});
  for (const auto& b : half.branches()) {
    CHECK(std::abs(b.ket_amp + 0.9) < 1e-15);
    CHECK(std::abs(b.coeff() - 0.5) < 1e-15);
  }
  const HybridState none = apply_rotation(start, {0, 0.0});
  CHECK(none.branch(0, 1).ket_amp == start.branch(0, 1).ket_amp);

  const HybridState v = new_product_state(product_density("+"), 0.0);
  const double a1 = 1.3, l = 0.2, theta = 0.45;
  HybridState s = apply_displacement(v, {std::nullopt, a1});
  s = apply_loss(s, {l});
  s = apply_rotation(s, {0, theta});
  CHECK(std::abs(s.branch(0, 0).ket_amp - a1 * std::exp(-l) * std::exp(cplx{0.0, theta})) < 1e-15);
  CHECK(std::abs(s.branch(1, 1).ket_amp - a1 * std::exp(-l) * std::exp(cplx{0.0, -theta})) < 1e-15);
  CHECK_THROWS_AS(apply_rotation(start, {1, 0.1}), ValidationError);
}

TEST_CASE("loss step") {
  HybridState s = new_product_state(product_density("+"), 0.0);
  s.branch(0, 0).ket_amp = s.branch(0, 0).bra_amp = 1.0;
  s.branch(1, 1).ket_amp = s.branch(1, 1).bra_amp = -1.0;
  s.branch(0, 1).ket_amp = 1.0;
  s.branch(0, 1).bra_amp = -1.0;
  s.branch(1, 0).ket_amp = -1.0;
  s.branch(1, 0).bra_amp = 1.0;

  SUBCASE("l = 0 is the identity") {
    const HybridState t = apply_loss(s, {0.0});
    CHECK(t.branch(0, 1).coeff() == s.branch(0, 1).coeff());
  }
  SUBCASE("overlap to the power eta") {
    const HybridState t = apply_loss(s, {0.5});
    const double eta = 1.0 - std::exp(-1.0);
    CHECK(eta == doctest::Approx(0.63212).epsilon(1e-5));
    CHECK(std::abs(t.branch(0, 1).coeff() - 0.5 * std::exp(-2.0 * eta)) < 1e-15);
    CHECK(std::exp(-2.0 * eta) == doctest::Approx(0.28243).epsilon(1e-4));
    CHECK(std::abs(t.branch(0, 0).coeff() - 0.5) < 1e-15);
    CHECK(std::abs(t.branch(0, 1).ket_amp - 0.60653) < 1e-5);
    CHECK(std::abs(t.branch(0, 1).bra_amp + 0.60653) < 1e-5);
  }
  SUBCASE("negative loss") {
    CHECK_THROWS_AS(apply_loss(s, {-0.1}), ValidationError);
  }
}

TEST_CASE("sequences") {
  const HybridState start = new_product_state(product_density("+0"), 0.4);
  const HybridState same = run_sequence(start, {});
  CHECK(max_diff(reduce_qubits(same), reduce_qubits(start)) == 0.0);

  const Sequence bad{Loss{0.1}, Rotate{0, 0.2}, Displace{5, 1.0}};
  try {
    run_sequence(start, bad);
    FAIL("expected StepError");
  } catch (const StepError& e) {
    CHECK(e.index() == 2);
  }
  CHECK_THROWS_AS(run_sequence(start, {Loss{-1.0}}), StepError);
}

TEST_CASE("displacement group law") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const HybridState start = new_product_state(qubus::testing::random_density(4, rng), cplx{u(rng), u(rng)});
    const cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const std::optional<std::size_t> target =
        trial % 3 == 0 ? std::nullopt : std::optional<std::size_t>(trial % 2);
    const HybridState two = run_sequence(start, {Displace{target, a}, Displace{target, b}});
    const HybridState one = apply_displacement(start, {target, a + b});
    for (std::size_t i = 0; i < 16; ++i) {
      CHECK(std::abs(two.branches()[i].coeff() - one.branches()[i].coeff()) < 1e-12);
      CHECK(std::abs(two.branches()[i].ket_amp - one.branches()[i].ket_amp) < 1e-12);
    }
  }
}

TEST_CASE("every step keeps the state Hermitian with unit trace") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HybridState s = new_product_state(qubus::testing::random_density(4, rng), cplx{0.5, -0.2});
  for (int k = 0; k < 60; ++k) {
    Step step;
    switch (k % 4) {
      case 0: step = Displace{k % 8 == 0 ? std::nullopt : std::optional<std::size_t>(k % 2), cplx{u(rng) - 0.5, u(rng) - 0.5}}; break;
      case 1: step = Rotate{static_cast<std::size_t>(k % 2), 2.0 * u(rng)}; break;
      case 2: step = Loss{0.2 * u(rng)}; break;
      default: step = Interact{static_cast<std::size_t>(k % 2), {u(rng), u(rng), 0.5 * u(rng)}}; break;
    }
    s = apply_step(s, step);
    s.validate();
    CHECK(trace_of(s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.branch_count() == 16);
  }
}

TEST_CASE("phase flip channel") {
  CHECK(phase_flip_decompose(0.0).p_flip == 0.0);
  CHECK(phase_flip_decompose(50.0).p_flip == doctest::Approx(0.5).epsilon(1e-15));
  const auto ch = phase_flip_decompose(0.5);
  CHECK(ch.p_flip == doctest::Approx(0.31606).epsilon(1e-5));
  CHECK(ch.p_keep + ch.p_flip == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(phase_flip_decompose(-0.1), ValidationError);

  std::mt19937_64 rng(3);
  const Matrix rho = qubus::testing::random_density(4, rng);
  const Matrix out = ch.apply(rho, 1);
  for (int v = 0; v < 4; ++v) {
    for (int w = 0; w < 4; ++w) {
      const double zz = BasisIndex(2, v).z(1) * BasisIndex(2, w).z(1);
      CHECK(std::abs(out(v, w) - rho(v, w) * std::exp(-0.5 * (1.0 - zz))) < 1e-15);
    }
  }
}
