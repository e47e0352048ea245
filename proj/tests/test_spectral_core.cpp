#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "oracle.hpp"
#include "singext/errors.hpp"
#include "singext/spectral_core.hpp"

using namespace singext;

TEST_CASE("inner product on unit vectors") {
  const auto op = fx::squares(50);
  const auto e1 = unit_vector(op, 1, 0), e2 = unit_vector(op, 2, 0), e3 = unit_vector(op, 3, 0);
  CHECK(inner(op, 0, e1, e1) == cplx(1.0));
  CHECK(inner(op, 2, e1, e2) == cplx(0.0));
  CHECK(std::abs(inner(op, -2, e3, e3) - 0.01) < 1e-17);
}

TEST_CASE("inner product is conjugate-linear in the first slot") {
  const auto op = fx::squares(30);
  Rng rng(7);
  const auto u = make_vector(op, rng.complex_vector(30), 0), v = make_vector(op, rng.complex_vector(30), 0);
  const cplx s(0.3, -1.7);
  CHECK(std::abs(inner(op, 1, s * u, v) - std::conj(s) * inner(op, 1, u, v)) < 1e-10);
  CHECK(std::abs(inner(op, -1, u, v) - std::conj(inner(op, -1, v, u))) < 1e-14);
}

TEST_CASE("apply_b scales by powers of lambda - z1") {
  const auto op = fx::squares(20);
  const auto e2 = unit_vector(op, 2, 0);
  const auto b1 = apply_b(op, 1, e2);
  CHECK(b1.coeffs(1) == cplx(5.0));
  CHECK(b1.index == -2);
  CHECK(apply_b(op, 0, e2).coeffs == e2.coeffs);
  Rng rng(3);
  const auto u = make_vector(op, rng.complex_vector(20), 0);
  CHECK((apply_b(op, 1, apply_b(op, -1, u)).coeffs - u.coeffs).norm() < 1e-13 * u.coeffs.norm());
}

TEST_CASE("resolvent of L") {
  const auto op = fx::squares(20);
  const auto e1 = unit_vector(op, 1, 0);
  const auto r = resolvent_L(op, kI, e1);
  CHECK(std::abs(r.coeffs(0) - 1.0 / cplx(1.0, -1.0)) < 1e-16);
  CHECK(r.index == 2);
  Rng rng(5);
  const auto u = make_vector(op, rng.complex_vector(20), 0);
  const cplx z(2.5, 0.3);
  const auto back = apply_L(op, resolvent_L(op, z, u)) - z * resolvent_L(op, z, u);
  CHECK((back.coeffs - u.coeffs).norm() < 1e-12 * u.coeffs.norm());
}

TEST_CASE("resolvent at an eigenvalue is a spectral-point error") {
  const auto op = fx::squares(20);
  const auto e1 = unit_vector(op, 1, 0);
  try {
    (void)resolvent_L(op, cplx(4.0, 0.0), e1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpectralPoint);
  }
  // past the truncation of a power law, 2500 = 50^2 is still an eigenvalue
  CHECK_THROWS_AS((void)resolvent_L(op, cplx(2500.0, 0.0), e1), Error);
}

TEST_CASE("duality pairing") {
  const auto op = fx::squares(40);
  CHECK(pair(op, unit_vector(op, 1, 0), unit_vector(op, 1, 0)).value == cplx(1.0));
  Rng rng(11);
  const auto phi = make_vector(op, rng.complex_vector(40), -1), u = make_vector(op, rng.complex_vector(40), 1);
  const cplx a = pair(op, phi, apply_b(op, -1, u)).value;
  const cplx b = pair(op, apply_b(op, -1, phi), u).value;
  CHECK(std::abs(a - b) < 1e-14 * std::abs(a));
}

TEST_CASE("divergent pairing raises a truncation error") {
  // <phi, h_{m+1}> = sum_k 1/k on the power-law fixture
  const auto fam = fx::family(2, 1);
  try {
    (void)pair(fam.op, fam.phi[0], build_h(fam, 0, 3));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Truncation);
  }
}

TEST_CASE("convergent pairing matches the oracle with a valid tail bound") {
  // <phi, (L - z1)^{-1} h_{m+1}> = sum_k 1/(k (k^2 + 1))
  const auto fam = fx::family(2, 1);
  const Pairing p = pair(fam.op, fam.phi[0], apply_b(fam.op, -1, build_h(fam, 0, 3)));
  const double exact = static_cast<double>(oracle::gram_tilde(2000, 1, 1));
  CHECK(std::abs(p.value - exact) < 1e-14);
  CHECK(std::abs(p.value.real() - 0.67186586058651) < 1e-13);
  CHECK(p.tail.converged);
  // omitted terms past N = 2000 sum to about 1/(2 N^2) = 1.25e-7
  CHECK(p.tail.tail_bound >= 1.0 / (2.0 * 2001.0 * 2001.0));
  CHECK(p.tail.tail_bound < 2e-7);
}

TEST_CASE("tail bounds dominate the omitted terms") {
  const auto op = fx::squares(500);
  for (double kexp : {-1.5, -2.0, -3.0}) {
    for (double wexp : {-1.0, 0.0, 0.5}) {
      if (2.0 * wexp + kexp >= -1.0) continue;
      TailLaw law = TailLaw::single({1.0, wexp, kexp});
      const double bound = *op.tail_sum(law);
      oracle::ld omitted = 0.0L;
      for (std::size_t k = 200000; k > 500; --k) omitted += std::pow(oracle::w(k), wexp) * std::pow(static_cast<oracle::ld>(k), kexp);
      CHECK(static_cast<double>(omitted) <= bound);
      CHECK(bound < 3.0 * static_cast<double>(omitted) + 1e-12);
    }
  }
  CHECK(std::isinf(*op.tail_sum(TailLaw::single({1.0, 0.0, -1.0}))));
  CHECK_FALSE(SpectralOperator::from_list({1.0, 2.0, 3.0}, 0.0).tail_sum(TailLaw::single({1.0, 0.0, -2.0})).has_value());
}

TEST_CASE("membership heuristic on the fixture functional") {
  const auto fam = fx::family(2, 1);
  REQUIRE(fam.in_class.size() == 1);
  CHECK(fam.in_class[0]);
  CHECK(fam.in_lower[0].verdict == Membership::Converges);
  CHECK(fam.in_upper[0].verdict == Membership::Diverges);
}

TEST_CASE("property: resolvent norm bound on random vectors") {
  const auto op = fx::squares(300);
  Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    const cplx z(rng.uniform(-5.0, 100.0), rng.uniform(0.1, 5.0) * (t % 2 ? 1 : -1));
    const auto u = make_vector(op, rng.complex_vector(300), 0);
    double c = 0.0;
    for (Eigen::Index k = 0; k < 300; ++k) c = std::max(c, op.weights()(k) / std::abs(op.eigenvalues()(k) - z));
    CHECK(norm(op, 2, resolvent_L(op, z, u)) <= c * norm(op, 0, u) * (1 + 1e-12));
  }
}

TEST_CASE("list operators validate their input") {
  CHECK_THROWS_AS(SpectralOperator::from_list({1.0, 2.0}, 1.5), Error);
  CHECK_THROWS_AS(SpectralOperator::from_list({2.0, 1.0}, 0.0), Error);
  CHECK_THROWS_AS(SpectralOperator::power_law({1.0, 2.0, 0.0}, 100, 1.0), Error);
}
