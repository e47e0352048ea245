#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "oracle.hpp"
#include "singext/a_model.hpp"
#include "singext/errors.hpp"
#include "singext/verify.hpp"

using namespace singext;

namespace {

double gap(const SingularFamily& fam, const ModelVector& a, const ModelVector& b) {
  return model_norm(fam, a - b) / std::max(1e-300, std::max(model_norm(fam, a), model_norm(fam, b)));
}

GramSpec antitriangular(const Layout& lay) { return assess_gram(antitriangular_gram(lay, {1.0, 1.0}), lay); }

}  // namespace

TEST_CASE("Amax on the three kinds of elements") {
  const auto fam = fx::family(2, 1);
  Rng rng(1);
  const Vec c = rng.complex_vector(1);
  const auto fs = make_vector(fam.op, rng.complex_vector(fam.op.size()), 4);
  const ModelVector a = apply_Amax(fam, {fs, Vec::Zero(1), Vec::Zero(2)});
  CHECK((a.regular.coeffs - apply_L(fam.op, fs).coeffs).norm() < 1e-13 * a.regular.coeffs.norm());
  CHECK(a.singular.norm() == 0.0);
  const ModelVector b = apply_Amax(fam, {zero_vector(fam.op, 4), c, Vec::Zero(2)});
  CHECK((b.regular.coeffs - (-1.0 * h_combination(fam, 3, c)).coeffs).norm() < 1e-13 * b.regular.coeffs.norm());
  CHECK((b.singular - eta(fam.layout, c)).norm() < 1e-15);
  const auto fam1 = fx::family(1, 2);
  const ModelVector m1 = apply_Amax(fam1, {zero_vector(fam1.op, 3), Vec::Zero(2), Vec::Unit(2, 1)});
  CHECK((m1.singular - (-1.0) * Vec::Unit(2, 1)).norm() < 1e-15);
}

TEST_CASE("A'max equals Amax for G_M Hermitian and at m = 1") {
  Rng rng(2);
  const auto fam = fx::family(2, 1);
  const GramSpec g = antitriangular(fam.layout);
  const auto fam1 = fx::family(1, 1);
  const GramSpec g1 = fx::tilde_gram(fam1);
  for (int t = 0; t < 10; ++t) {
    const auto x = random_domain_element(fam, rng);
    CHECK(gap(fam, apply_Amax(fam, x), apply_Amax_prime(fam, g, x)) < 1e-13);
    const auto y = random_domain_element(fam1, rng);
    CHECK(gap(fam1, apply_Amax(fam1, y), apply_Amax_prime(fam1, g1, y)) < 1e-13);
  }
}

TEST_CASE("A'max - Amax maps K_A^min into H_A^perp on the fixture") {
  const auto fam = fx::family(2, 1);
  const GramSpec g = fx::tilde_gram(fam);
  const Vec c = Vec::Constant(1, cplx(0.3, 1.0));
  const DomainElementA x{zero_vector(fam.op, 4), Vec::Zero(1), eta(fam.layout, c)};
  const Vec diff = apply_Amax_prime(fam, g, x).singular - apply_Amax(fam, x).singular;
  CHECK(diff.norm() > 1e-3);
  CHECK(in_h_perp(g, diff));
}

TEST_CASE("boundary maps") {
  const auto fam = fx::family(2, 1);
  const GramSpec g = fx::tilde_gram(fam);
  Rng rng(3);
  const auto fs = make_vector(fam.op, rng.complex_vector(fam.op.size()), 4);
  const Vec c = rng.complex_vector(1), k = rng.complex_vector(2);
  CHECK(gamma0({fs, Vec::Zero(1), Vec::Zero(2)}).norm() == 0.0);
  const DomainElementA xc{zero_vector(fam.op, 4), c, Vec::Zero(2)};
  CHECK(gamma0(xc) == c);
  CHECK(gamma1(fam, g, xc).norm() == 0.0);
  const Vec g1 = gamma1(fam, g, {zero_vector(fam.op, 4), Vec::Zero(1), k});
  CHECK((g1 + top_block(fam.layout, g.G * k)).norm() < 1e-15);
}

TEST_CASE("boundary form identity and antisymmetry") {
  Rng rng(4);
  for (const bool tilde : {true, false}) {
    const auto fam = fx::family(2, 1);
    const GramSpec g = tilde ? fx::tilde_gram(fam) : antitriangular(fam.layout);
    for (int t = 0; t < 20; ++t) {
      const auto x = random_domain_element(fam, rng), y = random_domain_element(fam, rng);
      const BoundaryForm bf = boundary_form(fam, g, x, y);
      CHECK(bf.residual < 1e-9);
      const BoundaryForm back = boundary_form(fam, g, y, x);
      CHECK(std::abs(bf.direct + std::conj(back.direct)) < 1e-12 * (1.0 + std::abs(bf.direct)));
      if (!tilde) CHECK(std::abs(bf.defect_term) == 0.0);
    }
  }
  const auto fam = fx::family(2, 1);
  const GramSpec g = fx::tilde_gram(fam);
  const DomainElementA k{zero_vector(fam.op, 4), Vec::Zero(1), Vec::Unit(2, 0)};
  const DomainElementA k2{zero_vector(fam.op, 4), Vec::Zero(1), Vec::Unit(2, 1)};
  // (G_M - G_M^*) vanishes at (1,1;1,1); its (1,1;1,2) entry is G~_11 > 0
  CHECK(std::abs(boundary_form(fam, g, k, k).defect_term) < 1e-15);
  CHECK(std::abs(boundary_form(fam, g, k, k2).defect_term - g.G(0, 0)) < 1e-14);
}

TEST_CASE("q on the fixture") {
  const auto fam = fx::family(2, 1);
  CHECK(max_abs(eval_q(fam, cplx(-1.0, 0.0))) == 0.0);
  RMat tail;
  const Mat qi = eval_q(fam, kI, &tail);
  const oracle::lc o = oracle::q(2000, oracle::lc(0.0L, 1.0L));
  CHECK(std::abs(qi(0, 0) - cplx(static_cast<double>(o.real()), static_cast<double>(o.imag()))) < 1e-13);
  CHECK(std::abs(qi(0, 0) - cplx(0.159138009863412, 1.22920778456299)) < 1e-13);
  CHECK(tail(0, 0) < 1e-6);
  // the N -> infinity value lies within the tail bound
  const oracle::lc far = oracle::q(400000, oracle::lc(0.0L, 1.0L));
  CHECK(std::abs(qi(0, 0) - cplx(static_cast<double>(far.real()), static_cast<double>(far.imag()))) <= tail(0, 0));
  Rng rng(5);
  const auto fam2 = fx::family(2, 2);
  for (int t = 0; t < 10; ++t) {
    const cplx z(rng.uniform(-4, 20), rng.uniform(0.1, 4));
    CHECK(max_abs(eval_q(fam2, std::conj(z)) - eval_q(fam2, z).adjoint()) < 1e-13 * max_abs(eval_q(fam2, z)));
  }
}

TEST_CASE("r: closed forms") {
  const double a = 0.8, b = -0.35;
  const GramSpec g = fx::hankel2(a, b);
  for (const cplx z : {cplx(0.2, 1.0), cplx(-3.0, 0.1), cplx(5.0, -2.0)}) {
    const oracle::lc o = oracle::r_m2(a, b, 0.0L, oracle::lc(z.real(), z.imag()));
    CHECK(std::abs(eval_r(g, 0.0, z)(0, 0) - cplx(static_cast<double>(o.real()), static_cast<double>(o.imag()))) < 1e-14);
  }
  const GramSpec g1 = assess_gram(Mat::Constant(1, 1, 2.5), {1, 1});
  CHECK(std::abs(eval_r(g1, -1.0, kI)(0, 0) - (-2.5 / (kI + 1.0))) < 1e-15);
  // leading Laurent coefficient
  const cplx eps(1e-5, 1e-5);
  CHECK(std::abs(eps * eps * eval_r(g, 0.0, eps)(0, 0) + a) < 1e-4);
  CHECK_THROWS_AS(eval_r(g, 0.0, cplx(0.0, 0.0)), Error);
}

TEST_CASE("gamma field and Weyl function") {
  Rng rng(6);
  for (int m : {1, 2, 3}) {
    const auto fam = fx::family(m, 2);
    const GramSpec g = fx::tilde_gram(fam);
    for (int t = 0; t < 5; ++t) {
      const cplx z(rng.uniform(-3, 15), rng.uniform(0.3, 3) * (t % 2 ? -1 : 1));
      const Vec c = rng.complex_vector(2);
      const DomainElementA e = gamma_A(fam, z, c);
      CHECK(gap(fam, apply_Amax(fam, e), z * to_model_vector(fam, e)) < 1e-12);
      CHECK((gamma0(e) - c).norm() < 1e-14 * c.norm());
      const WeylSample w = eval_M_A(fam, g, z);
      CHECK((gamma1(fam, g, e) - w.M * c).norm() < 1e-10 * (w.M * c).norm());
      CHECK(max_abs(w.M - w.q - w.r) <= 4 * std::numeric_limits<double>::epsilon() * max_abs(w.M));
    }
  }
  const auto fam1 = fx::family(1, 1);
  const GramSpec g1 = fx::tilde_gram(fam1);
  const cplx z(1.0, 0.5);
  const WeylSample w = eval_M_A(fam1, g1, z);
  CHECK(std::abs(w.M(0, 0) - (w.q(0, 0) - g1.G(0, 0) / (z + 1.0))) < 1e-14);
  const ModelVector gz = eval_gamma_A(fam1, z, Vec::Ones(1));
  CHECK(std::abs(gz.singular(0) - 1.0 / (z + 1.0)) < 1e-15);
  CHECK((gz.regular.coeffs - resolvent_L(fam1.op, z, h_combination(fam1, 1, Vec::Ones(1))).coeffs).norm() < 1e-13 * gz.regular.coeffs.norm());
}

TEST_CASE("Weyl function symmetry under G_M Hermitian") {
  const auto fam = fx::family(2, 1);
  const GramSpec g = antitriangular(fam.layout);
  for (const cplx z : default_grid()) {
    CHECK(max_abs(eval_M_A(fam, g, std::conj(z)).M - eval_M_A(fam, g, z).M.adjoint()) < 1e-13);
  }
}

TEST_CASE("A0 resolvent") {
  const auto fam = fx::family(2, 1);
  Rng rng(7);
  const auto f = make_vector(fam.op, rng.complex_vector(fam.op.size()), 2);
  const cplx z(2.0, 1.0);
  const ModelVector r = resolvent_A0(fam, z, regular_only(fam, f));
  CHECK((r.regular.coeffs - resolvent_L(fam.op, z, f).coeffs).norm() < 1e-14 * r.regular.coeffs.norm());
  CHECK(r.singular.norm() == 0.0);
  const auto fam1 = fx::family(1, 2);
  const ModelVector r1 = resolvent_A0(fam1, z, singular_only(fam1, Vec::Unit(2, 1)));
  CHECK((r1.singular - Vec::Unit(2, 1) / (-1.0 - z)).norm() < 1e-15);
  CHECK(r1.regular.coeffs.norm() == 0.0);
  CHECK_THROWS_AS(resolvent_A0(fam, cplx(-1.0, 0.0), regular_only(fam, f)), Error);
}

TEST_CASE("Krein-Naimark resolvent for A_Theta") {
  const auto fam = fx::family(2, 1);
  const GramSpec g = antitriangular(fam.layout);
  Rng rng(8);
  const ThetaRelation zero = ThetaRelation::zero_relation(1);
  const ThetaRelation theta = ThetaRelation::from_matrix(Mat::Constant(1, 1, 0.7));
  for (int t = 0; t < 5; ++t) {
    const cplx z(rng.uniform(-3, 10), rng.uniform(0.2, 3)), w(rng.uniform(-3, 10), -rng.uniform(0.2, 3));
    const ModelVector v = random_model_vector(fam, rng);
    CHECK(gap(fam, resolvent_ATheta(fam, g, zero, z, v), resolvent_A0(fam, z, v)) < 1e-14);
    const ModelVector rz = resolvent_ATheta(fam, g, theta, z, v), rw = resolvent_ATheta(fam, g, theta, w, v);
    CHECK(gap(fam, rz - rw, (z - w) * resolvent_ATheta(fam, g, theta, z, rw)) < 1e-9);
  }
  // m = 1, d = 1: correction gamma(z) (theta - M)^{-1} gamma(conj z)^* v
  const auto fam1 = fx::family(1, 1);
  const GramSpec g1 = fx::tilde_gram(fam1);
  const cplx z(0.5, 1.5);
  const ModelVector v = random_model_vector(fam1, rng);
  const cplx den = 0.7 - eval_M_A(fam1, g1, z).M(0, 0);
  const cplx coef = gamma_A_adjoint(fam1, g1, z, v)(0) / den;
  const ModelVector expect = resolvent_A0(fam1, z, v) + coef * eval_gamma_A(fam1, z, Vec::Ones(1));
  CHECK(gap(fam1, resolvent_ATheta(fam1, g1, theta, z, v), expect) < 1e-12);
}

TEST_CASE("compressed resolvent") {
  const auto fam = fx::family(2, 1);
  const GramSpec g = antitriangular(fam.layout);
  Rng rng(9);
  const ModelVector v = random_model_vector(fam, rng);
  const cplx z(1.0, 2.0);
  const ScaleVector c0 = compressed_resolvent_A(fam, g, ThetaRelation::zero_relation(1), z, v.regular);
  CHECK((c0.coeffs - resolvent_L(fam.op, z, v.regular).coeffs).norm() < 1e-14 * c0.coeffs.norm());
  const ThetaRelation theta = ThetaRelation::from_matrix(Mat::Constant(1, 1, -0.4));
  ModelVector f = v;
  f.singular.setZero();
  const ScaleVector c = compressed_resolvent_A(fam, g, theta, z, v.regular);
  const ModelVector full = resolvent_ATheta(fam, g, theta, z, f);
  CHECK((c.coeffs - full.regular.coeffs).norm() < 1e-10 * c.coeffs.norm());
}

TEST_CASE("theta relations") {
  CHECK(ThetaRelation::from_matrix(Mat::Constant(1, 1, 2.0)).self_adjoint());
  CHECK_FALSE(ThetaRelation::from_matrix(Mat::Constant(1, 1, cplx(0.0, 1.0))).self_adjoint());
  CHECK(ThetaRelation::zero_relation(2).self_adjoint());
  const ThetaRelation bad{Mat::Zero(2, 2), Mat::Zero(2, 2)};
  CHECK_THROWS_AS(bad.validate(), Error);
  const ThetaRelation t = ThetaRelation::from_matrix(Mat::Identity(2, 2));
  const Vec u = Vec::Ones(2);
  CHECK(t.distance(u, u) < 1e-15);
  CHECK(t.distance(u, -u) > 1.0);
}
