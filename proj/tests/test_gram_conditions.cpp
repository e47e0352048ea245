#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "singext/errors.hpp"
#include "singext/gram_conditions.hpp"

using namespace singext;

namespace {

// Random Hermitian G on the layout.
Mat random_hermitian(Rng& rng, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) a(i, k) = rng.complex_normal();
  }
  return 0.5 * (a + a.adjoint());
}

// Random G satisfying G_M = G_M^*: block Hankel, zero above each anti-diagonal.
Mat random_gacomm(Rng& rng, const Layout& lay) {
  std::vector<Mat> blocks;  // Hermitian d x d per anti-diagonal
  for (int t = 0; t < lay.m; ++t) blocks.push_back(random_hermitian(rng, lay.d));
  Mat g = Mat::Zero(lay.size(), lay.size());
  for (int s = 0; s < lay.d; ++s) {
    for (int s2 = 0; s2 < lay.d; ++s2) {
      for (int j = 1; j <= lay.m; ++j) {
        for (int j2 = 1; j2 <= lay.m; ++j2) {
          if (j + j2 >= lay.m + 1) g(lay.slot(s, j), lay.slot(s2, j2)) = blocks[j + j2 - lay.m - 1](s, s2);
        }
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("Jordan matrix at z1") {
  CHECK(build_M(1, -1.0)(0, 0) == -1.0);
  RMat m3(3, 3);
  m3 << -1, 1, 0, 0, -1, 1, 0, 0, -1;
  CHECK(build_M(3, -1.0) == m3);
  RMat m2(2, 2);
  m2 << 0, 1, 0, 0;
  CHECK(build_M(2, 0.0) == m2);
}

TEST_CASE("G_M products") {
  Mat g(2, 2);
  g << 0, 1, 1, 2;
  const GMProduct p = build_GM(assess_gram(g, {2, 1}), 0.0);
  Mat expect(2, 2);
  expect << 0, 0, 0, 1;
  CHECK(p.gm == expect);
  CHECK(max_abs(p.defect) == 0.0);
  const GramSpec m1 = assess_gram(Mat::Constant(1, 1, 3.0), {1, 1});
  CHECK(std::abs(build_GM(m1, -2.0).gm(0, 0) - cplx(-6.0)) < 1e-15);
}

TEST_CASE("GAcomm examples") {
  CHECK(check_gacomm(fx::hankel2(0.4, 1.1)).holds);
  CHECK(fx::hankel2(0.4, -1.1).flags.gacomm);
  const auto fam = fx::family(2, 1);
  const GacommReport rep = check_gacomm(fx::tilde_gram(fam));
  CHECK_FALSE(rep.holds);
  REQUIRE_FALSE(rep.violations.empty());
  // the (1,1;1,1) entry is positive where the relations demand zero
  bool saw = false;
  for (const auto& v : rep.violations) saw = saw || (v.j == 1 && v.j2 == 1);
  CHECK(saw);
  Rng rng(1);
  CHECK(check_gacomm(assess_gram(random_hermitian(rng, 2) + 3.0 * Mat::Identity(2, 2), {1, 2})).holds);
}

TEST_CASE("B-model conditions") {
  const auto fam = fx::family(2, 1);
  const BModelReport rep = check_bmodel(fx::tilde_gram(fam));
  CHECK(rep.a2);
  CHECK(rep.min_positive);
  CHECK(rep.holds);
  CHECK(check_bmodel(fx::hankel2(0.3, 2.0)).holds);
  CHECK_FALSE(check_bmodel(fx::hankel2(0.3, -2.0)).holds);
  CHECK(check_bmodel(assess_gram(Mat::Constant(1, 1, 0.5), {1, 1})).holds);
  Mat g = fx::tilde_gram(fam).G;
  g(0, 1) += cplx(0.0, 0.05);
  g(1, 0) -= cplx(0.0, 0.05);
  const BModelReport broken = check_bmodel(assess_gram(g, {2, 1}));
  CHECK_FALSE(broken.a2);
  CHECK(broken.a2_defect > 0.09);
}

TEST_CASE("compatibility solve") {
  const GramSpec m1 = assess_gram(Mat::Constant(1, 1, 0.5), {1, 1});
  const Vec xi = Vec::Constant(1, cplx(1.0, 2.0));
  CHECK((solve_compatibility(m1, -1.0, xi).xi_prime + xi).norm() < 1e-15);
  const auto fam = fx::family(2, 1);
  const GramSpec g = fx::tilde_gram(fam);
  CHECK(solve_compatibility(g, -1.0, Vec::Zero(2)).xi_prime.norm() == 0.0);
  Rng rng(6);
  const GMProduct gm = build_GM(g, -1.0);
  for (int t = 0; t < 20; ++t) {
    const Vec x = rng.complex_vector(2);
    const Compatibility c = solve_compatibility(g, -1.0, x);
    CHECK((gm.gm.adjoint() * x - g.G * c.xi_prime).norm() < 1e-10 * x.norm());
  }
}

TEST_CASE("flag assessment") {
  const GramSpec zero = assess_gram(Mat::Zero(2, 2), {2, 1});
  CHECK_FALSE(zero.flags.invertible);
  Mat nh(2, 2);
  nh << 1, 2, 0, 1;
  CHECK_FALSE(assess_gram(nh, {2, 1}).flags.hermitian);
  CHECK_THROWS_AS(assess_gram(Mat::Identity(3, 3), {2, 1}), Error);
}

TEST_CASE("property: GAcomm holds exactly when G_M is Hermitian") {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const Layout lay{1 + static_cast<int>(rng.bits() % 6), 1 + static_cast<int>(rng.bits() % 3)};
    Mat g = random_gacomm(rng, lay);
    if (t % 2 == 1) {
      // one Hermitian perturbation at a random entry pair
      const int a = static_cast<int>(rng.bits() % lay.size()), b = static_cast<int>(rng.bits() % lay.size());
      const cplx e = a == b ? cplx(rng.normal()) : rng.complex_normal();
      g(a, b) += e;
      if (a != b) g(b, a) += std::conj(e);
    }
    const GramSpec gs = assess_gram(g, lay);
    const double z1 = rng.uniform(-3.0, 1.0);
    const bool hermitian_gm = max_abs(build_GM(gs, z1).defect) <= 1e-12 * (1.0 + std::abs(z1)) * max_abs(g);
    CHECK(check_gacomm(gs).holds == hermitian_gm);
    if (t % 2 == 0) CHECK(check_gacomm(gs).holds);
  }
}

TEST_CASE("property: anti-triangular builder satisfies GAcomm") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const Layout lay{1 + static_cast<int>(rng.bits() % 5), 1 + static_cast<int>(rng.bits() % 3)};
    std::vector<double> ad;
    for (int i = 0; i < lay.m; ++i) ad.push_back(i == 0 ? 1.0 + rng.uniform() : rng.normal());
    const GramSpec gs = assess_gram(antitriangular_gram(lay, ad, rng.uniform(-0.4, 0.4)), lay);
    CHECK(gs.flags.hermitian);
    CHECK(gs.flags.gacomm);
    CHECK(max_abs(build_GM(gs, -1.0).defect) < 1e-14);
  }
}

TEST_CASE("property: compatibility residual on random A2 Grams") {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    const Layout lay{2 + static_cast<int>(rng.bits() % 3), 1 + static_cast<int>(rng.bits() % 2)};
    Mat g = random_hermitian(rng, lay.size()) + 4.0 * Mat::Identity(lay.size(), lay.size());
    const GramSpec gs = assess_gram(g, lay);
    if (!gs.flags.invertible) continue;
    const double z1 = rng.uniform(-2.0, 0.5);
    const Vec x = rng.complex_vector(lay.size());
    const Compatibility c = solve_compatibility(gs, z1, x);
    CHECK((build_GM(gs, z1).gm.adjoint() * x - g * c.xi_prime).norm() < 1e-10 * max_abs(g) * x.norm());
  }
}
