// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Fixtures: the power-law fixture with G = G~ (B-model), the m = 2, d = 1
// anti-triangular G = [[0,1],[1,1]] (A-model), plus m = 1, d = 2 and the
// degenerate explicit functional for the controls.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "singext/b_model.hpp"
#include "singext/errors.hpp"
#include "singext/gram_conditions.hpp"
#include "singext/nevanlinna_audit.hpp"
#include "singext/verify.hpp"

using namespace singext;

namespace {

struct Fixture {
  SingularFamily fam;
  GramSpec gram;
  std::optional<GramTilde> tilde;
};

Fixture power_fixture(int m, int d, std::size_t n, bool antitriangular) {
  const auto op = SpectralOperator::power_law({1.0, 2.0, 0.0}, n, -1.0);
  SingularFamily fam = make_power_family(op, m, d);
  if (antitriangular) {
    return {fam, assess_gram(antitriangular_gram(fam.layout, {1.0, 1.0}), fam.layout), std::nullopt};
  }
  GramTilde gt = gram_tilde(fam);
  GramSpec g = assess_gram(gt.G, fam.layout);
  return {std::move(fam), std::move(g), std::move(gt)};
}

double gap(const SingularFamily& fam, const ModelVector& a, const ModelVector& b) {
  return model_norm(fam, a - b) / std::max(1e-300, std::max(model_norm(fam, a), model_norm(fam, b)));
}

std::vector<cplx> nonreal(Rng& rng, int count) {
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) out.emplace_back(rng.uniform(-4.0, 11.0), rng.uniform(0.2, 6.0) * (i % 2 ? -1.0 : 1.0));
  return out;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++failures;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

template <class F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    report(id, false, std::string("error ") + to_string(e.kind()) + ": " + e.what());
  }
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const Fixture fx1 = power_fixture(2, 1, 2000, false);
  const Fixture anti = power_fixture(2, 1, 2000, true);
  const Fixture d2 = power_fixture(2, 2, 2000, false);
  const Fixture m1 = power_fixture(1, 1, 2000, false);
  const DeltaPair dp1 = build_delta(fx1.gram, -1.0);
  const DeltaPair dpd2 = build_delta(d2.gram, -1.0);
  const std::vector<cplx> grid = default_grid();

  // 1. boundary form of Amax
  guarded(1, [&] {
    Rng rng(101);
    double worst = 0.0;
    for (const Fixture* f : {&anti, &fx1}) {
      for (int i = 0; i < 100; ++i) {
        const auto x = random_domain_element(f->fam, rng), y = random_domain_element(f->fam, rng);
        worst = std::max(worst, boundary_form(f->fam, f->gram, x, y, 1.0).residual);
      }
    }
    report(1, worst <= 1e-9, "boundary form, 2 x 100 pairs, max rel residual " + num(worst) + " (tol 1e-9)");
  });

  // 2. Green identity for Gamma' and the broken-symmetry control
  guarded(2, [&] {
    Rng rng(202);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_graph_element(fx1.fam, fx1.gram, rng), y = random_graph_element(fx1.fam, fx1.gram, rng);
      worst = std::max(worst, green_check_B(fx1.fam, fx1.gram, x, y).residual);
    }
    Mat broken = fx1.gram.G;
    broken(0, 1) += cplx(0.0, 0.08);
    broken(1, 0) -= cplx(0.0, 0.08);
    const GramSpec gb = assess_gram(broken, fx1.fam.layout);
    double control = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_graph_element(fx1.fam, gb, rng), y = random_graph_element(fx1.fam, gb, rng);
      control = std::max(control, green_check_B(fx1.fam, gb, x, y).residual);
    }
    report(2, worst <= 1e-9 && control > 1e-3,
           "Green identity max rel residual " + num(worst) + " (tol 1e-9); perturbed control " + num(control) + " (> 1e-3)");
  });

  // 3. eigen-fields
  guarded(3, [&] {
    Rng rng(303);
    double wa = 0.0, wb = 0.0;
    for (const cplx z : nonreal(rng, 20)) {
      const Vec c = rng.complex_vector(1);
      for (const Fixture* f : {&fx1, &anti}) {
        const DomainElementA e = gamma_A(f->fam, z, c);
        wa = std::max(wa, gap(f->fam, apply_Amax(f->fam, e), z * to_model_vector(f->fam, e)));
      }
      const BmaxGraphElement b = gamma_B(fx1.fam, dp1, z, c);
      wb = std::max(wb, gap(fx1.fam, apply_Bmax(fx1.fam, fx1.gram, b), z * graph_domain(fx1.fam, b)));
      const Vec c2 = rng.complex_vector(2);
      const BmaxGraphElement b2 = gamma_B(d2.fam, dpd2, z, c2);
      wb = std::max(wb, gap(d2.fam, apply_Bmax(d2.fam, d2.gram, b2), z * graph_domain(d2.fam, b2)));
    }
    report(3, wa <= 1e-9 && wb <= 1e-9, "20 nonreal z: Amax gamma_A " + num(wa) + ", Bmax gamma_B " + num(wb) + " (tol 1e-9)");
  });

  // 4. two-path Weyl functions, m = 1 degeneracy
  guarded(4, [&] {
    double wa = 0.0, wb = 0.0, deg = 0.0;
    for (const cplx z : grid) {
      for (const Fixture* f : {&fx1, &anti}) {
        const Mat m = eval_M_A(f->fam, f->gram, z).M;
        const Vec path = gamma1(f->fam, f->gram, gamma_A(f->fam, z, Vec::Ones(1)));
        wa = std::max(wa, std::abs(path(0) - m(0, 0)) / std::max(1.0, std::abs(m(0, 0))));
      }
      const Mat mb = eval_M_B(d2.fam, dpd2, z).M;
      for (int s = 0; s < 2; ++s) {
        const Vec path = gammaP1(d2.fam, d2.gram, gamma_B(d2.fam, dpd2, z, Vec::Unit(2, s)));
        wb = std::max(wb, (path - mb.col(s)).norm() / std::max(1.0, mb.norm()));
      }
      const Mat m1b = eval_M_B(fx1.fam, dp1, z).M;
      const Vec p1 = gammaP1(fx1.fam, fx1.gram, gamma_B(fx1.fam, dp1, z, Vec::Ones(1)));
      wb = std::max(wb, std::abs(p1(0) - m1b(0, 0)) / std::max(1.0, std::abs(m1b(0, 0))));
      const DeltaPair dm = build_delta(m1.gram, -1.0);
      deg = std::max(deg, max_abs(eval_rhat(dm, z) - eval_r(m1.gram, -1.0, z)));
      deg = std::max(deg, std::abs(dm.DeltaHat(0, 0) - cplx(-1.0)));
    }
    report(4, grid.size() == 12 && wa <= 1e-8 && wb <= 1e-8 && deg <= 1e-12,
           std::to_string(grid.size()) + "-point grid: A " + num(wa) + ", B " + num(wb) + " (tol 1e-8); m = 1 |r-hat - r|, |Delta-hat - z1| " + num(deg) + " (tol 1e-12)");
  });

  // 5. resolvent identities
  guarded(5, [&] {
    Rng rng(505);
    const ThetaRelation theta = ThetaRelation::from_matrix(Mat::Constant(1, 1, 0.7));
    Mat t2(2, 2);
    t2 << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), -0.3;
    const ThetaRelation theta2 = ThetaRelation::from_matrix(t2);
    const ThetaRelation zero1 = ThetaRelation::zero_relation(1), zero2 = ThetaRelation::zero_relation(2);
    double ia = 0.0, ib = 0.0, red = 0.0;
    const auto pts = nonreal(rng, 10);
    for (int i = 0; i < 5; ++i) {
      const cplx z = pts[2 * i], w = pts[2 * i + 1];
      const ModelVector va = random_model_vector(anti.fam, rng);
      const ModelVector rw = resolvent_ATheta(anti.fam, anti.gram, theta, w, va);
      ia = std::max(ia, gap(anti.fam, resolvent_ATheta(anti.fam, anti.gram, theta, z, va) - rw,
                            (z - w) * resolvent_ATheta(anti.fam, anti.gram, theta, z, rw)));
      red = std::max(red, gap(anti.fam, resolvent_ATheta(anti.fam, anti.gram, zero1, z, va), resolvent_A0(anti.fam, z, va)));
      for (const auto* f : {&fx1, &d2}) {
        const DeltaPair& dp = f == &fx1 ? dp1 : dpd2;
        const ThetaRelation& th = f == &fx1 ? theta : theta2;
        const ThetaRelation& zr = f == &fx1 ? zero1 : zero2;
        const ModelVector v = random_model_vector(f->fam, rng);
        const ModelVector rbw = resolvent_BTheta(f->fam, f->gram, dp, th, w, v);
        ib = std::max(ib, gap(f->fam, resolvent_BTheta(f->fam, f->gram, dp, th, z, v) - rbw,
                              (z - w) * resolvent_BTheta(f->fam, f->gram, dp, th, z, rbw)));
        red = std::max(red, gap(f->fam, resolvent_BTheta(f->fam, f->gram, dp, zr, z, v), resolvent_B0(f->fam, f->gram, dp, z, v)));
      }
    }
    report(5, ia <= 1e-8 && ib <= 1e-8 && red == 0.0,
           "5 pairs: A_Theta " + num(ia) + ", B_Theta " + num(ib) + " (tol 1e-8); zero relation vs A0/B0 " + num(red) + " (exact)");
  });

  // 6. compressed resolvents, including the scalar-denominator form for d = 1
  guarded(6, [&] {
    Rng rng(606);
    const double th = 0.7;
    const ThetaRelation theta = ThetaRelation::from_matrix(Mat::Constant(1, 1, th));
    double wa = 0.0, wb = 0.0, scalar = 0.0;
    for (const cplx z : nonreal(rng, 5)) {
      ModelVector f = random_model_vector(fx1.fam, rng);
      f.singular.setZero();
      const ScaleVector ca = compressed_resolvent_A(anti.fam, anti.gram, theta, z, f.regular);
      const ModelVector fa = resolvent_ATheta(anti.fam, anti.gram, theta, z, f);
      wa = std::max(wa, (ca.coeffs - fa.regular.coeffs).norm() / fa.regular.coeffs.norm());
      const ScaleVector cb = compressed_resolvent_B(fx1.fam, dp1, theta, z, f.regular);
      const ModelVector fb = resolvent_BTheta(fx1.fam, fx1.gram, dp1, theta, z, f);
      wb = std::max(wb, (cb.coeffs - fb.regular.coeffs).norm() / fb.regular.coeffs.norm());
      // (L - z)^{-1} f + <phi, (L - z)^{-1} f> / (theta - q - r-hat) (L - z)^{-1} h_m, coefficientwise
      const RVec& lam = fx1.fam.op.eigenvalues();
      const RVec& w = fx1.fam.op.weights();
      const Vec& phi = fx1.fam.phi[0].coeffs;
      cplx pairing = 0.0;
      for (Eigen::Index k = 0; k < lam.size(); ++k) pairing += std::conj(phi(k)) * f.regular.coeffs(k) / (lam(k) - z);
      const cplx den = th - eval_q(fx1.fam, z)(0, 0) - eval_rhat(dp1, z)(0, 0);
      Vec u(lam.size());
      for (Eigen::Index k = 0; k < lam.size(); ++k) {
        u(k) = f.regular.coeffs(k) / (lam(k) - z) + pairing / den * phi(k) / (w(k) * w(k)) / (lam(k) - z);
      }
      scalar = std::max(scalar, (u - fb.regular.coeffs).norm() / fb.regular.coeffs.norm());
    }
    report(6, wa <= 1e-8 && wb <= 1e-8 && scalar <= 1e-8,
           "compressed vs projected full path: A " + num(wa) + ", B " + num(wb) + "; d = 1 scalar form " + num(scalar) + " (tol 1e-8)");
  });

  // 7. Nevanlinna audit
  guarded(7, [&] {
    Rng rng(707);
    int nb = 0;
    for (const auto& pts : random_point_sets(rng, 20, 8, -1.0)) {
      nb = std::max(nb, count_negative_squares(build_pick([&](cplx z) { return eval_M_B(fx1.fam, dp1, z).M; }, pts)).count);
      nb = std::max(nb, count_negative_squares(build_pick([&](cplx z) { return eval_M_B(d2.fam, dpd2, z).M; }, pts)).count);
    }
    int na = 0;
    for (const auto& pts : default_point_sets(-1.0)) {
      na = std::max(na, count_negative_squares(build_pick([&](cplx z) { return eval_M_A(anti.fam, anti.gram, z).M; }, pts)).count);
    }
    const StrictnessReport st = check_symmetry_and_strictness([&](cplx z) { return eval_M_B(fx1.fam, dp1, z).M; }, grid);
    const StrictnessReport st2 = check_symmetry_and_strictness([&](cplx z) { return eval_M_B(d2.fam, dpd2, z).M; }, grid);
    double im = 0.0;
    for (const DeltaPair* dp : {&dp1, &dpd2}) {
      Eigen::ComplexEigenSolver<Mat> es(dp->DeltaHat, false);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) im = std::max(im, std::abs(es.eigenvalues()(i).imag()));
    }
    const double min_im = std::min(st.min_im_eigenvalue, st2.min_im_eigenvalue);
    report(7, nb == 0 && na >= 1 && min_im > 0.0 && im <= 1e-10,
           "M_B negative squares " + std::to_string(nb) + " over 20 sets; M_A (anti-triangular) " + std::to_string(na) +
               "; min eig Im M_B/Im z " + num(min_im) + "; |Im spec Delta-hat| " + num(im));
  });

  // 8. structural inclusions
  guarded(8, [&] {
    Rng rng(808);
    double incl = 0.0, decomp = 0.0, compat = 0.0;
    for (const Fixture* f : {&fx1, &d2}) {
      const Layout& lay = f->fam.layout;
      const GMProduct gm = build_GM(f->gram, -1.0);
      for (int i = 0; i < 20; ++i) {
        const Vec c = rng.complex_vector(lay.d);
        const DomainElementA x{zero_vector(f->fam.op, lay.m + 2), Vec::Zero(lay.d), eta(lay, c)};
        const Vec diff = apply_Amax_prime(f->fam, f->gram, x).singular - apply_Amax(f->fam, x).singular;
        incl = std::max(incl, top_block(lay, f->gram.G * diff).norm() / (max_abs(f->gram.G) * std::max(1.0, diff.norm())));
        const Vec d = rng.complex_vector(lay.size());
        const Vec perp = perp_component(f->gram, d);
        decomp = std::max(decomp, (eta(lay, phi_map(f->gram, d)) + perp - d).norm() / d.norm());
        decomp = std::max(decomp, top_block(lay, f->gram.G * perp).norm() / (max_abs(f->gram.G) * d.norm()));
        const Vec xi = rng.complex_vector(lay.size());
        const Compatibility cp = solve_compatibility(f->gram, -1.0, xi);
        compat = std::max(compat, (gm.gm.adjoint() * xi - f->gram.G * cp.xi_prime).norm());
      }
    }
    report(8, incl <= 1e-10 && decomp <= 1e-15 && compat < 1e-10,
           "(A'max - Amax) eta(c) in H_perp " + num(incl) + " (tol 1e-10); decomposition " + num(decomp) +
               "; compatibility residual " + num(compat) + " (< 1e-10)");
  });

  // 9. truncation stability, N = 1000 -> 2000
  guarded(9, [&] {
    double ratio = 0.0, rel = 0.0;
    int count = 0;
    auto record = [&](cplx coarse, cplx fine, double bound) {
      const double delta = std::abs(fine - coarse);
      ratio = std::max(ratio, bound > 0.0 ? delta / bound : (delta > 0.0 ? INFINITY : 0.0));
      rel = std::max(rel, delta / std::max(std::abs(fine), 1e-300));
      ++count;
    };
    for (const bool a_model : {false, true}) {
      const Fixture coarse = power_fixture(2, 1, 1000, a_model);
      const Fixture& fine = a_model ? anti : fx1;
      RMat gtail = RMat::Zero(2, 2);
      if (!a_model) {
        gtail = coarse.tilde->tail;
        for (int i = 0; i < 2; ++i) {
          for (int k = 0; k < 2; ++k) record(coarse.gram.G(i, k), fine.gram.G(i, k), gtail(i, k));
        }
      }
      const DeltaPair dc = build_delta(coarse.gram, -1.0);
      for (const cplx z : grid) {
        RMat qtail;
        const Mat qc = eval_q(coarse.fam, z, &qtail);
        const Mat qf = eval_q(fine.fam, z);
        record(qc(0, 0), qf(0, 0), qtail(0, 0));
        if (a_model) {
          record(qc(0, 0) + eval_r(coarse.gram, -1.0, z)(0, 0), qf(0, 0) + eval_r(fine.gram, -1.0, z)(0, 0), qtail(0, 0));
        } else {
          const double extra = rhat_perturbation_bound(dc, coarse.gram, gtail, -1.0, z);
          record(qc(0, 0) + eval_rhat(dc, z)(0, 0), qf(0, 0) + eval_rhat(dp1, z)(0, 0), qtail(0, 0) + extra);
        }
      }
    }
    report(9, ratio < 1.0 && rel < 1e-4,
           std::to_string(count) + " scalars: max delta/tail bound " + num(ratio) + " (< 1), max relative delta " + num(rel) + " (< 1e-4)");
  });

  // 10. simplicity evidence
  guarded(10, [&] {
    const SimplicityReport good = check_simplicity(fx1.fam, dp1, default_simplicity_points());
    Vec phi = Vec::Zero(3);
    phi << 1.0, 0.0, 1.0;
    const SingularFamily deg = make_explicit_family(fx1.fam.op, 2, {phi});
    const GramSpec gd = assess_gram(gram_tilde(deg).G, deg.layout);
    const SimplicityReport bad = check_simplicity(deg, build_delta(gd, -1.0), default_simplicity_points());
    report(10, good.verdict == "simple" && good.sigma_min > good.threshold && bad.verdict == "degenerate",
           "fixture sigma_min " + num(good.sigma_min) + " (" + good.verdict + "); degenerate control sigma_min " + num(bad.sigma_min) + " (" + bad.verdict + ")");
  });

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("runtime %.2f s, %d criteria failed\n", secs, failures);
  return failures == 0 ? 0 : 1;
}
