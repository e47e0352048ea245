#include "singext/b_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "singext/errors.hpp"

namespace singext {

namespace {

double spectral_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

// smallest singular value against a reference scale; the default is the
// largest singular value, which says nothing for 1 x 1 matrices
bool well_conditioned(const Mat& a, double scale = -1.0, double rel = 1e-12) {
  Eigen::JacobiSVD<Mat> svd(a);
  const RVec& s = svd.singularValues();
  const double ref = std::max(scale, s(0));
  return s(0) > 0.0 && s(s.size() - 1) > rel * ref;
}

Mat delta_from_gm(const GramSpec& gram, double z1) {
  const Mat gm = build_GM(gram, z1).gm;
  const Layout& lay = gram.layout;
  Mat out(lay.d, lay.d);
  for (int s = 0; s < lay.d; ++s) {
    for (int t = 0; t < lay.d; ++t) out(s, t) = gm(lay.slot(s, lay.m), lay.slot(t, lay.m));
  }
  return out;
}

// Coordinates of a random element of H_A^perp.
Vec random_perp(const GramSpec& gram, Rng& rng) {
  const PerpBasis pb = h_perp_basis(gram);
  if (pb.basis.cols() == 0) return Vec::Zero(gram.layout.size());
  return pb.basis * rng.complex_vector(pb.basis.cols());
}

// Finitely supported f# with coefficients decaying like w^{-(m+2)/2}/k.
ScaleVector random_regular(const SingularFamily& fam, Rng& rng, int support) {
  const auto n = static_cast<Eigen::Index>(fam.op.size());
  const auto len = std::min<Eigen::Index>(support, n);
  Vec c = Vec::Zero(n);
  const RVec& w = fam.op.weights();
  for (Eigen::Index k = 0; k < len; ++k) {
    c(k) = rng.complex_normal() * std::pow(w(k), -0.5 * (fam.m() + 2)) / static_cast<double>(k + 1);
  }
  return make_vector(fam.op, std::move(c), fam.m() + 2);
}

}  // namespace

BmaxGraphElement operator+(const BmaxGraphElement& a, const BmaxGraphElement& b) {
  return {a.f_sharp + b.f_sharp, a.c + b.c, a.chi + b.chi, a.k_perp + b.k_perp};
}

// --- Delta ---------------------------------------------------------------------

DeltaPair build_delta(const GramSpec& gram, double z1) {
  const Layout& lay = gram.layout;
  DeltaPair dp;
  dp.Gmin = gram.min_block();
  if (!well_conditioned(dp.Gmin, spectral_norm(gram.G))) throw Error(ErrorKind::Config, "Delta: G_A^min is singular");
  dp.Delta = delta_from_gm(gram, z1);
  Mat second = z1 * dp.Gmin;
  if (lay.m >= 2) {
    for (int s = 0; s < lay.d; ++s) {
      for (int t = 0; t < lay.d; ++t) second(s, t) += gram.G(lay.slot(s, lay.m - 1), lay.slot(t, lay.m));
    }
  }
  dp.formula_gap = max_abs(dp.Delta - second);
  if (dp.formula_gap > 1e-12 * (1.0 + std::abs(z1)) * max_abs(gram.G)) {
    std::ostringstream msg;
    msg << "Delta: the two defining formulas differ by " << dp.formula_gap
        << " (level symmetry of G_A fails)";
    throw Error(ErrorKind::Consistency, msg.str());
  }
  dp.DeltaHat = dp.Gmin.fullPivLu().solve(dp.Delta);
  return dp;
}

Mat eval_rhat(const DeltaPair& dp, cplx z) {
  const Mat x = dp.Delta - z * dp.Gmin;
  if (!well_conditioned(x, std::max(spectral_norm(dp.Delta), std::abs(z) * spectral_norm(dp.Gmin)))) {
    std::ostringstream msg;
    msg << "z = " << z << " is an eigenvalue of Delta-hat (pole of r-hat)";
    throw Error(ErrorKind::Pole, msg.str());
  }
  return dp.Gmin * x.fullPivLu().solve(dp.Gmin);
}

double rhat_perturbation_bound(const DeltaPair& dp, const GramSpec& gram, const RMat& gram_tail,
                               double z1, cplx z) {
  const Layout& lay = gram.layout;
  RMat dmin(lay.d, lay.d), doff = RMat::Zero(lay.d, lay.d);
  for (int s = 0; s < lay.d; ++s) {
    for (int t = 0; t < lay.d; ++t) {
      dmin(s, t) = gram_tail(lay.slot(s, lay.m), lay.slot(t, lay.m));
      if (lay.m >= 2) doff(s, t) = gram_tail(lay.slot(s, lay.m), lay.slot(t, lay.m - 1));
    }
  }
  const double e_min = dmin.norm();
  const double e_delta = std::abs(z1) * e_min + doff.norm();
  const Mat x = (dp.Delta - z * dp.Gmin).fullPivLu().inverse();
  const double nx = spectral_norm(x);
  const double ng = spectral_norm(dp.Gmin);
  // First-order expansion of G X G, doubled to cover the quadratic remainder.
  return 2.0 * (2.0 * e_min * nx * ng + ng * ng * nx * nx * (e_delta + std::abs(z) * e_min));
}

// --- Bmax ----------------------------------------------------------------------

ModelVector graph_domain(const SingularFamily& fam, const BmaxGraphElement& x) {
  ScaleVector reg = x.f_sharp + h_combination(fam, fam.m() + 1, x.c);
  reg.index = fam.m();
  return {std::move(reg), eta(fam.layout, x.chi)};
}

ModelVector apply_Bmax(const SingularFamily& fam, const GramSpec& gram, const BmaxGraphElement& x) {
  if (!in_h_perp(gram, x.k_perp)) {
    throw Error(ErrorKind::Domain, "Bmax: k_perp is not in H_A^perp ([G_A d]_m != 0)");
  }
  ScaleVector reg = apply_L(fam.op, x.f_sharp) + fam.z1() * h_combination(fam, fam.m() + 1, x.c);
  reg.index = fam.m();
  const Mat md = build_Md(fam.layout, fam.z1());
  return {std::move(reg), md * eta(fam.layout, x.chi) + eta(fam.layout, x.c) + x.k_perp};
}

Vec gammaP0(const BmaxGraphElement& x) { return x.c; }

Vec gammaP1(const SingularFamily& fam, const GramSpec& gram, const BmaxGraphElement& x) {
  return phi_pairing(fam, x.f_sharp) - gram.min_block() * x.chi;
}

GreenCheck green_check_B(const SingularFamily& fam, const GramSpec& gram,
                         const BmaxGraphElement& x, const BmaxGraphElement& y) {
  const cplx left = metric(fam, gram, graph_domain(fam, x), apply_Bmax(fam, gram, y));
  const cplx right = metric(fam, gram, apply_Bmax(fam, gram, x), graph_domain(fam, y));
  const cplx t1 = gammaP0(x).dot(gammaP1(fam, gram, y));
  const cplx t2 = gammaP1(fam, gram, x).dot(gammaP0(y));
  GreenCheck out;
  out.direct = left - right;
  out.formula = t1 - t2;
  const Mat delta = delta_from_gm(gram, fam.z1());
  out.predicted = x.chi.dot((delta - delta.adjoint()) * y.chi);
  const double scale = std::abs(left) + std::abs(right) + std::abs(t1) + std::abs(t2);
  out.residual = scale > 0.0 ? std::abs(out.direct - out.formula) / scale : 0.0;
  return out;
}

// --- gamma field and Weyl function ------------------------------------------------

BmaxGraphElement gamma_B(const SingularFamily& fam, const DeltaPair& dp, cplx z, const Vec& c) {
  if (c.size() != fam.d()) throw Error(ErrorKind::Config, "gamma field: expected d boundary values");
  fam.op.require_resolvent_point(z);
  const Mat shifted = z * Mat::Identity(fam.d(), fam.d()) - dp.DeltaHat;
  if (!well_conditioned(shifted, std::max(std::abs(z), spectral_norm(dp.DeltaHat)))) {
    std::ostringstream msg;
    msg << "z = " << z << " is an eigenvalue of Delta-hat";
    throw Error(ErrorKind::Pole, msg.str());
  }
  BmaxGraphElement out;
  out.f_sharp = (z - fam.z1()) * resolvent_L(fam.op, z, h_combination(fam, fam.m() + 1, c));
  out.c = c;
  out.chi = shifted.fullPivLu().solve(c);
  const Layout& lay = fam.layout;
  const Mat zm = z * Mat::Identity(lay.size(), lay.size()) - build_Md(lay, fam.z1());
  out.k_perp = zm * eta(lay, out.chi) - eta(lay, c);
  return out;
}

ModelVector eval_gamma_B(const SingularFamily& fam, const DeltaPair& dp, cplx z, const Vec& c) {
  return graph_domain(fam, gamma_B(fam, dp, z, c));
}

WeylSample eval_M_B(const SingularFamily& fam, const DeltaPair& dp, cplx z) {
  WeylSample out;
  out.z = z;
  out.r = eval_rhat(dp, z);
  out.q = eval_q(fam, z, &out.q_tail);
  out.M = out.q + out.r;
  return out;
}

// --- resolvents ------------------------------------------------------------------

BmaxGraphElement resolvent_B0_element(const SingularFamily& fam, const GramSpec& gram,
                                      const DeltaPair& dp, cplx z, const ModelVector& v) {
  const Layout& lay = fam.layout;
  if (v.singular.size() != lay.size()) throw Error(ErrorKind::Config, "resolvent: coordinate size mismatch");
  const Mat shifted = dp.DeltaHat - z * Mat::Identity(lay.d, lay.d);
  if (!well_conditioned(shifted, std::max(std::abs(z), spectral_norm(dp.DeltaHat)))) {
    std::ostringstream msg;
    msg << "z = " << z << " is an eigenvalue of Delta-hat (point spectrum of B0)";
    throw Error(ErrorKind::Pole, msg.str());
  }
  BmaxGraphElement out;
  out.f_sharp = resolvent_L(fam.op, z, v.regular);
  out.c = Vec::Zero(lay.d);
  out.chi = shifted.fullPivLu().solve(phi_map(gram, v.singular));
  const Mat mz = build_Md(lay, fam.z1()) - z * Mat::Identity(lay.size(), lay.size());
  out.k_perp = v.singular - mz * eta(lay, out.chi);
  return out;
}

ModelVector resolvent_B0(const SingularFamily& fam, const GramSpec& gram, const DeltaPair& dp,
                         cplx z, const ModelVector& v) {
  return graph_domain(fam, resolvent_B0_element(fam, gram, dp, z, v));
}

AdjointRoutes gamma_B_adjoint(const SingularFamily& fam, const GramSpec& gram, const DeltaPair& dp,
                              cplx z, const ModelVector& v) {
  AdjointRoutes out;
  out.by_metric = Vec(fam.d());
  for (int s = 0; s < fam.d(); ++s) {
    out.by_metric(s) = metric(fam, gram, eval_gamma_B(fam, dp, std::conj(z), Vec::Unit(fam.d(), s)), v);
  }
  out.by_boundary = gammaP1(fam, gram, resolvent_B0_element(fam, gram, dp, z, v));
  out.gap = (out.by_metric - out.by_boundary).norm() / std::max(1.0, out.by_metric.norm());
  return out;
}

BmaxGraphElement resolvent_BTheta_element(const SingularFamily& fam, const GramSpec& gram,
                                          const DeltaPair& dp, const ThetaRelation& theta, cplx z,
                                          const ModelVector& v, double tol) {
  const BmaxGraphElement base = resolvent_B0_element(fam, gram, dp, z, v);
  const AdjointRoutes routes = gamma_B_adjoint(fam, gram, dp, z, v);
  if (routes.gap > tol) {
    std::ostringstream msg;
    msg << "gamma'(conj z)^*: metric and boundary routes differ (relative " << routes.gap << ")";
    throw Error(ErrorKind::Consistency, msg.str());
  }
  const Mat t = theta_minus_M_inverse(theta, eval_M_B(fam, dp, z).M, z);
  return base + gamma_B(fam, dp, z, t * routes.by_metric);
}

ModelVector resolvent_BTheta(const SingularFamily& fam, const GramSpec& gram, const DeltaPair& dp,
                             const ThetaRelation& theta, cplx z, const ModelVector& v) {
  return graph_domain(fam, resolvent_BTheta_element(fam, gram, dp, theta, z, v));
}

ScaleVector compressed_resolvent_B(const SingularFamily& fam, const DeltaPair& dp,
                                   const ThetaRelation& theta, cplx z, const ScaleVector& f) {
  return compressed_resolvent(fam, theta, eval_M_B(fam, dp, z).M, z, f);
}

// --- symmetry of Bmin ----------------------------------------------------------------

BmaxGraphElement random_graph_element(const SingularFamily& fam, const GramSpec& gram, Rng& rng,
                                      int support) {
  BmaxGraphElement out;
  out.f_sharp = random_regular(fam, rng, support);
  out.c = rng.complex_vector(fam.d());
  out.chi = rng.complex_vector(fam.d());
  out.k_perp = random_perp(gram, rng);
  return out;
}

BmaxGraphElement random_kernel_element(const SingularFamily& fam, const GramSpec& gram, Rng& rng,
                                       int support) {
  BmaxGraphElement out = random_graph_element(fam, gram, rng, support);
  out.c = Vec::Zero(fam.d());
  // Correct f# along u_s = (L - z1)^{-1} h_{s,m+1}, whose phi-pairings form
  // the nonsingular Gram matrix of the phi_s in h_{-m-2}.
  const int d = fam.d();
  std::vector<ScaleVector> u;
  Mat p(d, d);
  for (int s = 0; s < d; ++s) u.push_back(apply_b(fam.op, -1, build_h(fam, s, fam.m() + 1)));
  for (int s = 0; s < d; ++s) p.col(s) = phi_pairing(fam, u[s]);
  const Vec t = p.fullPivLu().solve(gram.min_block() * out.chi - phi_pairing(fam, out.f_sharp));
  for (int s = 0; s < d; ++s) out.f_sharp = out.f_sharp + t(s) * u[s];
  out.f_sharp.index = fam.m() + 2;
  return out;
}

SymmetryReport check_symmetry_Bmin(const SingularFamily& fam, const GramSpec& gram, int samples,
                                   std::uint64_t seed, double tol) {
  Rng rng(seed);
  SymmetryReport rep;
  rep.samples = samples;
  rep.tol = tol;
  for (int i = 0; i < samples; ++i) {
    const BmaxGraphElement x = random_kernel_element(fam, gram, rng);
    const BmaxGraphElement y = random_kernel_element(fam, gram, rng);
    rep.max_residual = std::max(rep.max_residual, green_check_B(fam, gram, x, y).residual);
  }
  rep.symmetric = rep.max_residual <= tol;
  return rep;
}

BmaxGraphElement surjectivity_witness(const SingularFamily& fam, const GramSpec& gram,
                                      const Vec& a, const Vec& b, const Vec& chi0, cplx z0) {
  const Mat q0 = eval_q(fam, z0);
  const Vec w = q0.fullPivLu().solve(b + gram.min_block() * chi0);
  BmaxGraphElement out;
  out.f_sharp = (z0 - fam.z1()) * resolvent_L(fam.op, z0, h_combination(fam, fam.m() + 1, w));
  out.c = a;
  out.chi = chi0;
  out.k_perp = Vec::Zero(fam.layout.size());
  return out;
}

// --- simplicity ------------------------------------------------------------------------

std::vector<cplx> default_simplicity_points() {
  std::vector<cplx> pts;
  for (double t : {1.0, 2.0, 4.0, 8.0}) pts.emplace_back(0.0, t);
  for (double t : {1.0, 2.0}) pts.emplace_back(t, t);
  for (double t : {1.0, 2.0}) pts.emplace_back(t, -t);
  return pts;
}

SimplicityReport check_simplicity(const SingularFamily& fam, const DeltaPair& dp,
                                  const std::vector<cplx>& points, int trial_modes,
                                  double threshold) {
  const int d = fam.d();
  const int k = std::min<int>(trial_modes, static_cast<int>(fam.op.size()));
  if (k < 1) throw Error(ErrorKind::Config, "simplicity: need at least one trial mode");
  SimplicityReport rep;
  rep.threshold = threshold;
  rep.trial_modes = k;
  rep.samples = points;

  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (dp.Gmin + dp.Gmin.adjoint()));
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorKind::Config, "simplicity: G_A^min must be positive definite");
  }
  const Mat gmin_inv_sqrt = eig.operatorInverseSqrt();
  const RVec& lambda = fam.op.eigenvalues();
  const RVec& w = fam.op.weights();

  Mat a(d * static_cast<int>(points.size()), k + d);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const cplx z = points[p];
    if (z.imag() == 0.0) throw Error(ErrorKind::Config, "simplicity: sample points must be nonreal");
    const int row = d * static_cast<int>(p);
    for (int s = 0; s < d; ++s) {
      for (int i = 0; i < k; ++i) {
        a(row + s, i) = std::conj(fam.phi[s].coeffs(i)) * std::pow(w(i), -0.5 * fam.m()) / (lambda(i) - z);
      }
    }
    a.block(row, k, d, d) = -eval_rhat(dp, z) * gmin_inv_sqrt;
  }
  Eigen::JacobiSVD<Mat> svd(a);
  const RVec& sv = svd.singularValues();
  rep.sigma_max = sv(0);
  rep.sigma_min = sv(sv.size() - 1);
  if (rep.sigma_min <= 1e-12 * rep.sigma_max) {
    rep.verdict = "degenerate";
  } else if (rep.sigma_min > threshold) {
    rep.verdict = "simple";
  } else {
    rep.verdict = "inconclusive";
  }
  return rep;
}

}  // namespace singext
