#include "singext/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "singext/b_model.hpp"
#include "singext/errors.hpp"
#include "singext/gram_conditions.hpp"
#include "singext/nevanlinna_audit.hpp"

namespace singext {

using nlohmann::json;

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kWeylTol = 1e-8;
constexpr double kResolventTol = 1e-8;

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

double model_gap(const SingularFamily& fam, const ModelVector& a, const ModelVector& b) {
  return rel(model_norm(fam, a - b), std::max(model_norm(fam, a), model_norm(fam, b)));
}

// Self-adjoint relation used for resolvent identities: the configured theta when
// it is self-adjoint and nontrivial, otherwise 0.5 I.
ThetaRelation selfadjoint_theta(const ModelConfig& cfg, int d) {
  if (cfg.theta_given && cfg.theta.self_adjoint() && max_abs(cfg.theta.X) > 0.0) return cfg.theta;
  return ThetaRelation::from_matrix(0.5 * Mat::Identity(d, d));
}

std::vector<cplx> random_nonreal(Rng& rng, int count, double z1) {
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) {
    const double im = rng.uniform(0.2, 6.0) * (i % 2 == 0 ? 1.0 : -1.0);
    out.emplace_back(rng.uniform(z1 - 3.0, z1 + 10.0), im);
  }
  return out;
}

struct Context {
  const ModelConfig& cfg;
  const ModelInstance& inst;
  std::uint64_t seed;
  bool b_ready = false;
  DeltaPair dp;
};

using Suite = std::function<SuiteResult(Context&)>;

SuiteResult make(const std::string& name) { return {name, "pass", "", json::object()}; }

void require(SuiteResult& r, bool ok, const std::string& why) {
  if (!ok && r.status != "fail") {
    r.status = "fail";
    r.note = why;
  }
}

SuiteResult skip(const std::string& name, const std::string& why) { return {name, "skip", why, json::object()}; }

// --- suites --------------------------------------------------------------------------

SuiteResult suite_spectral(Context& c) {
  SuiteResult r = make("spectral_core");
  const SpectralOperator& op = c.inst.op;
  Rng rng(c.seed ^ 0x11);
  double herm = 0.0, inv = 0.0, bound_excess = 0.0;
  const cplx z(op.z1() + 1.5, 0.7);
  for (int i = 0; i < 20; ++i) {
    Vec a = Vec::Zero(static_cast<Eigen::Index>(op.size())), b = a;
    for (int k = 0; k < std::min<int>(50, a.size()); ++k) {
      a(k) = rng.complex_normal() / (k + 1.0);
      b(k) = rng.complex_normal() / (k + 1.0);
    }
    const ScaleVector u = make_vector(op, a, 0), v = make_vector(op, b, 0);
    const int n = static_cast<int>(rng.bits() % 7) - 3;
    const cplx uv = inner(op, n, u, v), vu = inner(op, n, v, u);
    herm = std::max(herm, rel(std::abs(uv - std::conj(vu)), std::abs(uv)));
    const ScaleVector back = apply_b(op, n, apply_b(op, -n, u));
    inv = std::max(inv, rel((back.coeffs - u.coeffs).norm(), u.coeffs.norm()));
    double cz = 0.0;
    for (Eigen::Index k = 0; k < op.weights().size(); ++k) {
      cz = std::max(cz, op.weights()(k) / std::abs(op.eigenvalues()(k) - z));
    }
    const double lhs = norm(op, n + 2, resolvent_L(op, z, u));
    bound_excess = std::max(bound_excess, lhs - cz * norm(op, n, u) * (1.0 + 1e-12));
  }
  r.metrics = {{"conjugate_symmetry", herm}, {"b_inverse", inv}, {"resolvent_bound_excess", bound_excess}};
  require(r, herm <= 1e-14 && inv <= 1e-12, "scale identities above tolerance");
  require(r, bound_excess <= 0.0, "resolvent bound violated");
  return r;
}

SuiteResult suite_model_space(Context& c) {
  SuiteResult r = make("model_space");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  Rng rng(c.seed ^ 0x22);
  const GramTilde gt = c.inst.tilde ? *c.inst.tilde : gram_tilde(fam, c.cfg.tol.pairing);
  Eigen::SelfAdjointEigenSolver<Mat> eig(gt.G, Eigen::EigenvaluesOnly);
  double round_trip = 0.0, eta_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vec coeff = rng.complex_vector(fam.layout.size());
    const Vec back = coords(gt.G, h_pairings(fam, synthesize_k(fam, coeff))).coords;
    round_trip = std::max(round_trip, rel((back - coeff).norm(), coeff.norm()));
    const Vec cc = rng.complex_vector(fam.d());
    const Vec e = coords(gt.G, h_pairings(fam, h_combination(fam, fam.m(), cc))).coords;
    eta_err = std::max(eta_err, rel((e - eta(fam.layout, cc)).norm(), cc.norm()));
  }
  r.metrics["gram_tilde_min_eigenvalue"] = eig.eigenvalues().minCoeff();
  r.metrics["coordinate_round_trip"] = round_trip;
  r.metrics["eta_pattern"] = eta_err;
  r.metrics["family_in_class"] = std::all_of(fam.in_class.begin(), fam.in_class.end(), [](bool b) { return b; });
  require(r, eig.eigenvalues().minCoeff() > 0.0, "G~ is not positive definite");
  require(r, round_trip <= 1e-8 && eta_err <= 1e-8, "coordinate round trip above tolerance");

  if (gram.flags.invertible && is_invertible(gram.min_block())) {
    double decomp = 0.0, orth = 0.0;
    const PerpBasis pb = h_perp_basis(gram);
    for (int i = 0; i < 10; ++i) {
      const Vec d = rng.complex_vector(fam.layout.size());
      const Vec perp = perp_component(gram, d);
      decomp = std::max(decomp, rel(top_block(fam.layout, gram.G * perp).norm(), max_abs(gram.G) * d.norm()));
      if (pb.basis.cols() > 0) {
        const Vec k = pb.basis * rng.complex_vector(pb.basis.cols());
        const Vec cc = rng.complex_vector(fam.d());
        const ModelVector hmin = singular_only(fam, eta(fam.layout, cc));
        orth = std::max(orth, rel(std::abs(metric(fam, gram, hmin, singular_only(fam, k))), max_abs(gram.G) * cc.norm() * k.norm()));
      }
    }
    r.metrics["decomposition_residual"] = decomp;
    r.metrics["perp_orthogonality"] = orth;
    r.metrics["perp_dimension"] = pb.basis.cols();
    r.metrics["perp_indefinite"] = pb.indefinite;
    require(r, decomp <= 1e-12 && orth <= 1e-12, "H_A^perp decomposition above tolerance");
    require(r, pb.basis.cols() == (fam.m() - 1) * fam.d(), "H_A^perp has the wrong dimension");
  }
  return r;
}

SuiteResult suite_gram(Context& c) {
  SuiteResult r = make("gram_conditions");
  const GramSpec& gram = c.inst.gram;
  if (!gram.flags.hermitian || !gram.flags.invertible) return skip(r.name, "G_A is not Hermitian and invertible");
  const double z1 = c.inst.op.z1();
  const GMProduct gm = build_GM(gram, z1);
  const bool defect_small = max_abs(gm.defect) <= 1e-12 * (1.0 + std::abs(z1)) * max_abs(gram.G);
  Rng rng(c.seed ^ 0x33);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec xi = rng.complex_vector(gram.layout.size());
    const Compatibility comp = solve_compatibility(gram, z1, xi);
    worst = std::max(worst, comp.residual / (max_abs(gram.G) * xi.norm()));
  }
  r.metrics = {{"gacomm", gram.flags.gacomm}, {"gm_defect", max_abs(gm.defect)}, {"compatibility_residual", worst}};
  require(r, defect_small == gram.flags.gacomm, "GAcomm flag disagrees with G_M - G_M^*");
  require(r, worst < 1e-10, "compatibility residual above tolerance");
  return r;
}

SuiteResult suite_boundary_A(Context& c) {
  SuiteResult r = make("boundary_form_A");
  const GramSpec& gram = c.inst.gram;
  if (!gram.flags.hermitian) return skip(r.name, "G_A is not Hermitian");
  Rng rng(c.seed ^ 0x44);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DomainElementA x = random_domain_element(c.inst.fam, rng);
    const DomainElementA y = random_domain_element(c.inst.fam, rng);
    worst = std::max(worst, boundary_form(c.inst.fam, gram, x, y, 1.0).residual);
  }
  r.metrics = {{"pairs", 100}, {"max_relative_residual", worst}};
  require(r, worst <= kBoundaryTol, "boundary form sides disagree");
  return r;
}

SuiteResult suite_eigen_weyl_A(Context& c) {
  SuiteResult r = make("weyl_A");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  Rng rng(c.seed ^ 0x55);
  double eig_err = 0.0, two_path = 0.0, sym = 0.0, gamma0_err = 0.0;
  for (const cplx z : random_nonreal(rng, 20, fam.z1())) {
    const Vec cc = rng.complex_vector(fam.d());
    const DomainElementA g = gamma_A(fam, z, cc);
    eig_err = std::max(eig_err, model_gap(fam, apply_Amax(fam, g), z * to_model_vector(fam, g)));
    gamma0_err = std::max(gamma0_err, rel((gamma0(g) - cc).norm(), cc.norm()));
  }
  for (const cplx z : c.cfg.grid) {
    const WeylSample w = eval_M_A(fam, gram, z);
    for (int s = 0; s < fam.d(); ++s) {
      const Vec e = Vec::Unit(fam.d(), s);
      const Vec path = gamma1(fam, gram, gamma_A(fam, z, e));
      two_path = std::max(two_path, rel((path - w.M.col(s)).norm(), std::max(1.0, w.M.norm())));
    }
    sym = std::max(sym, rel(max_abs(eval_M_A(fam, gram, std::conj(z)).M - w.M.adjoint()), std::max(1.0, max_abs(w.M))));
  }
  r.metrics = {{"eigen_equation", eig_err}, {"gamma0", gamma0_err}, {"two_path", two_path}, {"symmetry", sym}};
  require(r, eig_err <= kBoundaryTol && gamma0_err <= 1e-12, "gamma field eigen-equation fails");
  require(r, two_path <= kWeylTol, "Gamma1 gamma differs from q + r");
  // M_A(conj z) = M_A(z)^* needs the level symmetry carried by G_M = G_M^*.
  if (gram.flags.gacomm) require(r, sym <= 1e-10, "M(conj z) != M(z)^*");
  return r;
}

SuiteResult suite_resolvent_A(Context& c) {
  SuiteResult r = make("resolvent_A");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  if (!gram.flags.gacomm || !gram.flags.invertible) return skip(r.name, "needs G_M Hermitian (A-model boundary triple)");
  Rng rng(c.seed ^ 0x66);
  const ThetaRelation theta = selfadjoint_theta(c.cfg, fam.d());
  const ThetaRelation zero = ThetaRelation::zero_relation(fam.d());
  double identity = 0.0, reduce = 0.0, defining = 0.0, membership = 0.0, compressed = 0.0;
  const auto pts = random_nonreal(rng, 10, fam.z1());
  for (int i = 0; i < 5; ++i) {
    const cplx z = pts[2 * i], w = pts[2 * i + 1];
    const ModelVector v = random_model_vector(fam, rng);
    const ModelVector rz = resolvent_ATheta(fam, gram, theta, z, v);
    const ModelVector rw = resolvent_ATheta(fam, gram, theta, w, v);
    const ModelVector lhs = rz - rw;
    identity = std::max(identity, model_gap(fam, lhs, (z - w) * resolvent_ATheta(fam, gram, theta, z, rw)));
    reduce = std::max(reduce, model_gap(fam, resolvent_ATheta(fam, gram, zero, z, v), resolvent_A0(fam, z, v)));
    const DomainElementA el = resolvent_ATheta_element(fam, gram, theta, z, v);
    defining = std::max(defining, model_gap(fam, apply_Amax(fam, el) - z * to_model_vector(fam, el), v));
    const Vec g0 = gamma0(el), g1 = gamma1(fam, gram, el);
    membership = std::max(membership, rel(theta.distance(g0, g1), std::max(g0.norm(), g1.norm())));
    ModelVector f = v;
    f.singular.setZero();
    const ScaleVector comp = compressed_resolvent_A(fam, gram, theta, z, f.regular);
    const ModelVector full = resolvent_ATheta(fam, gram, theta, z, f);
    compressed = std::max(compressed, rel((comp.coeffs - full.regular.coeffs).norm(), full.regular.coeffs.norm()));
  }
  r.metrics = {{"resolvent_identity", identity}, {"zero_relation_reduction", reduce}, {"defining_equation", defining},
               {"theta_membership", membership}, {"compressed_consistency", compressed}};
  require(r, identity <= kResolventTol && reduce <= 1e-12, "resolvent identity or A0 reduction fails");
  require(r, defining <= kResolventTol && membership <= kResolventTol, "Krein-Naimark output outside dom A_Theta");
  require(r, compressed <= kResolventTol, "compressed resolvent disagrees with the projection");
  return r;
}

SuiteResult suite_nevanlinna_A(Context& c) {
  SuiteResult r = make("nevanlinna_A");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  if (!gram.flags.hermitian) return skip(r.name, "G_A is not Hermitian");
  int best = 0;
  json counts = json::array();
  for (const auto& pts : default_point_sets(fam.z1())) {
    const auto pick = build_pick([&](cplx z) { return eval_M_A(fam, gram, z).M; }, pts);
    const int k = count_negative_squares(pick, c.cfg.tol.negativity).count;
    counts.push_back(k);
    best = std::max(best, k);
  }
  r.metrics = {{"negative_squares_per_set", counts}, {"kappa_lower_bound", best}};
  r.note = "informational: the count is a lower bound for the negative squares of M_A";
  return r;
}

SuiteResult suite_symmetry_B(Context& c) {
  SuiteResult r = make("bmin_symmetry");
  const GramSpec& gram = c.inst.gram;
  if (!gram.flags.hermitian || !gram.flags.invertible || !gram.flags.min_positive) {
    return skip(r.name, "needs Hermitian invertible G_A with G_A^min positive");
  }
  const SymmetryReport rep = check_symmetry_Bmin(c.inst.fam, gram, 50, c.seed ^ 0x77);
  r.metrics = {{"samples", rep.samples}, {"max_residual", rep.max_residual}, {"a2", gram.flags.a2}};
  require(r, rep.symmetric, "Bmin is not symmetric (boundary form on ker Gamma' does not vanish)");
  return r;
}

SuiteResult suite_green_B(Context& c) {
  SuiteResult r = make("green_B");
  if (!c.b_ready) return skip(r.name, "B-model conditions do not hold");
  Rng rng(c.seed ^ 0x88);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = random_graph_element(c.inst.fam, c.inst.gram, rng);
    const auto y = random_graph_element(c.inst.fam, c.inst.gram, rng);
    worst = std::max(worst, green_check_B(c.inst.fam, c.inst.gram, x, y).residual);
  }
  r.metrics = {{"pairs", 100}, {"max_relative_residual", worst}};
  require(r, worst <= kBoundaryTol, "Green identity for Gamma' fails");
  return r;
}

SuiteResult suite_weyl_B(Context& c) {
  SuiteResult r = make("weyl_B");
  if (!c.b_ready) return skip(r.name, "B-model conditions do not hold");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  Rng rng(c.seed ^ 0x99);
  double eig_err = 0.0, two_path = 0.0;
  for (const cplx z : random_nonreal(rng, 20, fam.z1())) {
    const Vec cc = rng.complex_vector(fam.d());
    const BmaxGraphElement g = gamma_B(fam, c.dp, z, cc);
    eig_err = std::max(eig_err, model_gap(fam, apply_Bmax(fam, gram, g), z * graph_domain(fam, g)));
  }
  for (const cplx z : c.cfg.grid) {
    const WeylSample w = eval_M_B(fam, c.dp, z);
    for (int s = 0; s < fam.d(); ++s) {
      const Vec path = gammaP1(fam, gram, gamma_B(fam, c.dp, z, Vec::Unit(fam.d(), s)));
      two_path = std::max(two_path, rel((path - w.M.col(s)).norm(), std::max(1.0, w.M.norm())));
    }
  }
  const StrictnessReport st = check_symmetry_and_strictness([&](cplx z) { return eval_M_B(fam, c.dp, z).M; }, c.cfg.grid);
  r.metrics = {{"eigen_equation", eig_err}, {"two_path", two_path}, {"symmetry_defect", st.symmetry_defect},
               {"min_im_eigenvalue", st.min_im_eigenvalue}};
  require(r, eig_err <= kBoundaryTol, "Bmax eigen-equation fails");
  require(r, two_path <= kWeylTol, "Gamma'1 gamma' differs from q + r-hat");
  require(r, st.symmetric && st.strict, "M_B is not a strict Nevanlinna function on the grid");
  if (fam.m() == 1) {
    double rr = 0.0;
    for (const cplx z : c.cfg.grid) rr = std::max(rr, max_abs(eval_rhat(c.dp, z) - eval_r(gram, fam.z1(), z)));
    const double dh = max_abs(c.dp.DeltaHat - fam.z1() * Mat::Identity(fam.d(), fam.d()));
    r.metrics["m1_rhat_minus_r"] = rr;
    r.metrics["m1_deltahat_minus_z1"] = dh;
    require(r, rr <= 1e-12 && dh <= 1e-12, "m = 1 degeneracy r-hat = r fails");
  }
  return r;
}

SuiteResult suite_resolvent_B(Context& c) {
  SuiteResult r = make("resolvent_B");
  if (!c.b_ready) return skip(r.name, "B-model conditions do not hold");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  Rng rng(c.seed ^ 0xaa);
  const ThetaRelation theta = selfadjoint_theta(c.cfg, fam.d());
  const ThetaRelation zero = ThetaRelation::zero_relation(fam.d());
  double identity = 0.0, reduce = 0.0, round_trip = 0.0, membership = 0.0, compressed = 0.0, routes = 0.0;
  const auto pts = random_nonreal(rng, 10, fam.z1());
  for (int i = 0; i < 5; ++i) {
    const cplx z = pts[2 * i], w = pts[2 * i + 1];
    const ModelVector v = random_model_vector(fam, rng);
    const ModelVector rw = resolvent_BTheta(fam, gram, c.dp, theta, w, v);
    const ModelVector lhs = resolvent_BTheta(fam, gram, c.dp, theta, z, v) - rw;
    identity = std::max(identity, model_gap(fam, lhs, (z - w) * resolvent_BTheta(fam, gram, c.dp, theta, z, rw)));
    reduce = std::max(reduce, model_gap(fam, resolvent_BTheta(fam, gram, c.dp, zero, z, v), resolvent_B0(fam, gram, c.dp, z, v)));
    const BmaxGraphElement b0 = resolvent_B0_element(fam, gram, c.dp, z, v);
    round_trip = std::max(round_trip, model_gap(fam, apply_Bmax(fam, gram, b0) - z * graph_domain(fam, b0), v));
    const BmaxGraphElement el = resolvent_BTheta_element(fam, gram, c.dp, theta, z, v);
    const Vec g0 = gammaP0(el), g1 = gammaP1(fam, gram, el);
    membership = std::max(membership, rel(theta.distance(g0, g1), std::max(g0.norm(), g1.norm())));
    routes = std::max(routes, gamma_B_adjoint(fam, gram, c.dp, z, v).gap);
    ModelVector f = v;
    f.singular.setZero();
    const ScaleVector comp = compressed_resolvent_B(fam, c.dp, theta, z, f.regular);
    const ModelVector full = resolvent_BTheta(fam, gram, c.dp, theta, z, f);
    compressed = std::max(compressed, rel((comp.coeffs - full.regular.coeffs).norm(), full.regular.coeffs.norm()));
  }
  r.metrics = {{"resolvent_identity", identity}, {"zero_relation_reduction", reduce}, {"b0_round_trip", round_trip},
               {"theta_membership", membership}, {"adjoint_routes_gap", routes}, {"compressed_consistency", compressed}};
  require(r, identity <= kResolventTol && reduce <= 1e-12, "resolvent identity or B0 reduction fails");
  require(r, round_trip <= kResolventTol && membership <= kResolventTol, "Krein-Naimark output outside dom B_Theta");
  require(r, compressed <= kResolventTol && routes <= kResolventTol, "compressed resolvent or adjoint routes disagree");
  return r;
}

SuiteResult suite_structure_B(Context& c) {
  SuiteResult r = make("structure_B");
  if (!c.b_ready) return skip(r.name, "B-model conditions do not hold");
  const SingularFamily& fam = c.inst.fam;
  const GramSpec& gram = c.inst.gram;
  Rng rng(c.seed ^ 0xbb);
  double inclusion = 0.0, similarity = 0.0, surj = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vec cc = rng.complex_vector(fam.d());
    const DomainElementA x{zero_vector(fam.op, fam.m() + 2), Vec::Zero(fam.d()), eta(fam.layout, cc)};
    const Vec diff = apply_Amax_prime(fam, gram, x).singular - apply_Amax(fam, x).singular;
    inclusion = std::max(inclusion, rel(top_block(fam.layout, gram.G * diff).norm(), max_abs(gram.G) * std::max(1.0, diff.norm())));
    const Vec a = rng.complex_vector(fam.d()), b = rng.complex_vector(fam.d()), chi0 = rng.complex_vector(fam.d());
    const BmaxGraphElement pre = surjectivity_witness(fam, gram, a, b, chi0);
    surj = std::max(surj, rel((gammaP0(pre) - a).norm() + (gammaP1(fam, gram, pre) - b).norm(), a.norm() + b.norm()));
  }
  const Mat ginv = c.dp.Gmin.inverse();
  for (const cplx z : c.cfg.grid) {
    const Mat rh = eval_rhat(c.dp, z);
    const Mat lhs = (rh - rh.adjoint()) / (cplx(0.0, 2.0) * z.imag());
    similarity = std::max(similarity, rel(max_abs(lhs - rh * ginv * rh.adjoint()), max_abs(lhs)));
  }
  Eigen::ComplexEigenSolver<Mat> es(c.dp.DeltaHat, false);
  double im = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    im = std::max(im, std::abs(es.eigenvalues()(i).imag()) / std::max(1.0, std::abs(es.eigenvalues()(i))));
  }
  const double herm = max_abs(c.dp.Delta - c.dp.Delta.adjoint());
  r.metrics = {{"amax_prime_inclusion", inclusion}, {"delta_hermitian_defect", herm}, {"deltahat_max_imag", im},
               {"similarity_identity", similarity}, {"surjectivity_residual", surj}};
  require(r, inclusion <= 1e-10, "(A'max - Amax) K_A^min not inside H_A^perp");
  require(r, herm <= 1e-12 * max_abs(gram.G) * (1.0 + std::abs(fam.z1())) && im <= 1e-10, "Delta not Hermitian or Delta-hat spectrum not real");
  require(r, similarity <= 1e-10, "Im r-hat / Im z != r-hat Gmin^{-1} r-hat^*");
  require(r, surj <= 1e-8, "surjectivity witness fails");
  return r;
}

SuiteResult suite_nevanlinna_B(Context& c) {
  SuiteResult r = make("nevanlinna_B");
  if (!c.b_ready) return skip(r.name, "B-model conditions do not hold");
  const SingularFamily& fam = c.inst.fam;
  Rng rng(c.seed ^ 0xcc);
  auto sets = default_point_sets(fam.z1());
  for (auto& s : random_point_sets(rng, 20, 8, fam.z1())) sets.push_back(std::move(s));
  int worst = 0;
  double floor = INFINITY;
  for (const auto& pts : sets) {
    const auto ns = count_negative_squares(build_pick([&](cplx z) { return eval_M_B(fam, c.dp, z).M; }, pts),
                                           c.cfg.tol.negativity);
    worst = std::max(worst, ns.count);
    floor = std::min(floor, ns.eigenvalues(0) / ns.norm);
  }
  r.metrics = {{"point_sets", sets.size()}, {"max_negative_squares", worst}, {"min_relative_eigenvalue", floor}};
  require(r, worst == 0, "Pick matrix of M_B has negative eigenvalues");
  return r;
}

SuiteResult suite_simplicity(Context& c) {
  SuiteResult r = make("simplicity");
  if (!c.b_ready) return skip(r.name, "B-model conditions do not hold");
  const SimplicityReport rep = check_simplicity(c.inst.fam, c.dp, default_simplicity_points(), 4, c.cfg.tol.simplicity);
  r.metrics = {{"sigma_min", rep.sigma_min}, {"sigma_max", rep.sigma_max}, {"threshold", rep.threshold},
               {"trial_modes", rep.trial_modes}, {"verdict", rep.verdict}};
  r.note = "heuristic evidence from finitely many sample points";
  require(r, rep.verdict != "degenerate", "simplicity probe found a nontrivial solution");
  return r;
}

SuiteResult suite_truncation(Context& c) {
  SuiteResult r = make("truncation_stability");
  if (c.cfg.op.law != "power") return skip(r.name, "explicit eigenvalue lists carry no analytic tail bound");
  const std::size_t n = c.inst.op.size();
  if (n < 4) return skip(r.name, "N too small to halve");
  const ModelInstance half = instantiate(c.cfg, n / 2);
  double worst_ratio = 0.0, worst_rel = 0.0;
  int checked = 0;
  auto record = [&](cplx coarse, cplx fine, double bound) {
    const double delta = std::abs(fine - coarse);
    worst_ratio = std::max(worst_ratio, bound > 0.0 ? delta / bound : (delta > 0.0 ? INFINITY : 0.0));
    worst_rel = std::max(worst_rel, rel(delta, std::abs(fine)));
    ++checked;
  };
  RMat gtail = RMat::Zero(c.inst.gram.layout.size(), c.inst.gram.layout.size());
  if (c.inst.tilde && half.tilde) {
    gtail = half.tilde->tail;
    for (Eigen::Index i = 0; i < gtail.rows(); ++i) {
      for (Eigen::Index k = 0; k < gtail.cols(); ++k) record(half.gram.G(i, k), c.inst.gram.G(i, k), gtail(i, k));
    }
  }
  const Layout& lay = c.inst.gram.layout;
  const bool use_b = c.cfg.model == 'b' && c.b_ready;
  std::optional<DeltaPair> half_dp;
  if (use_b) half_dp = build_delta(half.gram, half.op.z1());
  for (const cplx z : c.cfg.grid) {
    RMat qtail;
    const Mat qc = eval_q(half.fam, z, &qtail);
    const Mat qf = eval_q(c.inst.fam, z);
    Mat mc, mf;
    double extra = 0.0;
    if (use_b) {
      mc = qc + eval_rhat(*half_dp, z);
      mf = qf + eval_rhat(c.dp, z);
      extra = rhat_perturbation_bound(*half_dp, half.gram, gtail, half.op.z1(), z);
    } else {
      mc = qc + eval_r(half.gram, half.op.z1(), z);
      mf = qf + eval_r(c.inst.gram, c.inst.op.z1(), z);
      for (int j = 1; j <= lay.m; ++j) {
        double col = 0.0;
        for (int s = 0; s < lay.d; ++s) {
          for (int t = 0; t < lay.d; ++t) col = std::max(col, gtail(lay.slot(s, lay.m), lay.slot(t, j)));
        }
        extra += col / std::pow(std::abs(z - c.inst.op.z1()), lay.m - j + 1);
      }
    }
    for (Eigen::Index i = 0; i < qc.rows(); ++i) {
      for (Eigen::Index k = 0; k < qc.cols(); ++k) {
        record(qc(i, k), qf(i, k), qtail(i, k));
        record(mc(i, k), mf(i, k), qtail(i, k) + extra);
      }
    }
  }
  r.metrics = {{"N_coarse", n / 2}, {"N_fine", n}, {"values_checked", checked},
               {"max_delta_over_tail_bound", worst_ratio}, {"max_relative_delta", worst_rel}};
  require(r, worst_ratio < 1.0, "a value moved by more than its tail bound");
  require(r, worst_rel < 1e-4, "a value moved by more than 1e-4 relative");
  return r;
}

}  // namespace

ModelVector random_model_vector(const SingularFamily& fam, Rng& rng, int support) {
  const auto n = static_cast<Eigen::Index>(fam.op.size());
  Vec c = Vec::Zero(n);
  const RVec& w = fam.op.weights();
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(support, n); ++k) {
    c(k) = rng.complex_normal() * std::pow(w(k), -0.5 * fam.m()) / static_cast<double>(k + 1);
  }
  return {make_vector(fam.op, std::move(c), fam.m()), rng.complex_vector(fam.layout.size())};
}

DomainElementA random_domain_element(const SingularFamily& fam, Rng& rng, int support) {
  const auto n = static_cast<Eigen::Index>(fam.op.size());
  Vec c = Vec::Zero(n);
  const RVec& w = fam.op.weights();
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(support, n); ++k) {
    c(k) = rng.complex_normal() * std::pow(w(k), -0.5 * (fam.m() + 2)) / static_cast<double>(k + 1);
  }
  return {make_vector(fam.op, std::move(c), fam.m() + 2), rng.complex_vector(fam.d()),
          rng.complex_vector(fam.layout.size())};
}

json report_header(const ModelConfig& cfg, const std::string& command, std::size_t n, std::uint64_t seed) {
  return {{"schema", kSchema},
          {"command", command},
          {"config_hash", cfg.hash},
          {"N", n},
          {"seed", seed},
          {"model", std::string(1, cfg.model)},
          {"note", "L, phi and Gram choices are implementation conventions, not data from a physical model"}};
}

VerifyOutcome run_verify(const ModelConfig& cfg, std::uint64_t seed) {
  const ModelInstance inst = instantiate(cfg, 0);
  Context ctx{cfg, inst, seed, false, DeltaPair{}};
  std::string b_reason;
  if (inst.gram.flags.hermitian && inst.gram.flags.invertible && inst.gram.flags.a2 && inst.gram.flags.min_positive) {
    ctx.dp = build_delta(inst.gram, inst.op.z1());
    ctx.b_ready = true;
  }
  const std::vector<Suite> suites = {suite_spectral,    suite_model_space, suite_gram,        suite_boundary_A,
                                     suite_eigen_weyl_A, suite_resolvent_A, suite_nevanlinna_A, suite_symmetry_B,
                                     suite_green_B,     suite_weyl_B,      suite_resolvent_B, suite_structure_B,
                                     suite_nevanlinna_B, suite_simplicity,  suite_truncation};
  const char* names[] = {"spectral_core", "model_space", "gram_conditions", "boundary_form_A", "weyl_A",
                         "resolvent_A", "nevanlinna_A", "bmin_symmetry", "green_B", "weyl_B",
                         "resolvent_B", "structure_B", "nevanlinna_B", "simplicity", "truncation_stability"};
  VerifyOutcome out;
  out.report = report_header(cfg, "verify", inst.op.size(), seed);
  out.report["flags"] = {{"hermitian", inst.gram.flags.hermitian}, {"invertible", inst.gram.flags.invertible},
                         {"gacomm", inst.gram.flags.gacomm}, {"a2", inst.gram.flags.a2},
                         {"min_positive", inst.gram.flags.min_positive}};
  json list = json::array();
  for (std::size_t i = 0; i < suites.size(); ++i) {
    SuiteResult res;
    try {
      res = suites[i](ctx);
    } catch (const Error& e) {
      res = {names[i], "fail", std::string(to_string(e.kind())) + ": " + e.what(), json::object()};
    }
    if (res.status == "fail") out.passed = false;
    list.push_back({{"name", res.name}, {"status", res.status}, {"note", res.note}, {"metrics", res.metrics}});
    out.suites.push_back(std::move(res));
  }
  out.report["suites"] = list;
  out.report["passed"] = out.passed;
  return out;
}

}  // namespace singext
