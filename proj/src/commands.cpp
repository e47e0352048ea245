#include "singext/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "singext/b_model.hpp"
#include "singext/config.hpp"
#include "singext/errors.hpp"
#include "singext/gram_conditions.hpp"
#include "singext/nevanlinna_audit.hpp"
#include "singext/verify.hpp"

namespace singext {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxViolationsShown = 20;

ModelConfig load_with_overrides(const CommandOptions& opt) {
  if (opt.config.empty()) throw Error(ErrorKind::Config, "--config is required");
  ModelConfig cfg = load_config(opt.config);
  if (opt.model) cfg.model = *opt.model;
  if (opt.grid) cfg.grid = parse_grid(*opt.grid);
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

void emit(const CommandOptions& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + opt.out);
  f << text;
}

// JSON companion of a CSV: <out>.summary.json, or the error stream when the
// CSV goes to stdout.
void emit_summary(const CommandOptions& opt, const json& summary, std::ostream& err) {
  const std::string text = summary.dump(2) + "\n";
  if (opt.out.empty()) {
    err << text;
    return;
  }
  std::ofstream f(opt.out + ".summary.json", std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + opt.out + ".summary.json");
  f << text;
}

std::string model_name(char m) { return std::string(1, m); }

bool a_conditions(const GramFlags& f) { return f.hermitian && f.invertible && f.gacomm; }
bool b_conditions(const GramFlags& f) { return f.hermitian && f.invertible && f.a2 && f.min_positive; }

bool conditions_hold(const ModelConfig& cfg, const GramFlags& f) {
  return cfg.model == 'a' ? a_conditions(f) : b_conditions(f);
}

json flags_json(const GramFlags& f) {
  return {{"hermitian", f.hermitian}, {"invertible", f.invertible}, {"gacomm", f.gacomm},
          {"a2", f.a2}, {"minPositive", f.min_positive}};
}

json violations_json(const std::vector<Violation>& list) {
  json out = json::array();
  for (std::size_t i = 0; i < std::min(list.size(), kMaxViolationsShown); ++i) {
    out.push_back({{"relation", list[i].describe()}, {"defect", list[i].defect}});
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

Vec padded(const Vec& v, Eigen::Index n, const std::string& where) {
  if (v.size() > n) throw Error(ErrorKind::Config, where + ": longer than the truncation N");
  Vec out = Vec::Zero(n);
  out.head(v.size()) = v;
  return out;
}

ModelVector read_input_vector(const std::string& path, const SingularFamily& fam) {
  if (path.empty()) throw Error(ErrorKind::Config, "--input is required");
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read input vector " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "input vector " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "input vector: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "regular" && it.key() != "singular") {
      throw Error(ErrorKind::Config, "input vector /" + it.key() + ": unknown field");
    }
  }
  const auto n = static_cast<Eigen::Index>(fam.op.size());
  Vec reg = j.contains("regular") ? padded(vector_from_json(j.at("regular"), "/regular"), n, "/regular") : Vec::Zero(n);
  Vec sing = j.contains("singular") ? vector_from_json(j.at("singular"), "/singular") : Vec::Zero(fam.layout.size());
  if (sing.size() != fam.layout.size()) {
    throw Error(ErrorKind::Config, "input vector /singular: expected m*d = " + std::to_string(fam.layout.size()) + " entries");
  }
  return {make_vector(fam.op, std::move(reg), fam.m()), std::move(sing)};
}

std::vector<std::string> matrix_columns(const std::string& name, int d) {
  std::vector<std::string> cols;
  for (int s = 1; s <= d; ++s) {
    for (int t = 1; t <= d; ++t) {
      const std::string base = name + "_" + std::to_string(s) + "_" + std::to_string(t);
      cols.push_back(base + "_re");
      cols.push_back(base + "_im");
    }
  }
  return cols;
}

void append_matrix(std::ostringstream& row, const Mat& a) {
  for (Eigen::Index s = 0; s < a.rows(); ++s) {
    for (Eigen::Index t = 0; t < a.cols(); ++t) row << ',' << fmt(a(s, t).real()) << ',' << fmt(a(s, t).imag());
  }
}

std::function<Mat(cplx)> weyl_function(const ModelConfig& cfg, const ModelInstance& inst,
                                       const std::optional<DeltaPair>& dp) {
  if (cfg.model == 'a') return [&inst](cplx z) { return eval_M_A(inst.fam, inst.gram, z).M; };
  return [&inst, &dp](cplx z) { return eval_M_B(inst.fam, *dp, z).M; };
}

}  // namespace

int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream&) {
  const ModelConfig cfg = load_with_overrides(opt);
  const ModelInstance inst = instantiate(cfg);
  const GramSpec& gram = inst.gram;
  json rep = report_header(cfg, "check", inst.op.size(), cfg.seed);
  rep["flags"] = flags_json(gram.flags);
  rep["gram"] = matrix_to_json(gram.G);
  rep["gram_mode"] = cfg.gram.mode;
  if (inst.tilde) {
    rep["gram_tail_bound"] = inst.tilde->tail.maxCoeff();
  }

  json members = json::array();
  for (int s = 0; s < inst.fam.d(); ++s) {
    members.push_back({{"sigma", s + 1},
                       {"norm_m_plus_2", to_string(inst.fam.in_lower[s].verdict)},
                       {"norm_m_plus_1", to_string(inst.fam.in_upper[s].verdict)},
                       {"window_growth_m_plus_1", inst.fam.in_upper[s].window_growth},
                       {"in_class", static_cast<bool>(inst.fam.in_class[s])}});
  }
  rep["membership"] = members;

  if (gram.flags.hermitian) {
    const GacommReport ga = check_gacomm(gram);
    rep["gacomm"] = {{"holds", ga.holds}, {"violations", violations_json(ga.violations)},
                     {"violation_count", ga.violations.size()}};
    const BModelReport bm = check_bmodel(gram);
    rep["bmodel"] = {{"a2", bm.a2}, {"a2_defect", bm.a2_defect}, {"min_eigenvalue", bm.min_eigenvalue},
                     {"violations", violations_json(bm.violations)}};
  }
  if (gram.flags.hermitian && gram.flags.invertible && is_invertible(gram.min_block())) {
    const PerpBasis pb = h_perp_basis(gram);
    rep["h_perp"] = {{"dimension", pb.basis.cols()}, {"indefinite", pb.indefinite}};
  }
  if (b_conditions(gram.flags)) {
    const DeltaPair dp = build_delta(gram, inst.op.z1());
    Eigen::ComplexEigenSolver<Mat> es(dp.DeltaHat, false);
    json spec = json::array();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) spec.push_back(complex_to_json(es.eigenvalues()(i)));
    rep["delta"] = {{"Delta", matrix_to_json(dp.Delta)}, {"DeltaHat", matrix_to_json(dp.DeltaHat)},
                    {"Gmin", matrix_to_json(dp.Gmin)}, {"DeltaHat_spectrum", spec}};
  }
  const bool ok = conditions_hold(cfg, gram.flags);
  rep["conditions_hold"] = ok;
  emit(opt, rep.dump(2) + "\n", out);
  return ok ? exit_code::kOk : exit_code::kCondition;
}

int cmd_weyl(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const ModelConfig cfg = load_with_overrides(opt);
  const ModelInstance inst = instantiate(cfg);
  if (!conditions_hold(cfg, inst.gram.flags)) {
    err << "weyl: conditions of the " << model_name(cfg.model) << "-model do not hold (run check)\n";
    return exit_code::kCondition;
  }
  std::optional<DeltaPair> dp;
  if (cfg.model == 'b') dp = build_delta(inst.gram, inst.op.z1());
  const int d = inst.fam.d();
  const std::string rname = cfg.model == 'a' ? "r" : "rhat";

  std::ostringstream csv;
  csv << "z_re,z_im";
  for (const std::string& name : {std::string("q"), rname, std::string("M")}) {
    for (const auto& c : matrix_columns(name, d)) csv << ',' << c;
  }
  csv << '\n';
  json warnings = json::array();
  double max_tail = 0.0;
  for (const cplx z : cfg.grid) {
    const double pole_gap = std::abs(z - inst.op.z1());
    if (pole_gap < 1e-3) {
      warnings.push_back({{"z", complex_to_json(z)}, {"warning", "within 1e-3 of the pole z1"}});
    }
    if (dp) {
      Eigen::ComplexEigenSolver<Mat> es(dp->DeltaHat, false);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (std::abs(z - es.eigenvalues()(i)) < 1e-3) {
          warnings.push_back({{"z", complex_to_json(z)}, {"warning", "within 1e-3 of a pole of r-hat"}});
        }
      }
    }
    const WeylSample w = cfg.model == 'a' ? eval_M_A(inst.fam, inst.gram, z) : eval_M_B(inst.fam, *dp, z);
    max_tail = std::max(max_tail, w.q_tail.maxCoeff());
    std::ostringstream row;
    row << fmt(z.real()) << ',' << fmt(z.imag());
    append_matrix(row, w.q);
    append_matrix(row, w.r);
    append_matrix(row, w.M);
    csv << row.str() << '\n';
  }
  const StrictnessReport st = check_symmetry_and_strictness(weyl_function(cfg, inst, dp), cfg.grid);
  json summary = report_header(cfg, "weyl", inst.op.size(), cfg.seed);
  summary["grid_points"] = cfg.grid.size();
  summary["q_tail_bound_max"] = max_tail;
  summary["symmetry_defect"] = st.symmetry_defect;
  summary["min_im_eigenvalue"] = st.min_im_eigenvalue;
  summary["symmetric"] = st.symmetric;
  summary["strict"] = st.strict;
  summary["warnings"] = warnings;
  emit(opt, csv.str(), out);
  emit_summary(opt, summary, err);
  return exit_code::kOk;
}

int cmd_resolvent(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const ModelConfig cfg = load_with_overrides(opt);
  if (opt.z.empty()) throw Error(ErrorKind::Config, "--z is required");
  const cplx z = parse_complex(opt.z);
  const ModelInstance inst = instantiate(cfg);
  const SingularFamily& fam = inst.fam;
  const GramSpec& gram = inst.gram;
  if (!conditions_hold(cfg, gram.flags)) {
    err << "resolvent: conditions of the " << model_name(cfg.model) << "-model do not hold (run check)\n";
    return exit_code::kCondition;
  }
  const ModelVector v = read_input_vector(opt.input, fam);
  const ThetaRelation& theta = cfg.theta;
  std::optional<DeltaPair> dp;
  if (cfg.model == 'b') dp = build_delta(gram, inst.op.z1());

  ModelVector full;
  double round_trip = 0.0, membership = 0.0;
  if (cfg.model == 'a') {
    const DomainElementA el = resolvent_ATheta_element(fam, gram, theta, z, v);
    full = to_model_vector(fam, el);
    round_trip = model_norm(fam, apply_Amax(fam, el) - z * full - v);
    const Vec g0 = gamma0(el), g1 = gamma1(fam, gram, el);
    membership = theta.distance(g0, g1);
  } else {
    const BmaxGraphElement el = resolvent_BTheta_element(fam, gram, *dp, theta, z, v);
    full = graph_domain(fam, el);
    round_trip = model_norm(fam, apply_Bmax(fam, gram, el) - z * full - v);
    membership = theta.distance(gammaP0(el), gammaP1(fam, gram, el));
  }
  const double scale = std::max(model_norm(fam, v), 1e-300);

  json rep = report_header(cfg, "resolvent", inst.op.size(), cfg.seed);
  rep["z"] = complex_to_json(z);
  rep["theta"] = {{"X", matrix_to_json(theta.X)}, {"Y", matrix_to_json(theta.Y)}};
  rep["round_trip_residual"] = round_trip / scale;
  rep["theta_membership_residual"] = membership;
  if (opt.compressed) {
    if (v.singular.norm() > 0.0) err << "resolvent: --compressed ignores the singular part of the input\n";
    const ScaleVector comp = cfg.model == 'a' ? compressed_resolvent_A(fam, gram, theta, z, v.regular)
                                              : compressed_resolvent_B(fam, *dp, theta, z, v.regular);
    ModelVector reg_only = v;
    reg_only.singular.setZero();
    const ModelVector proj = cfg.model == 'a' ? resolvent_ATheta(fam, gram, theta, z, reg_only)
                                              : resolvent_BTheta(fam, gram, *dp, theta, z, reg_only);
    rep["compressed"] = true;
    rep["output"] = {{"regular", vector_to_json(comp.coeffs)}};
    rep["projection_gap"] = (comp.coeffs - proj.regular.coeffs).norm() / std::max(proj.regular.coeffs.norm(), 1e-300);
  } else {
    rep["compressed"] = false;
    rep["output"] = {{"regular", vector_to_json(full.regular.coeffs)}, {"singular", vector_to_json(full.singular)}};
  }
  emit(opt, rep.dump(2) + "\n", out);
  if (round_trip / scale > 1e-8) {
    err << "resolvent: round-trip residual " << round_trip / scale << " above 1e-8\n";
    return exit_code::kNumerical;
  }
  return exit_code::kOk;
}

int cmd_pick(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const ModelConfig cfg = load_with_overrides(opt);
  const ModelInstance inst = instantiate(cfg);
  const GramFlags& f = inst.gram.flags;
  if (!(f.hermitian && f.invertible) || (cfg.model == 'b' && !b_conditions(f))) {
    err << "pick: conditions of the " << model_name(cfg.model) << "-model do not hold (run check)\n";
    return exit_code::kCondition;
  }
  std::optional<DeltaPair> dp;
  if (cfg.model == 'b') dp = build_delta(inst.gram, inst.op.z1());
  const auto fn = weyl_function(cfg, inst, dp);

  std::vector<std::vector<cplx>> sets;
  if (opt.grid) {
    sets.push_back(cfg.grid);
  } else {
    sets = default_point_sets(inst.op.z1());
    Rng rng(cfg.seed);
    for (auto& s : random_point_sets(rng, 20, 8, inst.op.z1())) sets.push_back(std::move(s));
  }
  std::ostringstream csv;
  csv << "set,index,eigenvalue,relative\n";
  json per_set = json::array();
  int kappa = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const NegativeSquares ns = count_negative_squares(build_pick(fn, sets[i]), cfg.tol.negativity);
    for (Eigen::Index k = 0; k < ns.eigenvalues.size(); ++k) {
      csv << i << ',' << k << ',' << fmt(ns.eigenvalues(k)) << ',' << fmt(ns.eigenvalues(k) / ns.norm) << '\n';
    }
    json pts = json::array();
    for (const cplx z : sets[i]) pts.push_back(complex_to_json(z));
    per_set.push_back({{"points", pts}, {"negative", ns.count}, {"min_eigenvalue", ns.eigenvalues(0)}, {"norm", ns.norm}});
    kappa = std::max(kappa, ns.count);
  }
  json summary = report_header(cfg, "pick", inst.op.size(), cfg.seed);
  summary["sets"] = per_set;
  summary["negative_squares_lower_bound"] = kappa;
  summary["verdict"] = kappa == 0 ? "no negative squares detected" : "generalized Nevanlinna (kappa >= " + std::to_string(kappa) + ")";
  summary["note"] = "counts are lower bounds from finitely many points";
  emit(opt, csv.str(), out);
  emit_summary(opt, summary, err);
  return exit_code::kOk;
}

int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  const ModelConfig cfg = load_with_overrides(opt);
  const VerifyOutcome res = run_verify(cfg, cfg.seed);
  emit(opt, res.report.dump(2) + "\n", out);
  for (const auto& s : res.suites) {
    if (s.status == "fail") err << "verify: suite " << s.name << " failed: " << s.note << '\n';
  }
  return res.passed ? exit_code::kOk : exit_code::kSuite;
}

int run_command(const std::string& verb, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (verb == "check") return cmd_check(opt, out, err);
    if (verb == "weyl") return cmd_weyl(opt, out, err);
    if (verb == "resolvent") return cmd_resolvent(opt, out, err);
    if (verb == "pick") return cmd_pick(opt, out, err);
    if (verb == "verify") return cmd_verify(opt, out, err);
    err << "unknown command " << verb << '\n';
    return exit_code::kConfig;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kNumerical;
  }
}

}  // namespace singext
