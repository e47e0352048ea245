#include "singext/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "singext/errors.hpp"
#include "singext/gram_conditions.hpp"

namespace singext {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& ptr, const std::string& what) {
  throw Error(ErrorKind::Config, "config " + (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

void only_keys(const json& obj, const std::string& ptr, std::set<std::string> allowed) {
  if (!obj.is_object()) field_error(ptr, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) field_error(ptr + "/" + it.key(), "unknown field");
  }
}

double number_at(const json& obj, const std::string& key, const std::string& ptr) {
  if (!obj.contains(key)) field_error(ptr + "/" + key, "missing required number");
  const json& v = obj.at(key);
  if (!v.is_number()) field_error(ptr + "/" + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& ptr, double fallback) {
  return obj.contains(key) ? number_at(obj, key, ptr) : fallback;
}

int int_at(const json& obj, const std::string& key, const std::string& ptr, int lo) {
  if (!obj.contains(key)) field_error(ptr + "/" + key, "missing required integer");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) field_error(ptr + "/" + key, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo) field_error(ptr + "/" + key, "must be >= " + std::to_string(lo));
  if (x > 100000000) field_error(ptr + "/" + key, "too large");
  return static_cast<int>(x);
}

cplx complex_at(const json& v, const std::string& ptr) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  field_error(ptr, "expected a number or a [re, im] pair");
}

Mat matrix_at(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.empty()) field_error(ptr, "expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (!v[0].is_array() || v[0].empty()) field_error(ptr + "/0", "expected a nonempty row");
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rp = ptr + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) field_error(rp, "ragged matrix row");
    for (Eigen::Index k = 0; k < cols; ++k) {
      out(i, k) = complex_at(row[static_cast<std::size_t>(k)], rp + "/" + std::to_string(k));
    }
  }
  return out;
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void parse_operator(const json& j, OperatorSpec& op) {
  const std::string ptr = "/operator";
  only_keys(j, ptr, {"law", "a", "p", "b", "N", "z1", "lambda"});
  if (!j.contains("law") || !j.at("law").is_string()) field_error(ptr + "/law", "expected \"power\" or \"explicit\"");
  op.law = j.at("law").get<std::string>();
  op.z1 = number_or(j, "z1", ptr, -1.0);
  if (op.law == "power") {
    op.power.a = number_or(j, "a", ptr, 1.0);
    op.power.p = number_or(j, "p", ptr, 2.0);
    op.power.b = number_or(j, "b", ptr, 0.0);
    op.n = j.contains("N") ? static_cast<std::size_t>(int_at(j, "N", ptr, 2)) : 2000;
    if (j.contains("lambda")) field_error(ptr + "/lambda", "only allowed with law \"explicit\"");
  } else if (op.law == "explicit") {
    if (!j.contains("lambda") || !j.at("lambda").is_array()) field_error(ptr + "/lambda", "expected an array of eigenvalues");
    for (std::size_t i = 0; i < j.at("lambda").size(); ++i) {
      const json& v = j.at("lambda")[i];
      if (!v.is_number()) field_error(ptr + "/lambda/" + std::to_string(i), "expected a number");
      op.eigenvalues.push_back(v.get<double>());
    }
    op.n = op.eigenvalues.size();
    if (j.contains("N") && static_cast<std::size_t>(int_at(j, "N", ptr, 2)) != op.n) {
      field_error(ptr + "/N", "must equal the length of lambda");
    }
  } else {
    field_error(ptr + "/law", "expected \"power\" or \"explicit\"");
  }
}

void parse_family(const json& j, FamilySpec& fam) {
  const std::string ptr = "/family";
  only_keys(j, ptr, {"m", "d", "law", "alpha", "beta", "phi"});
  fam.m = int_at(j, "m", ptr, 1);
  if (j.contains("law") && !j.at("law").is_string()) field_error(ptr + "/law", "expected \"power\" or \"explicit\"");
  fam.law = j.contains("law") ? j.at("law").get<std::string>() : "power";
  if (fam.law == "power") {
    fam.d = j.contains("d") ? int_at(j, "d", ptr, 1) : 1;
    if (j.contains("alpha")) fam.alpha = number_at(j, "alpha", ptr);
    if (j.contains("beta")) fam.beta = number_at(j, "beta", ptr);
    if (j.contains("phi")) field_error(ptr + "/phi", "only allowed with law \"explicit\"");
  } else if (fam.law == "explicit") {
    if (!j.contains("phi") || !j.at("phi").is_array() || j.at("phi").empty()) {
      field_error(ptr + "/phi", "expected a nonempty array of coefficient lists");
    }
    const json& phi = j.at("phi");
    for (std::size_t s = 0; s < phi.size(); ++s) {
      const std::string sp = ptr + "/phi/" + std::to_string(s);
      if (!phi[s].is_array() || phi[s].empty()) field_error(sp, "expected a nonempty coefficient list");
      Vec c(static_cast<Eigen::Index>(phi[s].size()));
      for (std::size_t k = 0; k < phi[s].size(); ++k) {
        c(static_cast<Eigen::Index>(k)) = complex_at(phi[s][k], sp + "/" + std::to_string(k));
      }
      fam.explicit_phi.push_back(std::move(c));
    }
    fam.d = static_cast<int>(fam.explicit_phi.size());
    if (j.contains("d") && int_at(j, "d", ptr, 1) != fam.d) field_error(ptr + "/d", "must equal the number of phi lists");
  } else {
    field_error(ptr + "/law", "expected \"power\" or \"explicit\"");
  }
}

void parse_gram(const json& j, GramSource& g, const Layout& lay) {
  const std::string ptr = "/gram";
  only_keys(j, ptr, {"mode", "matrix", "params", "perturb"});
  if (!j.contains("mode") || !j.at("mode").is_string()) field_error(ptr + "/mode", "expected tilde | explicit | antitriangular");
  g.mode = j.at("mode").get<std::string>();
  if (g.mode == "explicit") {
    if (!j.contains("matrix")) field_error(ptr + "/matrix", "missing Gram matrix");
    g.matrix = matrix_at(j.at("matrix"), ptr + "/matrix");
    if (g.matrix.rows() != lay.size() || g.matrix.cols() != lay.size()) {
      field_error(ptr + "/matrix", "must be (m*d) x (m*d) = " + std::to_string(lay.size()) + " square");
    }
  } else if (g.mode == "antitriangular") {
    if (!j.contains("params")) field_error(ptr + "/params", "missing parameters");
    const json& p = j.at("params");
    only_keys(p, ptr + "/params", {"antidiagonals", "coupling"});
    if (!p.contains("antidiagonals") || !p.at("antidiagonals").is_array() || p.at("antidiagonals").empty()) {
      field_error(ptr + "/params/antidiagonals", "expected a nonempty array of numbers");
    }
    for (std::size_t i = 0; i < p.at("antidiagonals").size(); ++i) {
      const json& v = p.at("antidiagonals")[i];
      if (!v.is_number()) field_error(ptr + "/params/antidiagonals/" + std::to_string(i), "expected a number");
      g.antidiagonals.push_back(v.get<double>());
    }
    if (g.antidiagonals.front() == 0.0) field_error(ptr + "/params/antidiagonals/0", "must be nonzero");
    g.coupling = number_or(p, "coupling", ptr + "/params", 0.0);
  } else if (g.mode != "tilde") {
    field_error(ptr + "/mode", "expected tilde | explicit | antitriangular");
  }
  if (j.contains("perturb")) {
    const json& list = j.at("perturb");
    if (!list.is_array()) field_error(ptr + "/perturb", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string pp = ptr + "/perturb/" + std::to_string(i);
      only_keys(list[i], pp, {"row", "col", "value"});
      GramPerturbation e;
      for (const char* key : {"row", "col"}) {
        const json& idx = list[i].contains(key) ? list[i].at(key) : json();
        if (!idx.is_array() || idx.size() != 2 || !idx[0].is_number_integer() || !idx[1].is_number_integer()) {
          field_error(pp + "/" + key, "expected [sigma, j] (1-based)");
        }
        const int s = idx[0].get<int>(), lv = idx[1].get<int>();
        if (s < 1 || s > lay.d || lv < 1 || lv > lay.m) field_error(pp + "/" + key, "index out of range");
        (std::string(key) == "row" ? e.sigma : e.sigma2) = s;
        (std::string(key) == "row" ? e.j : e.j2) = lv;
      }
      if (!list[i].contains("value")) field_error(pp + "/value", "missing value");
      e.value = complex_at(list[i].at("value"), pp + "/value");
      g.perturb.push_back(e);
    }
  }
}

ThetaRelation parse_theta(const json& j, int d) {
  const std::string ptr = "/theta";
  ThetaRelation t;
  if (j.is_string()) {
    if (j.get<std::string>() != "zero") field_error(ptr, "expected \"zero\" or an object");
    t = ThetaRelation::zero_relation(d);
  } else {
    only_keys(j, ptr, {"zero", "scalar", "matrix", "X", "Y"});
    if (j.contains("zero")) {
      t = ThetaRelation::zero_relation(d);
    } else if (j.contains("scalar")) {
      t = ThetaRelation::from_matrix(complex_at(j.at("scalar"), ptr + "/scalar") * Mat::Identity(d, d));
    } else if (j.contains("matrix")) {
      t = ThetaRelation::from_matrix(matrix_at(j.at("matrix"), ptr + "/matrix"));
    } else if (j.contains("X") && j.contains("Y")) {
      t = {matrix_at(j.at("X"), ptr + "/X"), matrix_at(j.at("Y"), ptr + "/Y")};
    } else {
      field_error(ptr, "expected one of zero, scalar, matrix, or X and Y");
    }
  }
  if (t.X.rows() != d || t.X.cols() != d || t.Y.rows() != d || t.Y.cols() != d) {
    field_error(ptr, "X and Y must be d x d with d = " + std::to_string(d));
  }
  try {
    t.validate();
  } catch (const Error& e) {
    field_error(ptr, e.what());
  }
  return t;
}

std::vector<cplx> parse_grid_json(const json& j) {
  const std::string ptr = "/grid";
  if (j.is_string()) return parse_grid(j.get<std::string>());
  only_keys(j, ptr, {"points", "ladder"});
  std::vector<cplx> out;
  if (j.contains("points")) {
    const json& pts = j.at("points");
    if (!pts.is_array() || pts.empty()) field_error(ptr + "/points", "expected a nonempty array");
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(complex_at(pts[i], ptr + "/points/" + std::to_string(i)));
  }
  if (j.contains("ladder")) {
    const json& l = j.at("ladder");
    const std::string lp = ptr + "/ladder";
    only_keys(l, lp, {"start", "ratio", "count", "shift"});
    const double start = number_at(l, "start", lp);
    const double ratio = number_or(l, "ratio", lp, 2.0);
    const int count = int_at(l, "count", lp, 1);
    const double shift = number_or(l, "shift", lp, 0.0);
    for (int i = 0; i < count; ++i) out.emplace_back(shift, start * std::pow(ratio, i));
  }
  if (out.empty()) field_error(ptr, "expected points or a ladder");
  return out;
}

}  // namespace

namespace {

ModelConfig parse_config_fields(const std::string& text) {
  json raw;
  try {
    raw = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    std::ostringstream msg;
    msg << "config syntax error at line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorKind::Config, msg.str());
  }
  only_keys(raw, "", {"schema", "operator", "family", "gram", "theta", "grid", "tolerances", "seed", "model"});
  if (!raw.contains("schema") || raw.at("schema") != kSchema) {
    field_error("/schema", std::string("expected \"") + kSchema + "\"");
  }
  ModelConfig cfg;
  cfg.raw = raw;
  cfg.hash = fnv_hex(raw.dump());
  if (!raw.contains("operator")) field_error("/operator", "missing operator block");
  parse_operator(raw.at("operator"), cfg.op);
  if (!raw.contains("family")) field_error("/family", "missing family block");
  parse_family(raw.at("family"), cfg.family);
  const Layout lay{cfg.family.m, cfg.family.d};
  parse_gram(raw.contains("gram") ? raw.at("gram") : json{{"mode", "tilde"}}, cfg.gram, lay);
  if (raw.contains("theta")) {
    cfg.theta = parse_theta(raw.at("theta"), lay.d);
    cfg.theta_given = true;
  } else {
    cfg.theta = ThetaRelation::zero_relation(lay.d);
  }
  cfg.grid = raw.contains("grid") ? parse_grid_json(raw.at("grid")) : default_grid();
  if (raw.contains("tolerances")) {
    const json& t = raw.at("tolerances");
    only_keys(t, "/tolerances", {"identity", "pairing", "simplicity", "negativity"});
    cfg.tol.identity = number_or(t, "identity", "/tolerances", cfg.tol.identity);
    cfg.tol.pairing = number_or(t, "pairing", "/tolerances", cfg.tol.pairing);
    cfg.tol.simplicity = number_or(t, "simplicity", "/tolerances", cfg.tol.simplicity);
    cfg.tol.negativity = number_or(t, "negativity", "/tolerances", cfg.tol.negativity);
  }
  if (raw.contains("seed")) {
    if (!raw.at("seed").is_number_unsigned()) field_error("/seed", "expected a nonnegative integer");
    cfg.seed = raw.at("seed").get<std::uint64_t>();
  }
  if (raw.contains("model")) {
    const json& m = raw.at("model");
    if (!m.is_string() || (m != "a" && m != "b" && m != "A" && m != "B")) field_error("/model", "expected \"a\" or \"b\"");
    cfg.model = static_cast<char>(std::tolower(m.get<std::string>()[0]));
  }
  if (cfg.family.law == "explicit") {
    for (std::size_t s = 0; s < cfg.family.explicit_phi.size(); ++s) {
      if (static_cast<std::size_t>(cfg.family.explicit_phi[s].size()) > cfg.op.n) {
        field_error("/family/phi/" + std::to_string(s), "longer than the truncation N");
      }
    }
  }
  return cfg;
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
  try {
    return parse_config_fields(text);
  } catch (const json::exception& e) {
    // Type mismatches not caught by the field checks above.
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

cplx parse_complex(const std::string& text) {
  std::stringstream ss(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(ss >> re)) throw Error(ErrorKind::Config, "cannot parse complex number '" + text + "'");
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im)) throw Error(ErrorKind::Config, "cannot parse complex number '" + text + "' (use re,im)");
  }
  std::string rest;
  if (ss >> rest) throw Error(ErrorKind::Config, "trailing text in complex number '" + text + "'");
  return {re, im};
}

std::vector<cplx> parse_grid(const std::string& spec) {
  std::vector<cplx> out;
  if (spec.rfind("ladder:", 0) == 0) {
    std::stringstream ss(spec.substr(7));
    std::vector<double> p;
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        p.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "grid ladder: cannot parse '" + item + "'");
      }
    }
    if (p.size() < 3 || p.size() > 4 || p[2] < 1 || p[2] != std::floor(p[2])) {
      throw Error(ErrorKind::Config, "grid ladder: expected ladder:start,ratio,count[,shift]");
    }
    for (int i = 0; i < static_cast<int>(p[2]); ++i) out.emplace_back(p.size() == 4 ? p[3] : 0.0, p[0] * std::pow(p[1], i));
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(parse_complex(item));
  }
  if (out.empty()) throw Error(ErrorKind::Config, "grid: no points in '" + spec + "'");
  return out;
}

std::vector<cplx> default_grid() {
  std::vector<cplx> g;
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) g.emplace_back(0.0, t);
  for (double t : {0.5, 1.0, 2.0}) g.emplace_back(1.0, t);
  for (double t : {0.5, 1.0, 2.0}) g.emplace_back(-3.0, t);
  return g;
}

ModelInstance instantiate(const ModelConfig& cfg, std::size_t n_override) {
  const std::size_t n = n_override > 0 ? n_override : cfg.op.n;
  SpectralOperator op = cfg.op.law == "power"
                            ? SpectralOperator::power_law(cfg.op.power, n, cfg.op.z1)
                            : SpectralOperator::from_list(cfg.op.eigenvalues, cfg.op.z1).truncated(n);
  const FamilySpec& fs = cfg.family;
  SingularFamily fam = fs.law == "power"
                           ? make_power_family(op, fs.m, fs.d, fs.alpha.value_or(0.5 * (fs.m + 1)),
                                               fs.beta.value_or(-0.5))
                           : make_explicit_family(op, fs.m, fs.explicit_phi);
  const Layout lay = fam.layout;
  std::optional<GramTilde> tilde;
  Mat g;
  if (cfg.gram.mode == "tilde") {
    tilde = gram_tilde(fam, cfg.tol.pairing);
    g = tilde->G;
  } else if (cfg.gram.mode == "explicit") {
    g = cfg.gram.matrix;
  } else {
    g = antitriangular_gram(lay, cfg.gram.antidiagonals, cfg.gram.coupling);
  }
  for (const auto& e : cfg.gram.perturb) {
    const int a = lay.slot(e.sigma - 1, e.j), b = lay.slot(e.sigma2 - 1, e.j2);
    if (a == b) {
      g(a, a) += e.value.real();
    } else {
      g(a, b) += e.value;
      g(b, a) += std::conj(e.value);
    }
  }
  GramSpec gram = assess_gram(g, lay);
  return {std::move(op), std::move(fam), std::move(gram), std::move(tilde)};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Mat& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(complex_to_json(a(i, k)));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vec vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) field_error(where, "expected an array");
  Vec out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Eigen::Index>(i)) = complex_at(j[i], where + "/" + std::to_string(i));
  return out;
}

}  // namespace singext
