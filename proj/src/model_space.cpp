#include "singext/model_space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "singext/errors.hpp"

namespace singext {

namespace {

void require_layout(const Layout& lay, const Vec& v, const char* what) {
  if (v.size() != lay.size()) {
    std::ostringstream msg;
    msg << what << ": expected " << lay.size() << " coordinates, got " << v.size();
    throw Error(ErrorKind::Config, msg.str());
  }
}

// Smallest over largest singular value; 0 for a zero matrix.
double inverse_condition(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

void fill_membership(SingularFamily& fam) {
  const int m = fam.m();
  for (const auto& phi : fam.phi) {
    auto lower = classify_membership(fam.op, phi, -m - 2);
    auto upper = classify_membership(fam.op, phi, -m - 1);
    fam.in_class.push_back(lower.verdict == Membership::Converges &&
                           upper.verdict == Membership::Diverges);
    fam.in_lower.push_back(lower);
    fam.in_upper.push_back(upper);
  }
}

void require_independent(const SingularFamily& fam) {
  const int d = fam.d();
  Mat g(d, d);
  for (int s = 0; s < d; ++s) {
    for (int t = 0; t < d; ++t) g(s, t) = inner(fam.op, -fam.m() - 2, fam.phi[s], fam.phi[t]);
  }
  if (!(inverse_condition(g) > 1e-12)) {
    throw Error(ErrorKind::Config, "singular family: functionals phi_sigma are linearly dependent");
  }
}

GramTilde gram_of(const SingularFamily& fam, const std::vector<std::pair<int, int>>& index,
                  double tol) {
  const int n = static_cast<int>(index.size());
  const int m = fam.m();
  std::vector<ScaleVector> h;
  h.reserve(index.size());
  for (const auto& [s, j] : index) h.push_back(build_h(fam, s, j));

  GramTilde out;
  out.G = Mat::Zero(n, n);
  out.tail = RMat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const Pairing p = inner_bounded(fam.op, -m, h[a], h[b], tol);
      if (fam.op.law() && !p.tail.converged) {
        std::ostringstream msg;
        msg << "Gram entry (" << a << "," << b << "): tail bound " << p.tail.tail_bound
            << " exceeds tolerance " << tol;
        throw Error(ErrorKind::Truncation, msg.str());
      }
      out.bounded = out.bounded && p.tail.bounded;
      out.G(a, b) = p.value;
      out.G(b, a) = std::conj(p.value);
      out.tail(a, b) = out.tail(b, a) = p.tail.tail_bound;
    }
    out.G(a, a) = out.G(a, a).real();
  }
  return out;
}

}  // namespace

// --- family ------------------------------------------------------------------

SingularFamily make_power_family(const SpectralOperator& op, int m, int d, double alpha,
                                 double beta) {
  if (m < 1) throw Error(ErrorKind::Config, "family: order m must be >= 1");
  if (d < 1) throw Error(ErrorKind::Config, "family: rank d must be >= 1");
  SingularFamily fam{op, Layout{m, d}, {}, {}, {}, {}};
  const RVec& w = op.weights();
  const auto n = w.size();
  for (int s = 1; s <= d; ++s) {
    Vec c(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double kk = static_cast<double>(k + 1);
      cplx v = std::pow(w(k), alpha) * std::pow(kk, beta);
      if (d >= 2) v *= std::polar(1.0, 2.0 * std::numbers::pi * s * kk / (d + 1));
      c(k) = v;
    }
    fam.phi.push_back(make_vector(op, std::move(c), -m - 2, TailLaw::single({1.0, alpha, beta})));
  }
  require_independent(fam);
  fill_membership(fam);
  return fam;
}

SingularFamily make_power_family(const SpectralOperator& op, int m, int d) {
  return make_power_family(op, m, d, 0.5 * (m + 1), -0.5);
}

SingularFamily make_explicit_family(const SpectralOperator& op, int m,
                                    const std::vector<Vec>& coefficients) {
  if (m < 1) throw Error(ErrorKind::Config, "family: order m must be >= 1");
  if (coefficients.empty()) throw Error(ErrorKind::Config, "family: at least one functional required");
  const auto n = static_cast<Eigen::Index>(op.size());
  SingularFamily fam{op, Layout{m, static_cast<int>(coefficients.size())}, {}, {}, {}, {}};
  for (const auto& c : coefficients) {
    if (c.size() > n) throw Error(ErrorKind::Config, "family: more coefficients than the truncation N");
    Vec full = Vec::Zero(n);
    full.head(c.size()) = c;
    fam.phi.push_back(make_vector(op, std::move(full), -m - 2));
  }
  require_independent(fam);
  fill_membership(fam);
  return fam;
}

ScaleVector build_h(const SingularFamily& fam, int sigma, int j) {
  if (sigma < 0 || sigma >= fam.d()) throw Error(ErrorKind::Config, "build_h: sigma out of range");
  if (j < 1 || j > fam.m() + 1) throw Error(ErrorKind::Config, "build_h: level j must be in 1..m+1");
  return apply_b(fam.op, -j, fam.phi[sigma]);
}

ScaleVector h_combination(const SingularFamily& fam, int j, const Vec& c) {
  if (c.size() != fam.d()) throw Error(ErrorKind::Config, "h_combination: expected d coefficients");
  ScaleVector out = zero_vector(fam.op, -fam.m() - 2 + 2 * j);
  for (int s = 0; s < fam.d(); ++s) {
    if (c(s) != cplx(0.0)) out = out + c(s) * build_h(fam, s, j);
  }
  out.index = -fam.m() - 2 + 2 * j;
  return out;
}

// --- model vectors -----------------------------------------------------------

ModelVector operator+(const ModelVector& a, const ModelVector& b) {
  return {a.regular + b.regular, a.singular + b.singular};
}

ModelVector operator-(const ModelVector& a, const ModelVector& b) {
  return {a.regular - b.regular, a.singular - b.singular};
}

ModelVector operator*(cplx s, const ModelVector& a) { return {s * a.regular, s * a.singular}; }

ModelVector regular_only(const SingularFamily& fam, const ScaleVector& f) {
  return {f, Vec::Zero(fam.layout.size())};
}

ModelVector singular_only(const SingularFamily& fam, const Vec& coords) {
  require_layout(fam.layout, coords, "singular_only");
  return {zero_vector(fam.op, fam.m()), coords};
}

double model_norm(const SingularFamily& fam, const ModelVector& v) {
  const double r = norm(fam.op, fam.m(), v.regular);
  return std::sqrt(r * r + v.singular.squaredNorm());
}

Mat GramSpec::min_block() const {
  const int d = layout.d;
  Mat out(d, d);
  for (int s = 0; s < d; ++s) {
    for (int t = 0; t < d; ++t) out(s, t) = G(layout.slot(s, layout.m), layout.slot(t, layout.m));
  }
  return out;
}

// --- Gram matrices and coordinates ---------------------------------------------

GramTilde gram_tilde(const SingularFamily& fam, double tol) {
  std::vector<std::pair<int, int>> index;
  for (int s = 0; s < fam.d(); ++s) {
    for (int j = 1; j <= fam.m(); ++j) index.emplace_back(s, j);
  }
  return gram_of(fam, index, tol);
}

GramTilde gram_tilde_min(const SingularFamily& fam, double tol) {
  std::vector<std::pair<int, int>> index;
  for (int s = 0; s < fam.d(); ++s) index.emplace_back(s, fam.m());
  return gram_of(fam, index, tol);
}

ScaleVector synthesize_k(const SingularFamily& fam, const Vec& coords) {
  require_layout(fam.layout, coords, "synthesize_k");
  ScaleVector out = zero_vector(fam.op, -fam.m());
  for (int s = 0; s < fam.d(); ++s) {
    for (int j = 1; j <= fam.m(); ++j) {
      const cplx c = coords(fam.layout.slot(s, j));
      if (c != cplx(0.0)) out = out + c * build_h(fam, s, j);
    }
  }
  out.index = -fam.m();
  return out;
}

Vec h_pairings(const SingularFamily& fam, const ScaleVector& k) {
  Vec out(fam.layout.size());
  for (int s = 0; s < fam.d(); ++s) {
    for (int j = 1; j <= fam.m(); ++j) {
      out(fam.layout.slot(s, j)) = inner(fam.op, -fam.m(), build_h(fam, s, j), k);
    }
  }
  return out;
}

CoordinateSolve coords(const Mat& gram_tilde, const Vec& pairings, double condition_limit) {
  if (gram_tilde.rows() != pairings.size()) {
    throw Error(ErrorKind::Config, "coords: Gram matrix and pairing vector sizes differ");
  }
  CoordinateSolve out;
  const double ic = inverse_condition(gram_tilde);
  out.condition = ic > 0.0 ? 1.0 / ic : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition < condition_limit);
  out.coords = gram_tilde.ldlt().solve(pairings);
  return out;
}

cplx metric(const SingularFamily& fam, const GramSpec& gram, const ModelVector& f,
            const ModelVector& g) {
  require_layout(gram.layout, f.singular, "metric");
  require_layout(gram.layout, g.singular, "metric");
  return inner(fam.op, fam.m(), f.regular, g.regular) + f.singular.dot(gram.G * g.singular);
}

// --- H_A^perp and Phi -----------------------------------------------------------

PerpBasis h_perp_basis(const GramSpec& gram, double rank_tol) {
  const Layout& lay = gram.layout;
  Mat rows(lay.d, lay.size());
  for (int s = 0; s < lay.d; ++s) rows.row(s) = gram.G.row(lay.slot(s, lay.m));

  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double cut = rank_tol * (sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cut ? 1 : 0;

  PerpBasis out;
  const int dim = lay.size() - rank;
  out.basis = svd.matrixV().rightCols(dim);
  if (dim == 0) {
    out.form_orthonormal = true;
    return out;
  }
  const Mat form = out.basis.adjoint() * gram.G * out.basis;
  const Mat herm = 0.5 * (form + form.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> eig(herm);
  const double floor = 1e-12 * std::max(1.0, max_abs(gram.G));
  if (eig.eigenvalues().minCoeff() > floor) {
    Eigen::LLT<Mat> llt(herm);
    // N L^{-*} has unit form: (L^{-1} N^* G N L^{-*}) = I.
    out.basis = llt.matrixU().solve<Eigen::OnTheRight>(out.basis);
    out.form_orthonormal = true;
  } else {
    out.indefinite = true;
  }
  return out;
}

bool in_h_perp(const GramSpec& gram, const Vec& coords, double tol) {
  require_layout(gram.layout, coords, "in_h_perp");
  const Vec top = top_block(gram.layout, gram.G * coords);
  const double scale = std::max(1.0, max_abs(gram.G)) * std::max(1.0, coords.norm());
  return top.norm() <= tol * scale;
}

Vec phi_map(const GramSpec& gram, const Vec& coords) {
  require_layout(gram.layout, coords, "phi_map");
  const Mat gmin = gram.min_block();
  if (!(inverse_condition(gmin) > 1e-12)) {
    throw Error(ErrorKind::Config, "phi_map: minimal Gram block G_A^min is singular");
  }
  return gmin.fullPivLu().solve(top_block(gram.layout, gram.G * coords));
}

Vec perp_component(const GramSpec& gram, const Vec& coords) {
  return coords - eta(gram.layout, phi_map(gram, coords));
}

}  // namespace singext
