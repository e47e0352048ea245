#include "singext/a_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "singext/errors.hpp"

namespace singext {

namespace {

void require_not_pole(double z1, cplx z) {
  if (std::abs(z - z1) <= 1e-12 * std::max(1.0, std::abs(z1))) {
    std::ostringstream msg;
    msg << "z = " << z << " is the pole z1 of the model terms";
    throw Error(ErrorKind::Pole, msg.str());
  }
}

void require_d(const SingularFamily& fam, const Vec& c, const char* what) {
  if (c.size() != fam.d()) {
    std::ostringstream msg;
    msg << what << ": expected " << fam.d() << " boundary values, got " << c.size();
    throw Error(ErrorKind::Config, msg.str());
  }
}

}  // namespace

DomainElementA operator+(const DomainElementA& a, const DomainElementA& b) {
  return {a.f_sharp + b.f_sharp, a.c + b.c, a.k + b.k};
}

DomainElementA operator*(cplx s, const DomainElementA& a) {
  return {s * a.f_sharp, s * a.c, s * a.k};
}

// --- Theta -------------------------------------------------------------------

ThetaRelation ThetaRelation::zero_relation(int d) {
  return {Mat::Zero(d, d), Mat::Identity(d, d)};
}

ThetaRelation ThetaRelation::from_matrix(const Mat& t) {
  return {Mat::Identity(t.rows(), t.rows()), t};
}

void ThetaRelation::validate() const {
  if (X.rows() != X.cols() || Y.rows() != Y.cols() || X.rows() != Y.rows() || X.rows() == 0) {
    throw Error(ErrorKind::Config, "theta: X and Y must both be d x d");
  }
  Mat stacked(2 * X.rows(), X.cols());
  stacked << X, Y;
  Eigen::JacobiSVD<Mat> svd(stacked);
  const RVec& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(s.size() - 1) <= 1e-10 * s(0)) {
    throw Error(ErrorKind::Config, "theta: [X; Y] must have rank d");
  }
}

bool ThetaRelation::self_adjoint(double tol) const {
  try {
    validate();
  } catch (const Error&) {
    return false;
  }
  const Mat p = X.adjoint() * Y;
  return max_abs(p - p.adjoint()) <= tol * std::max(1.0, max_abs(p));
}

double ThetaRelation::distance(const Vec& a, const Vec& b) const {
  Mat stacked(2 * X.rows(), X.cols());
  stacked << X, Y;
  Vec rhs(2 * X.rows());
  rhs << a, b;
  const Vec u = stacked.colPivHouseholderQr().solve(rhs);
  return (stacked * u - rhs).norm();
}

// --- Amax --------------------------------------------------------------------

ModelVector to_model_vector(const SingularFamily& fam, const DomainElementA& x) {
  ScaleVector reg = x.f_sharp + h_combination(fam, fam.m() + 1, x.c);
  reg.index = fam.m();
  return {std::move(reg), x.k};
}

ModelVector apply_Amax(const SingularFamily& fam, const DomainElementA& x) {
  ScaleVector reg = apply_L(fam.op, x.f_sharp) + fam.z1() * h_combination(fam, fam.m() + 1, x.c);
  reg.index = fam.m();
  const Mat md = build_Md(fam.layout, fam.z1());
  return {std::move(reg), md * x.k + eta(fam.layout, x.c)};
}

ModelVector apply_Amax_prime(const SingularFamily& fam, const GramSpec& gram,
                             const DomainElementA& x) {
  ModelVector out = apply_Amax(fam, x);
  const Mat gm = build_GM(gram, fam.z1()).gm;
  out.singular = gram.G.fullPivLu().solve(gm.adjoint() * x.k) + eta(fam.layout, x.c);
  return out;
}

Vec gamma0(const DomainElementA& x) { return x.c; }

Vec phi_pairing(const SingularFamily& fam, const ScaleVector& f, RVec* tail) {
  Vec out(fam.d());
  if (tail) *tail = RVec::Zero(fam.d());
  for (int s = 0; s < fam.d(); ++s) {
    const Pairing p = pair(fam.op, fam.phi[s], f);
    out(s) = p.value;
    if (tail) (*tail)(s) = p.tail.tail_bound;
  }
  return out;
}

Vec gamma1(const SingularFamily& fam, const GramSpec& gram, const DomainElementA& x) {
  return phi_pairing(fam, x.f_sharp) - top_block(fam.layout, gram.G * x.k);
}

BoundaryForm boundary_form(const SingularFamily& fam, const GramSpec& gram,
                           const DomainElementA& x, const DomainElementA& y, double tol) {
  const ModelVector fx = to_model_vector(fam, x);
  const ModelVector fy = to_model_vector(fam, y);
  const ModelVector ax = apply_Amax(fam, x);
  const ModelVector ay = apply_Amax(fam, y);
  const cplx left = metric(fam, gram, fx, ay);
  const cplx right = metric(fam, gram, ax, fy);

  BoundaryForm out;
  out.direct = left - right;
  out.defect_term = x.k.dot(build_GM(gram, fam.z1()).defect * y.k);
  const Vec g0x = gamma0(x), g0y = gamma0(y);
  const Vec g1x = gamma1(fam, gram, x), g1y = gamma1(fam, gram, y);
  const cplx t1 = g0x.dot(g1y);
  const cplx t2 = g1x.dot(g0y);
  out.formula = out.defect_term + t1 - t2;
  const double scale = std::abs(left) + std::abs(right) + std::abs(out.defect_term) +
                       std::abs(t1) + std::abs(t2);
  out.residual = scale > 0.0 ? std::abs(out.direct - out.formula) / scale : 0.0;
  if (out.residual > tol) {
    std::ostringstream msg;
    msg << "boundary form: direct and formula sides differ (relative " << out.residual << ")";
    throw Error(ErrorKind::Consistency, msg.str());
  }
  return out;
}

// --- Weyl function -------------------------------------------------------------

Mat eval_q(const SingularFamily& fam, cplx z, RMat* tail) {
  const int d = fam.d();
  const cplx factor = z - fam.z1();
  Mat q(d, d);
  if (tail) *tail = RMat::Zero(d, d);
  for (int t = 0; t < d; ++t) {
    const ScaleVector g = resolvent_L(fam.op, z, build_h(fam, t, fam.m() + 1));
    for (int s = 0; s < d; ++s) {
      const Pairing p = pair(fam.op, fam.phi[s], g);
      q(s, t) = factor * p.value;
      if (tail) (*tail)(s, t) = std::abs(factor) * p.tail.tail_bound;
    }
  }
  return q;
}

Mat eval_r(const GramSpec& gram, double z1, cplx z) {
  require_not_pole(z1, z);
  const Layout& lay = gram.layout;
  Mat r = Mat::Zero(lay.d, lay.d);
  for (int s = 0; s < lay.d; ++s) {
    for (int t = 0; t < lay.d; ++t) {
      for (int j = 1; j <= lay.m; ++j) {
        r(s, t) -= gram.G(lay.slot(s, lay.m), lay.slot(t, j)) / std::pow(z - z1, lay.m - j + 1);
      }
    }
  }
  return r;
}

DomainElementA gamma_A(const SingularFamily& fam, cplx z, const Vec& c) {
  require_d(fam, c, "gamma field");
  fam.op.require_resolvent_point(z);
  require_not_pole(fam.z1(), z);
  const cplx dz = z - fam.z1();
  DomainElementA out;
  out.f_sharp = dz * resolvent_L(fam.op, z, h_combination(fam, fam.m() + 1, c));
  out.c = c;
  out.k = Vec::Zero(fam.layout.size());
  for (int s = 0; s < fam.d(); ++s) {
    for (int j = 1; j <= fam.m(); ++j) out.k(fam.layout.slot(s, j)) = c(s) / std::pow(dz, fam.m() - j + 1);
  }
  return out;
}

ModelVector eval_gamma_A(const SingularFamily& fam, cplx z, const Vec& c) {
  return to_model_vector(fam, gamma_A(fam, z, c));
}

WeylSample eval_M_A(const SingularFamily& fam, const GramSpec& gram, cplx z) {
  WeylSample out;
  out.z = z;
  out.r = eval_r(gram, fam.z1(), z);
  out.q = eval_q(fam, z, &out.q_tail);
  out.M = out.q + out.r;
  return out;
}

// --- resolvents ----------------------------------------------------------------

DomainElementA resolvent_A0_element(const SingularFamily& fam, cplx z, const ModelVector& v) {
  if (v.singular.size() != fam.layout.size()) throw Error(ErrorKind::Config, "resolvent: coordinate size mismatch");
  require_not_pole(fam.z1(), z);
  DomainElementA out;
  out.f_sharp = resolvent_L(fam.op, z, v.regular);
  out.c = Vec::Zero(fam.d());
  const Mat shifted = build_Md(fam.layout, fam.z1()) - z * Mat::Identity(fam.layout.size(), fam.layout.size());
  out.k = shifted.triangularView<Eigen::Upper>().solve(v.singular);
  return out;
}

ModelVector resolvent_A0(const SingularFamily& fam, cplx z, const ModelVector& v) {
  return to_model_vector(fam, resolvent_A0_element(fam, z, v));
}

Vec gamma_A_adjoint(const SingularFamily& fam, const GramSpec& gram, cplx z, const ModelVector& v) {
  Vec out(fam.d());
  for (int s = 0; s < fam.d(); ++s) {
    const ModelVector g = eval_gamma_A(fam, std::conj(z), Vec::Unit(fam.d(), s));
    out(s) = metric(fam, gram, g, v);
  }
  return out;
}

Mat theta_minus_M_inverse(const ThetaRelation& theta, const Mat& M, cplx z) {
  theta.validate();
  if (theta.d() != M.rows()) throw Error(ErrorKind::Config, "theta: dimension differs from d");
  const Mat s = theta.Y - M * theta.X;
  Eigen::JacobiSVD<Mat> svd(s);
  const RVec& sv = svd.singularValues();
  const double scale = std::max({1.0, max_abs(theta.Y), max_abs(M) * max_abs(theta.X)});
  if (!(sv(sv.size() - 1) > 1e-12 * scale)) {
    std::ostringstream msg;
    msg << "z = " << z << " lies in the spectrum of the extension (Y - M(z) X singular)";
    throw Error(ErrorKind::ExtensionSpectrum, msg.str());
  }
  return theta.X * s.fullPivLu().inverse();
}

DomainElementA resolvent_ATheta_element(const SingularFamily& fam, const GramSpec& gram,
                                        const ThetaRelation& theta, cplx z, const ModelVector& v) {
  const DomainElementA base = resolvent_A0_element(fam, z, v);
  const Mat t = theta_minus_M_inverse(theta, eval_M_A(fam, gram, z).M, z);
  const Vec w = t * gamma_A_adjoint(fam, gram, z, v);
  return base + gamma_A(fam, z, w);
}

ModelVector resolvent_ATheta(const SingularFamily& fam, const GramSpec& gram,
                             const ThetaRelation& theta, cplx z, const ModelVector& v) {
  return to_model_vector(fam, resolvent_ATheta_element(fam, gram, theta, z, v));
}

ScaleVector compressed_resolvent(const SingularFamily& fam, const ThetaRelation& theta,
                                 const Mat& M, cplx z, const ScaleVector& f) {
  const ScaleVector rf = resolvent_L(fam.op, z, f);
  const Vec w = theta_minus_M_inverse(theta, M, z) * phi_pairing(fam, rf);
  ScaleVector out = rf + resolvent_L(fam.op, z, h_combination(fam, fam.m(), w));
  out.index = fam.m();
  return out;
}

ScaleVector compressed_resolvent_A(const SingularFamily& fam, const GramSpec& gram,
                                   const ThetaRelation& theta, cplx z, const ScaleVector& f) {
  return compressed_resolvent(fam, theta, eval_M_A(fam, gram, z).M, z, f);
}

}  // namespace singext
