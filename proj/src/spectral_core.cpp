#include "singext/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "singext/errors.hpp"

namespace singext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Neumaier-compensated accumulation of a complex series.
class Accumulator {
 public:
  void add(cplx x) {
    add_part(re_, re_c_, x.real());
    add_part(im_, im_c_, x.imag());
    abs_ += std::abs(x);
  }
  cplx value() const { return {re_ + re_c_, im_ + im_c_}; }
  double abs_sum() const { return abs_; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0, abs_ = 0.0;
};

// Rounding allowance for a compensated sum of terms that were themselves
// computed with a few ulps of error.
double rounding_allowance(double abs_sum) { return 8.0 * kEps * abs_sum; }

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

void require_same(const SpectralOperator& op, const ScaleVector& u, const char* what) {
  if (u.op_id != op.id() || static_cast<std::size_t>(u.coeffs.size()) != op.size()) {
    std::ostringstream msg;
    msg << what << ": vector does not belong to this operator/truncation (size "
        << u.coeffs.size() << " vs N=" << op.size() << ")";
    throw Error(ErrorKind::Config, msg.str());
  }
}

void require_pair(const ScaleVector& u, const ScaleVector& v, const char* what) {
  if (u.op_id != v.op_id || u.coeffs.size() != v.coeffs.size()) {
    throw Error(ErrorKind::Config, std::string(what) + ": vectors from different operators");
  }
}

TailReport finish_tail(const SpectralOperator& op, const TailLaw& law, double abs_sum,
                       double tol) {
  TailReport rep;
  rep.partial_sum = abs_sum;
  if (law.finitely_supported()) {
    rep.tail_bound = rounding_allowance(abs_sum);
  } else if (auto t = op.tail_sum(law)) {
    rep.tail_bound = *t + rounding_allowance(abs_sum);
  } else {
    rep.bounded = false;
    rep.tail_bound = kInf;
  }
  // Relative to the size of the series so scaled inputs are judged alike.
  rep.converged = rep.bounded && rep.tail_bound <= tol * std::max(1.0, abs_sum);
  return rep;
}

}  // namespace

// --- tail laws ---------------------------------------------------------------

TailLaw operator+(const TailLaw& a, const TailLaw& b) {
  TailLaw out = a;
  out.unbounded = a.unbounded || b.unbounded;
  for (const auto& t : b.terms) {
    auto same = std::find_if(out.terms.begin(), out.terms.end(), [&](const MagnitudeTerm& s) {
      return s.w_exp == t.w_exp && s.k_exp == t.k_exp;
    });
    if (same != out.terms.end()) {
      same->scale += t.scale;
    } else {
      out.terms.push_back(t);
    }
  }
  return out;
}

TailLaw scaled(const TailLaw& a, double factor) {
  TailLaw out = a;
  if (factor == 0.0) return TailLaw::finite();
  for (auto& t : out.terms) t.scale *= std::abs(factor);
  return out;
}

TailLaw product(const TailLaw& a, const TailLaw& b) {
  if (a.finitely_supported() || b.finitely_supported()) return TailLaw::finite();
  TailLaw out;
  out.unbounded = a.unbounded || b.unbounded;
  for (const auto& s : a.terms) {
    for (const auto& t : b.terms) {
      out = out + TailLaw::single({s.scale * t.scale, s.w_exp + t.w_exp, s.k_exp + t.k_exp});
    }
  }
  return out;
}

TailLaw shift_weight(const TailLaw& a, double w_exp) {
  TailLaw out = a;
  for (auto& t : out.terms) t.w_exp += w_exp;
  return out;
}

// --- operator ----------------------------------------------------------------

SpectralOperator::SpectralOperator(RVec lambda, double z1, std::optional<PowerLaw> law)
    : lambda_(std::move(lambda)), z1_(z1), law_(law) {
  if (lambda_.size() < 2) throw Error(ErrorKind::Config, "operator: truncation N must be >= 2");
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
    if (!std::isfinite(lambda_(k))) throw Error(ErrorKind::Config, "operator: non-finite eigenvalue");
    if (k > 0 && lambda_(k) < lambda_(k - 1)) {
      throw Error(ErrorKind::Config, "operator: eigenvalues must be nondecreasing");
    }
  }
  if (!(z1_ < lambda_(0))) {
    throw Error(ErrorKind::Config, "operator: reference point z1 must lie below lambda_1");
  }
  weights_ = lambda_.array() - z1_;
  std::uint64_t h = 1469598103934665603ULL;
  const auto n = static_cast<std::uint64_t>(lambda_.size());
  h = fnv1a(&n, sizeof n, h);
  h = fnv1a(&z1_, sizeof z1_, h);
  h = fnv1a(lambda_.data(), sizeof(double) * static_cast<std::size_t>(lambda_.size()), h);
  id_ = h;
}

SpectralOperator SpectralOperator::power_law(PowerLaw law, std::size_t n, double z1) {
  if (!(law.a > 0.0)) throw Error(ErrorKind::Config, "operator: power law needs a > 0");
  if (!(law.p >= 1.0)) throw Error(ErrorKind::Config, "operator: power law needs p >= 1");
  RVec lambda(static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k <= n; ++k) {
    lambda(static_cast<Eigen::Index>(k - 1)) = law.a * std::pow(static_cast<double>(k), law.p) + law.b;
  }
  return SpectralOperator(std::move(lambda), z1, law);
}

SpectralOperator SpectralOperator::from_list(std::vector<double> eigenvalues, double z1) {
  RVec lambda = Eigen::Map<const RVec>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
  return SpectralOperator(std::move(lambda), z1, std::nullopt);
}

SpectralOperator SpectralOperator::truncated(std::size_t n) const {
  if (law_) return power_law(*law_, n, z1_);
  if (n > size()) throw Error(ErrorKind::Config, "operator: cannot extend an explicit eigenvalue list");
  return SpectralOperator(lambda_.head(static_cast<Eigen::Index>(n)), z1_, std::nullopt);
}

RVec SpectralOperator::weight_power(double e) const { return weights_.array().pow(e); }

double SpectralOperator::distance_to_spectrum(cplx z) const {
  double best = kInf;
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) best = std::min(best, std::abs(lambda_(k) - z));
  return best;
}

void SpectralOperator::require_resolvent_point(cplx z, double tol) const {
  const double scale = std::max(1.0, std::abs(z));
  double dist = distance_to_spectrum(z);
  if (law_ && std::abs(z.imag()) <= tol * scale) {
    const double next = law_->a * std::pow(static_cast<double>(size() + 1), law_->p) + law_->b;
    if (z.real() >= next - tol * scale) {
      const double kstar = std::pow((z.real() - law_->b) / law_->a, 1.0 / law_->p);
      for (double k : {std::floor(kstar), std::ceil(kstar)}) {
        if (k > static_cast<double>(size())) {
          dist = std::min(dist, std::abs(law_->a * std::pow(k, law_->p) + law_->b - z));
        }
      }
    }
  }
  if (dist <= tol * scale) {
    std::ostringstream msg;
    msg << "z = " << z << " lies on the spectrum of L (distance " << dist << ")";
    throw Error(ErrorKind::SpectralPoint, msg.str());
  }
}

std::optional<double> SpectralOperator::tail_sum(const TailLaw& law) const {
  if (law.finitely_supported()) return 0.0;
  if (!law_ || law.unbounded) return std::nullopt;
  const double n = static_cast<double>(size());
  const double a = law_->a;
  const double p = law_->p;
  // w(x) = a x^p (1 + c0/(a x^p)); the bracket moves monotonically from its
  // value at x = N towards 1.
  const double ratio_at_n = 1.0 + (law_->b - z1_) / (a * std::pow(n, p));
  if (!(ratio_at_n > 0.0)) return std::nullopt;
  double total = 0.0;
  for (const auto& t : law.terms) {
    if (t.scale == 0.0) continue;
    const double gamma = p * t.w_exp + t.k_exp;
    if (gamma >= -1.0) return kInf;
    const double rho = std::max(1.0, std::pow(ratio_at_n, t.w_exp));
    total += t.scale * rho * std::pow(a, t.w_exp) * std::pow(n, gamma + 1.0) / (-gamma - 1.0);
  }
  return total;
}

std::optional<double> SpectralOperator::resolvent_tail_factor(cplx z) const {
  if (!law_) return std::nullopt;
  if (z.real() <= z1_) return 1.0;
  const double next = law_->a * std::pow(static_cast<double>(size() + 1), law_->p) + law_->b;
  if (!(next > z.real())) return std::nullopt;
  // (lambda - z1)/(lambda - Re z) decreases in lambda.
  return (next - z1_) / (next - z.real());
}

// --- vectors -----------------------------------------------------------------

ScaleVector make_vector(const SpectralOperator& op, Vec coeffs, int index, TailLaw tail) {
  if (static_cast<std::size_t>(coeffs.size()) != op.size()) {
    throw Error(ErrorKind::Config, "scale vector: coefficient count must equal N");
  }
  return ScaleVector{std::move(coeffs), index, op.id(), std::move(tail)};
}

ScaleVector zero_vector(const SpectralOperator& op, int index) {
  return make_vector(op, Vec::Zero(static_cast<Eigen::Index>(op.size())), index);
}

ScaleVector unit_vector(const SpectralOperator& op, std::size_t k, int index) {
  if (k < 1 || k > op.size()) throw Error(ErrorKind::Config, "unit vector: index out of range");
  ScaleVector u = zero_vector(op, index);
  u.coeffs(static_cast<Eigen::Index>(k - 1)) = 1.0;
  return u;
}

ScaleVector operator+(const ScaleVector& u, const ScaleVector& v) {
  require_pair(u, v, "sum");
  return ScaleVector{u.coeffs + v.coeffs, std::min(u.index, v.index), u.op_id, u.tail + v.tail};
}

ScaleVector operator-(const ScaleVector& u, const ScaleVector& v) {
  require_pair(u, v, "difference");
  return ScaleVector{u.coeffs - v.coeffs, std::min(u.index, v.index), u.op_id, u.tail + v.tail};
}

ScaleVector operator*(cplx s, const ScaleVector& u) {
  return ScaleVector{s * u.coeffs, u.index, u.op_id, scaled(u.tail, std::abs(s))};
}

cplx inner(const SpectralOperator& op, int n, const ScaleVector& u, const ScaleVector& v) {
  return inner_bounded(op, n, u, v, kInf).value;
}

Pairing inner_bounded(const SpectralOperator& op, int n, const ScaleVector& u, const ScaleVector& v,
                      double tol) {
  require_same(op, u, "inner");
  require_same(op, v, "inner");
  const RVec& w = op.weights();
  Accumulator acc;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    acc.add(std::conj(u.coeffs(k)) * v.coeffs(k) * std::pow(w(k), n));
  }
  const TailLaw law = shift_weight(product(u.tail, v.tail), n);
  return {acc.value(), finish_tail(op, law, acc.abs_sum(), tol)};
}

double norm(const SpectralOperator& op, int n, const ScaleVector& u) {
  return std::sqrt(std::max(0.0, inner(op, n, u, u).real()));
}

ScaleVector apply_b(const SpectralOperator& op, int n, const ScaleVector& u) {
  require_same(op, u, "apply_b");
  if (n == 0) return u;
  Vec out = u.coeffs.array() * op.weight_power(n).array().cast<cplx>();
  return ScaleVector{std::move(out), u.index - 2 * n, u.op_id, shift_weight(u.tail, n)};
}

ScaleVector resolvent_L(const SpectralOperator& op, cplx z, const ScaleVector& u) {
  require_same(op, u, "resolvent_L");
  op.require_resolvent_point(z);
  const RVec& lambda = op.eigenvalues();
  Vec out(u.coeffs.size());
  for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = u.coeffs(k) / (lambda(k) - z);
  TailLaw tail = u.tail;
  if (!tail.finitely_supported()) {
    if (auto kappa = op.resolvent_tail_factor(z)) {
      tail = scaled(shift_weight(tail, -1.0), *kappa);
    } else {
      tail.unbounded = true;
    }
  }
  return ScaleVector{std::move(out), u.index + 2, u.op_id, std::move(tail)};
}

ScaleVector apply_L(const SpectralOperator& op, const ScaleVector& u) {
  require_same(op, u, "apply_L");
  Vec out = u.coeffs.array() * op.eigenvalues().array().cast<cplx>();
  // |lambda_k| <= w_k + |z1|
  TailLaw tail = shift_weight(u.tail, 1.0) + scaled(u.tail, std::abs(op.z1()));
  return ScaleVector{std::move(out), u.index - 2, u.op_id, std::move(tail)};
}

Pairing pair(const SpectralOperator& op, const ScaleVector& phi, const ScaleVector& u, double tol) {
  require_same(op, phi, "pair");
  require_same(op, u, "pair");
  Accumulator acc;
  for (Eigen::Index k = 0; k < phi.coeffs.size(); ++k) acc.add(std::conj(phi.coeffs(k)) * u.coeffs(k));
  Pairing out{acc.value(), finish_tail(op, product(phi.tail, u.tail), acc.abs_sum(), tol)};
  if (op.law() && !out.tail.converged) {
    std::ostringstream msg;
    msg << "pairing tail bound " << out.tail.tail_bound << " exceeds tolerance " << tol
        << (std::isinf(out.tail.tail_bound) ? " (series does not converge)" : "");
    throw Error(ErrorKind::Truncation, msg.str());
  }
  return out;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::Converges: return "converges";
    case Membership::Diverges: return "diverges";
    case Membership::Undetermined: return "undetermined";
  }
  return "undetermined";
}

MembershipReport classify_membership(const SpectralOperator& op, const ScaleVector& u, int n,
                                     double tol, double growth_threshold) {
  require_same(op, u, "classify_membership");
  const RVec& w = op.weights();
  const Eigen::Index size = w.size();
  double total = 0.0;
  double half = 0.0;
  for (Eigen::Index k = 0; k < size; ++k) {
    total += std::norm(u.coeffs(k)) * std::pow(w(k), n);
    if (k + 1 == size / 2) half = total;
  }
  MembershipReport rep;
  rep.partial_sum = total;
  rep.window_growth = total > 0.0 ? (total - half) / total : 0.0;
  const TailLaw law = shift_weight(product(u.tail, u.tail), n);
  const auto tail = op.tail_sum(law);
  rep.tail_bound = tail ? *tail : kInf;
  if (tail && *tail <= tol) {
    rep.verdict = Membership::Converges;
  } else if (rep.window_growth > growth_threshold) {
    rep.verdict = Membership::Diverges;
  }
  return rep;
}

}  // namespace singext
