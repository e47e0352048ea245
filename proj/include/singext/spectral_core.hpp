#pragma once

// Diagonal model of a lower-semibounded self-adjoint operator L, the scale of
// Hilbert spaces h_n it generates, and tail-bounded series over its spectrum.
//
// The scale uses b_n(L) = (L - z1)^n with a single real reference point
// z1 < lambda_1, so <u, v>_n = sum_k conj(u_k) v_k (lambda_k - z1)^n with a
// strictly positive weight.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "singext/types.hpp"

namespace singext {

inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kPairingTol = 1e-6;

// lambda_k = a k^p + b, k = 1, 2, ...
struct PowerLaw {
  double a = 1.0;
  double p = 2.0;
  double b = 0.0;
};

// One term of a coefficient majorant: |u_k| <= scale * w_k^w_exp * k^k_exp
// for every k past the truncation, where w_k = lambda_k - z1.
struct MagnitudeTerm {
  double scale = 1.0;
  double w_exp = 0.0;
  double k_exp = 0.0;
};

// Majorant of the coefficients a truncated vector omits. No terms means the
// vector is finitely supported (nothing omitted). `unbounded` marks vectors
// whose omitted part cannot be bounded.
struct TailLaw {
  std::vector<MagnitudeTerm> terms;
  bool unbounded = false;

  static TailLaw finite() { return {}; }
  static TailLaw single(MagnitudeTerm t) { return {{t}, false}; }
  bool finitely_supported() const { return terms.empty() && !unbounded; }
};

TailLaw operator+(const TailLaw& a, const TailLaw& b);
TailLaw scaled(const TailLaw& a, double factor);
// Termwise product: majorant of |u_k v_k|.
TailLaw product(const TailLaw& a, const TailLaw& b);
TailLaw shift_weight(const TailLaw& a, double w_exp);

struct TailReport {
  double partial_sum = 0.0;  // sum of |terms| kept at truncation
  double tail_bound = 0.0;   // omitted terms plus summation rounding; +inf if unbounded
  bool bounded = true;       // false when the operator admits no analytic tail bound
  bool converged = true;     // bounded and tail_bound <= tol * max(1, partial_sum)
};

struct Pairing {
  cplx value;
  TailReport tail;
};

class SpectralOperator {
 public:
  static SpectralOperator power_law(PowerLaw law, std::size_t n, double z1);
  static SpectralOperator from_list(std::vector<double> eigenvalues, double z1);

  std::size_t size() const { return static_cast<std::size_t>(lambda_.size()); }
  double z1() const { return z1_; }
  const RVec& eigenvalues() const { return lambda_; }
  // w_k = lambda_k - z1 > 0
  const RVec& weights() const { return weights_; }
  const std::optional<PowerLaw>& law() const { return law_; }
  std::uint64_t id() const { return id_; }

  // Same operator at another truncation. Lists are cut to a prefix.
  SpectralOperator truncated(std::size_t n) const;

  RVec weight_power(double e) const;
  double distance_to_spectrum(cplx z) const;
  // Throws ErrorKind::SpectralPoint when z lies within tol of an eigenvalue,
  // including eigenvalues past the truncation of a power law.
  void require_resolvent_point(cplx z, double tol = 1e-12) const;

  // Upper bound on sum_{k>N} of the majorant, by integral comparison. Empty
  // for list operators (no analytic tail) or unbounded laws; +inf when the
  // majorant series diverges.
  std::optional<double> tail_sum(const TailLaw& law) const;
  // kappa with |lambda_k - z|^{-1} <= kappa / w_k for all k > N.
  std::optional<double> resolvent_tail_factor(cplx z) const;

 private:
  SpectralOperator(RVec lambda, double z1, std::optional<PowerLaw> law);

  RVec lambda_;
  RVec weights_;
  double z1_ = 0.0;
  std::optional<PowerLaw> law_;
  std::uint64_t id_ = 0;
};

// Element of the scale: truncated coefficients in the eigenbasis of L plus
// the nominal scale index it belongs to.
struct ScaleVector {
  Vec coeffs;
  int index = 0;
  std::uint64_t op_id = 0;
  TailLaw tail;
};

ScaleVector make_vector(const SpectralOperator& op, Vec coeffs, int index,
                        TailLaw tail = TailLaw::finite());
ScaleVector zero_vector(const SpectralOperator& op, int index);
// Unit coefficient at 1-based eigen-index k.
ScaleVector unit_vector(const SpectralOperator& op, std::size_t k, int index);

ScaleVector operator+(const ScaleVector& u, const ScaleVector& v);
ScaleVector operator-(const ScaleVector& u, const ScaleVector& v);
ScaleVector operator*(cplx s, const ScaleVector& u);

// <u, v>_n, conjugate-linear in u.
cplx inner(const SpectralOperator& op, int n, const ScaleVector& u, const ScaleVector& v);
Pairing inner_bounded(const SpectralOperator& op, int n, const ScaleVector& u,
                      const ScaleVector& v, double tol = kPairingTol);
double norm(const SpectralOperator& op, int n, const ScaleVector& u);

// b_n(L) u; the index drops by 2n.
ScaleVector apply_b(const SpectralOperator& op, int n, const ScaleVector& u);
// (L - z)^{-1} u; the index rises by 2.
ScaleVector resolvent_L(const SpectralOperator& op, cplx z, const ScaleVector& u);
// L u; the index drops by 2.
ScaleVector apply_L(const SpectralOperator& op, const ScaleVector& u);

// Duality pairing sum_k conj(phi_k) u_k with a bound on the omitted terms.
// Throws ErrorKind::Truncation when an analytic bound exists and exceeds tol.
Pairing pair(const SpectralOperator& op, const ScaleVector& phi, const ScaleVector& u,
             double tol = kPairingTol);

enum class Membership { Converges, Diverges, Undetermined };
const char* to_string(Membership m);

struct MembershipReport {
  Membership verdict = Membership::Undetermined;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  double window_growth = 0.0;  // relative growth of the partial sum over the last doubling window
};

// Is ||u||_n finite? Convergence needs a tail bound below tol; divergence is
// declared when the partial sum still grows by more than growth_threshold
// (relative) over the window (N/2, N].
MembershipReport classify_membership(const SpectralOperator& op, const ScaleVector& u, int n,
                                     double tol = kPairingTol,
                                     double growth_threshold = 1e-3);

}  // namespace singext
