#pragma once

// Singular elements h_{sigma j} = b_j(L)^{-1} phi_sigma, the model space
// H_A = h_m (+) K_A with its (possibly indefinite) metric, and the
// coordinate calculus on K_A.
//
// Elements of K_A are carried by their coordinates d(k) in C^{md} with
// respect to the basis {h_alpha}; the regular part lives in h_m.

#include <vector>

#include "singext/spectral_core.hpp"
#include "singext/types.hpp"

namespace singext {

struct SingularFamily {
  SpectralOperator op;
  Layout layout;
  std::vector<ScaleVector> phi;  // index -m-2 each
  // Per sigma: is phi_sigma in h_{-m-2} and outside h_{-m-1}?
  std::vector<MembershipReport> in_lower;  // norm at index -m-2
  std::vector<MembershipReport> in_upper;  // norm at index -m-1
  std::vector<bool> in_class;

  int m() const { return layout.m; }
  int d() const { return layout.d; }
  double z1() const { return op.z1(); }
};

// phi_{sigma,k} = w_k^alpha k^beta, times exp(2 pi i sigma k/(d+1)) (sigma = 1..d)
// when d >= 2. alpha = (m+1)/2, beta = -1/2 puts phi in h_{-m-2} \ h_{-m-1}.
SingularFamily make_power_family(const SpectralOperator& op, int m, int d, double alpha,
                                 double beta);
SingularFamily make_power_family(const SpectralOperator& op, int m, int d);
// Finitely supported functionals; each list is zero-padded to N.
SingularFamily make_explicit_family(const SpectralOperator& op, int m,
                                    const std::vector<Vec>& coefficients);

// h_{sigma j}, j = 1..m+1, at scale index -m-2+2j.
ScaleVector build_h(const SingularFamily& fam, int sigma, int j);
// h_j(c) = sum_sigma c_sigma h_{sigma j}
ScaleVector h_combination(const SingularFamily& fam, int j, const Vec& c);

struct ModelVector {
  ScaleVector regular;  // in h_m
  Vec singular;         // d(k) in C^{md}
};

ModelVector operator+(const ModelVector& a, const ModelVector& b);
ModelVector operator-(const ModelVector& a, const ModelVector& b);
ModelVector operator*(cplx s, const ModelVector& a);
ModelVector regular_only(const SingularFamily& fam, const ScaleVector& f);
ModelVector singular_only(const SingularFamily& fam, const Vec& coords);
// sqrt(||f||_m^2 + |d|^2); a definite size measure even when G_A is indefinite.
double model_norm(const SingularFamily& fam, const ModelVector& v);

struct GramFlags {
  bool hermitian = false;
  bool invertible = false;
  bool gacomm = false;
  bool a2 = false;
  bool min_positive = false;
};

// Gram matrix of the A-model with its admissibility flags (see gram_conditions).
struct GramSpec {
  Mat G;
  Layout layout;
  GramFlags flags;

  // [G_A^min]_{sigma sigma'} = [G_A]_{sigma m, sigma' m}
  Mat min_block() const;
};

struct GramTilde {
  Mat G;
  RMat tail;  // per-entry tail bound; +inf where no analytic bound exists
  bool bounded = true;
};

// <h_alpha, h_alpha'>_{-m}; Hermitian by construction.
GramTilde gram_tilde(const SingularFamily& fam, double tol = kPairingTol);
// <h_{sigma m}, h_{sigma' m}>_{-m}
GramTilde gram_tilde_min(const SingularFamily& fam, double tol = kPairingTol);

// Sum_alpha c_alpha h_alpha as a truncated element of h_{-m}.
ScaleVector synthesize_k(const SingularFamily& fam, const Vec& coords);
// <h, k>_{-m} = (<h_alpha, k>_{-m})_alpha
Vec h_pairings(const SingularFamily& fam, const ScaleVector& k);

struct CoordinateSolve {
  Vec coords;
  double condition = 1.0;
  bool ill_conditioned = false;
};

// d(k) = Gtilde^{-1} <h, k>_{-m}
CoordinateSolve coords(const Mat& gram_tilde, const Vec& pairings,
                       double condition_limit = 1e12);

// [f + k, f' + k']_A = <f, f'>_m + <d(k), G_A d(k')>
cplx metric(const SingularFamily& fam, const GramSpec& gram, const ModelVector& f,
            const ModelVector& g);

struct PerpBasis {
  Mat basis;                 // md x (m-1)d, columns span the coordinates of H_A^perp
  bool form_orthonormal = false;  // orthonormal for <d, G_A d'> when that form is positive there
  bool indefinite = false;
};

// Null space of d -> [G_A d]_m, i.e. the coordinates of H_A^perp.
PerpBasis h_perp_basis(const GramSpec& gram, double rank_tol = 1e-10);
bool in_h_perp(const GramSpec& gram, const Vec& coords, double tol = 1e-10);

// Phi(d) = (G_A^min)^{-1} [G_A d]_m
Vec phi_map(const GramSpec& gram, const Vec& coords);
// d - eta(Phi(d)), the H_A^perp component.
Vec perp_component(const GramSpec& gram, const Vec& coords);

}  // namespace singext
