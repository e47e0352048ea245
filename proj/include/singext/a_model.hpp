#pragma once

// A-model extension theory in H_A = h_m (+) K_A: the action of Amax and A'max,
// the boundary maps (Gamma0, Gamma1), the gamma-field and Weyl function
// M = q + r, and Krein-Naimark resolvents of the extensions A_Theta.

#include "singext/gram_conditions.hpp"
#include "singext/model_space.hpp"

namespace singext {

// f = f# + h_{m+1}(c) + k with f# in h_{m+2}, c in C^d, k in K_A given by d(k).
struct DomainElementA {
  ScaleVector f_sharp;
  Vec c;
  Vec k;
};

DomainElementA operator+(const DomainElementA& a, const DomainElementA& b);
DomainElementA operator*(cplx s, const DomainElementA& a);

// Theta = {(X u, Y u) : u in C^d}.
struct ThetaRelation {
  Mat X;
  Mat Y;

  static ThetaRelation zero_relation(int d);       // {0} x C^d
  static ThetaRelation from_matrix(const Mat& t);  // graph of t
  int d() const { return static_cast<int>(X.rows()); }
  bool self_adjoint(double tol = 1e-12) const;
  // Throws Config when [X; Y] does not have rank d.
  void validate() const;
  // Distance of (a, b) from Theta: residual of the least-squares fit (a, b) = (X u, Y u).
  double distance(const Vec& a, const Vec& b) const;
};

struct WeylSample {
  cplx z;
  Mat q;
  Mat r;  // r for the A-model, r-hat for the B-model
  Mat M;
  RMat q_tail;  // per-entry tail bound of q
};

ModelVector to_model_vector(const SingularFamily& fam, const DomainElementA& x);

ModelVector apply_Amax(const SingularFamily& fam, const DomainElementA& x);
ModelVector apply_Amax_prime(const SingularFamily& fam, const GramSpec& gram,
                             const DomainElementA& x);

Vec gamma0(const DomainElementA& x);
// <phi, f#> - [G_A d(k)]_m
Vec gamma1(const SingularFamily& fam, const GramSpec& gram, const DomainElementA& x);
// <phi_sigma, f> for all sigma
Vec phi_pairing(const SingularFamily& fam, const ScaleVector& f, RVec* tail = nullptr);

struct BoundaryForm {
  cplx direct;   // [f, Amax g] - [Amax f, g]
  cplx formula;  // <d, (G_M - G_M^*) d'> + <Gamma0 f, Gamma1 g> - <Gamma1 f, Gamma0 g>
  cplx defect_term;
  double residual = 0.0;  // |direct - formula| / scale
};

// Throws Consistency when the two sides differ by more than tol (relative).
BoundaryForm boundary_form(const SingularFamily& fam, const GramSpec& gram,
                           const DomainElementA& x, const DomainElementA& y, double tol = 1e-9);

// [q(z)]_{ss'} = (z - z1) <phi_s, (L - z)^{-1} h_{s',m+1}>
Mat eval_q(const SingularFamily& fam, cplx z, RMat* tail = nullptr);
// [r(z)]_{ss'} = -sum_j [G_A]_{sm,s'j} / (z - z1)^{m-j+1}
Mat eval_r(const GramSpec& gram, double z1, cplx z);

// Element of N_z(Amax) with Gamma0 = c. Its regular part is (L - z)^{-1} h_m(c).
DomainElementA gamma_A(const SingularFamily& fam, cplx z, const Vec& c);
ModelVector eval_gamma_A(const SingularFamily& fam, cplx z, const Vec& c);
WeylSample eval_M_A(const SingularFamily& fam, const GramSpec& gram, cplx z);

DomainElementA resolvent_A0_element(const SingularFamily& fam, cplx z, const ModelVector& v);
ModelVector resolvent_A0(const SingularFamily& fam, cplx z, const ModelVector& v);

// gamma(conj z)^* v, component sigma = [gamma_A(conj z) e_sigma, v]_A.
Vec gamma_A_adjoint(const SingularFamily& fam, const GramSpec& gram, cplx z, const ModelVector& v);

// X (Y - M X)^{-1}; throws ExtensionSpectrum when Y - M X is singular.
Mat theta_minus_M_inverse(const ThetaRelation& theta, const Mat& M, cplx z);

DomainElementA resolvent_ATheta_element(const SingularFamily& fam, const GramSpec& gram,
                                        const ThetaRelation& theta, cplx z, const ModelVector& v);
ModelVector resolvent_ATheta(const SingularFamily& fam, const GramSpec& gram,
                             const ThetaRelation& theta, cplx z, const ModelVector& v);

// (L - z)^{-1} f + sum_s [(Theta - M(z))^{-1} <phi, (L - z)^{-1} f>]_s (L - z)^{-1} h_{sm}
ScaleVector compressed_resolvent(const SingularFamily& fam, const ThetaRelation& theta,
                                 const Mat& M, cplx z, const ScaleVector& f);
ScaleVector compressed_resolvent_A(const SingularFamily& fam, const GramSpec& gram,
                                   const ThetaRelation& theta, cplx z, const ScaleVector& f);

}  // namespace singext
