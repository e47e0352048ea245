#pragma once

// B-model over H_A^min = h_m (+) K_A^min: the relation Bmax with multivalued
// part H_A^perp, the boundary triple Gamma', Delta and Delta-hat, the
// Nevanlinna term r-hat, Krein-Naimark resolvents, and the simplicity probe.

#include <cstdint>
#include <string>
#include <vector>

#include "singext/a_model.hpp"

namespace singext {

// Graph pair f = f# + h_{m+1}(c) + h_m(chi),
//            f' = L f# + z1 h_{m+1}(c) + k~ + k_perp,  d(k~) = M_d eta(chi) + eta(c).
struct BmaxGraphElement {
  ScaleVector f_sharp;
  Vec c;
  Vec chi;
  Vec k_perp;  // coordinates, must lie in H_A^perp
};

BmaxGraphElement operator+(const BmaxGraphElement& a, const BmaxGraphElement& b);

struct DeltaPair {
  Mat Delta;      // [G_M]_{sm,s'm}
  Mat DeltaHat;   // (G_A^min)^{-1} Delta
  Mat Gmin;
  double formula_gap = 0.0;  // max |Delta(G_M route) - Delta(z1 Gmin + offset route)|
};

// Throws Config for singular G_A^min and Consistency when the two routes to
// Delta disagree (which happens exactly when the level symmetry fails).
DeltaPair build_delta(const GramSpec& gram, double z1);

// G_A^min (Delta-hat - z)^{-1}
Mat eval_rhat(const DeltaPair& dp, cplx z);

// First-order bound on |r-hat| changes caused by entrywise Gram errors `gram_tail`.
double rhat_perturbation_bound(const DeltaPair& dp, const GramSpec& gram, const RMat& gram_tail,
                               double z1, cplx z);

// The first component f as a model vector.
ModelVector graph_domain(const SingularFamily& fam, const BmaxGraphElement& x);
// The second component f'. Throws Domain when k_perp is not in H_A^perp.
ModelVector apply_Bmax(const SingularFamily& fam, const GramSpec& gram, const BmaxGraphElement& x);

Vec gammaP0(const BmaxGraphElement& x);
// <phi, f#> - G_A^min chi
Vec gammaP1(const SingularFamily& fam, const GramSpec& gram, const BmaxGraphElement& x);

struct GreenCheck {
  cplx direct;     // [f, g'] - [f', g]
  cplx formula;    // <Gamma'0 f, Gamma'1 g> - <Gamma'1 f, Gamma'0 g>
  cplx predicted;  // chi^* (Delta - Delta^*) chi_g, the excess when the level symmetry fails
  double residual = 0.0;  // |direct - formula| / scale
};

GreenCheck green_check_B(const SingularFamily& fam, const GramSpec& gram,
                         const BmaxGraphElement& x, const BmaxGraphElement& y);

// Element of N_z(Bmax) with Gamma'0 = c, including the k_perp that makes
// the eigen-equation hold.
BmaxGraphElement gamma_B(const SingularFamily& fam, const DeltaPair& dp, cplx z, const Vec& c);
ModelVector eval_gamma_B(const SingularFamily& fam, const DeltaPair& dp, cplx z, const Vec& c);
WeylSample eval_M_B(const SingularFamily& fam, const DeltaPair& dp, cplx z);

BmaxGraphElement resolvent_B0_element(const SingularFamily& fam, const GramSpec& gram,
                                      const DeltaPair& dp, cplx z, const ModelVector& v);
ModelVector resolvent_B0(const SingularFamily& fam, const GramSpec& gram, const DeltaPair& dp,
                         cplx z, const ModelVector& v);

struct AdjointRoutes {
  Vec by_metric;    // [gamma_B(conj z) e_s, v]_A
  Vec by_boundary;  // Gamma'1 (B0 - z)^{-1} v
  double gap = 0.0;
};

AdjointRoutes gamma_B_adjoint(const SingularFamily& fam, const GramSpec& gram, const DeltaPair& dp,
                              cplx z, const ModelVector& v);

// Cross-checks both adjoint routes (Consistency error beyond tol, relative).
BmaxGraphElement resolvent_BTheta_element(const SingularFamily& fam, const GramSpec& gram,
                                          const DeltaPair& dp, const ThetaRelation& theta, cplx z,
                                          const ModelVector& v, double tol = 1e-8);
ModelVector resolvent_BTheta(const SingularFamily& fam, const GramSpec& gram, const DeltaPair& dp,
                             const ThetaRelation& theta, cplx z, const ModelVector& v);

ScaleVector compressed_resolvent_B(const SingularFamily& fam, const DeltaPair& dp,
                                   const ThetaRelation& theta, cplx z, const ScaleVector& f);

// Random element of ker Gamma' (c = 0, <phi, f#> = G_A^min chi) with a random k_perp.
BmaxGraphElement random_kernel_element(const SingularFamily& fam, const GramSpec& gram, Rng& rng,
                                       int support = 40);
// Random element of the Bmax graph with finitely supported f#.
BmaxGraphElement random_graph_element(const SingularFamily& fam, const GramSpec& gram, Rng& rng,
                                      int support = 40);

struct SymmetryReport {
  int samples = 0;
  double max_residual = 0.0;  // max |[f,g'] - [f',g]| / scale over kernel pairs
  double tol = 1e-9;
  bool symmetric = false;
};

SymmetryReport check_symmetry_Bmin(const SingularFamily& fam, const GramSpec& gram, int samples,
                                   std::uint64_t seed, double tol = 1e-9);

// Preimage under Gamma' of (a, b): f# = (z0 - z1)(L - z0)^{-1} h_{m+1}(w),
// w = q(z0)^{-1}(b + G_A^min chi0), c = a, with a random chi0.
BmaxGraphElement surjectivity_witness(const SingularFamily& fam, const GramSpec& gram,
                                      const Vec& a, const Vec& b, const Vec& chi0,
                                      cplx z0 = cplx(0.0, 2.0));

struct SimplicityReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double threshold = 1e-6;
  int trial_modes = 0;
  std::vector<cplx> samples;
  std::string verdict;  // simple | inconclusive | degenerate
};

std::vector<cplx> default_simplicity_points();

// Least-singular-value probe of <phi, (L - z)^{-1} f> = r-hat(z) chi over the
// first `trial_modes` eigenmodes for f (normalized in h_m) and chi scaled by
// (G_A^min)^{1/2}. A heuristic: the condition quantifies over all nonreal z.
SimplicityReport check_simplicity(const SingularFamily& fam, const DeltaPair& dp,
                                  const std::vector<cplx>& points, int trial_modes = 4,
                                  double threshold = 1e-6);

}  // namespace singext
