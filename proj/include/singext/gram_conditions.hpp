#pragma once

// The Jordan matrix M at z1, G_M = G_A M_d, and the admissibility conditions
// of the two models: G_M Hermitian (A-model) and the level-(m-1,m) symmetry
// plus positivity of G_A^min (B-model).

#include <string>
#include <vector>

#include "singext/model_space.hpp"
#include "singext/types.hpp"

namespace singext {

// z1 on the diagonal, ones on the superdiagonal.
RMat build_M(int m, double z1);
Mat build_Md(const Layout& lay, double z1);

struct GMProduct {
  Mat gm;      // G_A M_d
  Mat defect;  // G_M - G_M^*
};

GMProduct build_GM(const GramSpec& gram, double z1);

// A named entry relation that fails: family 1 is the level symmetry
// G_{sj,s'j'} = G_{sj',s'j}, family 2 the vanishing of entries above the
// anti-diagonal, family 3 the Hankel links G_{sj,s'j'} = G_{s,j+1;s',j'-1}.
// Indices are 1-based as printed.
struct Violation {
  int family = 0;
  int sigma = 0, j = 0, sigma2 = 0, j2 = 0;
  double defect = 0.0;
  std::string describe() const;
};

struct GacommReport {
  bool holds = true;
  double tol = 0.0;
  std::vector<Violation> violations;
};

GacommReport check_gacomm(const GramSpec& gram);

struct BModelReport {
  bool a2 = true;
  bool min_positive = false;
  bool holds = false;
  double a2_defect = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<Violation> violations;  // family 0: [G]_{s,m-1;s'm} != [G]_{sm;s',m-1}
};

BModelReport check_bmodel(const GramSpec& gram);

// [ring G]_{sj,s'j'} = 1(j >= 2) [G]_{s,j-1;s'j'}
Mat ring_matrix(const GramSpec& gram);

struct Compatibility {
  Vec xi_prime;
  double residual = 0.0;
};

// xi' = (z1 + G^{-1} ring G) xi, which solves G_M^* xi = G xi'.
Compatibility solve_compatibility(const GramSpec& gram, double z1, const Vec& xi,
                                  double tol = 1e-10);

double entry_tol(const Mat& g);
bool is_invertible(const Mat& g);

// Flags for an arbitrary matrix interpreted as G_A on the given layout.
GramSpec assess_gram(const Mat& g, const Layout& lay);

// Block-Hankel G_A that vanishes above each anti-diagonal: entry
// (sj, s'j') = C_{ss'} a_{j+j'-m-1} for j+j' >= m+1, with C = 1 on the
// diagonal and `coupling` off it. Satisfies G_M = G_M^* by construction.
Mat antitriangular_gram(const Layout& lay, const std::vector<double>& antidiagonals,
                        double coupling = 0.0);

}  // namespace singext
