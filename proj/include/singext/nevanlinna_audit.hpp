#pragma once

// Sampled audits of matrix functions against the Nevanlinna class: symmetry
// M(conj z) = M(z)^*, positivity of Im M(z)/Im z, and negative squares of
// Nevanlinna-Pick kernel matrices.

#include <functional>
#include <string>
#include <vector>

#include "singext/types.hpp"

namespace singext {

using MatrixFunction = std::function<Mat(cplx)>;

struct PickMatrix {
  std::vector<cplx> points;
  Mat K;  // blocks (M(z_i) - M(z_l)^*) / (z_i - conj z_l)
  int block = 0;
};

// Throws Config for real points or z_i = conj z_l.
PickMatrix build_pick(const MatrixFunction& m, const std::vector<cplx>& points);

struct NegativeSquares {
  int count = 0;  // a lower bound for the number of negative squares
  RVec eigenvalues;
  double norm = 0.0;
  double tol = 1e-9;
  std::string note;
};

NegativeSquares count_negative_squares(const PickMatrix& pick, double tol = 1e-9);

struct StrictnessReport {
  double symmetry_defect = 0.0;   // max over grid of max |M(conj z) - M(z)^*|
  double min_im_eigenvalue = 0.0; // min over grid of lambda_min(Im M(z) / Im z)
  bool symmetric = false;
  bool strict = false;
};

StrictnessReport check_symmetry_and_strictness(const MatrixFunction& m,
                                               const std::vector<cplx>& grid,
                                               double sym_tol = 1e-10);

// shift + i t for t = start, start*ratio, ...
std::vector<cplx> ladder(double start, double ratio, int count, double shift = 0.0);
// Imaginary ladders, the 1 + i t ladders, and z1 + i t ladders.
std::vector<std::vector<cplx>> default_point_sets(double z1);
// `sets` random sets of 2..max_size points in the upper half plane.
std::vector<std::vector<cplx>> random_point_sets(Rng& rng, int sets, int max_size, double z1);

}  // namespace singext
