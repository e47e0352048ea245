#include "singext/nevanlinna_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "singext/errors.hpp"

namespace singext {

PickMatrix build_pick(const MatrixFunction& m, const std::vector<cplx>& points) {
  if (points.empty()) throw Error(ErrorKind::Config, "Pick matrix: no points");
  for (const cplx& z : points) {
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z))) {
      std::ostringstream msg;
      msg << "Pick matrix: point " << z << " is real";
      throw Error(ErrorKind::Config, msg.str());
    }
  }
  std::vector<Mat> values;
  for (const cplx& z : points) values.push_back(m(z));
  const int b = static_cast<int>(values.front().rows());
  const int n = static_cast<int>(points.size());
  PickMatrix out{points, Mat(n * b, n * b), b};
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      const cplx den = points[i] - std::conj(points[l]);
      if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(points[i]))) {
        std::ostringstream msg;
        msg << "Pick matrix: points " << points[i] << " and " << points[l] << " are conjugate";
        throw Error(ErrorKind::Config, msg.str());
      }
      out.K.block(i * b, l * b, b, b) = (values[i] - values[l].adjoint()) / den;
    }
  }
  // Hermitian by construction up to rounding; symmetrize before eigen-solves.
  out.K = 0.5 * (out.K + out.K.adjoint()).eval();
  return out;
}

NegativeSquares count_negative_squares(const PickMatrix& pick, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(pick.K, Eigen::EigenvaluesOnly);
  NegativeSquares out;
  out.eigenvalues = eig.eigenvalues();
  out.norm = out.eigenvalues.cwiseAbs().maxCoeff();
  out.tol = tol;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues(i) < -tol * out.norm) ++out.count;
  }
  out.note = "count is a lower bound on the number of negative squares";
  return out;
}

StrictnessReport check_symmetry_and_strictness(const MatrixFunction& m,
                                               const std::vector<cplx>& grid, double sym_tol) {
  StrictnessReport rep;
  rep.min_im_eigenvalue = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const cplx& z : grid) {
    if (z.imag() == 0.0) throw Error(ErrorKind::Config, "strictness grid must be nonreal");
    const Mat a = m(z);
    const Mat b = m(std::conj(z));
    scale = std::max(scale, max_abs(a));
    rep.symmetry_defect = std::max(rep.symmetry_defect, max_abs(b - a.adjoint()));
    const Mat im = (a - a.adjoint()) / (cplx(0.0, 2.0) * z.imag());
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (im + im.adjoint()), Eigen::EigenvaluesOnly);
    rep.min_im_eigenvalue = std::min(rep.min_im_eigenvalue, eig.eigenvalues().minCoeff());
  }
  rep.symmetric = rep.symmetry_defect <= sym_tol * std::max(1.0, scale);
  rep.strict = rep.min_im_eigenvalue > 1e-12 * std::max(1.0, scale);
  return rep;
}

std::vector<cplx> ladder(double start, double ratio, int count, double shift) {
  std::vector<cplx> out;
  double t = start;
  for (int i = 0; i < count; ++i, t *= ratio) out.emplace_back(shift, t);
  return out;
}

std::vector<std::vector<cplx>> default_point_sets(double z1) {
  return {
      ladder(1.0, 2.0, 4),
      ladder(0.5, 2.0, 6),
      ladder(1.0, 2.0, 4, 1.0),
      ladder(0.25, 2.0, 6, 1.0),
      ladder(0.1, 2.0, 3, z1),
      ladder(0.1, 2.0, 6, z1),
  };
}

std::vector<std::vector<cplx>> random_point_sets(Rng& rng, int sets, int max_size, double z1) {
  std::vector<std::vector<cplx>> out;
  for (int s = 0; s < sets; ++s) {
    const int size = 2 + static_cast<int>(rng.bits() % static_cast<std::uint64_t>(std::max(1, max_size - 1)));
    std::vector<cplx> pts;
    for (int i = 0; i < size; ++i) {
      const double re = rng.uniform(z1 - 4.0, z1 + 12.0);
      const double im = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
      pts.emplace_back(re, im);
    }
    out.push_back(std::move(pts));
  }
  return out;
}

}  // namespace singext
