#include "singext/gram_conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "singext/errors.hpp"

namespace singext {

RMat build_M(int m, double z1) {
  if (m < 1) throw Error(ErrorKind::Config, "build_M: m must be >= 1");
  RMat out = z1 * RMat::Identity(m, m);
  for (int j = 0; j + 1 < m; ++j) out(j, j + 1) = 1.0;
  return out;
}

Mat build_Md(const Layout& lay, double z1) {
  const RMat block = build_M(lay.m, z1);
  Mat out = Mat::Zero(lay.size(), lay.size());
  for (int s = 0; s < lay.d; ++s) out.block(s * lay.m, s * lay.m, lay.m, lay.m) = block.cast<cplx>();
  return out;
}

GMProduct build_GM(const GramSpec& gram, double z1) {
  GMProduct out;
  out.gm = gram.G * build_Md(gram.layout, z1);
  out.defect = out.gm - out.gm.adjoint();
  return out;
}

std::string Violation::describe() const {
  std::ostringstream s;
  s << "family " << family << ": (" << sigma << "," << j << ";" << sigma2 << "," << j2
    << ") defect " << defect;
  return s.str();
}

double entry_tol(const Mat& g) { return 1e-12 * std::max(max_abs(g), 1e-300); }

bool is_invertible(const Mat& g) {
  if (g.rows() == 0 || g.rows() != g.cols()) return false;
  Eigen::JacobiSVD<Mat> svd(g);
  const RVec& s = svd.singularValues();
  return s(0) > 0.0 && s(s.size() - 1) > 1e-12 * s(0);
}

GacommReport check_gacomm(const GramSpec& gram) {
  const Layout& lay = gram.layout;
  const Mat& G = gram.G;
  GacommReport rep;
  rep.tol = entry_tol(G);
  auto at = [&](int s, int j, int t, int jj) { return G(lay.slot(s, j), lay.slot(t, jj)); };
  auto note = [&](int fam, int s, int j, int t, int jj, double defect) {
    if (defect > rep.tol) rep.violations.push_back({fam, s + 1, j, t + 1, jj, defect});
  };
  if (lay.m >= 2) {
    for (int s = 0; s < lay.d; ++s) {
      for (int t = 0; t < lay.d; ++t) {
        for (int j = 1; j <= lay.m; ++j) {
          for (int jj = j + 1; jj <= lay.m; ++jj) note(1, s, j, t, jj, std::abs(at(s, j, t, jj) - at(s, jj, t, j)));
        }
        for (int j = 1; j < lay.m; ++j) {
          for (int jj = 1; jj <= lay.m - j; ++jj) note(2, s, j, t, jj, std::abs(at(s, j, t, jj)));
        }
        for (int j = 1; j < lay.m; ++j) {
          for (int jj = 2; jj <= lay.m; ++jj) {
            note(3, s, j, t, jj, std::abs(at(s, j, t, jj) - at(s, j + 1, t, jj - 1)));
          }
        }
      }
    }
  }
  rep.holds = rep.violations.empty();
  return rep;
}

BModelReport check_bmodel(const GramSpec& gram) {
  const Layout& lay = gram.layout;
  const Mat& G = gram.G;
  BModelReport rep;
  const double tol = entry_tol(G);
  if (lay.m >= 2) {
    for (int s = 0; s < lay.d; ++s) {
      for (int t = 0; t < lay.d; ++t) {
        const double defect = std::abs(G(lay.slot(s, lay.m - 1), lay.slot(t, lay.m)) -
                                       G(lay.slot(s, lay.m), lay.slot(t, lay.m - 1)));
        rep.a2_defect = std::max(rep.a2_defect, defect);
        if (defect > tol) rep.violations.push_back({0, s + 1, lay.m - 1, t + 1, lay.m, defect});
      }
    }
  }
  rep.a2 = rep.violations.empty();
  const Mat gmin = gram.min_block();
  const Mat herm = 0.5 * (gmin + gmin.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> eig(herm, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = eig.eigenvalues().minCoeff();
  const bool hermitian = max_abs(gmin - gmin.adjoint()) <= tol;
  rep.min_positive = hermitian && rep.min_eigenvalue > tol;
  rep.holds = rep.a2 && rep.min_positive;
  return rep;
}

Mat ring_matrix(const GramSpec& gram) {
  const Layout& lay = gram.layout;
  Mat out = Mat::Zero(lay.size(), lay.size());
  for (int s = 0; s < lay.d; ++s) {
    for (int j = 2; j <= lay.m; ++j) out.row(lay.slot(s, j)) = gram.G.row(lay.slot(s, j - 1));
  }
  return out;
}

Compatibility solve_compatibility(const GramSpec& gram, double z1, const Vec& xi, double tol) {
  if (xi.size() != gram.layout.size()) throw Error(ErrorKind::Config, "solve_compatibility: size mismatch");
  if (!is_invertible(gram.G)) throw Error(ErrorKind::Config, "solve_compatibility: G_A is singular");
  Compatibility out;
  out.xi_prime = z1 * xi + gram.G.fullPivLu().solve(ring_matrix(gram) * xi);
  const Mat gm = build_GM(gram, z1).gm;
  out.residual = (gm.adjoint() * xi - gram.G * out.xi_prime).norm();
  const double scale = std::max(1.0, max_abs(gram.G)) * std::max(1.0, xi.norm());
  if (!(out.residual <= tol * scale)) {
    std::ostringstream msg;
    msg << "compatibility residual " << out.residual << " above tolerance";
    throw Error(ErrorKind::Consistency, msg.str());
  }
  return out;
}

GramSpec assess_gram(const Mat& g, const Layout& lay) {
  if (g.rows() != lay.size() || g.cols() != lay.size()) {
    std::ostringstream msg;
    msg << "Gram matrix must be " << lay.size() << "x" << lay.size() << " (m*d), got " << g.rows()
        << "x" << g.cols();
    throw Error(ErrorKind::Config, msg.str());
  }
  GramSpec spec{g, lay, {}};
  spec.flags.hermitian = max_abs(g - g.adjoint()) <= entry_tol(g);
  spec.flags.invertible = is_invertible(g);
  spec.flags.gacomm = spec.flags.hermitian && check_gacomm(spec).holds;
  const BModelReport b = check_bmodel(spec);
  spec.flags.a2 = b.a2;
  spec.flags.min_positive = b.min_positive;
  return spec;
}

Mat antitriangular_gram(const Layout& lay, const std::vector<double>& antidiagonals,
                        double coupling) {
  if (antidiagonals.empty() || antidiagonals.front() == 0.0) {
    throw Error(ErrorKind::Config, "antitriangular Gram: leading anti-diagonal value must be nonzero");
  }
  Mat out = Mat::Zero(lay.size(), lay.size());
  for (int s = 0; s < lay.d; ++s) {
    for (int t = 0; t < lay.d; ++t) {
      const double c = s == t ? 1.0 : coupling;
      for (int j = 1; j <= lay.m; ++j) {
        for (int jj = 1; jj <= lay.m; ++jj) {
          const int level = j + jj - lay.m - 1;
          if (level < 0) continue;
          const double a = level < static_cast<int>(antidiagonals.size()) ? antidiagonals[level] : 0.0;
          out(lay.slot(s, j), lay.slot(t, jj)) = c * a;
        }
      }
    }
  }
  return out;
}

}  // namespace singext
