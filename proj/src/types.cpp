#include "singext/types.hpp"

#include <cmath>
#include <numbers>

#include "singext/errors.hpp"

namespace singext {

Vec eta(const Layout& lay, const Vec& c) {
  Vec out = Vec::Zero(lay.size());
  for (int s = 0; s < lay.d; ++s) out(lay.slot(s, lay.m)) = c(s);
  return out;
}

Vec top_block(const Layout& lay, const Vec& v) {
  Vec out(lay.d);
  for (int s = 0; s < lay.d; ++s) out(s) = v(lay.slot(s, lay.m));
  return out;
}

double Rng::normal() {
  // Box-Muller on two uniforms; the first is kept away from zero.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec Rng::complex_vector(Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal();
  return v;
}

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::SpectralPoint: return "spectral_point";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::ExtensionSpectrum: return "extension_spectrum";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Domain: return "domain";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
      return exit_code::kConfig;
    default:
      return exit_code::kNumerical;
  }
}

}  // namespace singext
