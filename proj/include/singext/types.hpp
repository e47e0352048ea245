#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace singext {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};

// Multi-index alpha = (sigma, j) flattened sigma-major; sigma is 0-based,
// the level j runs 1..m as in the model.
struct Layout {
  int m = 1;
  int d = 1;

  int size() const { return m * d; }
  int slot(int sigma, int level) const { return sigma * m + level - 1; }
};

// eta(c) places c on the top level m.
Vec eta(const Layout& lay, const Vec& c);
// [v]_m: the level-m entries of an md-vector.
Vec top_block(const Layout& lay, const Vec& v);

// Deterministic sampling for property suites. Uniforms are built from raw
// mt19937_64 bits so sequences do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  cplx complex_normal() { return {normal(), normal()}; }
  Vec complex_vector(Eigen::Index n);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

double max_abs(const Mat& a);

}  // namespace singext
