#pragma once

// Independent reference values for the power-law fixture lambda_k = k^2,
// z1 = -1, |phi_k|^2 = w_k^{m+1} / k. Straight long double loops, no library
// code involved.

#include <complex>
#include <cstddef>

namespace oracle {

using ld = long double;
using lc = std::complex<long double>;

inline ld w(std::size_t k) { return static_cast<ld>(k) * k + 1.0L; }

// <h_j, h_j'>_{-m} = sum_k w^{m+1}/k * w^{-j-j'-m} = sum_k w^{1-j-j'} / k
inline ld gram_tilde(std::size_t n, int j, int j2) {
  ld s = 0.0L;
  for (std::size_t k = n; k >= 1; --k) s += std::pow(w(k), static_cast<ld>(1 - j - j2)) / k;
  return s;
}

// q(z) = (z - z1) sum_k |phi_k|^2 w^{-(m+1)} / (lambda_k - z) = (z + 1) sum_k 1/(k (k^2 - z))
inline lc q(std::size_t n, lc z) {
  lc s = 0.0L;
  for (std::size_t k = n; k >= 1; --k) s += 1.0L / (static_cast<ld>(k) * (static_cast<ld>(k) * k - z));
  return (z + 1.0L) * s;
}

// m = 2, d = 1 pieces in terms of a = G_12, b = G_22
inline lc r_m2(ld a, ld b, ld z1, lc z) { return -a / ((z - z1) * (z - z1)) - b / (z - z1); }
inline lc rhat_m2(ld a, ld b, ld z1, lc z) { return b / (z1 + a / b - z); }

}  // namespace oracle
