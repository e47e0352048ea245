#pragma once

// Shared builders for unit tests.

#include "singext/config.hpp"
#include "singext/gram_conditions.hpp"
#include "singext/model_space.hpp"

namespace fx {

inline singext::SpectralOperator squares(std::size_t n = 2000, double z1 = -1.0) {
  return singext::SpectralOperator::power_law({1.0, 2.0, 0.0}, n, z1);
}

inline singext::SingularFamily family(int m = 2, int d = 1, std::size_t n = 2000) {
  return singext::make_power_family(squares(n), m, d);
}

inline singext::GramSpec tilde_gram(const singext::SingularFamily& fam) {
  return singext::assess_gram(singext::gram_tilde(fam).G, fam.layout);
}

// [[0, a], [a, b]] on m = 2, d = 1
inline singext::GramSpec hankel2(double a, double b) {
  singext::Mat g(2, 2);
  g << 0.0, a, a, b;
  return singext::assess_gram(g, {2, 1});
}

inline std::string config_path(const std::string& name) { return std::string(SINGEXT_CONFIG_DIR) + "/" + name; }

}  // namespace fx
