#pragma once

#include <cstdint>
#include <random>

#include "gpt2d/conformal.hpp"

namespace gpt2d {

/// Seeded random exterior map with univalent-like coefficient decay,
/// |a_n| <= scale * gamma^{n+1} / (n+1)^2.  Used by roundtrip sweeps and the
/// property suites; draws only raw engine words so results are identical
/// across standard libraries.
inline ConformalMap random_map(std::mt19937_64& rng, int n_coeffs, double scale = 0.3) {
  auto u01 = [&] { return detail::uniform01(rng()); };
  ConformalMap m;
  m.gamma = 0.5 + 1.5 * u01();
  m.a0 = Complex{0.6 * (u01() - 0.5), 0.6 * (u01() - 0.5)};
  for (int n = 1; n <= n_coeffs; ++n) {
    const double r = scale * std::pow(m.gamma, n + 1) / ((n + 1.0) * (n + 1.0)) * u01();
    const double ph = 2 * pi * u01();
    m.coeffs.push_back(r * Complex{std::cos(ph), std::sin(ph)});
  }
  return m;
}

/// Random contrast with 0.55 <= |lambda| <= 5.
inline double random_lambda(std::mt19937_64& rng) {
  const double mag = 0.55 + 4.45 * detail::uniform01(rng());
  return detail::uniform01(rng()) < 0.5 ? -mag : mag;
}

}  // namespace gpt2d
