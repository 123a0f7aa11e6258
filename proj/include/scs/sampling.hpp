#pragma once

#include <random>

#include "scs/bellman.hpp"

namespace scs {

/// Stratified sampling for the convexity sweeps: |zeta| log-uniform over
/// [1e-3, 1e3], phases uniform, and the ratio |eta|^q / |zeta|^p placed in one
/// of four strata (deep in each region, or hugging the interface from either
/// side while staying clear of the C^2 exclusion band).
enum class XiStratum { GoodFar = 0, GoodNear = 1, BadFar = 2, BadNear = 3 };

inline constexpr int kXiStrata = 4;

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ull * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline StatePair sample_xi(std::mt19937_64& rng, const BellmanParams& bp,
                           XiStratum stratum) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double r = std::pow(10.0, -3.0 + 6.0 * unif(rng));
  double th = 2.0 * M_PI * unif(rng);
  double ph = 2.0 * M_PI * unif(rng);

  // rho = |eta|^q / |zeta|^p
  double rho = 1.0;
  switch (stratum) {
    case XiStratum::GoodFar:
      rho = std::pow(10.0, 0.3 + 5.7 * unif(rng));
      break;
    case XiStratum::GoodNear:
      rho = 1.0 + std::pow(10.0, -7.5 + 7.0 * unif(rng));
      break;
    case XiStratum::BadFar:
      rho = std::pow(10.0, -0.3 - 5.7 * unif(rng));
      break;
    case XiStratum::BadNear:
      rho = 1.0 - std::pow(10.0, -7.5 + 7.0 * unif(rng));
      break;
  }
  double ae = std::pow(rho * std::pow(r, bp.p), 1.0 / bp.q);
  // keep clear of the eta = 0 part of the C^2 exclusion set
  ae = std::max(ae, 1e-7);
  return {r * Complex(std::cos(th), std::sin(th)),
          ae * Complex(std::cos(ph), std::sin(ph))};
}

inline Vec4 sample_omega(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vec4 w;
  double n2 = 0.0;
  do {
    for (int i = 0; i < 4; ++i) w[i] = gauss(rng);
    n2 = w.squaredNorm();
  } while (n2 < 1e-12);
  return w / std::sqrt(n2);
}

}  // namespace scs
