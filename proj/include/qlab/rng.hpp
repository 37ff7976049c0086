#pragma once

// Counter-based randomness: every draw is a pure function of (seed, coordinates,
// stream tag), so disorder fields restricted to overlapping regions agree exactly
// and chains can be replayed from the seed alone.

#include <cmath>
#include <cstdint>

#include "qlab/types.hpp"

namespace qlab {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// zigzag map Z -> N keeps negative coordinates distinct
inline uint64_t zigzag(int64_t v) {
  return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}

struct CounterRng {
  uint64_t key;

  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : key(splitmix64(seed ^ (0xa076'1d64'78bd'642fULL * (stream + 1)))) {}

  uint64_t bits(std::initializer_list<int64_t> counters) const {
    uint64_t h = key;
    for (int64_t c : counters) h = splitmix64(h ^ zigzag(c));
    return splitmix64(h);
  }

  uint64_t bits_coord(const Coord& x, int64_t extra = 0) const {
    uint64_t h = key;
    for (int i = 0; i < x.size(); ++i) h = splitmix64(h ^ zigzag(x[i]));
    return splitmix64(h ^ zigzag(extra));
  }
};

// uniform in (0,1), 53-bit mantissa, never exactly 0 or 1
inline double u01(uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

// Wichura's PPND16 rational approximations for the standard normal quantile;
// relative error below 1e-15 over (0,1).
double normal_ppf(double p);

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// E[ clamp(X, -M, M) ] for X ~ N(mean, sd^2)
inline double clipped_normal_mean(double mean, double sd, double M) {
  if (sd <= 0.0) return std::fmax(-M, std::fmin(M, mean));
  const double a = (-M - mean) / sd, b = (M - mean) / sd;
  return -M * normal_cdf(a) + M * (1.0 - normal_cdf(b)) +
         mean * (normal_cdf(b) - normal_cdf(a)) + sd * (normal_pdf(a) - normal_pdf(b));
}

}  // namespace qlab
