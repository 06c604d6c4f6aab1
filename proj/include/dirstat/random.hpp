#pragma once

// Seeded, reproducible random streams.
//
// Every randomized operation takes a 64-bit seed. Independent parts of one
// operation draw from separate streams: stream(seed, id) seeds a
// std::mt19937_64 from splitmix64 outputs of (seed, id), so stream ids never
// share state and adding a new stream leaves existing ones untouched.
//
// Stream ids used by the library:
//   0        mixture means / cluster seeding
//   1        label draws and shuffles
//   2        sampling within a single-distribution sampler
//   16 + j   samples of mixture component j
//   32 + r   the r-th restart of a partitional clustering
//   64 + t   the t-th re-seeding attempt of an initializer

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace dirstat {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

inline Engine stream(std::uint64_t seed, std::uint64_t id) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

namespace stream_id {
inline constexpr std::uint64_t kMeans = 0;
inline constexpr std::uint64_t kLabels = 1;
inline constexpr std::uint64_t kSampler = 2;
inline constexpr std::uint64_t kComponentBase = 16;
inline constexpr std::uint64_t kRestartBase = 32;
inline constexpr std::uint64_t kReseedBase = 64;
}  // namespace stream_id

// Uniform point on S^{dim-1}: normalized standard normal vector.
inline Eigen::VectorXd random_unit_vector(Eigen::Index dim, Engine& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
    n = v.norm();
  } while (!(n > 0.0));
  return v / n;
}

// Beta(alpha, beta) via two gamma variates. Returns (z, 1 - z) computed
// separately so that 1 - z keeps its relative precision near z = 1.
struct BetaDraw {
  double z;
  double one_minus_z;
};

inline BetaDraw beta_draw(double alpha, double beta, Engine& rng) {
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  for (;;) {
    const double x = ga(rng);
    const double y = gb(rng);
    const double s = x + y;
    if (s > 0.0) return {x / s, y / s};
  }
}

}  // namespace dirstat
