#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace pbqn {

/// Run-level random source. std::mt19937_64 is bit-specified by the standard,
/// so a seeded run reproduces across platforms. The draw helpers below are
/// hand-rolled because the std::*_distribution classes are
/// implementation-defined and would break cross-toolchain reproducibility.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Unbiased draw from {0, ..., n-1} via rejection.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t n64 = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n64;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return static_cast<std::size_t>(v % n64);
}

/// Standard normal draw (Box-Muller, cosine branch).
inline double normal_sample(Rng& rng) {
  double u = uniform_double(rng);
  while (u <= 0.0) u = uniform_double(rng);
  const double v = uniform_double(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
  if (items.size() < 2) return;
  for (std::size_t i = items.size() - 1; i > 0; --i) {
    const std::size_t j = uniform_index(rng, i + 1);
    std::swap(items[i], items[j]);
  }
}

/// k distinct values from a pool, drawn uniformly without replacement.
/// The pool is taken by value and partially shuffled; output order is the
/// draw order (callers sort when they need canonical order).
inline std::vector<std::size_t> sample_without_replacement(
    std::vector<std::size_t> pool, std::size_t k, Rng& rng) {
  if (k > pool.size()) {
    throw std::invalid_argument("sample_without_replacement: k exceeds pool");
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

/// k distinct indices from {0, ..., n-1} without replacement.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                               Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  return sample_without_replacement(std::move(pool), k, rng);
}

}  // namespace pbqn
