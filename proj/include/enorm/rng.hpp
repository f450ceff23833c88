#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace enorm {

// Every stochastic choice in the toolkit flows through this wrapper so that
// results are bit-reproducible across platforms. std::mt19937 output is fully
// specified by the standard; std::uniform_int_distribution and
// std::normal_distribution are not, so the draws below are hand-rolled:
// rejection sampling for bounded integers, Box-Muller for gaussians.
// The identifier is echoed into every report so a reader can tell which
// generator produced the numbers.
inline constexpr const char* kRngAlgorithm =
    "mt19937+rejection+fisher-yates+box-muller/v1";

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}

  // Uniform integer in [0, n); rejection sampling removes modulo bias.
  std::uint32_t uniform_below(std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_below: n == 0");
    const std::uint64_t span = std::uint64_t{1} << 32;
    const std::uint64_t limit = span - span % n;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r < limit) return static_cast<std::uint32_t>(r % n);
    }
  }

  // Uniform double in [0, 1) with 53 random bits (two 32-bit draws).
  double uniform01() {
    const double hi = static_cast<double>(gen_() >> 5);   // 27 bits
    const double lo = static_cast<double>(gen_() >> 6);   // 26 bits
    return (hi * 67108864.0 + lo) / 9007199254740992.0;   // / 2^53
  }

  // Standard normal; always consumes exactly two uniforms, no caching.
  double gauss() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // First k entries of a Fisher-Yates shuffle of 0..n-1, in draw order.
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k < 0 || k > n) {
      throw std::invalid_argument("Rng::sample_without_replacement: k > n");
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const int j =
          i + static_cast<int>(uniform_below(static_cast<std::uint32_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
  }

  std::vector<int> permutation(int n) { return sample_without_replacement(n, n); }

 private:
  std::mt19937 gen_;
};

}  // namespace enorm
