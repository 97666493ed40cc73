#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace majdyn {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Keyed seed for trial `index` of an experiment seeded with `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + (index + 1) * kGolden);
}

/// Counter-based G(n,p) edge oracle: edge {u,v} is present iff the top 53 bits
/// of a keyed hash of (seed, min(u,v), max(u,v)), read as a fraction in [0,1),
/// fall below p. Nothing is stored, so any pair can be queried in O(1).
class EdgeOracle {
 public:
  EdgeOracle(std::uint32_t n, double p, std::uint64_t seed)
      : n_(n), p_(p), seed_(seed), key0_(mix64(seed)), key1_(mix64(seed ^ kGolden)) {
    if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("edge probability must lie in (0,1)");
    // u < p * 2^53 for integer u  <=>  u < ceil(p * 2^53).
    threshold_ = static_cast<std::uint64_t>(std::ceil(std::ldexp(p, 53)));
  }

  std::uint32_t n() const noexcept { return n_; }
  double p() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }

  bool present(std::uint32_t u, std::uint32_t v) const {
    if (u == v) throw std::invalid_argument("no self-loops: u == v");
    if (u >= n_ || v >= n_) throw std::out_of_range("vertex out of range");
    return u < v ? present_ordered(u, v) : present_ordered(v, u);
  }

  /// Unchecked; requires u < v.
  bool present_ordered(std::uint32_t u, std::uint32_t v) const noexcept {
    return (hash_ordered(u, v) >> 11) < threshold_;
  }

  std::uint64_t hash_ordered(std::uint32_t u, std::uint32_t v) const noexcept {
    return hash_index((static_cast<std::uint64_t>(u) << 32) | v);
  }

  /// Pair (u, v), u < v, packed as (u << 32) | v.
  std::uint64_t hash_index(std::uint64_t index) const noexcept {
    return mix64(mix64(index * kGolden + key0_) ^ key1_);
  }
  bool present_index(std::uint64_t index) const noexcept {
    return (hash_index(index) >> 11) < threshold_;
  }

 private:
  std::uint32_t n_;
  double p_;
  std::uint64_t seed_;
  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t threshold_ = 0;
};

/// acc[v] += sum of weight[u] over neighbours u of v, streaming every pair of
/// the oracle once. O(n^2) time, no adjacency storage.
inline void accumulate_neighbor_weights(const EdgeOracle& oracle,
                                        std::span<const std::int64_t> weight,
                                        std::span<std::int64_t> acc) {
  const std::uint32_t n = oracle.n();
  if (weight.size() != n || acc.size() != n) {
    throw std::invalid_argument("weight/accumulator size must equal vertex count");
  }
  const std::int64_t* __restrict w = weight.data();
  std::int64_t* __restrict a = acc.data();
  for (std::uint32_t u = 0; u + 1 < n; ++u) {
    const std::int64_t wu = w[u];
    std::int64_t au = 0;
    // size_t index keeps the loop vectorisable (no 32-bit wraparound).
    for (std::size_t v = u + 1; v < n; ++v) {
      const std::int64_t mask =
          -static_cast<std::int64_t>(oracle.present_ordered(u, static_cast<std::uint32_t>(v)));
      au += w[v] & mask;
      a[v] += wu & mask;
    }
    a[u] += au;
  }
}

}  // namespace majdyn
