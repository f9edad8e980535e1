#pragma once

// Counter-based randomness. Every random quantity in the library is a pure
// function of (seed, stream tag, counter words), so samples can be replayed,
// extended and evaluated in any order.

#include <array>
#include <cstdint>

namespace wrcm {

/// Stream tags separating the independent families of random variables.
enum class Stream : std::uint64_t {
  vertex_mark = 1,
  poisson_gap = 2,
  site_retention = 3,
  edge_mark = 4,
  layered_walk = 5,
  finite_location = 6,
  finite_mark = 7,
  crossing_walk = 8,
  replica = 9,
  monte_carlo = 10,
};

/// SplitMix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Splittable seed derivation: distinct (master, a, b) give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(master) ^ (a + 0x632be59bd9b4e019ULL)) ^
               (b + 0x85157af5a1b5c1e3ULL));
}

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// 64-bit Philox key for one stream of one seed.
std::uint64_t stream_key(std::uint64_t seed, Stream stream) noexcept;

/// Two raw 64-bit words for the counter (c0, c1) under `key`.
std::array<std::uint64_t, 2> counter_words(std::uint64_t key, std::uint64_t c0,
                                           std::uint64_t c1) noexcept;

/// Maps 64 random bits to a double in the open interval (0,1).
constexpr double open_unit(std::uint64_t bits) noexcept {
  // 52 bits keep (k + 1/2) 2^-52 exactly representable, so 1.0 is never hit.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform(0,1) value for the counter (c0, c1); stateless.
inline double keyed_uniform(std::uint64_t key, std::uint64_t c0, std::uint64_t c1 = 0) noexcept {
  return open_unit(counter_words(key, c0, c1)[0]);
}

/// Sequential draws from a counter-based stream identified by (key, id).
class CounterStream {
 public:
  CounterStream(std::uint64_t key, std::uint64_t id) noexcept : key_(key), id_(id) {}

  double uniform() noexcept;
  /// Exponential(rate) variate.
  double exponential(double rate) noexcept;
  /// Number of failures before the first success of a Bernoulli(p) sequence.
  /// Saturates at `cap`.
  std::uint64_t geometric_failures(double p, std::uint64_t cap) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t id_;
  std::uint64_t counter_ = 0;
  std::uint64_t spare_ = 0;
  bool has_spare_ = false;
};

/// Conventional engine for auxiliary Monte Carlo (oracles, mark-pair sampling).
/// Satisfies UniformRandomBitGenerator.
class SplitMixEngine {
 public:
  using result_type = std::uint64_t;
  explicit SplitMixEngine(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() noexcept { return open_unit((*this)()); }

 private:
  std::uint64_t state_;
};

}  // namespace wrcm
