#include "wrcm/rng.hpp"

#include <cmath>
#include <limits>

namespace wrcm {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t stream_key(std::uint64_t seed, Stream stream) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

std::array<std::uint64_t, 2> counter_words(std::uint64_t key, std::uint64_t c0,
                                           std::uint64_t c1) noexcept {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
       static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c1 >> 32)},
      {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double CounterStream::uniform() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return open_unit(spare_);
  }
  const auto words = counter_words(key_, id_, counter_++);
  spare_ = words[1];
  has_spare_ = true;
  return open_unit(words[0]);
}

double CounterStream::exponential(double rate) noexcept {
  return -std::log(uniform()) / rate;
}

std::uint64_t CounterStream::geometric_failures(double p, std::uint64_t cap) noexcept {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return cap;
  const double draw = std::floor(std::log(uniform()) / std::log1p(-p));
  if (!(draw < static_cast<double>(cap))) return cap;
  return static_cast<std::uint64_t>(draw);
}

}  // namespace wrcm
