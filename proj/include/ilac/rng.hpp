#pragma once

// Counter-based random streams.
//
// Every random quantity in the project is drawn from a stream identified by a
// 64-bit key. Keys are derived from (global seed, purpose tag, index) so that
// item memories, datasets, splits and noise never share a stream and the value
// of a draw does not depend on call order elsewhere.
//
// Word i of the stream keyed by k is the SplitMix64 output for state
// k + (i + 1) * 0x9E3779B97F4A7C15, i.e.
//
//   z = k + (i + 1) * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   word = z ^ (z >> 31)
//
// All arithmetic is modulo 2^64, so the integer stream is identical on every
// platform. Uniform doubles take the top 53 bits of a word. Normal draws use
// Box-Muller on two consecutive words and therefore depend on the platform's
// std::log/std::cos/std::sqrt, which are correctly rounded on all targets we
// build for.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace ilac {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a, used only to turn purpose tags into integers.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : tag) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Key for sub-stream `index` of purpose `tag` under `seed`.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t index = 0) noexcept {
  std::uint64_t k = splitmix_finalize(seed + kGolden);
  k = splitmix_finalize(k ^ tag_hash(tag));
  return splitmix_finalize(k + (index + 1) * kGolden);
}

constexpr std::uint64_t stream_word(std::uint64_t key, std::uint64_t i) noexcept {
  return splitmix_finalize(key + (i + 1) * kGolden);
}

// High 64 bits of the 128-bit product a * b.
constexpr std::uint64_t mul_high(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t a_lo = a & 0xFFFFFFFFULL, a_hi = a >> 32;
  const std::uint64_t b_lo = b & 0xFFFFFFFFULL, b_hi = b >> 32;
  const std::uint64_t lo_lo = a_lo * b_lo;
  const std::uint64_t hi_lo = a_hi * b_lo;
  const std::uint64_t lo_hi = a_lo * b_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xFFFFFFFFULL) + lo_hi;
  return a_hi * b_hi + (hi_lo >> 32) + (cross >> 32);
}

// Sequential cursor over a stream. Cheap to copy; copies replay the same draws.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t position() const noexcept { return counter_; }

  constexpr std::uint64_t next_u64() noexcept { return stream_word(key_, counter_++); }

  // Uniform in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Multiply-shift; bias is below 2^-64 * n.
  std::uint64_t below(std::uint64_t n) noexcept { return mul_high(next_u64(), n); }

  // Standard normal via Box-Muller (consumes two words, uses the cosine branch).
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ilac
