#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace qdrift {

// Deterministic random source keyed by (seed, stream).
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. All distributions below are implemented here on top of raw
// 64-bit draws, so results are identical across platforms and standard
// libraries (std::*_distribution makes no such promise).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr const char* algorithm() { return "mt19937_64+splitmix64"; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child stream derived from this stream's key; does not consume draws.
  SeededRng substream(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, bound), bound >= 1, without modulo bias.
  std::uint64_t uniform_index(std::uint64_t bound);
  // Standard normal via Box-Muller.
  double normal();
  // Inverse-CDF draw; `cdf` is nondecreasing with back() == 1. Returns the
  // first index with u < cdf[j].
  std::size_t categorical(std::span<const double> cdf);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qdrift
