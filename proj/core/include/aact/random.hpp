#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace aact {

// Mixes a base seed with a list of stream coordinates (run, session, round,
// draw index, ...) into an independent 64-bit key. Pure function of its
// inputs.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> coords);

// mt19937_64 stream with portable integer-to-real conversions.
class Substream {
 public:
  explicit Substream(std::uint64_t key) : engine_(key) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double canonical() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  // Uniform integer on [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, Substream& rng);

}  // namespace aact
