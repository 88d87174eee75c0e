#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace stabx {

// SplitMix64 finalizer; good avalanche, used for seed derivation and hashing.
std::uint64_t mix64(std::uint64_t x);

// Counter-based child seed: a pure function of (parent, stream), so repeats
// and cells can be generated in any order with identical results.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

// FNV-1a over bytes. Stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Random source with portable distributions. The engine (mt19937_64) is fully
// specified by the standard; the samplers below are written out so that
// draws are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::size_t index(std::size_t bound);
  double normal();
  // Laplace(0, 1); scale by b for Laplace(0, b).
  double laplace();

  // Partial Fisher-Yates: after the call the first `count` entries of
  // `values` are a uniform sample without replacement.
  void partial_shuffle(std::span<std::size_t> values, std::size_t count);
  void shuffle(std::span<std::size_t> values) {
    partial_shuffle(values, values.size());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stabx
