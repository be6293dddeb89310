#pragma once

#include <cstdint>
#include <random>

// Randomness used across the library. All draws are either sequential
// (SeededRng, a mt19937_64 whose word sequence is fixed by the standard) or
// counter-style hashes of their inputs (attempt_coin, tie_coin). The mapping
// from 64-bit words to doubles is done by hand because the standard library
// distributions are implementation-defined; results are bit-identical across
// platforms for a given seed.

namespace cicmb {

// SplitMix64 finalizer, also used to whiten structured seed material.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform on the 2^53 grid of [0, 1).
constexpr double unit_from_bits(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Named sub-streams of a master seed. Keeping independent decisions on
// independent streams lets one stage change without perturbing the others.
enum class SeedStream : std::uint64_t {
  EdgeProbs = 1,
  Biases = 2,
  SeedSets = 3,
  Selection = 4,
  Evaluation = 5,
  TibEstimate = 6,
  TibPower = 7,
  RandomPick = 8,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(master ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

// Sequential generator for setup work (probabilities, biases, seed sets).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double unit() { return unit_from_bits(engine_()); }

  // Uniform on (0, 1].
  double open_unit() { return 1.0 - unit(); }

  // Uniform on [lo, hi).
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Unbiased uniform on [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t tail = (0ull - n) % n;  // 2^64 mod n
    std::uint64_t x = engine_();
    while (tail != 0 && x >= 0ull - tail) x = engine_();
    return x % n;
  }

  std::uint64_t word() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class Camp : std::uint8_t { Misinfo = 1, Truth = 2 };

// Coin for one influence attempt. Depends only on the tuple, never on how
// many other draws happened, so paired simulations (with and without a
// campaign, or with a node removed) reuse identical randomness and round
// outcomes do not depend on within-round processing order.
inline double attempt_coin(std::uint64_t seed, std::uint32_t from, std::uint32_t to,
                           std::uint32_t round, Camp camp) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ ((static_cast<std::uint64_t>(from) << 1) | 1ull));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(to) << 1));
  h = splitmix64(h ^ ((static_cast<std::uint64_t>(round) << 8) |
                      static_cast<std::uint64_t>(camp)));
  return unit_from_bits(h);
}

// Coin for resolving a same-round two-camp conflict at one node.
inline double tie_coin(std::uint64_t seed, std::uint32_t node, std::uint32_t round) noexcept {
  std::uint64_t h = splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ull);
  h = splitmix64(h ^ node);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(round) << 32));
  return unit_from_bits(h);
}

}  // namespace cicmb
