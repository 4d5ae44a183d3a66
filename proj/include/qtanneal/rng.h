#ifndef QTANNEAL_RNG_H_
#define QTANNEAL_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace qtanneal {

// Deterministic generator used for every randomized decision. Wraps
// std::mt19937_64, whose output sequence is fixed by the C++ standard, and
// derives doubles and bounded integers itself because the standard
// distributions are implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound) by rejection sampling; bound > 0.
  std::uint64_t Below(std::uint64_t bound);

  bool Coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Stable per-run seed: Mix64(master ^ Mix64(index + golden ratio)).
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

}  // namespace qtanneal

#endif  // QTANNEAL_RNG_H_
