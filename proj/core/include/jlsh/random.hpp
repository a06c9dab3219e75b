#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>

namespace jlsh {

/// 64-bit experiment seed. Every random quantity in the library is a pure
/// function of a Seed and the arguments of the call that consumes it.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer (Stafford variant 13). Full avalanche: every input
/// bit flips each output bit with probability close to 1/2.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Folds one more word into a running hash. Order-sensitive.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h + kGoldenGamma * (v + 1));
}

/// Independent child seed for stream `stream` of `seed`.
constexpr Seed derive_seed(Seed seed, std::uint64_t stream) noexcept {
  return Seed{hash_combine(mix64(seed.value ^ 0x6a09e667f3bcc908ULL), stream)};
}

constexpr Seed derive_seed(Seed seed, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_seed(derive_seed(seed, a), b);
}

/// splitmix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Seeded sampler for the distributions the experiments need. A (seed,
/// stream) pair selects one reproducible sequence.
class Rng {
 public:
  explicit Rng(Seed seed, std::uint64_t stream = 0);
  ~Rng();
  Rng(Rng&&) noexcept;
  Rng& operator=(Rng&&) noexcept;

  std::uint64_t next_u64() noexcept { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Standard normal (ziggurat).
  double normal();
  void fill_normal(std::span<double> out);

 private:
  struct NormalState;
  SplitMix64 engine_;
  std::unique_ptr<NormalState> normal_;
};

}  // namespace jlsh
