#pragma once

#include <cstdint>

#include "jlsh/curve.hpp"
#include "jlsh/family.hpp"
#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

/// H(d1, d2, p1, p2): collide with probability >= p1_min at distance <= d1
/// and <= p2_max at distance >= d2.
struct SensitivityTarget {
  double d1 = 0.2;
  double d2 = 0.6;
  DistanceKind kind = DistanceKind::EuclideanRaw;
  double p1_min = 0.95;
  double p2_max = 0.05;

  /// Requires d1 < d2 and 0 < p2_max <= p1_min < 1.
  void validate() const;
};

/// r minhashes ANDed per table, b tables ORed.
struct AmplifiedScheme {
  std::uint32_t r = 1;
  std::uint32_t b = 1;

  std::uint64_t total() const noexcept { return std::uint64_t{r} * b; }
  friend bool operator==(const AmplifiedScheme&, const AmplifiedScheme&) = default;
};

inline constexpr std::uint32_t kDefaultRMax = 32;
inline constexpr std::uint32_t kDefaultBMax = 100000;

/// 1 - (1 - p^r)^b, evaluated as -expm1(b log1p(-p^r)) so it stays accurate
/// when p^r is tiny. Exactly p^r when b == 1.
double amplified_probability(double p, std::uint32_t r, std::uint32_t b);

/// Scheme with the smallest r * b meeting both targets, ties to the smaller
/// r. For each r the smallest b satisfying the p1 side is taken; a larger b
/// only raises the p2 side, so that b is the only candidate for that r.
/// Throws InfeasibleError when nothing within [1, r_max] x [1, b_max] works.
AmplifiedScheme solve_parameters(double p1, double p2, const SensitivityTarget& target,
                                 std::uint32_t r_max = kDefaultRMax,
                                 std::uint32_t b_max = kDefaultBMax);

struct ProbabilityEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t trials = 0;
  Seed seed;
  friend bool operator==(const ProbabilityEstimate&, const ProbabilityEstimate&) = default;
};

/// Monte Carlo collision frequency of a single minhash over unit pairs at
/// distance `dist`. Trial t hashes a fresh pair with minhash index
/// derive_seed(seed, t), so the result does not depend on `threads`.
ProbabilityEstimate estimate_base_probability(const MinhashFamily& family, double dist,
                                              DistanceKind kind, std::uint64_t trials,
                                              Seed seed, unsigned threads = 1);

/// Signed area between the curve and the neutral line 1 - d over the curve's
/// grid, with distances re-expressed as normalized euclidean. Positive means
/// the curve lies above the line.
double neutral_deviation(const CollisionCurve& curve);

}  // namespace jlsh
