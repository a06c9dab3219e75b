#include "jlsh/amplify.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "jlsh/errors.hpp"
#include "jlsh/parallel.hpp"
#include "jlsh/sampling.hpp"

namespace jlsh {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1]");
  }
}

// Smallest b >= 1 with amplified_probability(p, r, b) >= target, if any
// b <= b_max qualifies. The closed form seeds the search; the final answer is
// settled with amplified_probability itself so callers re-checking a scheme
// see exactly the same inequality.
std::optional<std::uint32_t> minimal_tables(double p, std::uint32_t r, double target,
                                            std::uint32_t b_max) {
  if (amplified_probability(p, r, 1) >= target) return 1;
  const double q = std::pow(p, static_cast<double>(r));
  if (q <= 0.0) return std::nullopt;
  const double estimate = std::ceil(std::log1p(-target) / std::log1p(-q));
  if (!(estimate <= static_cast<double>(b_max) + 1.0)) return std::nullopt;
  auto b = static_cast<std::uint32_t>(std::max(1.0, estimate));
  while (b > 1 && amplified_probability(p, r, b - 1) >= target) --b;
  while (b <= b_max && amplified_probability(p, r, b) < target) ++b;
  if (b > b_max) return std::nullopt;
  return b;
}

}  // namespace

void SensitivityTarget::validate() const {
  if (!(d1 >= 0.0 && d1 < d2)) throw DomainError("sensitivity target needs 0 <= d1 < d2");
  if (!(p2_max > 0.0 && p2_max <= p1_min && p1_min < 1.0)) {
    throw DomainError("sensitivity target needs 0 < p2_max <= p1_min < 1");
  }
}

double amplified_probability(double p, std::uint32_t r, std::uint32_t b) {
  require_probability(p, "p");
  if (r == 0 || b == 0) throw DomainError("amplification needs r >= 1 and b >= 1");
  const double q = std::pow(p, static_cast<double>(r));
  if (b == 1 || q == 1.0 || q == 0.0) return q;
  return -std::expm1(static_cast<double>(b) * std::log1p(-q));
}

AmplifiedScheme solve_parameters(double p1, double p2, const SensitivityTarget& target,
                                 std::uint32_t r_max, std::uint32_t b_max) {
  require_probability(p1, "p1");
  require_probability(p2, "p2");
  target.validate();
  if (r_max == 0 || b_max == 0) throw DomainError("r_max and b_max must be >= 1");

  std::optional<AmplifiedScheme> best;
  for (std::uint32_t r = 1; r <= r_max; ++r) {
    if (best && r >= best->total()) break;  // b >= 1, so r * b can only be worse
    const auto b = minimal_tables(p1, r, target.p1_min, b_max);
    if (!b) continue;
    if (amplified_probability(p2, r, *b) > target.p2_max) continue;
    const AmplifiedScheme candidate{r, *b};
    if (!best || candidate.total() < best->total()) best = candidate;
  }
  if (!best) {
    throw InfeasibleError("no (r, b) with r <= " + std::to_string(r_max) + ", b <= " +
                          std::to_string(b_max) + " separates p1=" + std::to_string(p1) +
                          " from p2=" + std::to_string(p2));
  }
  return *best;
}

ProbabilityEstimate estimate_base_probability(const MinhashFamily& family, double dist,
                                              DistanceKind kind, std::uint64_t trials,
                                              Seed seed, unsigned threads) {
  if (trials == 0) throw DomainError("estimate_base_probability needs trials >= 1");
  const double alpha = angle_from_distance(dist, kind);
  const std::size_t dim = family.input_dim();
  const std::uint64_t hits = parallel_count(trials, threads, [&](std::size_t t) {
    const Seed trial = derive_seed(seed, t);
    const auto [u, v] = sample_pair_at_angle(dim, alpha, trial);
    const MinhashFunction h = family.function(trial.value);
    return h(u.components()) == h(v.components());
  });
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, binomial_std_err(p, trials), trials, seed};
}

double neutral_deviation(const CollisionCurve& curve) {
  curve.validate();
  double area = 0.0;
  double prev_d = 0.0;
  double prev_gap = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = distance_from_angle(angle_from_distance(curve.grid[i], curve.kind),
                                         DistanceKind::EuclideanNormalizedUnitSphere);
    const double gap = curve.p_hat[i] - (1.0 - d);
    if (i > 0) area += 0.5 * (gap + prev_gap) * (d - prev_d);
    prev_d = d;
    prev_gap = gap;
  }
  return area;
}

}  // namespace jlsh
