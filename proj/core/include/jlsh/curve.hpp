#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

/// Estimated single-minhash collision probability as a function of distance.
/// grid is strictly ascending; p_hat and std_err are aligned with it.
struct CollisionCurve {
  DistanceKind kind = DistanceKind::EuclideanNormalizedUnitSphere;
  std::vector<double> grid;
  std::vector<double> p_hat;
  std::vector<double> std_err;
  std::uint64_t trials = 0;
  Seed seed;
  std::string family;  // describe() text of the family kind

  std::size_t size() const noexcept { return grid.size(); }
  /// Throws DomainError when the fields violate the invariants above.
  void validate() const;

  friend bool operator==(const CollisionCurve&, const CollisionCurve&) = default;
};

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_std_err(double p, std::uint64_t n);

}  // namespace jlsh
