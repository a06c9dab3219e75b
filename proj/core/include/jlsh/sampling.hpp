#pragma once

#include <cstddef>
#include <utility>

#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

/// Uniform point on the unit sphere S^{dim-1}: normalized standard Gaussian.
RealVector sample_unit_vector(std::size_t dim, Seed seed);

/// Unit vector at angle exactly `alpha` from the unit vector u, uniform on
/// that cone. Uses the seed streams 2 and up.
RealVector sample_at_angle_from(const RealVector& u, double alpha, Seed seed);

/// Unit vectors (u, v) with angle exactly `alpha` between them. u is uniform
/// on the sphere and v uniform on the cone of half-angle alpha around u.
/// Throws DomainError unless 0 <= alpha <= pi and dim >= 2.
std::pair<RealVector, RealVector> sample_pair_at_angle(std::size_t dim, double alpha,
                                                       Seed seed);

}  // namespace jlsh
