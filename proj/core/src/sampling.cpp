#include "jlsh/sampling.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "jlsh/errors.hpp"

namespace jlsh {

namespace {

// Gaussian draws from one (seed, stream); redraws in the measure-zero event
// of an all-zero sample.
std::vector<double> gaussian_direction(std::size_t dim, Seed seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  std::vector<double> g(dim);
  for (;;) {
    rng.fill_normal(g);
    double sq = 0.0;
    for (double v : g) sq += v * v;
    if (sq > 0.0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& v : g) v *= inv;
      return g;
    }
  }
}

}  // namespace

RealVector sample_unit_vector(std::size_t dim, Seed seed) {
  if (dim == 0) throw DomainError("sample_unit_vector: dim must be >= 1");
  return RealVector(gaussian_direction(dim, seed, 0));
}

RealVector sample_at_angle_from(const RealVector& u, double alpha, Seed seed) {
  const std::size_t dim = u.dim();
  if (dim < 2) throw DomainError("sample_at_angle_from: dim must be >= 2");
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
    throw DomainError("sample_at_angle_from: alpha must lie in [0, pi]");
  }
  if (std::abs(norm(u) - 1.0) > kUnitNormTolerance) {
    throw DomainError("sample_at_angle_from: u must be a unit vector");
  }

  // Gram-Schmidt a fresh direction against u. Retries on a fresh stream if
  // the draw happens to be (numerically) parallel to u.
  std::vector<double> w;
  for (std::uint64_t stream = 2;; ++stream) {
    w = gaussian_direction(dim, seed, stream);
    double proj = 0.0;
    for (std::size_t i = 0; i < dim; ++i) proj += w[i] * u[i];
    double sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      w[i] -= proj * u[i];
      sq += w[i] * w[i];
    }
    if (sq > 1e-12) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& x : w) x *= inv;
      break;
    }
  }

  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = c * u[i] + s * w[i];
  return RealVector(std::move(v));
}

std::pair<RealVector, RealVector> sample_pair_at_angle(std::size_t dim, double alpha,
                                                       Seed seed) {
  if (dim < 2) throw DomainError("sample_pair_at_angle: dim must be >= 2");
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
    throw DomainError("sample_pair_at_angle: alpha must lie in [0, pi]");
  }
  RealVector u(gaussian_direction(dim, seed, 1));
  RealVector v = sample_at_angle_from(u, alpha, seed);
  return {std::move(u), std::move(v)};
}

}  // namespace jlsh
