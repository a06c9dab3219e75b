#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace jlsh {

/// Dense point in R^d. Components are finite and d >= 1; the value is
/// immutable once constructed.
class RealVector {
 public:
  explicit RealVector(std::vector<double> components);
  RealVector(std::initializer_list<double> components);

  static RealVector zeros(std::size_t dim);

  std::size_t dim() const noexcept { return components_.size(); }
  double operator[](std::size_t i) const { return components_[i]; }
  std::span<const double> components() const noexcept { return components_; }
  const std::vector<double>& values() const noexcept { return components_; }

  friend bool operator==(const RealVector&, const RealVector&) = default;

 private:
  std::vector<double> components_;
};

RealVector operator+(const RealVector& x, const RealVector& y);
RealVector operator-(const RealVector& x, const RealVector& y);
RealVector operator*(double c, const RealVector& x);
RealVector operator-(const RealVector& x);

enum class DistanceKind {
  Angular,                        // angle in [0, pi]
  EuclideanRaw,                   // ||x - y||
  EuclideanNormalizedUnitSphere,  // ||x - y|| / 2 between unit vectors, in [0, 1]
};

std::string_view to_string(DistanceKind kind);
/// Accepts "angular", "euclidean" and "normalized".
DistanceKind parse_distance_kind(std::string_view text);

/// Inputs of the sphere-only distance kinds must have unit norm within this.
inline constexpr double kUnitNormTolerance = 1e-9;

double dot(std::span<const double> x, std::span<const double> y);
double dot(const RealVector& x, const RealVector& y);
double norm(const RealVector& x);
RealVector normalize(const RealVector& x);

double distance(const RealVector& x, const RealVector& y, DistanceKind kind);

/// Angle between two unit vectors at the given distance. EuclideanRaw uses
/// ||x - y|| = 2 sin(alpha / 2), so its domain is [0, 2].
double angle_from_distance(double d, DistanceKind kind);
double distance_from_angle(double alpha, DistanceKind kind);
/// Largest distance representable for unit vectors under `kind`.
double max_sphere_distance(DistanceKind kind);

}  // namespace jlsh
