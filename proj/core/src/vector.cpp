#include "jlsh/vector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jlsh/errors.hpp"

namespace jlsh {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

void require_unit(const RealVector& x) {
  if (std::abs(norm(x) - 1.0) > kUnitNormTolerance) {
    throw DomainError("sphere distance requires unit-norm inputs");
  }
}

}  // namespace

RealVector::RealVector(std::vector<double> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw DomainError("RealVector needs at least one component");
  }
  for (double c : components_) {
    if (!std::isfinite(c)) throw DomainError("RealVector component is not finite");
  }
}

RealVector::RealVector(std::initializer_list<double> components)
    : RealVector(std::vector<double>(components)) {}

RealVector RealVector::zeros(std::size_t dim) {
  return RealVector(std::vector<double>(dim, 0.0));
}

RealVector operator+(const RealVector& x, const RealVector& y) {
  require_same_dim(x.dim(), y.dim());
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return RealVector(std::move(out));
}

RealVector operator-(const RealVector& x, const RealVector& y) {
  require_same_dim(x.dim(), y.dim());
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return RealVector(std::move(out));
}

RealVector operator*(double c, const RealVector& x) {
  std::vector<double> out(x.values());
  for (double& v : out) v *= c;
  return RealVector(std::move(out));
}

RealVector operator-(const RealVector& x) { return -1.0 * x; }

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Angular:
      return "angular";
    case DistanceKind::EuclideanRaw:
      return "euclidean";
    case DistanceKind::EuclideanNormalizedUnitSphere:
      return "normalized";
  }
  return "unknown";
}

DistanceKind parse_distance_kind(std::string_view text) {
  if (text == "angular") return DistanceKind::Angular;
  if (text == "euclidean") return DistanceKind::EuclideanRaw;
  if (text == "normalized") return DistanceKind::EuclideanNormalizedUnitSphere;
  throw DomainError("unknown distance kind '" + std::string(text) +
                    "' (expected angular, euclidean or normalized)");
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double dot(const RealVector& x, const RealVector& y) {
  return dot(x.components(), y.components());
}

double norm(const RealVector& x) { return std::sqrt(dot(x, x)); }

RealVector normalize(const RealVector& x) {
  const double n = norm(x);
  if (n == 0.0) throw ZeroNormError("cannot normalize the zero vector");
  return (1.0 / n) * x;
}

double distance(const RealVector& x, const RealVector& y, DistanceKind kind) {
  require_same_dim(x.dim(), y.dim());
  switch (kind) {
    case DistanceKind::Angular: {
      require_unit(x);
      require_unit(y);
      // 2 atan2(|x - y|, |x + y|) equals arccos(x . y) on the sphere but stays
      // accurate near 0 and pi, where arccos loses half the mantissa.
      double diff_sq = 0.0;
      double sum_sq = 0.0;
      for (std::size_t i = 0; i < x.dim(); ++i) {
        const double a = x[i] - y[i];
        const double b = x[i] + y[i];
        diff_sq += a * a;
        sum_sq += b * b;
      }
      return 2.0 * std::atan2(std::sqrt(diff_sq), std::sqrt(sum_sq));
    }
    case DistanceKind::EuclideanRaw:
    case DistanceKind::EuclideanNormalizedUnitSphere: {
      if (kind == DistanceKind::EuclideanNormalizedUnitSphere) {
        require_unit(x);
        require_unit(y);
      }
      double sq = 0.0;
      for (std::size_t i = 0; i < x.dim(); ++i) {
        const double diff = x[i] - y[i];
        sq += diff * diff;
      }
      const double d = std::sqrt(sq);
      return kind == DistanceKind::EuclideanRaw ? d : d / 2.0;
    }
  }
  throw DomainError("unknown distance kind");
}

double max_sphere_distance(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Angular:
      return std::numbers::pi;
    case DistanceKind::EuclideanRaw:
      return 2.0;
    case DistanceKind::EuclideanNormalizedUnitSphere:
      return 1.0;
  }
  throw DomainError("unknown distance kind");
}

double angle_from_distance(double d, DistanceKind kind) {
  if (!(d >= 0.0 && d <= max_sphere_distance(kind))) {
    throw DomainError("distance " + std::to_string(d) + " outside the " +
                      std::string(to_string(kind)) + " domain on the unit sphere");
  }
  switch (kind) {
    case DistanceKind::Angular:
      return d;
    case DistanceKind::EuclideanRaw:
      return 2.0 * std::asin(d / 2.0);
    case DistanceKind::EuclideanNormalizedUnitSphere:
      return 2.0 * std::asin(d);
  }
  throw DomainError("unknown distance kind");
}

double distance_from_angle(double alpha, DistanceKind kind) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
    throw DomainError("angle outside [0, pi]");
  }
  switch (kind) {
    case DistanceKind::Angular:
      return alpha;
    case DistanceKind::EuclideanRaw:
      return 2.0 * std::sin(alpha / 2.0);
    case DistanceKind::EuclideanNormalizedUnitSphere:
      return std::sin(alpha / 2.0);
  }
  throw DomainError("unknown distance kind");
}

}  // namespace jlsh
