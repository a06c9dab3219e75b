#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "jlsh/errors.hpp"
#include "jlsh/random.hpp"
#include "jlsh/sampling.hpp"
#include "jlsh/vector.hpp"

using namespace jlsh;
using std::numbers::pi;

TEST(RealVector, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(RealVector(std::vector<double>{}), DomainError);
  EXPECT_THROW((RealVector{1.0, std::nan("")}), DomainError);
  EXPECT_THROW((RealVector{INFINITY}), DomainError);
  EXPECT_EQ((RealVector{1.0, 2.0}).dim(), 2u);
}

TEST(Dot, Examples) {
  EXPECT_EQ(dot(RealVector{1, 0}, RealVector{0, 1}), 0.0);
  EXPECT_EQ(dot(RealVector{1, 2, 3}, RealVector{1, 2, 3}), 14.0);
  // first column of the worked feature-hashing matrix
  EXPECT_EQ(dot(RealVector{0, 1, 0, 3, 0.5, 0, 1}, RealVector{0, 0, 0, 1, 0, 0, 0}), 3.0);
  EXPECT_THROW(dot(RealVector{1, 2}, RealVector{1, 2, 3}), DimensionError);
}

TEST(Norm, Examples) {
  EXPECT_EQ(norm(RealVector{3, 4}), 5.0);
  const RealVector n = normalize(RealVector{3, 4});
  EXPECT_DOUBLE_EQ(n[0], 0.6);
  EXPECT_DOUBLE_EQ(n[1], 0.8);
  EXPECT_THROW(normalize(RealVector{0, 0}), ZeroNormError);
}

TEST(Norm, NormalizeGivesUnitNorm) {
  Rng rng(Seed{11});
  for (int t = 0; t < 100; ++t) {
    std::vector<double> c(1 + t % 50);
    for (double& v : c) v = rng.normal() * 1e3;
    EXPECT_NEAR(norm(normalize(RealVector(c))), 1.0, 1e-12);
  }
}

TEST(Distance, Examples) {
  const RealVector u = normalize(RealVector{1, 2, 3});
  EXPECT_EQ(distance(u, u, DistanceKind::Angular), 0.0);
  EXPECT_DOUBLE_EQ(distance(RealVector{1, 0}, RealVector{0, 1}, DistanceKind::Angular), pi / 2);
  EXPECT_EQ(distance(RealVector{1, 0}, RealVector{-1, 0},
                     DistanceKind::EuclideanNormalizedUnitSphere),
            1.0);
  EXPECT_EQ(distance(RealVector{3, 0}, RealVector{0, 4}, DistanceKind::EuclideanRaw), 5.0);
}

TEST(Distance, Errors) {
  EXPECT_THROW(distance(RealVector{1, 0}, RealVector{1, 0, 0}, DistanceKind::EuclideanRaw),
               DimensionError);
  EXPECT_THROW(distance(RealVector{2, 0}, RealVector{1, 0}, DistanceKind::Angular), DomainError);
  EXPECT_THROW(distance(RealVector{1, 0}, RealVector{0, 1.1},
                        DistanceKind::EuclideanNormalizedUnitSphere),
               DomainError);
  // raw euclidean accepts any vectors
  EXPECT_NO_THROW(distance(RealVector{2, 0}, RealVector{0, 7}, DistanceKind::EuclideanRaw));
}

TEST(Distance, SymmetryIdentityAndHalfAngle) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const RealVector x = sample_unit_vector(16, Seed{s});
    const RealVector y = sample_unit_vector(16, Seed{s + 1000});
    for (auto kind : {DistanceKind::Angular, DistanceKind::EuclideanRaw,
                      DistanceKind::EuclideanNormalizedUnitSphere}) {
      EXPECT_EQ(distance(x, y, kind), distance(y, x, kind));
      EXPECT_EQ(distance(x, x, kind), 0.0);
    }
    const double a = distance(x, y, DistanceKind::Angular);
    const double n = distance(x, y, DistanceKind::EuclideanNormalizedUnitSphere);
    EXPECT_NEAR(n, std::sin(a / 2), 1e-12);
  }
}

TEST(Distance, ConversionsRoundTrip) {
  for (double a : {0.0, 0.3, pi / 2, 2.5, pi}) {
    for (auto kind : {DistanceKind::Angular, DistanceKind::EuclideanRaw,
                      DistanceKind::EuclideanNormalizedUnitSphere}) {
      EXPECT_NEAR(angle_from_distance(distance_from_angle(a, kind), kind), a, 1e-12);
    }
  }
  EXPECT_EQ(max_sphere_distance(DistanceKind::EuclideanRaw), 2.0);
  EXPECT_EQ(max_sphere_distance(DistanceKind::EuclideanNormalizedUnitSphere), 1.0);
  EXPECT_THROW(angle_from_distance(2.5, DistanceKind::EuclideanRaw), DomainError);
  EXPECT_EQ(parse_distance_kind("normalized"), DistanceKind::EuclideanNormalizedUnitSphere);
  EXPECT_THROW(parse_distance_kind("cosine"), DomainError);
}

TEST(Seeding, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (std::uint64_t k = 0; k < 50; ++k) seen.insert(derive_seed(Seed{s}, k).value);
  }
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_EQ(derive_seed(Seed{5}, 1, 2), derive_seed(derive_seed(Seed{5}, 1), 2));
}

TEST(Seeding, Mix64KnownValues) {
  // splitmix64 reference: the first output of a generator seeded with 0
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ULL);
}

TEST(Rng, NormalMoments) {
  Rng rng(Seed{3});
  std::vector<double> v(200000);
  rng.fill_normal(v);
  double mean = 0, sq = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) sq += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(200000.0) * 1.5);
  EXPECT_NEAR(sq / v.size(), 1.0, 0.02);
}

TEST(SampleUnitVector, UnitAndDeterministic) {
  const RealVector a = sample_unit_vector(128, Seed{9});
  EXPECT_NEAR(norm(a), 1.0, 1e-9);
  EXPECT_EQ(a, sample_unit_vector(128, Seed{9}));
  EXPECT_NE(a, sample_unit_vector(128, Seed{10}));
}

TEST(SampleUnitVector, IsotropicDots) {
  double sum = 0.0;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    sum += dot(sample_unit_vector(128, Seed{2 * t}), sample_unit_vector(128, Seed{2 * t + 1}));
  }
  EXPECT_NEAR(sum / 10000, 0.0, 0.01);
}

TEST(SamplePairAtAngle, Examples) {
  const auto [u0, v0] = sample_pair_at_angle(128, 0.0, Seed{1});
  EXPECT_EQ(u0, v0);
  const auto [u, v] = sample_pair_at_angle(128, pi / 3, Seed{1});
  EXPECT_NEAR(norm(u), 1.0, 1e-9);
  EXPECT_NEAR(norm(v), 1.0, 1e-9);
  EXPECT_NEAR(dot(u, v), 0.5, 1e-9);
  for (std::uint64_t t = 0; t < 10000; ++t) {
    const auto [a, b] = sample_pair_at_angle(128, pi / 2, Seed{t});
    ASSERT_NEAR(distance(a, b, DistanceKind::Angular), pi / 2, 1e-9);
  }
}

TEST(SamplePairAtAngle, Errors) {
  EXPECT_THROW(sample_pair_at_angle(1, 0.5, Seed{1}), DomainError);
  EXPECT_THROW(sample_pair_at_angle(8, -0.1, Seed{1}), DomainError);
  EXPECT_THROW(sample_pair_at_angle(8, 3.2, Seed{1}), DomainError);
}

TEST(SamplePairAtAngle, OrderedAnglesGiveOrderedDistances) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    double prev = -1.0;
    for (double a = 0.0; a <= pi; a += pi / 16) {
      const auto [u, v] = sample_pair_at_angle(32, a, Seed{s});
      const double d = distance(u, v, DistanceKind::EuclideanRaw);
      EXPECT_GT(d, prev);
      prev = d;
    }
  }
}

TEST(SampleAtAngleFrom, KeepsTheGivenCentre) {
  const RealVector u = sample_unit_vector(64, Seed{4});
  const RealVector v = sample_at_angle_from(u, 0.7, Seed{5});
  EXPECT_NEAR(dot(u, v), std::cos(0.7), 1e-9);
  EXPECT_THROW(sample_at_angle_from(RealVector{2, 0}, 0.1, Seed{1}), DomainError);
}
