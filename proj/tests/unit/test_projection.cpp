#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "jlsh/errors.hpp"
#include "jlsh/projection.hpp"
#include "jlsh/sampling.hpp"
#include "oracles.hpp"

using namespace jlsh;

namespace {

ExplicitFhMapping worked_mapping() {
  const std::vector<std::uint32_t> h{2, 1, 3, 0, 1, 2, 3};
  const std::vector<int> s{+1, +1, -1, +1, -1, -1, -1};
  return ExplicitFhMapping::single(4, h, s);
}

RealVector random_vector(std::size_t d, std::uint64_t seed) {
  Rng rng(Seed{seed});
  std::vector<double> c(d);
  rng.fill_normal(c);
  return RealVector(c);
}

}  // namespace

TEST(Gaussian, DeterministicWithUnitMoments) {
  const auto a = make_gaussian(128, 64, Seed{1});
  EXPECT_EQ(a.matrix(), make_gaussian(128, 64, Seed{1}).matrix());
  EXPECT_NE(a.matrix(), make_gaussian(128, 64, Seed{2}).matrix());
  double mean = 0;
  for (double v : a.matrix().data) mean += v;
  mean /= 8192;
  double var = 0;
  for (double v : a.matrix().data) var += (v - mean) * (v - mean);
  var /= 8191;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 1.0, 0.1);
  EXPECT_EQ(a.kind(), DenseKind::Gaussian);
}

TEST(SignDense, EntriesArePlusMinusOne) {
  const auto a = make_sign_dense(128, 64, Seed{3});
  std::size_t plus = 0;
  for (double v : a.matrix().data) {
    ASSERT_TRUE(v == 1.0 || v == -1.0);
    plus += v > 0 ? 1 : 0;
  }
  EXPECT_NEAR(plus / 8192.0, 0.5, 0.02);
  EXPECT_EQ(a.matrix(), make_sign_dense(128, 64, Seed{3}).matrix());
}

TEST(FeatureHashing, KOneHasOneNonzeroPerRow) {
  const auto p = make_feature_hashing(100, 16, 1, Seed{4});
  const Matrix m = materialize(p);
  for (std::size_t i = 0; i < m.rows; ++i) {
    int nonzero = 0;
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m(i, j) != 0) {
        ++nonzero;
        EXPECT_EQ(std::abs(m(i, j)), 1.0);
      }
    }
    EXPECT_EQ(nonzero, 1);
  }
}

TEST(FeatureHashing, MergedEntriesBoundedByK) {
  const auto p = make_feature_hashing(64, 4, 8, Seed{5});
  const Matrix m = materialize(p);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double abs_sum = 0;
    for (std::size_t j = 0; j < m.cols; ++j) {
      EXPECT_LE(std::abs(m(i, j)), 8.0);
      EXPECT_EQ(m(i, j), std::round(m(i, j)));
      abs_sum += std::abs(m(i, j));
    }
    EXPECT_LE(abs_sum, 8.0);
    EXPECT_EQ(static_cast<int>(abs_sum) % 2, 0);  // k even: merged parity is preserved
  }
}

TEST(FeatureHashing, TargetsUniform) {
  const auto p = make_feature_hashing(25000, 16, 4, Seed{6});
  std::vector<std::uint64_t> counts(16, 0);
  std::uint64_t minus = 0;
  for (std::size_t i = 0; i < 25000; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const FhSlot s = p.slot(i, j);
      ++counts[s.target];
      minus += s.sign < 0 ? 1 : 0;
    }
  }
  EXPECT_GT(oracle::chi_square_uniform_p_value(counts), 0.001);
  EXPECT_NEAR(minus / 1e5, 0.5, 3 * 0.5 / std::sqrt(1e5));
}

TEST(FeatureHashing, SlotsAreAFixedFunctionOfSeedAndIndex) {
  // Pinned values: the slot hash is part of the snapshot contract.
  const SparseSignedProjection p(128, 64, 2, Seed{42});
  const std::uint64_t base = mix64(42 ^ 0x3c6ef372fe94f82bULL);
  for (std::size_t i : {0u, 1u, 77u}) {
    for (std::size_t j : {0u, 1u}) {
      const std::uint64_t h = hash_combine(hash_combine(base, i), j);
      EXPECT_EQ(p.slot(i, j).target, (h & 0xffffffffULL) % 64);
      EXPECT_EQ(p.slot(i, j).sign, (h >> 63) ? -1 : 1);
    }
  }
  const auto copy = make_feature_hashing(128, 64, 2, Seed{42});
  EXPECT_EQ(materialize(p), materialize(copy));
}

TEST(Apply, WorkedExample) {
  const RealVector v{0, 1, 0, 3, 0.5, 0, 1};
  const RealVector expected{3, 0.5, 0, -1};
  EXPECT_EQ(apply_with_mapping(worked_mapping(), v), expected);
  EXPECT_EQ(apply(worked_mapping(), v), expected);
}

TEST(Apply, ZeroAndIdentity) {
  EXPECT_EQ(apply(worked_mapping(), RealVector::zeros(7)), RealVector::zeros(4));
  std::vector<std::uint32_t> targets(5);
  std::vector<int> signs(5, 1);
  for (std::uint32_t i = 0; i < 5; ++i) targets[i] = i;
  const auto id = ExplicitFhMapping::single(5, targets, signs);
  const RealVector x{1.5, -2, 0, 3, 7};
  EXPECT_EQ(apply_with_mapping(id, x), x);
}

TEST(Apply, DimensionMismatch) {
  EXPECT_THROW(apply(worked_mapping(), RealVector{1, 2}), DimensionError);
  EXPECT_THROW(apply(make_gaussian(4, 2, Seed{1}), RealVector{1, 2}), DimensionError);
  EXPECT_THROW(apply(make_feature_hashing(4, 2, 1, Seed{1}), RealVector{1, 2}), DimensionError);
}

TEST(Apply, MappingValidation) {
  const std::vector<std::uint32_t> bad_target{0, 4};
  const std::vector<int> ok_signs{1, 1};
  EXPECT_THROW(ExplicitFhMapping::single(4, bad_target, ok_signs), DomainError);
  const std::vector<std::uint32_t> ok_target{0, 1};
  const std::vector<int> bad_signs{1, 0};
  EXPECT_THROW(ExplicitFhMapping::single(4, ok_target, bad_signs), DomainError);
}

TEST(Apply, SparseMatchesMaterializedDense) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = make_feature_hashing(128, 32, 1 + s % 4, Seed{s});
    const RealVector x = random_vector(128, 100 + s);
    const RealVector fast = apply(p, x);
    const RealVector dense = apply_dense(materialize(p), x);
    for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(fast[j], dense[j], 1e-12);
    EXPECT_EQ(apply(ExplicitFhMapping::from(p), x), fast);
  }
}

TEST(Apply, DenseMatchesReferenceProduct) {
  for (auto p : {make_gaussian(64, 16, Seed{1}), make_sign_dense(64, 16, Seed{2})}) {
    const RealVector x = random_vector(64, 9);
    const RealVector fast = apply(p, x);
    const RealVector ref = apply_dense(p.matrix(), x);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(fast[j], ref[j], 1e-12);
  }
}

TEST(Apply, Linearity) {
  const auto fh = make_feature_hashing(50, 8, 3, Seed{7});
  const auto g = make_gaussian(50, 8, Seed{8});
  const RealVector x = random_vector(50, 1), y = random_vector(50, 2);
  const double a = 1.7, b = -0.4;
  for (int which = 0; which < 2; ++which) {
    const auto lhs = which ? apply(fh, a * x + b * y) : apply(g, a * x + b * y);
    const auto px = which ? apply(fh, x) : apply(g, x);
    const auto py = which ? apply(fh, y) : apply(g, y);
    for (std::size_t j = 0; j < 8; ++j) {
      const double rhs = a * px[j] + b * py[j];
      EXPECT_NEAR(lhs[j], rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST(OpCount, FeatureHashingIsAddSubOnly) {
  for (std::size_t k : {1u, 2u, 5u}) {
    const auto p = make_feature_hashing(128, 64, k, Seed{k});
    OpCounter c;
    apply(p, random_vector(128, 3), &c);
    EXPECT_EQ(c.add_sub(), 128 * k);
    EXPECT_EQ(c.multiplications, 0u);
    EXPECT_EQ(c.multiply_adds, 0u);
  }
}

TEST(OpCount, DenseKinds) {
  OpCounter g;
  apply(make_gaussian(128, 64, Seed{1}), random_vector(128, 1), &g);
  EXPECT_EQ(g.multiply_adds, 8192u);
  EXPECT_EQ(g.add_sub(), 0u);
  OpCounter s;
  apply(make_sign_dense(128, 6, Seed{1}), random_vector(128, 1), &s);
  EXPECT_EQ(s.add_sub(), 768u);
  EXPECT_EQ(s.multiplications + s.multiply_adds, 0u);
}

TEST(NormScale, MatchesK) {
  EXPECT_NEAR(fh_norm_scale_estimate(128, 32, 1, Seed{1}, 10000), 1.0, 0.05);
  EXPECT_NEAR(fh_norm_scale_estimate(128, 32, 4, Seed{2}, 10000), 4.0, 0.2);
}

TEST(NormScale, PermutationPreservesNormExactly) {
  std::vector<std::uint32_t> targets{3, 0, 2, 1};
  std::vector<int> signs{1, -1, 1, -1};
  const auto perm = ExplicitFhMapping::single(4, targets, signs);
  const RealVector x = normalize(RealVector{1, 2, 3, 4});
  EXPECT_EQ(norm(apply(perm, x)), norm(x));
}

TEST(NormScale, SignDenseScalesByD) {
  // E ||x M||^2 = d' ||x||^2 for d' columns of +-1 entries
  const std::size_t trials = 4000;
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RealVector x = sample_unit_vector(32, Seed{t});
    const RealVector w = apply(make_sign_dense(32, 16, Seed{100000 + t}), x);
    sum += dot(w, w);
  }
  // per-trial variance of ||w||^2 is 2 * 16 * (1 - sum x_i^4) < 32
  EXPECT_NEAR(sum / trials, 16.0, 3 * std::sqrt(32.0 / trials));
}

TEST(DistancePreservation, ConcentratesAsOutputGrows) {
  const double alpha = 1.0;
  auto mad = [&](std::size_t d_out) {
    std::vector<double> dev;
    for (std::uint64_t t = 0; t < 2000; ++t) {
      const auto [u, v] = sample_pair_at_angle(128, alpha, Seed{t});
      const auto p = make_gaussian(128, d_out, Seed{t + 77777});
      const RealVector pu = apply(p, u), pv = apply(p, v);
      dev.push_back(std::abs(std::acos(std::clamp(dot(pu, pv) / (norm(pu) * norm(pv)), -1.0,
                                                  1.0)) -
                             alpha));
    }
    std::nth_element(dev.begin(), dev.begin() + dev.size() / 2, dev.end());
    return dev[dev.size() / 2];
  };
  EXPECT_LT(mad(64), mad(8));
}

TEST(DebugDump, WritesNonzeroEntries) {
  const auto dir = oracle::scratch_dir("projection_dump");
  write_projection_csv(materialize(worked_mapping()), dir / "p.csv");
  std::ifstream in(dir / "p.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "row,col,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 7);
}
