#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include "jlsh/errors.hpp"
#include "jlsh/index.hpp"
#include "jlsh/sampling.hpp"
#include "oracles.hpp"

using namespace jlsh;

namespace {

std::vector<RealVector> random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::vector<RealVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_unit_vector(d, derive_seed(Seed{seed}, i)));
  return out;
}

std::vector<unsigned char> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::size_t> table_sizes(const LshTable& t) {
  std::vector<std::size_t> s;
  for (const auto& [key, ids] : t.buckets()) s.push_back(ids.size());
  return s;
}

}  // namespace

TEST(Build, SinglePoint) {
  const MinhashFamily f(Voronoi{8}, 4, Seed{1});
  const auto index = LshIndex::build({RealVector{1, 0, 0, 0}}, f, {1, 1}, Seed{2});
  ASSERT_EQ(index.tables().size(), 1u);
  ASSERT_EQ(index.tables()[0].buckets().size(), 1u);
  EXPECT_EQ(index.tables()[0].buckets().begin()->second, std::vector<PointId>{0});
  EXPECT_EQ(index.occupancy_report(), (std::vector<OccupancyHistogram>{{{1, 1}}}));
}

TEST(Build, PartitionAndTableShape) {
  const auto pts = random_points(10000, 32, 3);
  const MinhashFamily f(Hyperplane{6}, 32, Seed{4});
  const auto index = LshIndex::build(pts, f, {5, 22}, Seed{5});
  ASSERT_EQ(index.tables().size(), 22u);
  std::size_t stored = 0;
  std::set<std::uint64_t> all_indices;
  for (const auto& t : index.tables()) {
    EXPECT_EQ(t.minhash_indices().size(), 5u);
    all_indices.insert(t.minhash_indices().begin(), t.minhash_indices().end());
    std::vector<PointId> ids;
    for (const auto& [key, bucket] : t.buckets()) ids.insert(ids.end(), bucket.begin(), bucket.end());
    std::sort(ids.begin(), ids.end());
    ASSERT_EQ(ids.size(), 10000u);
    for (std::size_t i = 0; i < ids.size(); ++i) ASSERT_EQ(ids[i], i);
    stored += ids.size();
  }
  EXPECT_EQ(stored, 10000u * 22);
  EXPECT_EQ(all_indices.size(), 110u);
}

TEST(Build, Deterministic) {
  const auto pts = random_points(500, 16, 6);
  const MinhashFamily f(FeatureHashing{16, 1}, 16, Seed{7});
  const auto a = LshIndex::build(pts, f, {2, 4}, Seed{8});
  const auto b = LshIndex::build(pts, f, {2, 4}, Seed{8});
  const auto c = LshIndex::build(pts, f, {2, 4}, Seed{9});
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(a.tables()[t].buckets(), b.tables()[t].buckets());
    EXPECT_EQ(a.tables()[t].minhash_indices(), b.tables()[t].minhash_indices());
    EXPECT_NE(a.tables()[t].minhash_indices(), c.tables()[t].minhash_indices());
  }
}

TEST(Build, Errors) {
  const MinhashFamily f(Voronoi{4}, 3, Seed{1});
  EXPECT_THROW(LshIndex::build({RealVector{1, 0, 0}, RealVector{1, 0}}, f, {1, 1}, Seed{1}),
               DimensionError);
  std::vector<LabeledPoint> dup{{5, RealVector{1, 0, 0}}, {5, RealVector{0, 1, 0}}};
  EXPECT_THROW(LshIndex::build(dup, f, {1, 1}, Seed{1}), DuplicateIdError);
  EXPECT_THROW(LshIndex::build({RealVector{1, 0, 0}}, f, {0, 1}, Seed{1}), DomainError);
}

TEST(Build, EmptyIndexAnswersNothing) {
  const MinhashFamily f(Voronoi{4}, 3, Seed{1});
  const auto index = LshIndex::build(std::vector<RealVector>{}, f, {2, 3}, Seed{1});
  EXPECT_EQ(index.size(), 0u);
  const auto c = index.query_candidates(RealVector{1, 0, 0});
  EXPECT_TRUE(c.ids.empty());
  EXPECT_EQ(c.stats.candidates_examined, 0u);
  EXPECT_TRUE(index.query_knn(RealVector{1, 0, 0}, 5, DistanceKind::Angular).empty());
}

TEST(Query, InsertedPointIsFoundFirst) {
  const auto pts = random_points(2000, 32, 10);
  const MinhashFamily f(CrossPolytope{16}, 32, Seed{11});
  const auto index = LshIndex::build(pts, f, {3, 4}, Seed{12});
  for (std::size_t i = 0; i < 2000; i += 97) {
    const auto c = index.query_candidates(pts[i]);
    EXPECT_TRUE(std::binary_search(c.ids.begin(), c.ids.end(), i));
    EXPECT_EQ(c.stats.tables_hit, 4u);
    const auto knn = index.query_knn(pts[i], 3, DistanceKind::EuclideanRaw);
    ASSERT_FALSE(knn.empty());
    EXPECT_EQ(knn[0], (Neighbor{i, 0.0}));
  }
}

TEST(Query, CandidatesMatchRehashOracle) {
  const std::vector<FamilyKind> kinds{Hyperplane{3},        Voronoi{4},           CrossPolytope{3},
                                      FeatureHashing{6, 1}, DirectionalFH{3, 1}, FastCrossPolytope{8, 3, 1}};
  for (const auto& kind : kinds) {
    const auto pts = random_points(1000, 16, 20);
    const MinhashFamily f(kind, 16, Seed{21});
    const auto index = LshIndex::build(pts, f, {2, 3}, Seed{22});
    std::size_t nonempty = 0;
    for (std::uint64_t q = 0; q < 30; ++q) {
      const RealVector query = sample_unit_vector(16, derive_seed(Seed{23}, q));
      const auto c = index.query_candidates(query);
      ASSERT_EQ(c.ids, oracle::rehash_candidates(index, query)) << describe(kind);
      EXPECT_EQ(c.stats.candidates_examined, c.ids.size());
      nonempty += c.ids.empty() ? 0 : 1;
    }
    EXPECT_GT(nonempty, 0u) << describe(kind);
  }
}

TEST(Query, KnnIsExactOverCandidates) {
  const auto pts = random_points(3000, 16, 30);
  const MinhashFamily f(Hyperplane{4}, 16, Seed{31});
  const auto index = LshIndex::build(pts, f, {2, 6}, Seed{32});
  for (std::uint64_t q = 0; q < 20; ++q) {
    const RealVector query = sample_unit_vector(16, derive_seed(Seed{33}, q));
    const auto cand = index.query_candidates(query);
    std::vector<RealVector> subset;
    for (PointId id : cand.ids) subset.push_back(pts[id]);
    auto expected = oracle::exact_knn(subset, query, 10, DistanceKind::Angular);
    for (auto& n : expected) n.id = cand.ids[n.id];
    QueryStats stats;
    const auto got = index.query_knn(query, 10, DistanceKind::Angular, &stats);
    EXPECT_EQ(got, expected);
    EXPECT_EQ(stats.distance_evaluations, cand.ids.size());
    EXPECT_LE(stats.distance_evaluations, stats.candidates_examined);
    EXPECT_LE(stats.candidates_examined, pts.size());
  }
}

TEST(Query, SmallCandidateSetReturnsAll) {
  const MinhashFamily f(Voronoi{4}, 2, Seed{1});
  const auto index = LshIndex::build({RealVector{1, 0}, RealVector{1, 0.01}}, f, {1, 1}, Seed{2});
  const auto knn = index.query_knn(RealVector{1, 0}, 10, DistanceKind::EuclideanRaw);
  EXPECT_LE(knn.size(), 2u);
  EXPECT_GE(knn.size(), 1u);
}

TEST(Query, MaxTablesRestrictsToPrefix) {
  const auto pts = random_points(1000, 16, 40);
  const MinhashFamily f(Hyperplane{3}, 16, Seed{41});
  const auto index = LshIndex::build(pts, f, {2, 5}, Seed{42});
  const RealVector q = sample_unit_vector(16, Seed{43});
  std::vector<PointId> prev;
  for (std::uint32_t m = 0; m <= 5; ++m) {
    const auto c = index.query_candidates(q, m);
    EXPECT_TRUE(std::includes(c.ids.begin(), c.ids.end(), prev.begin(), prev.end()));
    prev = c.ids;
  }
  EXPECT_EQ(prev, index.query_candidates(q).ids);
}

TEST(Query, DimensionMismatch) {
  const MinhashFamily f(Voronoi{4}, 3, Seed{1});
  const auto index = LshIndex::build({RealVector{1, 0, 0}}, f, {1, 1}, Seed{1});
  EXPECT_THROW(index.query_candidates(RealVector{1, 0}), DimensionError);
  EXPECT_THROW(index.query_knn(RealVector{1, 0}, 1, DistanceKind::Angular), DimensionError);
}

TEST(Occupancy, IdenticalPointsShareABucket) {
  std::vector<RealVector> same(50, RealVector{0.6, 0.8, 0});
  const MinhashFamily f(CrossPolytope{8}, 3, Seed{1});
  const auto index = LshIndex::build(same, f, {2, 3}, Seed{2});
  for (const auto& h : index.occupancy_report()) EXPECT_EQ(h, (OccupancyHistogram{{50, 1}}));
}

TEST(Occupancy, HistogramSumsToN) {
  const auto pts = random_points(10000, 32, 50);
  const MinhashFamily f(Voronoi{64}, 32, Seed{51});
  const auto index = LshIndex::build(pts, f, {2, 3}, Seed{52});
  const auto report = index.occupancy_report();
  for (std::size_t t : occupancy_totals(report)) EXPECT_EQ(t, 10000u);
  for (std::size_t t = 0; t < 3; ++t) {
    std::size_t weighted = 0;
    for (const auto& [size, count] : report[t]) weighted += size * count;
    EXPECT_EQ(weighted, 10000u);
    EXPECT_EQ(table_sizes(index.tables()[t]).size(),
              std::accumulate(report[t].begin(), report[t].end(), std::size_t{0},
                              [](std::size_t acc, const auto& kv) { return acc + kv.second; }));
  }
}

TEST(CompoundKeyTest, OrderSensitive) {
  const std::vector<std::uint64_t> a{1, 2, 3}, b{3, 2, 1}, c{1, 2, 3};
  EXPECT_EQ(CompoundKey::from(a), CompoundKey::from(c));
  EXPECT_NE(CompoundKey::from(a), CompoundKey::from(b));
  const std::vector<std::uint64_t> one{1}, one_zero{1, 0};
  EXPECT_NE(CompoundKey::from(one), CompoundKey::from(one_zero));
}

TEST(Snapshot, RoundTripAnswersIdentically) {
  const auto dir = oracle::scratch_dir("index_snapshot");
  const auto pts = random_points(800, 24, 60);
  const MinhashFamily f(FastCrossPolytope{24, 8, 2}, 24, Seed{61});
  const auto index = LshIndex::build(pts, f, {2, 4}, Seed{62});
  index.save(dir / "a.bin");
  const auto loaded = LshIndex::load(dir / "a.bin");
  EXPECT_EQ(loaded.family(), index.family());
  EXPECT_EQ(loaded.scheme(), index.scheme());
  EXPECT_EQ(loaded.seed(), index.seed());
  EXPECT_EQ(loaded.size(), index.size());
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(loaded.tables()[t].buckets(), index.tables()[t].buckets());
  }
  for (std::uint64_t q = 0; q < 25; ++q) {
    const RealVector query = sample_unit_vector(24, derive_seed(Seed{63}, q));
    EXPECT_EQ(loaded.query_knn(query, 5, DistanceKind::Angular),
              index.query_knn(query, 5, DistanceKind::Angular));
  }
  loaded.save(dir / "b.bin");
  EXPECT_EQ(file_bytes(dir / "a.bin"), file_bytes(dir / "b.bin"));
}

TEST(Snapshot, CorruptFilesRaiseFormatError) {
  const auto dir = oracle::scratch_dir("index_corrupt");
  const MinhashFamily f(Voronoi{4}, 3, Seed{1});
  LshIndex::build({RealVector{1, 0, 0}, RealVector{0, 1, 0}}, f, {1, 2}, Seed{1})
      .save(dir / "ok.bin");
  const auto good = file_bytes(dir / "ok.bin");

  auto expect_offset = [&](std::vector<unsigned char> bytes, std::uint64_t offset) {
    oracle::write_bytes(dir / "bad.bin", bytes);
    try {
      LshIndex::load(dir / "bad.bin");
      ADD_FAILURE() << "no error";
    } catch (const FormatError& e) {
      EXPECT_EQ(e.offset(), offset) << e.what();
    }
  };

  auto bad_magic = good;
  bad_magic[0] = 'X';
  expect_offset(bad_magic, 0);
  auto bad_version = good;
  bad_version[8] = 99;
  expect_offset(bad_version, 8);
  auto trailing = good;
  trailing.push_back(0);
  expect_offset(trailing, good.size());

  for (std::size_t cut : {4ul, 20ul, good.size() / 2, good.size() - 1}) {
    oracle::write_bytes(dir / "cut.bin", std::vector<unsigned char>(good.begin(), good.begin() + cut));
    EXPECT_THROW(LshIndex::load(dir / "cut.bin"), FormatError) << cut;
  }
  EXPECT_THROW(LshIndex::load(dir / "missing.bin"), IoError);
}
