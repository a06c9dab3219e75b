#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jlsh/amplify.hpp"
#include "jlsh/family.hpp"
#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

using PointId = std::uint64_t;

/// Table key for r minhash values: an order-sensitive chain of hash_combine
/// over the values, starting from mix64(r).
struct CompoundKey {
  std::uint64_t value = 0;

  static CompoundKey from(std::span<const std::uint64_t> minhashes);
  friend bool operator==(CompoundKey, CompoundKey) = default;
  friend auto operator<=>(CompoundKey, CompoundKey) = default;
};

struct CompoundKeyHash {
  std::size_t operator()(CompoundKey k) const noexcept { return static_cast<std::size_t>(k.value); }
};

struct LabeledPoint {
  PointId id = 0;
  RealVector vector;
};

/// Points labelled 0..N-1 in order.
std::vector<LabeledPoint> label_sequentially(std::vector<RealVector> points);

/// One AND-table: the r family indices it hashes with and its buckets.
class LshTable {
 public:
  using Buckets = std::unordered_map<CompoundKey, std::vector<PointId>, CompoundKeyHash>;

  LshTable(std::uint32_t table_id, std::vector<std::uint64_t> minhash_indices);

  std::uint32_t id() const noexcept { return id_; }
  const std::vector<std::uint64_t>& minhash_indices() const noexcept { return indices_; }
  const Buckets& buckets() const noexcept { return buckets_; }
  const std::vector<PointId>* bucket(CompoundKey key) const;

  void insert(CompoundKey key, PointId id);

 private:
  std::uint32_t id_;
  std::vector<std::uint64_t> indices_;
  Buckets buckets_;
};

struct QueryStats {
  std::uint64_t candidates_examined = 0;
  std::uint64_t tables_hit = 0;
  std::uint64_t distance_evaluations = 0;
};

struct Neighbor {
  PointId id = 0;
  double distance = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct CandidateSet {
  std::vector<PointId> ids;  // ascending
  QueryStats stats;
};

/// bucket size -> number of buckets of that size
using OccupancyHistogram = std::map<std::size_t, std::size_t>;

/**
 * Multi-table LSH index. Table t hashes with the r family indices
 * base + t*r .. base + t*r + r - 1, where base = mix64(seed). A point is a
 * candidate for q when, in at least one table, all r of its minhashes equal
 * those of q; the compound key realizes that test with a single lookup.
 *
 * Immutable after build; concurrent queries are safe.
 */
class LshIndex {
 public:
  static constexpr std::uint32_t kAllTables = std::numeric_limits<std::uint32_t>::max();

  /// Throws DimensionError or DuplicateIdError. An empty dataset gives an
  /// index whose queries return nothing.
  static LshIndex build(std::vector<LabeledPoint> dataset, MinhashFamily family,
                        AmplifiedScheme scheme, Seed seed);
  static LshIndex build(std::vector<RealVector> dataset, MinhashFamily family,
                        AmplifiedScheme scheme, Seed seed);

  const MinhashFamily& family() const noexcept { return family_; }
  const AmplifiedScheme& scheme() const noexcept { return scheme_; }
  Seed seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return family_.input_dim(); }
  const std::vector<LshTable>& tables() const noexcept { return tables_; }
  const std::vector<LabeledPoint>& points() const noexcept { return points_; }
  const RealVector& vector(PointId id) const;

  /// The r minhash values of x in table t, in slot order.
  std::vector<std::uint64_t> minhashes(std::size_t table, std::span<const double> x) const;
  CompoundKey key(std::size_t table, std::span<const double> x) const;

  /// Union of q's buckets over the first `max_tables` tables.
  CandidateSet query_candidates(const RealVector& q, std::uint32_t max_tables = kAllTables) const;

  /// Exact distances to the candidates only, ascending, ties by id, at most
  /// k_neighbors entries.
  std::vector<Neighbor> query_knn(const RealVector& q, std::size_t k_neighbors,
                                  DistanceKind kind, QueryStats* stats = nullptr,
                                  std::uint32_t max_tables = kAllTables) const;

  std::vector<OccupancyHistogram> occupancy_report() const;

  /// Little-endian snapshot; see README for the byte layout.
  void save(const std::filesystem::path& path) const;
  static LshIndex load(const std::filesystem::path& path);

 private:
  LshIndex(MinhashFamily family, AmplifiedScheme scheme, Seed seed);
  void prepare_functions();
  void add_points(std::vector<LabeledPoint> dataset);

  MinhashFamily family_;
  AmplifiedScheme scheme_;
  Seed seed_;
  std::vector<MinhashFunction> functions_;  // tables_.size() * r, table-major
  std::vector<LshTable> tables_;
  std::vector<LabeledPoint> points_;
  std::unordered_map<PointId, std::size_t> slot_of_id_;
};

std::vector<std::size_t> occupancy_totals(const std::vector<OccupancyHistogram>& report);

}  // namespace jlsh
