#include "jlsh/index.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <unordered_set>

#include "binary_io.hpp"
#include "jlsh/errors.hpp"

namespace jlsh {

namespace {

constexpr char kSnapshotMagic[8] = {'J', 'L', 'S', 'H', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace

CompoundKey CompoundKey::from(std::span<const std::uint64_t> minhashes) {
  std::uint64_t h = mix64(minhashes.size());
  for (std::uint64_t v : minhashes) h = hash_combine(h, v);
  return CompoundKey{h};
}

std::vector<LabeledPoint> label_sequentially(std::vector<RealVector> points) {
  std::vector<LabeledPoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back(LabeledPoint{i, std::move(points[i])});
  }
  return out;
}

LshTable::LshTable(std::uint32_t table_id, std::vector<std::uint64_t> minhash_indices)
    : id_(table_id), indices_(std::move(minhash_indices)) {}

const std::vector<PointId>* LshTable::bucket(CompoundKey key) const {
  const auto it = buckets_.find(key);
  return it == buckets_.end() ? nullptr : &it->second;
}

void LshTable::insert(CompoundKey key, PointId id) { buckets_[key].push_back(id); }

LshIndex::LshIndex(MinhashFamily family, AmplifiedScheme scheme, Seed seed)
    : family_(std::move(family)), scheme_(scheme), seed_(seed) {
  if (scheme_.r == 0 || scheme_.b == 0) throw DomainError("scheme needs r >= 1 and b >= 1");
}

void LshIndex::prepare_functions() {
  const std::uint64_t base = mix64(seed_.value);
  functions_.clear();
  functions_.reserve(scheme_.total());
  tables_.clear();
  tables_.reserve(scheme_.b);
  for (std::uint32_t t = 0; t < scheme_.b; ++t) {
    std::vector<std::uint64_t> indices(scheme_.r);
    for (std::uint32_t s = 0; s < scheme_.r; ++s) {
      indices[s] = base + std::uint64_t{t} * scheme_.r + s;
      functions_.push_back(family_.function(indices[s]));
    }
    tables_.emplace_back(t, std::move(indices));
  }
}

void LshIndex::add_points(std::vector<LabeledPoint> dataset) {
  points_ = std::move(dataset);
  slot_of_id_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].vector.dim() != dim()) {
      throw DimensionError("point " + std::to_string(points_[i].id) + " has dim " +
                           std::to_string(points_[i].vector.dim()) + ", family expects " +
                           std::to_string(dim()));
    }
    if (!slot_of_id_.emplace(points_[i].id, i).second) {
      throw DuplicateIdError("duplicate point id " + std::to_string(points_[i].id));
    }
  }
}

LshIndex LshIndex::build(std::vector<LabeledPoint> dataset, MinhashFamily family,
                         AmplifiedScheme scheme, Seed seed) {
  LshIndex index(std::move(family), scheme, seed);
  index.add_points(std::move(dataset));
  index.prepare_functions();
  for (const LabeledPoint& p : index.points_) {
    for (std::size_t t = 0; t < index.tables_.size(); ++t) {
      index.tables_[t].insert(index.key(t, p.vector.components()), p.id);
    }
  }
  return index;
}

LshIndex LshIndex::build(std::vector<RealVector> dataset, MinhashFamily family,
                         AmplifiedScheme scheme, Seed seed) {
  return build(label_sequentially(std::move(dataset)), std::move(family), scheme, seed);
}

const RealVector& LshIndex::vector(PointId id) const {
  const auto it = slot_of_id_.find(id);
  if (it == slot_of_id_.end()) throw DomainError("unknown point id " + std::to_string(id));
  return points_[it->second].vector;
}

std::vector<std::uint64_t> LshIndex::minhashes(std::size_t table,
                                               std::span<const double> x) const {
  std::vector<std::uint64_t> values(scheme_.r);
  for (std::uint32_t s = 0; s < scheme_.r; ++s) {
    values[s] = functions_[table * scheme_.r + s](x);
  }
  return values;
}

CompoundKey LshIndex::key(std::size_t table, std::span<const double> x) const {
  const auto values = minhashes(table, x);
  return CompoundKey::from(values);
}

CandidateSet LshIndex::query_candidates(const RealVector& q, std::uint32_t max_tables) const {
  if (q.dim() != dim()) {
    throw DimensionError("query has dim " + std::to_string(q.dim()) + ", index expects " +
                         std::to_string(dim()));
  }
  CandidateSet result;
  std::unordered_set<PointId> seen;
  const std::size_t limit = std::min<std::size_t>(max_tables, tables_.size());
  for (std::size_t t = 0; t < limit; ++t) {
    const auto* ids = tables_[t].bucket(key(t, q.components()));
    if (!ids) continue;
    ++result.stats.tables_hit;
    for (PointId id : *ids) {
      if (seen.insert(id).second) result.ids.push_back(id);
    }
  }
  std::sort(result.ids.begin(), result.ids.end());
  result.stats.candidates_examined = result.ids.size();
  return result;
}

std::vector<Neighbor> LshIndex::query_knn(const RealVector& q, std::size_t k_neighbors,
                                          DistanceKind kind, QueryStats* stats,
                                          std::uint32_t max_tables) const {
  if (k_neighbors == 0) throw DomainError("query_knn needs k_neighbors >= 1");
  CandidateSet candidates = query_candidates(q, max_tables);
  std::vector<Neighbor> scored;
  scored.reserve(candidates.ids.size());
  for (PointId id : candidates.ids) {
    scored.push_back({id, distance(q, vector(id), kind)});
  }
  candidates.stats.distance_evaluations = scored.size();
  const auto by_distance_then_id = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };
  const std::size_t keep = std::min(k_neighbors, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), by_distance_then_id);
  scored.resize(keep);
  if (stats) *stats = candidates.stats;
  return scored;
}

std::vector<OccupancyHistogram> LshIndex::occupancy_report() const {
  std::vector<OccupancyHistogram> report;
  report.reserve(tables_.size());
  for (const LshTable& table : tables_) {
    OccupancyHistogram hist;
    for (const auto& [key, ids] : table.buckets()) ++hist[ids.size()];
    report.push_back(std::move(hist));
  }
  return report;
}

std::vector<std::size_t> occupancy_totals(const std::vector<OccupancyHistogram>& report) {
  std::vector<std::size_t> totals;
  totals.reserve(report.size());
  for (const auto& hist : report) {
    std::size_t n = 0;
    for (const auto& [size, count] : hist) n += size * count;
    totals.push_back(n);
  }
  return totals;
}

void LshIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  detail::LeWriter w(out);
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  w.u32(kSnapshotVersion);
  const std::string descriptor = to_descriptor(family_);
  w.u32(static_cast<std::uint32_t>(descriptor.size()));
  w.bytes(descriptor);
  w.u32(scheme_.r);
  w.u32(scheme_.b);
  w.u64(seed_.value);
  w.u64(points_.size());
  w.u32(static_cast<std::uint32_t>(dim()));
  for (const LabeledPoint& p : points_) {
    w.u64(p.id);
    for (double c : p.vector.components()) w.f64(c);
  }
  for (const LshTable& table : tables_) {
    w.u32(table.id());
    for (std::uint64_t idx : table.minhash_indices()) w.u64(idx);
    std::vector<CompoundKey> keys;
    keys.reserve(table.buckets().size());
    for (const auto& [key, ids] : table.buckets()) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    w.u64(keys.size());
    for (CompoundKey key : keys) {
      const auto& ids = *table.bucket(key);
      w.u64(key.value);
      w.u32(static_cast<std::uint32_t>(ids.size()));
      for (PointId id : ids) w.u64(id);
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

LshIndex LshIndex::load(const std::filesystem::path& path) {
  detail::LeReader in(detail::read_all(path.string()));
  const std::string magic = in.bytes(sizeof kSnapshotMagic, "magic");
  if (magic != std::string(kSnapshotMagic, sizeof kSnapshotMagic)) {
    throw FormatError("not a jlsh index snapshot", 0);
  }
  const std::uint64_t version_at = in.offset();
  if (in.u32("version") != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version", version_at);
  }
  const std::uint32_t descriptor_len = in.u32("descriptor length");
  const std::uint64_t descriptor_at = in.offset();
  MinhashFamily family = [&] {
    const std::string text = in.bytes(descriptor_len, "family descriptor");
    try {
      return family_from_descriptor(text);
    } catch (const DomainError& e) {
      throw FormatError(std::string("bad family descriptor: ") + e.what(), descriptor_at);
    }
  }();
  AmplifiedScheme scheme;
  scheme.r = in.u32("r");
  scheme.b = in.u32("b");
  const Seed seed{in.u64("seed")};
  const std::uint64_t n = in.u64("point count");
  const std::uint64_t dim_at = in.offset();
  const std::uint32_t dim = in.u32("dim");
  if (dim != family.input_dim()) {
    throw FormatError("snapshot dim disagrees with its family descriptor", dim_at);
  }
  if (scheme.r == 0 || scheme.b == 0) throw FormatError("snapshot has r or b of zero", dim_at);

  LshIndex index(std::move(family), scheme, seed);
  std::vector<LabeledPoint> points;
  if (dim == 0 || n > in.remaining() / (8 + std::uint64_t{dim} * 8)) {
    throw FormatError("snapshot declares more points than it contains", dim_at);
  }
  points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const PointId id = in.u64("point id");
    std::vector<double> c(dim);
    for (double& v : c) v = in.f64("point component");
    points.push_back({id, RealVector(std::move(c))});
  }
  index.add_points(std::move(points));
  index.prepare_functions();

  for (std::uint32_t t = 0; t < scheme.b; ++t) {
    const std::uint64_t table_at = in.offset();
    if (in.u32("table id") != t) throw FormatError("tables out of order", table_at);
    for (std::uint32_t s = 0; s < scheme.r; ++s) {
      const std::uint64_t at = in.offset();
      if (in.u64("minhash index") != index.tables_[t].minhash_indices()[s]) {
        throw FormatError("minhash index does not match the snapshot seed", at);
      }
    }
    const std::uint64_t bucket_count = in.u64("bucket count");
    for (std::uint64_t k = 0; k < bucket_count; ++k) {
      const CompoundKey key{in.u64("bucket key")};
      const std::uint32_t count = in.u32("bucket size");
      for (std::uint32_t c = 0; c < count; ++c) {
        const std::uint64_t at = in.offset();
        const PointId id = in.u64("bucket id");
        if (!index.slot_of_id_.contains(id)) {
          throw FormatError("bucket refers to unknown point id", at);
        }
        index.tables_[t].insert(key, id);
      }
    }
  }
  if (!in.done()) throw FormatError("trailing bytes after snapshot", in.offset());
  return index;
}

}  // namespace jlsh
