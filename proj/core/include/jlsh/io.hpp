#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "jlsh/index.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

// Vector files used by the standard ANN benchmarks. Each record is a
// little-endian int32 dimension followed by that many components: float32 for
// fvecs, uint8 for bvecs. All records must share one dimension. Errors are
// FormatError carrying the byte offset of the offending record.

std::vector<RealVector> read_fvecs(const std::filesystem::path& path);
std::vector<RealVector> read_bvecs(const std::filesystem::path& path);

/// Components are narrowed to float32.
void write_fvecs(const std::filesystem::path& path, std::span<const RealVector> vectors);
/// Components must be integers in [0, 255].
void write_bvecs(const std::filesystem::path& path, std::span<const RealVector> vectors);

/// Reads fvecs or bvecs depending on the file extension.
std::vector<RealVector> read_vectors(const std::filesystem::path& path);

/// Unit-normalizes every vector; throws ZeroNormError naming the first zero row.
std::vector<RealVector> normalize_all(std::vector<RealVector> vectors);

/// Exact k nearest neighbors of one query.
struct GroundTruthEntry {
  std::uint64_t query_id = 0;
  std::vector<Neighbor> neighbors;
  friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

/// Cache layout, repeated per query: u64 query id, u32 k, then k pairs of
/// (u64 neighbor id, f64 distance). Little-endian, no header.
void write_ground_truth(const std::filesystem::path& path,
                        std::span<const GroundTruthEntry> entries);
std::vector<GroundTruthEntry> read_ground_truth(const std::filesystem::path& path);

}  // namespace jlsh
