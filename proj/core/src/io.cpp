#include "jlsh/io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "jlsh/errors.hpp"

namespace jlsh {

namespace {

enum class Component { Float32, Byte };

std::vector<RealVector> read_vecs(const std::filesystem::path& path, Component component) {
  detail::LeReader in(detail::read_all(path.string()));
  const std::uint64_t width = component == Component::Float32 ? 4 : 1;
  std::vector<RealVector> out;
  std::int32_t expected_dim = -1;
  while (!in.done()) {
    const std::uint64_t record_at = in.offset();
    if (in.remaining() < 4) {
      throw FormatError("truncated record header in " + path.string(), record_at);
    }
    const std::int32_t dim = in.i32("dimension");
    if (dim <= 0) {
      throw FormatError("non-positive dimension " + std::to_string(dim), record_at);
    }
    if (expected_dim >= 0 && dim != expected_dim) {
      throw FormatError("dimension " + std::to_string(dim) + " differs from first record's " +
                            std::to_string(expected_dim),
                        record_at);
    }
    expected_dim = dim;
    if (in.remaining() < width * static_cast<std::uint64_t>(dim)) {
      throw FormatError("truncated record in " + path.string(), record_at);
    }
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (double& v : c) {
      v = component == Component::Float32 ? static_cast<double>(in.f32("component"))
                                          : static_cast<double>(in.u8("component"));
    }
    try {
      out.emplace_back(std::move(c));
    } catch (const DomainError&) {
      throw FormatError("non-finite component", record_at);
    }
  }
  return out;
}

void require_common_dim(std::span<const RealVector> vectors) {
  for (const auto& v : vectors) {
    if (v.dim() != vectors.front().dim()) {
      throw DimensionError("vector files need one shared dimension");
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::vector<RealVector> read_fvecs(const std::filesystem::path& path) {
  return read_vecs(path, Component::Float32);
}

std::vector<RealVector> read_bvecs(const std::filesystem::path& path) {
  return read_vecs(path, Component::Byte);
}

void write_fvecs(const std::filesystem::path& path, std::span<const RealVector> vectors) {
  require_common_dim(vectors);
  auto out = open_out(path);
  detail::LeWriter w(out);
  for (const auto& v : vectors) {
    w.i32(static_cast<std::int32_t>(v.dim()));
    for (double c : v.components()) w.f32(static_cast<float>(c));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_bvecs(const std::filesystem::path& path, std::span<const RealVector> vectors) {
  require_common_dim(vectors);
  auto out = open_out(path);
  detail::LeWriter w(out);
  for (const auto& v : vectors) {
    w.i32(static_cast<std::int32_t>(v.dim()));
    for (double c : v.components()) {
      if (c < 0.0 || c > 255.0 || c != std::floor(c)) {
        throw DomainError("bvecs components must be integers in [0, 255]");
      }
      w.u8(static_cast<std::uint8_t>(c));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<RealVector> read_vectors(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".fvecs") return read_fvecs(path);
  if (ext == ".bvecs") return read_bvecs(path);
  throw DomainError("unsupported vector file extension '" + ext + "' (expected .fvecs or .bvecs)");
}

std::vector<RealVector> normalize_all(std::vector<RealVector> vectors) {
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (norm(vectors[i]) == 0.0) {
      throw ZeroNormError("vector " + std::to_string(i) + " is zero and cannot be normalized");
    }
    vectors[i] = normalize(vectors[i]);
  }
  return vectors;
}

void write_ground_truth(const std::filesystem::path& path,
                        std::span<const GroundTruthEntry> entries) {
  auto out = open_out(path);
  detail::LeWriter w(out);
  for (const auto& e : entries) {
    w.u64(e.query_id);
    w.u32(static_cast<std::uint32_t>(e.neighbors.size()));
    for (const auto& n : e.neighbors) {
      w.u64(n.id);
      w.f64(n.distance);
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<GroundTruthEntry> read_ground_truth(const std::filesystem::path& path) {
  detail::LeReader in(detail::read_all(path.string()));
  std::vector<GroundTruthEntry> out;
  while (!in.done()) {
    GroundTruthEntry e;
    e.query_id = in.u64("query id");
    const std::uint32_t k = in.u32("neighbor count");
    in.need(std::uint64_t{k} * 16, "neighbors");
    e.neighbors.resize(k);
    for (auto& n : e.neighbors) {
      n.id = in.u64("neighbor id");
      n.distance = in.f64("neighbor distance");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace jlsh
