#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "jlsh/op_counter.hpp"
#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

/// Row-major d x d' matrix. Row i holds the weights input component i
/// contributes to every output; column j is the j-th projection vector.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

enum class DenseKind { Gaussian, SignBernoulli };

/// Materialized Johnson-Lindenstrauss matrix with i.i.d. entries.
class DenseProjection {
 public:
  DenseProjection(DenseKind kind, Matrix entries, Seed seed);

  std::size_t rows() const noexcept { return entries_.rows; }
  std::size_t cols() const noexcept { return entries_.cols; }
  DenseKind kind() const noexcept { return kind_; }
  Seed seed() const noexcept { return seed_; }
  const Matrix& matrix() const noexcept { return entries_; }

 private:
  DenseKind kind_;
  Matrix entries_;
  Seed seed_;
};

/// Standard normal entries, generated row by row from `seed`.
DenseProjection make_gaussian(std::size_t d, std::size_t d_out, Seed seed);
/// Equiprobable +1/-1 entries.
DenseProjection make_sign_dense(std::size_t d, std::size_t d_out, Seed seed);

/// One signed entry of a feature-hashing row.
struct FhSlot {
  std::uint32_t target = 0;
  std::int8_t sign = 1;  // +1 or -1

  friend bool operator==(const FhSlot&, const FhSlot&) = default;
};

/**
 * Feature-hashing projection: every input dimension i owns k slots, and slot
 * j sends x_i with sign s(i, j) to output coordinate h(i, j).
 *
 * Slots are never stored. They are recomputed from the seed on demand:
 *
 *   row  = hash_combine(mix64(seed ^ 0x3c6ef372fe94f82b), i)
 *   h    = hash_combine(row, j)
 *   target = (h & 0xffffffff) mod d'      sign = -1 if bit 63 of h else +1
 *
 * The modulo bias is below d' / 2^32 and ignored. Slots of one row that hit
 * the same target merge by signed summation, so materialized entries are
 * integers in [-k, k].
 */
class SparseSignedProjection {
 public:
  SparseSignedProjection(std::size_t d, std::size_t d_out, std::size_t k, Seed seed);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t k() const noexcept { return k_; }
  Seed seed() const noexcept { return seed_; }

  FhSlot slot(std::size_t i, std::size_t j) const noexcept {
    return slot_from_hash(hash_combine(row_hash(i), j));
  }

  std::uint64_t row_hash(std::size_t i) const noexcept { return hash_combine(base_, i); }
  FhSlot slot_from_hash(std::uint64_t h) const noexcept {
    return FhSlot{static_cast<std::uint32_t>((h & 0xffffffffULL) % cols_),
                  static_cast<std::int8_t>((h >> 63) != 0 ? -1 : 1)};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t k_;
  Seed seed_;
  std::uint64_t base_;
};

SparseSignedProjection make_feature_hashing(std::size_t d, std::size_t d_out,
                                            std::size_t k, Seed seed);

/// Caller-supplied feature-hashing slots, k per input dimension, stored
/// row-major (`slots[i * k + j]`).
class ExplicitFhMapping {
 public:
  ExplicitFhMapping(std::size_t d_out, std::size_t k, std::vector<FhSlot> slots);

  /// k = 1 mapping from parallel target/sign lists (signs must be +1 or -1).
  static ExplicitFhMapping single(std::size_t d_out, std::span<const std::uint32_t> targets,
                                  std::span<const int> signs);
  /// Snapshot of the slots a seeded projection would compute.
  static ExplicitFhMapping from(const SparseSignedProjection& projection);

  std::size_t rows() const noexcept { return slots_.size() / k_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t k() const noexcept { return k_; }
  FhSlot slot(std::size_t i, std::size_t j) const noexcept { return slots_[i * k_ + j]; }

 private:
  std::size_t cols_;
  std::size_t k_;
  std::vector<FhSlot> slots_;
};

// Span-level projections: `out` must have cols() entries and is overwritten.
// A non-null counter receives the exact arithmetic performed.
void project(const DenseProjection& p, std::span<const double> x, std::span<double> out,
             OpCounter* counter = nullptr);
void project(const SparseSignedProjection& p, std::span<const double> x,
             std::span<double> out, OpCounter* counter = nullptr);
void project(const ExplicitFhMapping& p, std::span<const double> x, std::span<double> out,
             OpCounter* counter = nullptr);

/// x . M. Throws DimensionError when x.dim() != rows().
RealVector apply(const DenseProjection& p, const RealVector& x, OpCounter* counter = nullptr);
RealVector apply(const SparseSignedProjection& p, const RealVector& x,
                 OpCounter* counter = nullptr);
RealVector apply(const ExplicitFhMapping& p, const RealVector& x, OpCounter* counter = nullptr);
RealVector apply_with_mapping(const ExplicitFhMapping& mapping, const RealVector& x);

/// Reference row-vector times matrix product, no shortcuts.
RealVector apply_dense(const Matrix& m, const RealVector& x);

Matrix materialize(const SparseSignedProjection& p);
Matrix materialize(const ExplicitFhMapping& p);

/// Mean of ||x M||^2 / ||x||^2 over `trials` fresh unit vectors and fresh
/// feature-hashing matrices. Its expectation is k.
double fh_norm_scale_estimate(std::size_t d, std::size_t d_out, std::size_t k, Seed seed,
                              std::size_t trials);

/// Debug dump: `row,col,value` for every nonzero entry, row-major order.
void write_projection_csv(const Matrix& m, const std::filesystem::path& path);

}  // namespace jlsh
