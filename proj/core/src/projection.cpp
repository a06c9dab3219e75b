#include "jlsh/projection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "jlsh/errors.hpp"
#include "jlsh/sampling.hpp"

namespace jlsh {

namespace {

constexpr std::uint64_t kSignMask = 0x8000000000000000ULL;
constexpr std::uint64_t kFhDomain = 0x3c6ef372fe94f82bULL;

void require_shape(std::size_t rows, std::size_t cols, std::size_t x_dim,
                   std::size_t out_dim) {
  if (x_dim != rows) {
    throw DimensionError("projection expects dim " + std::to_string(rows) + ", got " +
                         std::to_string(x_dim));
  }
  if (out_dim != cols) {
    throw DimensionError("projection output buffer has wrong size");
  }
}

void require_positive(std::size_t d, std::size_t d_out) {
  if (d == 0 || d_out == 0) throw DomainError("projection dimensions must be >= 1");
}

// Negates x when `sign_source` has its sign bit set. A bit flip, not a multiply.
inline double apply_sign(double x, double sign_source) {
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(x) ^
                               (std::bit_cast<std::uint64_t>(sign_source) & kSignMask));
}

template <bool kCount>
void project_dense(const DenseProjection& p, std::span<const double> x,
                   std::span<double> out, OpCounter* counter) {
  const Matrix& m = p.matrix();
  std::fill(out.begin(), out.end(), 0.0);
  if (p.kind() == DenseKind::Gaussian) {
    for (std::size_t i = 0; i < m.rows; ++i) {
      const double xi = x[i];
      const double* row = &m.data[i * m.cols];
      for (std::size_t j = 0; j < m.cols; ++j) out[j] += xi * row[j];
    }
    if constexpr (kCount) counter->multiply_adds += m.rows * m.cols;
  } else {
    // +/-1 entries: each term is x_i added or subtracted.
    std::uint64_t subtractions = 0;
    for (std::size_t i = 0; i < m.rows; ++i) {
      const double xi = x[i];
      const double* row = &m.data[i * m.cols];
      for (std::size_t j = 0; j < m.cols; ++j) {
        out[j] += apply_sign(xi, row[j]);
        if constexpr (kCount) subtractions += std::signbit(row[j]) ? 1 : 0;
      }
    }
    if constexpr (kCount) {
      counter->subtractions += subtractions;
      counter->additions += m.rows * m.cols - subtractions;
    }
  }
}

template <bool kCount, class Mapping, class SlotFn>
void project_slots(const Mapping& p, std::span<const double> x, std::span<double> out,
                   OpCounter* counter, SlotFn&& slots_of_row) {
  std::fill(out.begin(), out.end(), 0.0);
  std::uint64_t subtractions = 0;
  const std::size_t k = p.k();
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const double xi = x[i];
    slots_of_row(i, [&](FhSlot s) {
      if (s.sign > 0) {
        out[s.target] += xi;
      } else {
        out[s.target] -= xi;
        if constexpr (kCount) ++subtractions;
      }
    });
  }
  if constexpr (kCount) {
    counter->subtractions += subtractions;
    counter->additions += p.rows() * k - subtractions;
  }
}

template <bool kCount>
void project_fh(const SparseSignedProjection& p, std::span<const double> x,
                std::span<double> out, OpCounter* counter) {
  project_slots<kCount>(p, x, out, counter, [&p](std::size_t i, auto&& emit) {
    const std::uint64_t row = p.row_hash(i);
    for (std::size_t j = 0; j < p.k(); ++j) emit(p.slot_from_hash(hash_combine(row, j)));
  });
}

template <bool kCount>
void project_mapping(const ExplicitFhMapping& p, std::span<const double> x,
                     std::span<double> out, OpCounter* counter) {
  project_slots<kCount>(p, x, out, counter, [&p](std::size_t i, auto&& emit) {
    for (std::size_t j = 0; j < p.k(); ++j) emit(p.slot(i, j));
  });
}

template <class P>
RealVector apply_generic(const P& p, const RealVector& x, OpCounter* counter) {
  std::vector<double> out(p.cols());
  project(p, x.components(), out, counter);
  return RealVector(std::move(out));
}

template <class Mapping>
Matrix materialize_slots(const Mapping& p) {
  Matrix m(p.rows(), p.cols());
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.k(); ++j) {
      const FhSlot s = p.slot(i, j);
      m(i, s.target) += s.sign;
    }
  }
  return m;
}

}  // namespace

DenseProjection::DenseProjection(DenseKind kind, Matrix entries, Seed seed)
    : kind_(kind), entries_(std::move(entries)), seed_(seed) {
  if (entries_.data.size() != entries_.rows * entries_.cols) {
    throw DimensionError("projection entries do not match its shape");
  }
}

DenseProjection make_gaussian(std::size_t d, std::size_t d_out, Seed seed) {
  require_positive(d, d_out);
  Matrix m(d, d_out);
  Rng rng(seed);
  rng.fill_normal(m.data);
  return DenseProjection(DenseKind::Gaussian, std::move(m), seed);
}

DenseProjection make_sign_dense(std::size_t d, std::size_t d_out, Seed seed) {
  require_positive(d, d_out);
  Matrix m(d, d_out);
  Rng rng(seed);
  std::uint64_t bits = 0;
  for (std::size_t n = 0; n < m.data.size(); ++n) {
    if (n % 64 == 0) bits = rng.next_u64();
    m.data[n] = (bits & 1) ? 1.0 : -1.0;
    bits >>= 1;
  }
  return DenseProjection(DenseKind::SignBernoulli, std::move(m), seed);
}

SparseSignedProjection::SparseSignedProjection(std::size_t d, std::size_t d_out,
                                               std::size_t k, Seed seed)
    : rows_(d), cols_(d_out), k_(k), seed_(seed), base_(mix64(seed.value ^ kFhDomain)) {
  require_positive(d, d_out);
  if (k == 0) throw DomainError("feature hashing needs k >= 1");
  if (d_out > 0xffffffffULL) throw DomainError("feature hashing output dim exceeds 2^32");
}

SparseSignedProjection make_feature_hashing(std::size_t d, std::size_t d_out,
                                            std::size_t k, Seed seed) {
  return SparseSignedProjection(d, d_out, k, seed);
}

ExplicitFhMapping::ExplicitFhMapping(std::size_t d_out, std::size_t k,
                                     std::vector<FhSlot> slots)
    : cols_(d_out), k_(k), slots_(std::move(slots)) {
  if (d_out == 0 || k == 0) throw DomainError("mapping needs d' >= 1 and k >= 1");
  if (slots_.empty() || slots_.size() % k != 0) {
    throw DimensionError("mapping slot count must be a positive multiple of k");
  }
  for (const FhSlot& s : slots_) {
    if (s.target >= d_out) throw DomainError("mapping target outside [0, d')");
    if (s.sign != 1 && s.sign != -1) throw DomainError("mapping sign must be +1 or -1");
  }
}

ExplicitFhMapping ExplicitFhMapping::single(std::size_t d_out,
                                            std::span<const std::uint32_t> targets,
                                            std::span<const int> signs) {
  if (targets.size() != signs.size()) {
    throw DimensionError("targets and signs differ in length");
  }
  std::vector<FhSlot> slots(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw DomainError("mapping sign must be +1 or -1");
    slots[i] = FhSlot{targets[i], static_cast<std::int8_t>(signs[i])};
  }
  return ExplicitFhMapping(d_out, 1, std::move(slots));
}

ExplicitFhMapping ExplicitFhMapping::from(const SparseSignedProjection& projection) {
  std::vector<FhSlot> slots;
  slots.reserve(projection.rows() * projection.k());
  for (std::size_t i = 0; i < projection.rows(); ++i) {
    for (std::size_t j = 0; j < projection.k(); ++j) slots.push_back(projection.slot(i, j));
  }
  return ExplicitFhMapping(projection.cols(), projection.k(), std::move(slots));
}

void project(const DenseProjection& p, std::span<const double> x, std::span<double> out,
             OpCounter* counter) {
  require_shape(p.rows(), p.cols(), x.size(), out.size());
  if (counter) {
    project_dense<true>(p, x, out, counter);
  } else {
    project_dense<false>(p, x, out, nullptr);
  }
}

void project(const SparseSignedProjection& p, std::span<const double> x,
             std::span<double> out, OpCounter* counter) {
  require_shape(p.rows(), p.cols(), x.size(), out.size());
  if (counter) {
    project_fh<true>(p, x, out, counter);
  } else {
    project_fh<false>(p, x, out, nullptr);
  }
}

void project(const ExplicitFhMapping& p, std::span<const double> x, std::span<double> out,
             OpCounter* counter) {
  require_shape(p.rows(), p.cols(), x.size(), out.size());
  if (counter) {
    project_mapping<true>(p, x, out, counter);
  } else {
    project_mapping<false>(p, x, out, nullptr);
  }
}

RealVector apply(const DenseProjection& p, const RealVector& x, OpCounter* counter) {
  return apply_generic(p, x, counter);
}

RealVector apply(const SparseSignedProjection& p, const RealVector& x, OpCounter* counter) {
  return apply_generic(p, x, counter);
}

RealVector apply(const ExplicitFhMapping& p, const RealVector& x, OpCounter* counter) {
  return apply_generic(p, x, counter);
}

RealVector apply_with_mapping(const ExplicitFhMapping& mapping, const RealVector& x) {
  return apply(mapping, x);
}

RealVector apply_dense(const Matrix& m, const RealVector& x) {
  if (x.dim() != m.rows) throw DimensionError("apply_dense: dimension mismatch");
  std::vector<double> out(m.cols, 0.0);
  for (std::size_t j = 0; j < m.cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) sum += x[i] * m(i, j);
    out[j] = sum;
  }
  return RealVector(std::move(out));
}

Matrix materialize(const SparseSignedProjection& p) { return materialize_slots(p); }
Matrix materialize(const ExplicitFhMapping& p) { return materialize_slots(p); }

double fh_norm_scale_estimate(std::size_t d, std::size_t d_out, std::size_t k, Seed seed,
                              std::size_t trials) {
  if (trials == 0) throw DomainError("fh_norm_scale_estimate needs trials >= 1");
  double sum = 0.0;
  std::vector<double> w(d_out);
  for (std::size_t t = 0; t < trials; ++t) {
    const RealVector v = sample_unit_vector(d, derive_seed(seed, t, 0));
    const SparseSignedProjection p(d, d_out, k, derive_seed(seed, t, 1));
    project(p, v.components(), w);
    double w_sq = 0.0;
    for (double c : w) w_sq += c * c;
    sum += w_sq / dot(v, v);
  }
  return sum / static_cast<double>(trials);
}

void write_projection_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "row,col,value\n";
  char buf[64];
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double v = m(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << i << ',' << j << ',' << buf << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace jlsh
