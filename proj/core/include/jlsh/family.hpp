#pragma once

#include <cstddef>
#include <cstdint>
#include <concepts>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "jlsh/op_counter.hpp"
#include "jlsh/projection.hpp"
#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

// Family parameterizations. Every field is a positive integer.

/// sign hash over a dense +/-1 matrix with `bits` columns.
struct Hyperplane {
  std::uint32_t bits = 6;
  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
};
/// argmax over T Gaussian projections.
struct Voronoi {
  std::uint32_t T = 64;
  friend bool operator==(const Voronoi&, const Voronoi&) = default;
};
/// index and sign of the largest |.| over T Gaussian projections.
struct CrossPolytope {
  std::uint32_t T = 64;
  friend bool operator==(const CrossPolytope&, const CrossPolytope&) = default;
};
/// argmax over a feature-hashing projection to T outputs, k slots per input.
struct FeatureHashing {
  std::uint32_t T = 64;
  std::uint32_t k = 1;
  friend bool operator==(const FeatureHashing&, const FeatureHashing&) = default;
};
/// sign hash over a feature-hashing projection to `bits` outputs.
struct DirectionalFH {
  std::uint32_t bits = 6;
  std::uint32_t k = 1;
  friend bool operator==(const DirectionalFH&, const DirectionalFH&) = default;
};
/// feature hashing d -> m, then cross-polytope over T Gaussian projections.
struct FastCrossPolytope {
  std::uint32_t m = 128;
  std::uint32_t T = 64;
  std::uint32_t k = 1;
  friend bool operator==(const FastCrossPolytope&, const FastCrossPolytope&) = default;

  static std::uint32_t default_m(std::size_t input_dim, std::uint32_t T);
};

using FamilyKind =
    std::variant<Hyperplane, Voronoi, CrossPolytope, FeatureHashing, DirectionalFH,
                 FastCrossPolytope>;

inline constexpr std::uint32_t kMaxSignBits = 62;

/// Throws DomainError on a zero parameter, bits > 62, or T < 2.
void validate(const FamilyKind& kind);

/// Short name used on the command line: hyperplane, voronoi, crosspolytope,
/// fh, dfh, fastcp.
std::string_view family_name(const FamilyKind& kind);
/// Canonical spec text, e.g. "fh:T=64,k=1". Round-trips through the CLI parser.
std::string describe(const FamilyKind& kind);

/// Builds a kind from a name and explicit parameters. Omitted parameters take
/// the defaults T=64, bits=6, k=1, m=min(input_dim, 4T). Throws DomainError
/// for unknown names or keys.
FamilyKind make_family_kind(std::string_view name,
                            const std::map<std::string, std::uint64_t, std::less<>>& params,
                            std::size_t input_dim);

/// A bucket id together with the bucket count of the function producing it.
struct MinhashValue {
  std::uint64_t value = 0;
  std::uint64_t range = 0;
  friend bool operator==(const MinhashValue&, const MinhashValue&) = default;
};

// Hashes of an already-projected vector w. Ties go to the lowest index and
// sign(0) counts as positive.
std::size_t argmax_index(std::span<const double> w, OpCounter* counter = nullptr);
std::uint64_t sign_bits(std::span<const double> w, OpCounter* counter = nullptr);
/// 2 i + (w_i < 0) for i = argmax |w_i|.
std::uint64_t cross_polytope_vertex(std::span<const double> w, OpCounter* counter = nullptr);

template <class P>
concept Projection = requires(const P& p, const RealVector& x) {
  { apply(p, x) } -> std::same_as<RealVector>;
  { p.cols() } -> std::convertible_to<std::size_t>;
};

template <Projection P>
MinhashValue argmax_hash(const P& projection, const RealVector& x) {
  const RealVector w = apply(projection, x);
  return {argmax_index(w.components()), projection.cols()};
}

/// Requires cols() <= 63.
template <Projection P>
MinhashValue sign_hash(const P& projection, const RealVector& x) {
  const RealVector w = apply(projection, x);
  return {sign_bits(w.components()), std::uint64_t{1} << projection.cols()};
}

template <Projection P>
MinhashValue cross_polytope_hash(const P& projection, const RealVector& x) {
  const RealVector w = apply(projection, x);
  return {cross_polytope_vertex(w.components()), 2 * std::uint64_t{projection.cols()}};
}

/// One member h_i of a family, with its projections materialized (feature
/// hashing stays seed-evaluated). Immutable; safe to share across threads.
class MinhashFunction {
 public:
  std::uint64_t operator()(std::span<const double> x, OpCounter* counter = nullptr) const;
  MinhashValue hash(const RealVector& x) const;
  std::uint64_t range() const noexcept { return range_; }
  std::size_t input_dim() const noexcept { return input_dim_; }

 private:
  friend class MinhashFamily;
  MinhashFunction(FamilyKind kind, std::size_t input_dim, Seed seed);

  FamilyKind kind_;
  std::size_t input_dim_;
  std::uint64_t range_;
  std::optional<DenseProjection> dense_;
  std::optional<SparseSignedProjection> sparse_;
};

/// Seeded, unbounded family of minhash functions over R^input_dim. Function
/// i draws its projections from derive_seed(seed, i).
class MinhashFamily {
 public:
  MinhashFamily(FamilyKind kind, std::size_t input_dim, Seed seed);

  const FamilyKind& kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  Seed seed() const noexcept { return seed_; }
  std::uint64_t range() const noexcept;

  MinhashFunction function(std::uint64_t index) const;

  friend bool operator==(const MinhashFamily&, const MinhashFamily&) = default;

 private:
  FamilyKind kind_;
  std::size_t input_dim_;
  Seed seed_;
};

MinhashValue family_hash(const MinhashFamily& family, std::uint64_t index, const RealVector& x);
std::uint64_t family_range(const MinhashFamily& family);

/// (1 - alpha / pi)^bits: collision probability of `bits` independent
/// random-hyperplane bits at angle alpha.
double hyperplane_collision_prob(double alpha, std::uint32_t bits);

/// Plain-text form "kind=<name> <param>=<v>... dim=<d> seed=<s>".
std::string to_descriptor(const MinhashFamily& family);
MinhashFamily family_from_descriptor(std::string_view text);

}  // namespace jlsh
