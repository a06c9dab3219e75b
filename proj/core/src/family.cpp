#include "jlsh/family.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "jlsh/errors.hpp"

namespace jlsh {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(std::uint64_t v, const char* what) {
  if (v == 0) throw DomainError(std::string(what) + " must be a positive integer");
}

void require_bits(std::uint32_t bits) {
  require_positive(bits, "bits");
  if (bits > kMaxSignBits) {
    throw DomainError("bits must be <= " + std::to_string(kMaxSignBits));
  }
}

void require_regions(std::uint32_t t) {
  if (t < 2) throw DomainError("T must be >= 2");
}

std::uint64_t range_of(const FamilyKind& kind) {
  return std::visit(
      Overloaded{
          [](const Hyperplane& h) { return std::uint64_t{1} << h.bits; },
          [](const Voronoi& v) { return std::uint64_t{v.T}; },
          [](const CrossPolytope& c) { return 2 * std::uint64_t{c.T}; },
          [](const FeatureHashing& f) { return std::uint64_t{f.T}; },
          [](const DirectionalFH& f) { return std::uint64_t{1} << f.bits; },
          [](const FastCrossPolytope& f) { return 2 * std::uint64_t{f.T}; },
      },
      kind);
}

std::vector<std::pair<std::string, std::uint64_t>> params_of(const FamilyKind& kind) {
  return std::visit(
      Overloaded{
          [](const Hyperplane& h) -> std::vector<std::pair<std::string, std::uint64_t>> {
            return {{"bits", h.bits}};
          },
          [](const Voronoi& v) -> std::vector<std::pair<std::string, std::uint64_t>> {
            return {{"T", v.T}};
          },
          [](const CrossPolytope& c) -> std::vector<std::pair<std::string, std::uint64_t>> {
            return {{"T", c.T}};
          },
          [](const FeatureHashing& f) -> std::vector<std::pair<std::string, std::uint64_t>> {
            return {{"T", f.T}, {"k", f.k}};
          },
          [](const DirectionalFH& f) -> std::vector<std::pair<std::string, std::uint64_t>> {
            return {{"bits", f.bits}, {"k", f.k}};
          },
          [](const FastCrossPolytope& f)
              -> std::vector<std::pair<std::string, std::uint64_t>> {
            return {{"m", f.m}, {"T", f.T}, {"k", f.k}};
          },
      },
      kind);
}

std::uint32_t narrow(std::uint64_t v, const std::string& key) {
  if (v > 0xffffffffULL) throw DomainError(key + " is too large");
  return static_cast<std::uint32_t>(v);
}

std::uint64_t parse_u64(std::string_view text, std::string_view key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError("value of '" + std::string(key) + "' is not an unsigned integer: '" +
                      std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::uint32_t FastCrossPolytope::default_m(std::size_t input_dim, std::uint32_t T) {
  return static_cast<std::uint32_t>(
      std::min<std::uint64_t>(input_dim, 4 * std::uint64_t{T}));
}

void validate(const FamilyKind& kind) {
  std::visit(Overloaded{
                 [](const Hyperplane& h) { require_bits(h.bits); },
                 [](const Voronoi& v) { require_regions(v.T); },
                 [](const CrossPolytope& c) { require_regions(c.T); },
                 [](const FeatureHashing& f) {
                   require_regions(f.T);
                   require_positive(f.k, "k");
                 },
                 [](const DirectionalFH& f) {
                   require_bits(f.bits);
                   require_positive(f.k, "k");
                 },
                 [](const FastCrossPolytope& f) {
                   require_positive(f.m, "m");
                   require_regions(f.T);
                   require_positive(f.k, "k");
                 },
             },
             kind);
}

std::string_view family_name(const FamilyKind& kind) {
  return std::visit(Overloaded{
                        [](const Hyperplane&) { return std::string_view("hyperplane"); },
                        [](const Voronoi&) { return std::string_view("voronoi"); },
                        [](const CrossPolytope&) { return std::string_view("crosspolytope"); },
                        [](const FeatureHashing&) { return std::string_view("fh"); },
                        [](const DirectionalFH&) { return std::string_view("dfh"); },
                        [](const FastCrossPolytope&) { return std::string_view("fastcp"); },
                    },
                    kind);
}

std::string describe(const FamilyKind& kind) {
  std::string out(family_name(kind));
  char sep = ':';
  for (const auto& [key, value] : params_of(kind)) {
    out += sep;
    out += key + "=" + std::to_string(value);
    sep = ',';
  }
  return out;
}

FamilyKind make_family_kind(std::string_view name,
                            const std::map<std::string, std::uint64_t, std::less<>>& params,
                            std::size_t input_dim) {
  std::vector<std::string_view> allowed;
  FamilyKind kind;
  if (name == "hyperplane") {
    kind = Hyperplane{};
    allowed = {"bits"};
  } else if (name == "voronoi") {
    kind = Voronoi{};
    allowed = {"T"};
  } else if (name == "crosspolytope") {
    kind = CrossPolytope{};
    allowed = {"T"};
  } else if (name == "fh") {
    kind = FeatureHashing{};
    allowed = {"T", "k"};
  } else if (name == "dfh") {
    kind = DirectionalFH{};
    allowed = {"bits", "k"};
  } else if (name == "fastcp") {
    kind = FastCrossPolytope{};
    allowed = {"m", "T", "k"};
  } else {
    throw DomainError("unknown family '" + std::string(name) +
                      "' (valid: hyperplane, voronoi, crosspolytope, fh, dfh, fastcp)");
  }
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string valid;
      for (auto a : allowed) valid += (valid.empty() ? "" : ", ") + std::string(a);
      throw DomainError("unknown key '" + key + "' for family " + std::string(name) +
                        " (valid: " + valid + ")");
    }
  }
  auto get = [&params](const char* key, std::uint32_t fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : narrow(it->second, key);
  };
  std::visit(Overloaded{
                 [&](Hyperplane& h) { h.bits = get("bits", h.bits); },
                 [&](Voronoi& v) { v.T = get("T", v.T); },
                 [&](CrossPolytope& c) { c.T = get("T", c.T); },
                 [&](FeatureHashing& f) {
                   f.T = get("T", f.T);
                   f.k = get("k", f.k);
                 },
                 [&](DirectionalFH& f) {
                   f.bits = get("bits", f.bits);
                   f.k = get("k", f.k);
                 },
                 [&](FastCrossPolytope& f) {
                   f.T = get("T", f.T);
                   f.k = get("k", f.k);
                   f.m = get("m", FastCrossPolytope::default_m(input_dim, f.T));
                 },
             },
             kind);
  validate(kind);
  return kind;
}

std::size_t argmax_index(std::span<const double> w, OpCounter* counter) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] > w[best]) best = i;
  }
  if (counter && !w.empty()) counter->comparisons += w.size() - 1;
  return best;
}

std::uint64_t sign_bits(std::span<const double> w, OpCounter* counter) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= 0.0) bits |= std::uint64_t{1} << i;
  }
  if (counter) counter->comparisons += w.size();
  return bits;
}

std::uint64_t cross_polytope_vertex(std::span<const double> w, OpCounter* counter) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (std::abs(w[i]) > std::abs(w[best])) best = i;
  }
  // w.size() - 1 magnitude comparisons plus the sign test.
  if (counter && !w.empty()) counter->comparisons += w.size();
  return 2 * std::uint64_t{best} + (w[best] < 0.0 ? 1 : 0);
}

MinhashFunction::MinhashFunction(FamilyKind kind, std::size_t input_dim, Seed seed)
    : kind_(kind), input_dim_(input_dim), range_(range_of(kind)) {
  std::visit(Overloaded{
                 [&](const Hyperplane& h) { dense_ = make_sign_dense(input_dim, h.bits, seed); },
                 [&](const Voronoi& v) { dense_ = make_gaussian(input_dim, v.T, seed); },
                 [&](const CrossPolytope& c) { dense_ = make_gaussian(input_dim, c.T, seed); },
                 [&](const FeatureHashing& f) {
                   sparse_.emplace(input_dim, f.T, f.k, seed);
                 },
                 [&](const DirectionalFH& f) {
                   sparse_.emplace(input_dim, f.bits, f.k, seed);
                 },
                 [&](const FastCrossPolytope& f) {
                   sparse_.emplace(input_dim, f.m, f.k, derive_seed(seed, 0));
                   dense_ = make_gaussian(f.m, f.T, derive_seed(seed, 1));
                 },
             },
             kind_);
}

std::uint64_t MinhashFunction::operator()(std::span<const double> x,
                                          OpCounter* counter) const {
  if (x.size() != input_dim_) {
    throw DimensionError("minhash expects dim " + std::to_string(input_dim_) + ", got " +
                         std::to_string(x.size()));
  }
  return std::visit(
      Overloaded{
          [&](const Hyperplane& h) {
            std::vector<double> w(h.bits);
            project(*dense_, x, w, counter);
            return sign_bits(w, counter);
          },
          [&](const Voronoi& v) {
            std::vector<double> w(v.T);
            project(*dense_, x, w, counter);
            return std::uint64_t{argmax_index(w, counter)};
          },
          [&](const CrossPolytope& c) {
            std::vector<double> w(c.T);
            project(*dense_, x, w, counter);
            return cross_polytope_vertex(w, counter);
          },
          [&](const FeatureHashing& f) {
            std::vector<double> w(f.T);
            project(*sparse_, x, w, counter);
            return std::uint64_t{argmax_index(w, counter)};
          },
          [&](const DirectionalFH& f) {
            std::vector<double> w(f.bits);
            project(*sparse_, x, w, counter);
            return sign_bits(w, counter);
          },
          [&](const FastCrossPolytope& f) {
            std::vector<double> reduced(f.m);
            project(*sparse_, x, reduced, counter);
            std::vector<double> w(f.T);
            project(*dense_, reduced, w, counter);
            return cross_polytope_vertex(w, counter);
          },
      },
      kind_);
}

MinhashValue MinhashFunction::hash(const RealVector& x) const {
  return {(*this)(x.components()), range_};
}

MinhashFamily::MinhashFamily(FamilyKind kind, std::size_t input_dim, Seed seed)
    : kind_(kind), input_dim_(input_dim), seed_(seed) {
  if (input_dim == 0) throw DomainError("family input dimension must be >= 1");
  validate(kind_);
}

std::uint64_t MinhashFamily::range() const noexcept { return range_of(kind_); }

MinhashFunction MinhashFamily::function(std::uint64_t index) const {
  return MinhashFunction(kind_, input_dim_, derive_seed(seed_, index));
}

MinhashValue family_hash(const MinhashFamily& family, std::uint64_t index,
                         const RealVector& x) {
  if (x.dim() != family.input_dim()) {
    throw DimensionError("family expects dim " + std::to_string(family.input_dim()) +
                         ", got " + std::to_string(x.dim()));
  }
  return family.function(index).hash(x);
}

std::uint64_t family_range(const MinhashFamily& family) { return family.range(); }

double hyperplane_collision_prob(double alpha, std::uint32_t bits) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
    throw DomainError("hyperplane_collision_prob: alpha must lie in [0, pi]");
  }
  if (bits == 0) throw DomainError("hyperplane_collision_prob: bits must be >= 1");
  return std::pow(1.0 - alpha / std::numbers::pi, static_cast<double>(bits));
}

std::string to_descriptor(const MinhashFamily& family) {
  std::string out = "kind=" + std::string(family_name(family.kind()));
  for (const auto& [key, value] : params_of(family.kind())) {
    out += " " + key + "=" + std::to_string(value);
  }
  out += " dim=" + std::to_string(family.input_dim());
  out += " seed=" + std::to_string(family.seed().value);
  return out;
}

MinhashFamily family_from_descriptor(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string token;
  std::string kind;
  std::optional<std::uint64_t> dim;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::uint64_t, std::less<>> params;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DomainError("malformed descriptor token '" + token + "'");
    }
    const std::string key = token.substr(0, eq);
    const std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "kind") {
      kind = std::string(value);
    } else if (key == "dim") {
      dim = parse_u64(value, key);
    } else if (key == "seed") {
      seed = parse_u64(value, key);
    } else if (!params.emplace(key, parse_u64(value, key)).second) {
      throw DomainError("duplicate descriptor key '" + key + "'");
    }
  }
  if (kind.empty() || !dim || !seed) {
    throw DomainError("descriptor needs kind, dim and seed: '" + std::string(text) + "'");
  }
  return MinhashFamily(make_family_kind(kind, params, *dim), *dim, Seed{*seed});
}

}  // namespace jlsh
