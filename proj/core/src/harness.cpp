#include "jlsh/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "jlsh/errors.hpp"
#include "jlsh/parallel.hpp"
#include "jlsh/sampling.hpp"

namespace jlsh {

double binomial_std_err(double p, std::uint64_t n) {
  if (n == 0) throw DomainError("binomial_std_err needs n >= 1");
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

void CollisionCurve::validate() const {
  if (p_hat.size() != grid.size() || std_err.size() != grid.size()) {
    throw DomainError("collision curve columns have different lengths");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("collision curve grid must be finite and strictly ascending");
    }
    if (!(p_hat[i] >= 0.0 && p_hat[i] <= 1.0)) {
      throw DomainError("collision curve p_hat must lie in [0, 1]");
    }
    if (!(std_err[i] >= 0.0)) throw DomainError("collision curve std_err must be >= 0");
  }
}

std::vector<double> uniform_grid(DistanceKind kind, std::size_t points) {
  if (points < 2) throw DomainError("uniform_grid needs at least 2 points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double d = static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = distance_from_angle(
        angle_from_distance(d, DistanceKind::EuclideanNormalizedUnitSphere), kind);
  }
  return grid;
}

CollisionCurve estimate_collision_curve(const MinhashFamily& family,
                                        std::span<const double> grid, DistanceKind kind,
                                        std::uint64_t trials, Seed seed, unsigned threads) {
  CollisionCurve curve;
  curve.kind = kind;
  curve.trials = trials;
  curve.seed = seed;
  curve.family = describe(family.kind());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto est =
        estimate_base_probability(family, grid[g], kind, trials, derive_seed(seed, g), threads);
    curve.grid.push_back(grid[g]);
    curve.p_hat.push_back(est.p_hat);
    curve.std_err.push_back(est.std_err);
  }
  curve.validate();
  return curve;
}

ProbabilityEstimate validate_scheme(const MinhashFamily& family, AmplifiedScheme scheme,
                                    double dist, DistanceKind kind, std::uint64_t trials,
                                    Seed seed, unsigned threads) {
  if (trials == 0) throw DomainError("validate_scheme needs trials >= 1");
  if (scheme.r == 0 || scheme.b == 0) throw DomainError("scheme needs r >= 1 and b >= 1");
  const double alpha = angle_from_distance(dist, kind);
  const std::size_t dim = family.input_dim();
  const std::uint64_t hits = parallel_count(trials, threads, [&](std::size_t t) {
    const Seed trial = derive_seed(seed, t);
    const auto [u, v] = sample_pair_at_angle(dim, alpha, trial);
    for (std::uint64_t table = 0; table < scheme.b; ++table) {
      bool all = true;
      for (std::uint64_t s = 0; s < scheme.r && all; ++s) {
        const MinhashFunction h =
            family.function(derive_seed(trial, table * scheme.r + s, 1).value);
        all = h(u.components()) == h(v.components());
      }
      if (all) return true;
    }
    return false;
  });
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, binomial_std_err(p, trials), trials, seed};
}

std::vector<FamilyKind> default_families(std::size_t dim) {
  return {Voronoi{64},
          CrossPolytope{64},
          Hyperplane{6},
          FeatureHashing{64, 1},
          FastCrossPolytope{FastCrossPolytope::default_m(dim, 64), 64, 1},
          DirectionalFH{6, 1}};
}

void ExperimentConfig::validate() const {
  if (dim < 2) throw DomainError("config: dim must be >= 2");
  if (points == 0 || queries == 0 || neighbors == 0) {
    throw DomainError("config: points, queries and neighbors must be >= 1");
  }
  if (neighbors > points) throw DomainError("config: neighbors exceeds points");
  if (!base_path && queries * neighbors > points) {
    throw DomainError("config: synthetic data needs points >= queries * neighbors");
  }
  if (base_path.has_value() != query_path.has_value()) {
    throw DomainError("config: base and query files must be given together");
  }
  if (trials == 0) throw DomainError("config: trials must be >= 1");
  if (r_max == 0 || b_max == 0) throw DomainError("config: r_max and b_max must be >= 1");
  if (precision_tables == 0) throw DomainError("config: precision_tables must be >= 1");
  if (precision_r && *precision_r == 0) throw DomainError("config: precision_r must be >= 1");
  if (threads == 0) throw DomainError("config: threads must be >= 1");
  target.validate();
  if (target.d2 > max_sphere_distance(target.kind)) {
    throw DomainError("config: d2 exceeds the largest distance on the sphere");
  }
  for (const auto& f : families) jlsh::validate(f);
}

std::vector<FamilyKind> ExperimentConfig::resolved_families() const {
  return families.empty() ? default_families(dim) : families;
}

std::vector<Table1Row> table1_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto kinds = config.resolved_families();
  const auto& target = config.target;
  std::vector<Table1Row> rows;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const MinhashFamily family(kinds[i], config.dim, derive_seed(config.seed, i));
    Table1Row row;
    row.family = describe(kinds[i]);
    row.p1 = estimate_base_probability(family, target.d1, target.kind, config.trials,
                                       derive_seed(config.seed, i, 1), config.threads);
    row.p2 = estimate_base_probability(family, target.d2, target.kind, config.trials,
                                       derive_seed(config.seed, i, 2), config.threads);
    try {
      row.scheme =
          solve_parameters(row.p1.p_hat, row.p2.p_hat, target, config.r_max, config.b_max);
      row.feasible = true;
    } catch (const InfeasibleError&) {
      row.feasible = false;
    }
    if (row.feasible) {
      row.p1_amp = amplified_probability(row.p1.p_hat, row.scheme.r, row.scheme.b);
      row.p2_amp = amplified_probability(row.p2.p_hat, row.scheme.r, row.scheme.b);
      if (config.validation_trials > 0) {
        row.p1_check = validate_scheme(family, row.scheme, target.d1, target.kind,
                                       config.validation_trials,
                                       derive_seed(config.seed, i, 3), config.threads);
        row.p2_check = validate_scheme(family, row.scheme, target.d2, target.kind,
                                       config.validation_trials,
                                       derive_seed(config.seed, i, 4), config.threads);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Workload make_planted_workload(std::size_t dim, std::size_t points, std::size_t queries,
                               std::size_t neighbors, double max_distance, DistanceKind kind,
                               Seed seed) {
  if (dim < 2) throw DomainError("planted workload needs dim >= 2");
  if (queries * neighbors > points) {
    throw DomainError("planted workload needs points >= queries * neighbors");
  }
  const double max_angle = angle_from_distance(max_distance, kind);
  Workload w;
  w.queries.reserve(queries);
  for (std::size_t q = 0; q < queries; ++q) {
    w.queries.push_back(sample_unit_vector(dim, derive_seed(seed, 0, q)));
  }
  w.base.reserve(points);
  for (std::size_t q = 0; q < queries; ++q) {
    for (std::size_t j = 0; j < neighbors; ++j) {
      const Seed s = derive_seed(seed, 1, q * neighbors + j);
      const double alpha = max_angle * Rng(s, 0).uniform();
      w.base.push_back(normalize(sample_at_angle_from(w.queries[q], alpha, s)));
    }
  }
  for (std::size_t i = w.base.size(); i < points; ++i) {
    w.base.push_back(sample_unit_vector(dim, derive_seed(seed, 2, i)));
  }
  w.truth = brute_force_knn(w.base, w.queries, neighbors, kind);
  return w;
}

std::vector<GroundTruthEntry> brute_force_knn(std::span<const RealVector> base,
                                              std::span<const RealVector> queries,
                                              std::size_t k, DistanceKind kind,
                                              unsigned threads) {
  if (k == 0) throw DomainError("brute_force_knn needs k >= 1");
  std::vector<GroundTruthEntry> out(queries.size());
  parallel_chunks(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Neighbor> all(base.size());
    for (std::size_t q = begin; q < end; ++q) {
      for (std::size_t i = 0; i < base.size(); ++i) {
        all[i] = {i, distance(queries[q], base[i], kind)};
      }
      const std::size_t keep = std::min(k, all.size());
      std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                        [](const Neighbor& a, const Neighbor& b) {
                          return a.distance < b.distance ||
                                 (a.distance == b.distance && a.id < b.id);
                        });
      out[q].query_id = q;
      out[q].neighbors.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep));
    }
  });
  return out;
}

double recall_at_k(std::span<const Neighbor> found, std::span<const Neighbor> truth) {
  if (truth.empty()) throw DomainError("recall_at_k needs a non-empty truth list");
  std::unordered_set<PointId> ids;
  for (const auto& n : found) ids.insert(n.id);
  std::size_t hit = 0;
  for (const auto& n : truth) hit += ids.contains(n.id) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

Workload load_workload(const ExperimentConfig& config) {
  config.validate();
  if (!config.base_path) {
    return make_planted_workload(config.dim, config.points, config.queries, config.neighbors,
                                 config.target.d1, config.target.kind, config.seed);
  }
  auto take = [&](const std::filesystem::path& path, std::size_t limit) {
    auto v = read_vectors(path);
    if (v.size() > limit) v.erase(v.begin() + static_cast<std::ptrdiff_t>(limit), v.end());
    return config.normalize ? normalize_all(std::move(v)) : v;
  };
  Workload w;
  w.base = take(*config.base_path, config.points);
  w.queries = take(*config.query_path, config.queries);
  if (w.base.empty() || w.queries.empty()) throw DomainError("workload files are empty");
  if (w.base.front().dim() != w.queries.front().dim()) {
    throw DimensionError("base and query files have different dimensions");
  }
  w.truth = brute_force_knn(w.base, w.queries, config.neighbors, config.target.kind,
                            config.threads);
  return w;
}

std::vector<PrecisionCurve> precision_vs_tables(std::span<const PrecisionSetup> setups,
                                                const Workload& workload, std::uint32_t b_max,
                                                DistanceKind kind, Seed seed,
                                                unsigned threads) {
  if (workload.base.empty() || workload.queries.empty()) {
    throw DomainError("precision_vs_tables needs base vectors and queries");
  }
  if (workload.truth.size() != workload.queries.size()) {
    throw DomainError("precision_vs_tables needs ground truth for every query");
  }
  if (b_max == 0) throw DomainError("precision_vs_tables needs b_max >= 1");
  const std::size_t dim = workload.base.front().dim();
  const auto by_distance_then_id = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };

  std::vector<PrecisionCurve> curves;
  for (std::size_t i = 0; i < setups.size(); ++i) {
    const MinhashFamily family(setups[i].kind, dim, derive_seed(seed, i));
    const LshIndex index = LshIndex::build(workload.base, family, {setups[i].r, b_max},
                                           derive_seed(seed, i, 1));
    // recall[q][b], filled per query so the sum below is order-fixed.
    std::vector<std::vector<double>> per_query(workload.queries.size());
    parallel_chunks(workload.queries.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t q = begin; q < end; ++q) {
        const RealVector& query = workload.queries[q];
        const auto& truth = workload.truth[q].neighbors;
        const std::size_t k = truth.size();
        std::unordered_set<PointId> seen;
        std::vector<Neighbor> scored;
        auto& recall = per_query[q];
        recall.assign(b_max + 1, 0.0);
        for (std::uint32_t t = 0; t < b_max; ++t) {
          if (const auto* ids = index.tables()[t].bucket(index.key(t, query.components()))) {
            for (PointId id : *ids) {
              if (seen.insert(id).second) {
                scored.push_back({id, distance(query, index.vector(id), kind)});
              }
            }
          }
          const std::size_t keep = std::min(k, scored.size());
          std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                            scored.end(), by_distance_then_id);
          recall[t + 1] = recall_at_k(std::span(scored).first(keep), truth);
        }
      }
    });
    PrecisionCurve curve;
    curve.family = describe(setups[i].kind);
    curve.r = setups[i].r;
    curve.recall.assign(b_max + 1, 0.0);
    for (std::uint32_t b = 1; b <= b_max; ++b) {
      double sum = 0.0;
      for (const auto& r : per_query) sum += r[b];
      curve.recall[b] = sum / static_cast<double>(per_query.size());
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<PrecisionCurve> precision_vs_tables(const ExperimentConfig& config) {
  config.validate();
  const Workload workload = load_workload(config);
  const auto kinds = config.resolved_families();
  std::vector<PrecisionSetup> setups;
  if (config.precision_r) {
    for (const auto& k : kinds) setups.push_back({k, *config.precision_r});
  } else {
    ExperimentConfig solve = config;
    solve.validation_trials = 0;
    const auto rows = table1_experiment(solve);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (rows[i].feasible) setups.push_back({kinds[i], rows[i].scheme.r});
    }
  }
  return precision_vs_tables(setups, workload, config.precision_tables, config.target.kind,
                             derive_seed(config.seed, 5), config.threads);
}

KSweep collision_vs_k(std::size_t d, std::size_t d_out, std::span<const std::uint32_t> k_list,
                      std::uint64_t trials, Seed seed, double dist, DistanceKind kind,
                      unsigned threads) {
  if (d_out < 2) throw DomainError("collision_vs_k needs d' >= 2");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] == 0 || (i > 0 && k_list[i] <= k_list[i - 1])) {
      throw DomainError("collision_vs_k needs a strictly ascending k list with k >= 1");
    }
  }
  KSweep sweep;
  sweep.dim = d;
  sweep.d_out = d_out;
  sweep.distance = dist;
  sweep.kind = kind;
  // Every k sees the same pairs, so differences between rows are not pair noise.
  const Seed pairs = derive_seed(seed, 0);
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    const FeatureHashing fh{static_cast<std::uint32_t>(d_out), k_list[i]};
    const MinhashFamily family(fh, d, derive_seed(seed, 1, i));
    sweep.rows.push_back(
        {k_list[i], estimate_base_probability(family, dist, kind, trials, pairs, threads)});
  }
  return sweep;
}

namespace {
// Keeps the timed loop from being optimized away.
volatile std::uint64_t benchmark_sink = 0;
}  // namespace

std::vector<OpCountReport> op_count_benchmark(std::span<const FamilyKind> families,
                                              std::size_t d, std::uint64_t trials, Seed seed) {
  if (trials == 0) throw DomainError("op_count_benchmark needs trials >= 1");
  constexpr std::size_t kInputs = 64;
  std::vector<RealVector> inputs;
  inputs.reserve(kInputs);
  for (std::size_t i = 0; i < kInputs; ++i) {
    inputs.push_back(sample_unit_vector(d, derive_seed(seed, 0, i)));
  }
  std::vector<OpCountReport> reports;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const MinhashFamily family(families[f], d, derive_seed(seed, 1, f));
    const MinhashFunction h = family.function(0);
    OpCountReport report;
    report.family = describe(families[f]);
    report.dim = d;
    h(inputs.front().components(), &report.ops);

    std::uint64_t sink = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t t = 0; t < trials; ++t) sink += h(inputs[t % kInputs].components());
    const auto elapsed = std::chrono::steady_clock::now() - start;
    report.ns_per_hash =
        std::chrono::duration<double, std::nano>(elapsed).count() / static_cast<double>(trials);
    benchmark_sink = sink;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace jlsh
