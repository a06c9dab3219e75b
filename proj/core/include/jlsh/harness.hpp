#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jlsh/amplify.hpp"
#include "jlsh/curve.hpp"
#include "jlsh/family.hpp"
#include "jlsh/index.hpp"
#include "jlsh/io.hpp"
#include "jlsh/random.hpp"
#include "jlsh/vector.hpp"

namespace jlsh {

/// `points` distances evenly spaced in normalized euclidean distance over
/// [0, 1], expressed in `kind`.
std::vector<double> uniform_grid(DistanceKind kind, std::size_t points = 21);

/// One single-minhash collision estimate per grid distance. Grid point g uses
/// seed derive_seed(seed, g).
CollisionCurve estimate_collision_curve(const MinhashFamily& family,
                                        std::span<const double> grid, DistanceKind kind,
                                        std::uint64_t trials, Seed seed, unsigned threads = 1);

/// Fresh Monte Carlo check of an amplified scheme: per trial, a new pair at
/// `dist` and r*b new minhashes; success when some table matches on all r.
ProbabilityEstimate validate_scheme(const MinhashFamily& family, AmplifiedScheme scheme,
                                    double dist, DistanceKind kind, std::uint64_t trials,
                                    Seed seed, unsigned threads = 1);

/// The six families compared in the parameter table, at their defaults.
std::vector<FamilyKind> default_families(std::size_t dim);

/// Everything an experiment reads. Outputs are a pure function of it.
struct ExperimentConfig {
  std::size_t dim = 128;
  std::size_t points = 10000;  // synthetic base size
  std::size_t queries = 100;
  std::size_t neighbors = 10;  // the k of recall@k
  std::optional<std::filesystem::path> base_path;   // fvecs/bvecs instead of synthetic
  std::optional<std::filesystem::path> query_path;
  bool normalize = true;
  std::vector<FamilyKind> families;  // empty means default_families(dim)
  SensitivityTarget target;
  std::uint64_t trials = 100000;
  std::uint64_t validation_trials = 10000;  // 0 skips the fresh re-check
  std::uint32_t r_max = kDefaultRMax;
  std::uint32_t b_max = kDefaultBMax;
  std::uint32_t precision_tables = 30;   // b range of the precision curve
  std::optional<std::uint32_t> precision_r;  // fixed r; solved per family when unset
  Seed seed;
  unsigned threads = 1;
  std::filesystem::path out = ".";

  /// Throws DomainError on an inconsistent configuration.
  void validate() const;
  std::vector<FamilyKind> resolved_families() const;
};

struct Table1Row {
  std::string family;
  bool feasible = false;
  AmplifiedScheme scheme{0, 0};
  ProbabilityEstimate p1;  // base collision estimate at d1
  ProbabilityEstimate p2;  // base collision estimate at d2
  double p1_amp = 0.0;     // amplified_probability(p1.p_hat, r, b)
  double p2_amp = 0.0;
  // Fresh Monte Carlo of the whole scheme at d1 and d2; trials == 0 when skipped.
  ProbabilityEstimate p1_check;
  ProbabilityEstimate p2_check;
  friend bool operator==(const Table1Row&, const Table1Row&) = default;
};

/// Estimates each family's base probabilities at d1 and d2 and solves for
/// the cheapest (r, b). Infeasible families come back with feasible=false.
/// Family i is seeded with derive_seed(config.seed, i); its estimates use
/// derive_seed(config.seed, i, 1..4).
std::vector<Table1Row> table1_experiment(const ExperimentConfig& config);

/// Base vectors, queries and their exact nearest neighbors.
struct Workload {
  std::vector<RealVector> base;
  std::vector<RealVector> queries;
  std::vector<GroundTruthEntry> truth;
};

/// Synthetic unit-sphere workload: `points` base vectors, of which
/// queries * neighbors are planted at angles drawn uniformly from
/// [0, angle(max_distance)] around their query; the rest are uniform.
Workload make_planted_workload(std::size_t dim, std::size_t points, std::size_t queries,
                               std::size_t neighbors, double max_distance, DistanceKind kind,
                               Seed seed);

/// Exhaustive k-NN of every query (ascending distance, ties by id).
std::vector<GroundTruthEntry> brute_force_knn(std::span<const RealVector> base,
                                              std::span<const RealVector> queries,
                                              std::size_t k, DistanceKind kind,
                                              unsigned threads = 1);

/// Fraction of `truth` ids present in `found`.
double recall_at_k(std::span<const Neighbor> found, std::span<const Neighbor> truth);

/// Builds the workload named by the config (synthetic or files) with ground truth.
Workload load_workload(const ExperimentConfig& config);

struct PrecisionSetup {
  FamilyKind kind;
  std::uint32_t r = 1;
};

struct PrecisionCurve {
  std::string family;
  std::uint32_t r = 0;
  std::vector<double> recall;  // recall[b] for b = 0 .. b_max; recall[0] == 0
  friend bool operator==(const PrecisionCurve&, const PrecisionCurve&) = default;
};

/// Mean recall@k of query_knn against the workload truth as the first b
/// tables of a single b_max-table index are consulted. Setup i uses family
/// seed derive_seed(seed, i).
std::vector<PrecisionCurve> precision_vs_tables(std::span<const PrecisionSetup> setups,
                                                const Workload& workload, std::uint32_t b_max,
                                                DistanceKind kind, Seed seed,
                                                unsigned threads = 1);
/// Config-level form: loads the workload and takes r from precision_r or
/// from table1_experiment.
std::vector<PrecisionCurve> precision_vs_tables(const ExperimentConfig& config);

struct KSweepRow {
  std::uint32_t k = 0;
  ProbabilityEstimate estimate;
  friend bool operator==(const KSweepRow&, const KSweepRow&) = default;
};

struct KSweep {
  std::size_t dim = 0;
  std::size_t d_out = 0;
  double distance = 0.0;
  DistanceKind kind = DistanceKind::EuclideanNormalizedUnitSphere;
  std::vector<KSweepRow> rows;
  friend bool operator==(const KSweep&, const KSweep&) = default;
};

/// FeatureHashing(T=d_out, k) collision rate at one distance, for each k.
KSweep collision_vs_k(std::size_t d, std::size_t d_out, std::span<const std::uint32_t> k_list,
                      std::uint64_t trials, Seed seed, double dist = 0.5,
                      DistanceKind kind = DistanceKind::EuclideanNormalizedUnitSphere,
                      unsigned threads = 1);

struct OpCountReport {
  std::string family;
  std::size_t dim = 0;
  OpCounter ops;                 // exact, per minhash evaluation
  double ns_per_hash = 0.0;      // wall clock, informational
  friend bool operator==(const OpCountReport&, const OpCountReport&) = default;
};

/// Counts the arithmetic of one minhash evaluation per family and times
/// `trials` uninstrumented evaluations.
std::vector<OpCountReport> op_count_benchmark(std::span<const FamilyKind> families,
                                              std::size_t d, std::uint64_t trials, Seed seed);

}  // namespace jlsh
