#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "jlsh/amplify.hpp"
#include "jlsh/csv.hpp"
#include "jlsh/harness.hpp"
#include "jlsh/index.hpp"
#include "jlsh/io.hpp"
#include "jlsh/parallel.hpp"

namespace jlsh::cli {

namespace {

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flags every command accepts.
struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = default_threads();
  std::string config;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& about,
                      Common& common, bool seed_required) {
  CLI::App* sub = app.add_subcommand(name, about);
  auto* seed = sub->add_option("--seed", common.seed, "Master seed; all randomness derives from it");
  if (seed_required) seed->required();
  sub->add_option("--out", common.out, "Output path (stdout when omitted)");
  sub->add_option("--threads", common.threads, "Worker threads; never changes results")
      ->check(CLI::PositiveNumber);
  sub->add_option("--config", common.config,
                  "key=value file of flag defaults; explicit flags win");
  return sub;
}

DistanceKind parse_kind(const std::string& text) {
  try {
    return parse_distance_kind(text);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::vector<FamilyKind> parse_families(const std::vector<std::string>& specs, std::size_t dim) {
  if (specs.empty()) return default_families(dim);
  std::vector<FamilyKind> kinds;
  for (const auto& s : specs) kinds.push_back(parse_family_spec(s, dim));
  return kinds;
}

void add_family_list(CLI::App* sub, std::vector<std::string>& specs) {
  sub->add_option("--family", specs,
                  "Family spec name[:key=val,...]; repeatable (default: the six standard "
                  "families)");
}

void add_target(CLI::App* sub, SensitivityTarget& target, std::string& kind) {
  sub->add_option("--d1", target.d1, "Near distance")->capture_default_str();
  sub->add_option("--d2", target.d2, "Far distance")->capture_default_str();
  sub->add_option("--kind", kind, "Distance kind: euclidean, normalized or angular")
      ->capture_default_str();
  sub->add_option("--target-p1", target.p1_min, "Required collision probability at d1")
      ->capture_default_str();
  sub->add_option("--target-p2", target.p2_max, "Allowed collision probability at d2")
      ->capture_default_str();
}

// Writes through `body` to --out, or to `stdout_stream` when --out is empty.
void emit(const std::string& path, std::ostream& stdout_stream, std::ostream& log,
          const std::string& command, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(stdout_stream);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  body(file);
  file.close();
  if (!file) throw IoError("failed writing " + path);
  log << "jlsh " << command << ": wrote " << path << '\n';
}

std::vector<RealVector> load_vectors(const std::string& path, bool normalize) {
  auto v = read_vectors(path);
  return normalize ? normalize_all(std::move(v)) : v;
}

bool is_flag_token(const std::string& arg) { return arg.size() > 2 && arg.rfind("--", 0) == 0; }

std::string flag_name(const std::string& arg) {
  std::string name = arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos
                                                                      : arg.find('=') - 2);
  if (name.rfind("no-", 0) == 0) name = name.substr(3);
  return name;
}

// Splices config-file values in after the subcommand for every flag the
// command line does not already set.
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (!path || args.empty()) return args;

  std::set<std::string> given;
  for (const auto& a : args) {
    if (is_flag_token(a)) given.insert(flag_name(a));
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(*path)) {
    if (key == "config") throw UsageError("config files cannot name another config file");
    if (given.contains(key)) continue;
    injected.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> merged;
  merged.push_back(args.front());
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Locality-sensitive hashing for angular distance from random projections", "jlsh"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Common common;
  std::map<std::string, std::function<void()>> handlers;

  // gen-data
  struct {
    std::size_t dim = 128, points = 10000, queries = 100, neighbors = 10;
    double max_distance = 0.2;
    std::string kind = "euclidean";
    bool random = false;
  } gen;
  {
    auto* sub = add_command(app, "gen-data",
                            "Write a planted synthetic workload: base.fvecs, queries.fvecs and "
                            "groundtruth.bin under --out",
                            common, false);
    sub->add_option("--dim", gen.dim, "Vector dimension")->capture_default_str();
    sub->add_option("--points", gen.points, "Base vectors")->capture_default_str();
    sub->add_option("--queries", gen.queries, "Query vectors")->capture_default_str();
    sub->add_option("--neighbors", gen.neighbors, "Planted neighbors per query")
        ->capture_default_str();
    sub->add_option("--max-distance", gen.max_distance, "Largest planted-neighbor distance")
        ->capture_default_str();
    sub->add_option("--kind", gen.kind, "Distance kind of --max-distance")->capture_default_str();
    sub->add_flag("--random", gen.random, "Draw the seed from the OS when --seed is absent");
    handlers["gen-data"] = [&] {
      if (common.seed && gen.random) throw UsageError("give either --seed or --random, not both");
      if (!common.seed && !gen.random) throw UsageError("gen-data needs --seed or --random");
      if (common.out.empty()) throw UsageError("gen-data needs --out <directory>");
      if (!common.seed) {
        std::random_device rd;
        common.seed = (std::uint64_t{rd()} << 32) | rd();
        err << "jlsh gen-data: --random drew seed " << *common.seed << '\n';
      }
      const DistanceKind kind = parse_kind(gen.kind);
      const Workload w = make_planted_workload(gen.dim, gen.points, gen.queries, gen.neighbors,
                                               gen.max_distance, kind, Seed{*common.seed});
      const std::filesystem::path dir(common.out);
      std::filesystem::create_directories(dir);
      write_fvecs(dir / "base.fvecs", w.base);
      write_fvecs(dir / "queries.fvecs", w.queries);
      // Ground truth of the vectors as a reader will see them: float32, normalized.
      const auto base = normalize_all(read_fvecs(dir / "base.fvecs"));
      const auto queries = normalize_all(read_fvecs(dir / "queries.fvecs"));
      write_ground_truth(dir / "groundtruth.bin",
                         brute_force_knn(base, queries, gen.neighbors, kind, common.threads));
      err << "jlsh gen-data: wrote " << base.size() << " base and " << queries.size()
          << " query vectors to " << dir.string() << '\n';
    };
  }

  // collision-curve
  struct {
    std::string family;
    std::size_t dim = 128, grid_points = 21;
    std::uint64_t trials = 100000;
    std::string kind = "normalized";
  } curve;
  {
    auto* sub = add_command(app, "collision-curve",
                            "Estimate one family's single-minhash collision curve", common, true);
    sub->add_option("--family", curve.family, "Family spec name[:key=val,...]")->required();
    sub->add_option("--dim", curve.dim, "Vector dimension")->capture_default_str();
    sub->add_option("--trials", curve.trials, "Pairs per grid distance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--grid-points", curve.grid_points, "Grid distances, uniform in [0, 1] "
                                                        "normalized distance")
        ->capture_default_str();
    sub->add_option("--kind", curve.kind, "Distance kind of the grid column")
        ->capture_default_str();
    handlers["collision-curve"] = [&] {
      const DistanceKind kind = parse_kind(curve.kind);
      const Seed seed{*common.seed};
      const MinhashFamily family(parse_family_spec(curve.family, curve.dim), curve.dim,
                                 derive_seed(seed, 0));
      const auto grid = uniform_grid(kind, curve.grid_points);
      const auto c = estimate_collision_curve(family, grid, kind, curve.trials,
                                              derive_seed(seed, 1), common.threads);
      emit(common.out, out, err, "collision-curve", [&](std::ostream& s) { write_csv(s, c); });
    };
  }

  // solve-params
  struct {
    double p1 = 0.0, p2 = 0.0;
    SensitivityTarget target;
    std::uint32_t r_max = kDefaultRMax, b_max = kDefaultBMax;
  } solve;
  {
    auto* sub = add_command(app, "solve-params",
                            "Cheapest (r, b) lifting base probabilities p1, p2 to the targets",
                            common, false);
    sub->add_option("--p1", solve.p1, "Base collision probability at the near distance")
        ->required();
    sub->add_option("--p2", solve.p2, "Base collision probability at the far distance")
        ->required();
    sub->add_option("--target-p1", solve.target.p1_min, "Required amplified p1")
        ->capture_default_str();
    sub->add_option("--target-p2", solve.target.p2_max, "Allowed amplified p2")
        ->capture_default_str();
    sub->add_option("--r-max", solve.r_max, "Largest r searched")->capture_default_str();
    sub->add_option("--b-max", solve.b_max, "Largest b searched")->capture_default_str();
    handlers["solve-params"] = [&] {
      const AmplifiedScheme s = solve_parameters(solve.p1, solve.p2, solve.target, solve.r_max,
                                                 solve.b_max);
      emit(common.out, out, err, "solve-params", [&](std::ostream& o) {
        o << "r=" << s.r << " b=" << s.b << " total=" << s.total()
          << " p1_amp=" << real(amplified_probability(solve.p1, s.r, s.b))
          << " p2_amp=" << real(amplified_probability(solve.p2, s.r, s.b)) << '\n';
      });
    };
  }

  // table1
  ExperimentConfig t1;
  std::vector<std::string> t1_families;
  std::string t1_kind = "euclidean";
  {
    auto* sub = add_command(app, "table1",
                            "Estimate base probabilities at d1, d2 and solve (r, b) per family",
                            common, true);
    add_family_list(sub, t1_families);
    sub->add_option("--dim", t1.dim, "Vector dimension")->capture_default_str();
    sub->add_option("--trials", t1.trials, "Pairs per base-probability estimate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--validation-trials", t1.validation_trials,
                    "Fresh pairs re-checking each scheme (0 skips)")
        ->capture_default_str();
    sub->add_option("--r-max", t1.r_max, "Largest r searched")->capture_default_str();
    sub->add_option("--b-max", t1.b_max, "Largest b searched")->capture_default_str();
    add_target(sub, t1.target, t1_kind);
    handlers["table1"] = [&] {
      t1.target.kind = parse_kind(t1_kind);
      t1.families = parse_families(t1_families, t1.dim);
      t1.seed = Seed{*common.seed};
      t1.threads = common.threads;
      const auto rows = table1_experiment(t1);
      for (const auto& r : rows) {
        err << "jlsh table1: " << r.family << ' '
            << (r.feasible ? "r=" + std::to_string(r.scheme.r) + " b=" +
                                 std::to_string(r.scheme.b) + " total=" +
                                 std::to_string(r.scheme.total())
                           : std::string("infeasible"))
            << '\n';
      }
      emit(common.out, out, err, "table1", [&](std::ostream& s) { write_csv(s, rows); });
    };
  }

  // build-index
  struct {
    std::string data, family;
    std::uint32_t r = 0, b = 0;
    bool normalize = true;
    std::size_t limit = 0;
  } build;
  {
    auto* sub = add_command(app, "build-index", "Build an LSH index over a vector file and save "
                                                "its snapshot to --out",
                            common, true);
    sub->add_option("--data", build.data, "Base vectors (.fvecs or .bvecs)")->required();
    sub->add_option("--family", build.family, "Family spec name[:key=val,...]")->required();
    sub->add_option("--r", build.r, "Minhashes per table")->required()->check(CLI::PositiveNumber);
    sub->add_option("--b", build.b, "Tables")->required()->check(CLI::PositiveNumber);
    sub->add_option("--limit", build.limit, "Use only the first N vectors (0: all)");
    sub->add_flag("--normalize,!--no-normalize", build.normalize,
                  "Unit-normalize vectors on load (default on)");
    handlers["build-index"] = [&] {
      if (common.out.empty()) throw UsageError("build-index needs --out <snapshot path>");
      auto data = load_vectors(build.data, build.normalize);
      if (build.limit > 0 && data.size() > build.limit) {
        data.erase(data.begin() + static_cast<std::ptrdiff_t>(build.limit), data.end());
      }
      if (data.empty()) throw FormatError("no vectors in " + build.data, 0);
      const std::size_t dim = data.front().dim();
      const Seed seed{*common.seed};
      MinhashFamily family(parse_family_spec(build.family, dim), dim, derive_seed(seed, 0));
      const LshIndex index =
          LshIndex::build(std::move(data), std::move(family), {build.r, build.b},
                          derive_seed(seed, 1));
      index.save(common.out);
      err << "jlsh build-index: " << index.size() << " points, " << index.tables().size()
          << " tables, wrote " << common.out << '\n';
    };
  }

  // query
  struct {
    std::string index, vectors, kind = "euclidean";
    std::size_t k = 10;
    std::uint32_t max_tables = LshIndex::kAllTables;
    bool normalize = true;
  } query;
  {
    auto* sub = add_command(app, "query", "k-NN of each query vector through a saved index",
                            common, false);
    sub->add_option("--index", query.index, "Index snapshot")->required();
    sub->add_option("--vector-file", query.vectors, "Query vectors (.fvecs or .bvecs)")
        ->required();
    sub->add_option("--k", query.k, "Neighbors per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--kind", query.kind, "Distance kind for ranking")->capture_default_str();
    sub->add_option("--max-tables", query.max_tables, "Consult only the first N tables");
    sub->add_flag("--normalize,!--no-normalize", query.normalize,
                  "Unit-normalize query vectors on load (default on)");
    handlers["query"] = [&] {
      const DistanceKind kind = parse_kind(query.kind);
      const LshIndex index = LshIndex::load(query.index);
      const auto queries = load_vectors(query.vectors, query.normalize);
      std::vector<std::vector<Neighbor>> results(queries.size());
      parallel_chunks(queries.size(), common.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
          results[q] = index.query_knn(queries[q], query.k, kind, nullptr, query.max_tables);
        }
      });
      emit(common.out, out, err, "query", [&](std::ostream& s) {
        s << "query,rank,id,distance\n";
        for (std::size_t q = 0; q < results.size(); ++q) {
          for (std::size_t r = 0; r < results[q].size(); ++r) {
            s << q << ',' << r << ',' << results[q][r].id << ','
              << real(results[q][r].distance) << '\n';
          }
        }
      });
    };
  }

  // precision-curve
  ExperimentConfig pc;
  std::vector<std::string> pc_families;
  std::string pc_kind = "euclidean", pc_base, pc_queries;
  std::uint32_t pc_r = 0;
  {
    auto* sub = add_command(app, "precision-curve",
                            "Mean recall@k as tables are added, per family", common, true);
    add_family_list(sub, pc_families);
    sub->add_option("--r", pc_r, "Fixed minhashes per table (0: solve per family)");
    sub->add_option("--tables", pc.precision_tables, "Largest b on the curve")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--dim", pc.dim, "Synthetic vector dimension")->capture_default_str();
    sub->add_option("--points", pc.points, "Base vectors (cap when reading files)")
        ->capture_default_str();
    sub->add_option("--queries", pc.queries, "Queries (cap when reading files)")
        ->capture_default_str();
    sub->add_option("--neighbors", pc.neighbors, "k of recall@k")->capture_default_str();
    sub->add_option("--base", pc_base, "Base vector file instead of synthetic data");
    sub->add_option("--query-file", pc_queries, "Query vector file, with --base");
    sub->add_flag("--normalize,!--no-normalize", pc.normalize,
                  "Unit-normalize file vectors on load (default on)");
    sub->add_option("--trials", pc.trials, "Pairs per base-probability estimate when solving r")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_target(sub, pc.target, pc_kind);
    handlers["precision-curve"] = [&] {
      pc.target.kind = parse_kind(pc_kind);
      pc.families = parse_families(pc_families, pc.dim);
      if (!pc_base.empty()) pc.base_path = pc_base;
      if (!pc_queries.empty()) pc.query_path = pc_queries;
      if (pc_r > 0) pc.precision_r = pc_r;
      pc.seed = Seed{*common.seed};
      pc.threads = common.threads;
      const auto curves = precision_vs_tables(pc);
      emit(common.out, out, err, "precision-curve", [&](std::ostream& s) { write_csv(s, curves); });
    };
  }

  // k-sweep
  struct {
    std::size_t dim = 128, d_out = 64;
    std::vector<std::uint32_t> k{1, 2, 4, 8, 16, 32, 64, 128};
    std::uint64_t trials = 100000;
    double distance = 0.5;
    std::string kind = "normalized";
  } ks;
  {
    auto* sub = add_command(app, "k-sweep",
                            "Feature-hashing collision rate at one distance as k grows", common,
                            true);
    sub->add_option("--dim", ks.dim, "Input dimension d")->capture_default_str();
    sub->add_option("--d-out", ks.d_out, "Output dimension d' (the T of the family)")
        ->capture_default_str();
    sub->add_option("--k", ks.k, "Ascending k values")->delimiter(',')->capture_default_str();
    sub->add_option("--trials", ks.trials, "Pairs per k")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--distance", ks.distance, "Pair distance")->capture_default_str();
    sub->add_option("--kind", ks.kind, "Distance kind of --distance")->capture_default_str();
    handlers["k-sweep"] = [&] {
      const auto sweep = collision_vs_k(ks.dim, ks.d_out, ks.k, ks.trials, Seed{*common.seed},
                                        ks.distance, parse_kind(ks.kind), common.threads);
      emit(common.out, out, err, "k-sweep", [&](std::ostream& s) { write_csv(s, sweep); });
    };
  }

  // bench
  struct {
    std::vector<std::string> families;
    std::size_t dim = 128;
    std::uint64_t trials = 10000;
  } bench;
  {
    auto* sub = add_command(app, "bench",
                            "Exact per-hash operation counts and informational ns/hash", common,
                            true);
    add_family_list(sub, bench.families);
    sub->add_option("--dim", bench.dim, "Input dimension")->capture_default_str();
    sub->add_option("--trials", bench.trials, "Timed evaluations per family")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    handlers["bench"] = [&] {
      const auto kinds = parse_families(bench.families, bench.dim);
      const auto reports = op_count_benchmark(kinds, bench.dim, bench.trials, Seed{*common.seed});
      emit(common.out, out, err, "bench", [&](std::ostream& s) { write_csv(s, reports); });
    };
  }

  // inspect-index
  std::string inspect_path;
  {
    auto* sub = add_command(app, "inspect-index", "Summarize a saved index snapshot", common,
                            false);
    sub->add_option("--index", inspect_path, "Index snapshot")->required();
    handlers["inspect-index"] = [&] {
      const LshIndex index = LshIndex::load(inspect_path);
      const auto report = index.occupancy_report();
      emit(common.out, out, err, "inspect-index", [&](std::ostream& s) {
        s << "family: " << to_descriptor(index.family()) << '\n'
          << "r: " << index.scheme().r << '\n'
          << "b: " << index.scheme().b << '\n'
          << "seed: " << index.seed().value << '\n'
          << "points: " << index.size() << '\n'
          << "dim: " << index.dim() << '\n'
          << "table,buckets,largest_bucket,entries\n";
        const auto totals = occupancy_totals(report);
        for (std::size_t t = 0; t < report.size(); ++t) {
          std::size_t buckets = 0;
          for (const auto& [size, count] : report[t]) buckets += count;
          const std::size_t largest = report[t].empty() ? 0 : report[t].rbegin()->first;
          s << t << ',' << buckets << ',' << largest << ',' << totals[t] << '\n';
        }
      });
    };
  }

  try {
    const auto args = apply_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "jlsh: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    handlers.at(command)();
  } catch (const UsageError& e) {
    err << "jlsh " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "jlsh " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "jlsh " << command << ": " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "jlsh " << command << ": " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace jlsh::cli
