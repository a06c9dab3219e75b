#include "jlsh/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "jlsh/errors.hpp"

namespace jlsh {

namespace {

constexpr const char* kCurveHeader = "distance,p_hat,std_err,trials,seed,kind,family";
constexpr const char* kTable1Header =
    "family,feasible,r,b,total,p1_amp,p2_amp,"
    "p1_hat,p1_std_err,p1_trials,p1_seed,"
    "p2_hat,p2_std_err,p2_trials,p2_seed,"
    "p1_check_hat,p1_check_std_err,p1_check_trials,p1_check_seed,"
    "p2_check_hat,p2_check_std_err,p2_check_trials,p2_check_seed";
constexpr const char* kPrecisionHeader = "family,r,b,recall";
constexpr const char* kKSweepHeader = "k,p_hat,std_err,trials,seed,d,d_out,distance,kind";
constexpr const char* kOpCountsHeader =
    "family,dim,additions,subtractions,multiplications,multiply_adds,comparisons,add_sub,"
    "ns_per_hash";

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string text(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::string estimate_fields(const ProbabilityEstimate& e) {
  return real(e.p_hat) + ',' + real(e.std_err) + ',' + std::to_string(e.trials) + ',' +
         std::to_string(e.seed.value);
}

// Line-oriented reader that knows the byte offset of the current line.
class Rows {
 public:
  Rows(std::istream& in, const char* header) : in_(in) {
    std::string line;
    if (!next_line(line) || line != header) {
      throw FormatError(std::string("expected CSV header '") + header + "'", 0);
    }
  }

  /// Next row split into exactly `columns` fields; false at end of input.
  bool next(std::vector<std::string>& fields, std::size_t columns) {
    std::string line;
    if (!next_line(line)) return false;
    fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw FormatError("expected " + std::to_string(columns) + " CSV fields, got " +
                            std::to_string(fields.size()),
                        line_at_);
    }
    return true;
  }

  double real(const std::string& s) const {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE) fail("bad real '" + s + "'");
    return v;
  }

  std::uint64_t u64(const std::string& s) const {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || *end != '\0' || errno == ERANGE) {
      fail("bad integer '" + s + "'");
    }
    return v;
  }

  std::uint32_t u32(const std::string& s) const {
    const std::uint64_t v = u64(s);
    if (v > 0xffffffffULL) fail("integer '" + s + "' out of range");
    return static_cast<std::uint32_t>(v);
  }

  DistanceKind kind(const std::string& s) const {
    try {
      return parse_distance_kind(s);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  ProbabilityEstimate estimate(const std::vector<std::string>& f, std::size_t at) const {
    return {real(f[at]), real(f[at + 1]), u64(f[at + 2]), Seed{u64(f[at + 3])}};
  }

  [[noreturn]] void fail(const std::string& msg) const { throw FormatError(msg, line_at_); }

 private:
  bool next_line(std::string& line) {
    line_at_ = offset_;
    if (!std::getline(in_, line)) return false;
    offset_ += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::istream& in_;
  std::uint64_t offset_ = 0;
  std::uint64_t line_at_ = 0;
};

void finish(std::ostream& out) {
  if (!out) throw IoError("failed writing CSV");
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV line", 0);
  return fields;
}

void write_csv(std::ostream& out, const CollisionCurve& curve) {
  curve.validate();
  out << kCurveHeader << '\n';
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << real(curve.grid[i]) << ',' << real(curve.p_hat[i]) << ',' << real(curve.std_err[i])
        << ',' << curve.trials << ',' << curve.seed.value << ',' << to_string(curve.kind) << ','
        << text(curve.family) << '\n';
  }
  finish(out);
}

void write_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
  out << kTable1Header << '\n';
  for (const auto& row : rows) {
    out << text(row.family) << ',' << (row.feasible ? 1 : 0) << ',' << row.scheme.r << ','
        << row.scheme.b << ',' << row.scheme.total() << ',' << real(row.p1_amp) << ','
        << real(row.p2_amp) << ',' << estimate_fields(row.p1) << ',' << estimate_fields(row.p2)
        << ',' << estimate_fields(row.p1_check) << ',' << estimate_fields(row.p2_check) << '\n';
  }
  finish(out);
}

void write_csv(std::ostream& out, const std::vector<PrecisionCurve>& curves) {
  out << kPrecisionHeader << '\n';
  for (const auto& c : curves) {
    for (std::size_t b = 0; b < c.recall.size(); ++b) {
      out << text(c.family) << ',' << c.r << ',' << b << ',' << real(c.recall[b]) << '\n';
    }
  }
  finish(out);
}

void write_csv(std::ostream& out, const KSweep& sweep) {
  out << kKSweepHeader << '\n';
  for (const auto& row : sweep.rows) {
    out << row.k << ',' << real(row.estimate.p_hat) << ',' << real(row.estimate.std_err) << ','
        << row.estimate.trials << ',' << row.estimate.seed.value << ',' << sweep.dim << ','
        << sweep.d_out << ',' << real(sweep.distance) << ',' << to_string(sweep.kind) << '\n';
  }
  finish(out);
}

void write_csv(std::ostream& out, const std::vector<OpCountReport>& reports) {
  out << kOpCountsHeader << '\n';
  for (const auto& r : reports) {
    out << text(r.family) << ',' << r.dim << ',' << r.ops.additions << ',' << r.ops.subtractions
        << ',' << r.ops.multiplications << ',' << r.ops.multiply_adds << ','
        << r.ops.comparisons << ',' << r.ops.add_sub() << ',' << real(r.ns_per_hash) << '\n';
  }
  finish(out);
}

template <class T>
void write_csv(const std::filesystem::path& path, const T& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(out, value);
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

template void write_csv(const std::filesystem::path&, const CollisionCurve&);
template void write_csv(const std::filesystem::path&, const std::vector<Table1Row>&);
template void write_csv(const std::filesystem::path&, const std::vector<PrecisionCurve>&);
template void write_csv(const std::filesystem::path&, const KSweep&);
template void write_csv(const std::filesystem::path&, const std::vector<OpCountReport>&);

CollisionCurve read_collision_curve_csv(std::istream& in) {
  Rows rows(in, kCurveHeader);
  CollisionCurve curve;
  std::vector<std::string> f;
  bool first = true;
  while (rows.next(f, 7)) {
    const std::uint64_t trials = rows.u64(f[3]);
    const Seed seed{rows.u64(f[4])};
    const DistanceKind kind = rows.kind(f[5]);
    if (first) {
      curve.trials = trials;
      curve.seed = seed;
      curve.kind = kind;
      curve.family = f[6];
      first = false;
    } else if (trials != curve.trials || seed != curve.seed || kind != curve.kind ||
               f[6] != curve.family) {
      rows.fail("collision curve rows disagree on trials, seed, kind or family");
    }
    curve.grid.push_back(rows.real(f[0]));
    curve.p_hat.push_back(rows.real(f[1]));
    curve.std_err.push_back(rows.real(f[2]));
  }
  try {
    curve.validate();
  } catch (const DomainError& e) {
    throw FormatError(e.what(), 0);
  }
  return curve;
}

std::vector<Table1Row> read_table1_csv(std::istream& in) {
  Rows rows(in, kTable1Header);
  std::vector<Table1Row> out;
  std::vector<std::string> f;
  while (rows.next(f, 23)) {
    Table1Row row;
    row.family = f[0];
    const std::uint64_t feasible = rows.u64(f[1]);
    if (feasible > 1) rows.fail("feasible must be 0 or 1");
    row.feasible = feasible == 1;
    row.scheme = {rows.u32(f[2]), rows.u32(f[3])};
    if (rows.u64(f[4]) != row.scheme.total()) rows.fail("total is not r * b");
    row.p1_amp = rows.real(f[5]);
    row.p2_amp = rows.real(f[6]);
    row.p1 = rows.estimate(f, 7);
    row.p2 = rows.estimate(f, 11);
    row.p1_check = rows.estimate(f, 15);
    row.p2_check = rows.estimate(f, 19);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<PrecisionCurve> read_precision_csv(std::istream& in) {
  Rows rows(in, kPrecisionHeader);
  std::vector<PrecisionCurve> out;
  std::vector<std::string> f;
  while (rows.next(f, 4)) {
    const std::uint32_t r = rows.u32(f[1]);
    const std::uint64_t b = rows.u64(f[2]);
    if (b == 0) {
      out.push_back({f[0], r, {}});
    } else if (out.empty() || out.back().family != f[0] || out.back().r != r ||
               out.back().recall.size() != b) {
      rows.fail("precision rows must run b = 0, 1, 2, ... per family");
    }
    out.back().recall.push_back(rows.real(f[3]));
  }
  return out;
}

KSweep read_k_sweep_csv(std::istream& in) {
  Rows rows(in, kKSweepHeader);
  KSweep sweep;
  std::vector<std::string> f;
  while (rows.next(f, 9)) {
    KSweepRow row;
    row.k = rows.u32(f[0]);
    row.estimate = {rows.real(f[1]), rows.real(f[2]), rows.u64(f[3]), Seed{rows.u64(f[4])}};
    const std::size_t d = rows.u64(f[5]);
    const std::size_t d_out = rows.u64(f[6]);
    const double dist = rows.real(f[7]);
    const DistanceKind kind = rows.kind(f[8]);
    if (sweep.rows.empty()) {
      sweep.dim = d;
      sweep.d_out = d_out;
      sweep.distance = dist;
      sweep.kind = kind;
    } else if (d != sweep.dim || d_out != sweep.d_out || dist != sweep.distance ||
               kind != sweep.kind) {
      rows.fail("k-sweep rows disagree on d, d_out, distance or kind");
    }
    sweep.rows.push_back(row);
  }
  return sweep;
}

std::vector<OpCountReport> read_opcounts_csv(std::istream& in) {
  Rows rows(in, kOpCountsHeader);
  std::vector<OpCountReport> out;
  std::vector<std::string> f;
  while (rows.next(f, 9)) {
    OpCountReport r;
    r.family = f[0];
    r.dim = rows.u64(f[1]);
    r.ops.additions = rows.u64(f[2]);
    r.ops.subtractions = rows.u64(f[3]);
    r.ops.multiplications = rows.u64(f[4]);
    r.ops.multiply_adds = rows.u64(f[5]);
    r.ops.comparisons = rows.u64(f[6]);
    if (rows.u64(f[7]) != r.ops.add_sub()) rows.fail("add_sub is not additions + subtractions");
    r.ns_per_hash = rows.real(f[8]);
    out.push_back(std::move(r));
  }
  return out;
}

std::ifstream open_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace jlsh
