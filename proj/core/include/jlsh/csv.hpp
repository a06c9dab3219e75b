#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "jlsh/curve.hpp"
#include "jlsh/harness.hpp"

namespace jlsh {

// Experiment artifacts. One header line, then one row per record in the
// order given. Reals use 17 significant digits so a read recovers them
// bit-for-bit; fields containing commas or quotes are double-quoted.
//
//   collision_curve.csv  distance,p_hat,std_err,trials,seed,kind,family
//   table1.csv           family,feasible,r,b,total,p1_amp,p2_amp, then
//                        <e>_hat,<e>_std_err,<e>_trials,<e>_seed for e in
//                        p1, p2, p1_check, p2_check
//   precision_vs_b.csv   family,r,b,recall
//   collision_vs_k.csv   k,p_hat,std_err,trials,seed,d,d_out,distance,kind
//   opcounts.csv         family,dim,additions,subtractions,multiplications,
//                        multiply_adds,comparisons,add_sub,ns_per_hash
//
// A curve with no grid points writes the header alone and reads back with
// only its grid, p_hat and std_err meaningful.

void write_csv(std::ostream& out, const CollisionCurve& curve);
void write_csv(std::ostream& out, const std::vector<Table1Row>& rows);
void write_csv(std::ostream& out, const std::vector<PrecisionCurve>& curves);
void write_csv(std::ostream& out, const KSweep& sweep);
void write_csv(std::ostream& out, const std::vector<OpCountReport>& reports);

/// Writes to `path`, throwing IoError if the file cannot be written.
template <class T>
void write_csv(const std::filesystem::path& path, const T& value);

CollisionCurve read_collision_curve_csv(std::istream& in);
std::vector<Table1Row> read_table1_csv(std::istream& in);
std::vector<PrecisionCurve> read_precision_csv(std::istream& in);
KSweep read_k_sweep_csv(std::istream& in);
std::vector<OpCountReport> read_opcounts_csv(std::istream& in);

/// Opens `path` for reading or throws IoError.
std::ifstream open_csv(const std::filesystem::path& path);

/// Splits one CSV line, undoing the quoting applied by the writers. Throws
/// FormatError on an unterminated quote.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace jlsh
