#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "jlsh/errors.hpp"
#include "jlsh/family.hpp"

namespace jlsh::cli {

/// Bad command-line input. Maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Parses `name[:key=val[,key=val]*]`. Omitted keys take the family
/// defaults, with fastcp's m defaulting to min(input_dim, 4T).
FamilyKind parse_family_spec(std::string_view text, std::size_t input_dim);

/// Reads `key=value` lines ('#' starts a comment, blank lines ignored). Keys
/// are flag names without the leading dashes; a key may repeat.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Entry point behind the `jlsh` executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jlsh::cli
