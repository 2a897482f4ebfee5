#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fdbf::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kInvariantFailure = 1,
  kUsageError = 2,
  kIoError = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comma-separated list of values or `lo..hi[:step]` ranges, e.g. "2..10",
/// "-120..-90:5", "2,4,8". Ranges are inclusive of hi when it lies on the grid.
std::vector<double> parse_range(std::string_view text, double default_step);
std::vector<int> parse_int_range(std::string_view text, int default_step);

/// Flat `key = value` file; `#` starts a comment. Throws UsageError on a
/// malformed line and IoError when the file cannot be read.
std::map<std::string, std::string> load_key_values(const std::string& path);

/// Shortest representation that parses back to the same double.
std::string format_exact(double x);

/// 10 significant digits, as written to CSV.
std::string format_csv(double x);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdbf::cli
