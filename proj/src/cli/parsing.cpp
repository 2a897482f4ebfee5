#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fdbf/cli.hpp"

namespace fdbf::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view s) {
  s = trim(s);
  const std::string buf(s);
  if (buf.empty()) throw UsageError("empty number");
  char* end = nullptr;
  const double x = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) throw UsageError("not a number: '" + buf + "'");
  return x;
}

}  // namespace

std::vector<double> parse_range(std::string_view text, double default_step) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw UsageError("empty item in list '" + std::string(text) + "'");

    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_number(item));
    } else {
      const double lo = parse_number(item.substr(0, dots));
      auto rest = item.substr(dots + 2);
      double step = default_step;
      if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
        step = parse_number(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      const double hi = parse_number(rest);
      if (!(step > 0.0) || !std::isfinite(step)) throw UsageError("range step must be positive: '" + std::string(item) + "'");
      if (!(lo <= hi)) throw UsageError("range must satisfy lo <= hi: '" + std::string(item) + "'");
      const double slack = 1e-9 * step;
      for (long k = 0;; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        if (x > hi + slack) break;
        out.push_back(x);
        if (k > 1'000'000) throw UsageError("range too long: '" + std::string(item) + "'");
      }
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_range(std::string_view text, int default_step) {
  std::vector<int> out;
  for (double x : parse_range(text, default_step)) {
    if (x != std::round(x) || std::abs(x) > 1e9) throw UsageError("expected integers in '" + std::string(text) + "'");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[std::string(key)] = std::string(value);
  }
  return kv;
}

std::string format_exact(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_csv(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace fdbf::cli
