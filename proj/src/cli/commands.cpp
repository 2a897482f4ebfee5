#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fdbf/beamform.hpp"
#include "fdbf/channel.hpp"
#include "fdbf/cli.hpp"
#include "fdbf/experiment.hpp"
#include "fdbf/oracle.hpp"

namespace fdbf::cli {
namespace {

namespace fs = std::filesystem;
using Raw = std::map<std::string, std::string>;

// Keys a config file may set; flag --foo-bar maps to key foo_bar.
const std::set<std::string> kConfigKeys = {
    "nt",        "nr",          "rho_db",    "c_db",      "k_db",     "omega_db",      "pd_dbm",
    "rn_dbm",    "trials",      "seed",      "threads",   "out_dir",  "grid_points",   "instances",
    "samples",   "repeats",     "perturb_alpha", "threshold_model", "eps_offset_db",
};
// Written into manifests for the reader; ignored on load.
const std::set<std::string> kMetaKeys = {"command", "version", "timestamp", "outputs", "axis1", "axis2"};

struct Settings {
  SystemConfig cfg;
  std::vector<int> nt;
  std::vector<double> rho_db;
  std::vector<double> c_db;
  bool rho_given = false;
  int threads = 0;
  fs::path out_dir = ".";
  int grid_points = 0;
  int instances = 0;
  int samples = 0;
  int repeats = 0;
  double perturb_alpha = 0;
};

class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  Options& add(const std::string& flag, const std::string& help) {
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    app_->add_option_function<std::string>(flag, [this, key](const std::string& v) { flags_[key] = v; }, help);
    return *this;
  }

  Raw merged() const {
    Raw raw;
    if (auto it = flags_.find("config"); it != flags_.end()) {
      for (auto& [k, v] : load_key_values(it->second)) {
        if (kMetaKeys.count(k)) continue;
        if (!kConfigKeys.count(k)) throw UsageError("unknown key '" + k + "' in " + it->second);
        raw[k] = v;
      }
    }
    for (const auto& [k, v] : flags_) {
      if (k != "config") raw[k] = v;
    }
    return raw;
  }

 private:
  CLI::App* app_;
  Raw flags_;
};

double to_double(const Raw& raw, const std::string& key, double fallback) {
  auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  const auto xs = parse_range(it->second, 1.0);
  if (xs.size() != 1) throw UsageError("'" + key + "' takes a single value");
  return xs.front();
}

int to_int(const Raw& raw, const std::string& key, int fallback) {
  auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  const auto xs = parse_int_range(it->second, 1);
  if (xs.size() != 1) throw UsageError("'" + key + "' takes a single value");
  return xs.front();
}

std::uint64_t to_u64(std::string_view s, const std::string& what) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw UsageError(what + ": not an unsigned integer: '" + std::string(s) + "'");
  }
  return x;
}

Settings resolve(const Raw& raw) {
  Settings s;
  SystemConfig& cfg = s.cfg;
  cfg.n_r = to_int(raw, "nr", cfg.n_r);
  cfg.k_factor_db = to_double(raw, "k_db", cfg.k_factor_db);
  cfg.omega_db = to_double(raw, "omega_db", cfg.omega_db);
  cfg.p_d_dbm = to_double(raw, "pd_dbm", cfg.p_d_dbm);
  cfg.r_n_dbm = to_double(raw, "rn_dbm", cfg.r_n_dbm);
  cfg.trials = to_int(raw, "trials", cfg.trials);
  cfg.eps_offset_db = to_double(raw, "eps_offset_db", cfg.eps_offset_db);
  if (auto it = raw.find("threshold_model"); it != raw.end()) {
    try {
      cfg.threshold_model = threshold_model_from_string(it->second);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  if (auto it = raw.find("seed"); it != raw.end()) {
    cfg.seed = to_u64(it->second, "seed");
  } else if (const char* env = std::getenv("FDBF_SEED"); env != nullptr && *env != '\0') {
    cfg.seed = to_u64(env, "FDBF_SEED");
  }

  if (auto it = raw.find("nt"); it != raw.end()) s.nt = parse_int_range(it->second, 2);
  if (auto it = raw.find("rho_db"); it != raw.end()) {
    s.rho_db = parse_range(it->second, 10.0);
    s.rho_given = true;
  }
  if (auto it = raw.find("c_db"); it != raw.end()) s.c_db = parse_range(it->second, 10.0);

  s.threads = to_int(raw, "threads", 0);
  if (auto it = raw.find("out_dir"); it != raw.end()) s.out_dir = it->second;
  s.grid_points = to_int(raw, "grid_points", 0);
  s.instances = to_int(raw, "instances", 0);
  s.samples = to_int(raw, "samples", 0);
  s.repeats = to_int(raw, "repeats", 0);
  s.perturb_alpha = to_double(raw, "perturb_alpha", 0.0);
  return s;
}

double single(const std::vector<double>& xs, double fallback, const char* key) {
  if (xs.empty()) return fallback;
  if (xs.size() != 1) throw UsageError(std::string("'") + key + "' takes a single value for this command");
  return xs.front();
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_exact(xs[i]);
  return out;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

// Config snapshot shared by all manifests.
std::string manifest_config(const SystemConfig& cfg) {
  std::ostringstream m;
  m << "nr = " << cfg.n_r << "\n"
    << "k_db = " << format_exact(cfg.k_factor_db) << "\n"
    << "omega_db = " << format_exact(cfg.omega_db) << "\n"
    << "pd_dbm = " << format_exact(cfg.p_d_dbm) << "\n"
    << "rn_dbm = " << format_exact(cfg.r_n_dbm) << "\n"
    << "threshold_model = " << to_string(cfg.threshold_model) << "\n"
    << "eps_offset_db = " << format_exact(cfg.eps_offset_db) << "\n"
    << "seed = " << cfg.seed << "\n";
  return m.str();
}

std::string manifest_header(const std::string& command, const std::string& outputs) {
  std::ostringstream m;
  m << "# fdbf run manifest. Reproduce with: fdbf " << command << " --config <this file>\n"
    << "command = " << command << "\n"
    << "version = " << kVersion << "\n"
    << "timestamp = " << utc_timestamp() << "\n"
    << "outputs = " << outputs << "\n";
  return m.str();
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Raw& raw, std::ostream& out) {
  Settings s = resolve(raw);
  SweepAxes axes;
  axes.n_t = s.nt.empty() ? std::vector<int>{2, 4, 6, 8, 10} : s.nt;
  axes.c_db = s.c_db.empty() ? std::vector<double>{s.cfg.c_db} : s.c_db;
  if (s.rho_given) {
    axes.rho_db = s.rho_db;
  } else if (axes.c_db.size() > 1) {
    axes.rho_db = {s.cfg.rho_db};  // a c sweep is taken at a single SNR
  } else {
    axes.rho_db = {-10.0, 0.0, 10.0, 20.0};
  }
  if (axes.rho_db.size() > 1 && axes.c_db.size() > 1) {
    throw UsageError("sweep: --rho-db and --c-db cannot both span more than one value");
  }
  for (int n : axes.n_t) {
    if (n < 1) throw UsageError("sweep: antenna counts must be >= 1");
  }
  const bool c_axis = axes.c_db.size() > 1;

  SweepResult result;
  try {
    s.cfg.n_t = axes.n_t.front();
    s.cfg.validate();
    result = run_sweep(s.cfg, axes, s.threads);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::string tg = "axis1,axis2,metric,ci_halfwidth,trials,seed\n";
  std::string ps = tg;
  for (const auto& p : result.points) {
    const std::string prefix = std::to_string(p.n_t) + "," + format_csv(c_axis ? p.c_db : p.rho_db) + ",";
    const std::string suffix = "," + std::to_string(p.trials) + "," + std::to_string(result.seed) + "\n";
    tg += prefix + format_csv(p.tg_mean) + "," + format_csv(p.tg_ci) + suffix;
    ps += prefix + format_csv(p.ps_mean) + "," + format_csv(p.ps_ci) + suffix;
  }

  std::string manifest = manifest_header("sweep", "tg.csv,ps.csv");
  manifest += std::string("axis1 = nt\naxis2 = ") + (c_axis ? "c_db" : "rho_db") + "\n";
  manifest += "nt = " + join(axes.n_t) + "\n";
  manifest += "rho_db = " + join(axes.rho_db) + "\n";
  manifest += "c_db = " + join(axes.c_db) + "\n";
  manifest += "trials = " + std::to_string(s.cfg.trials) + "\n";
  manifest += manifest_config(s.cfg);

  ensure_dir(s.out_dir);
  write_file(s.out_dir / "tg.csv", tg);
  write_file(s.out_dir / "ps.csv", ps);
  write_file(s.out_dir / "manifest.cfg", manifest);

  int degenerate = 0;
  for (const auto& p : result.points) degenerate += p.degenerate;
  out << "sweep: " << result.points.size() << " grid points x " << result.trials << " trials -> "
      << (s.out_dir / "tg.csv").string() << ", " << (s.out_dir / "ps.csv").string();
  if (degenerate > 0) out << " (" << degenerate << " degenerate trials excluded)";
  out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Raw& raw, std::ostream& out) {
  Settings s = resolve(raw);
  const std::vector<int> nts = s.nt.empty() ? std::vector<int>{2, 4, 8} : s.nt;
  const int instances = s.instances > 0 ? s.instances : 100;
  const int grid_points = s.grid_points > 0 ? s.grid_points : 10000;
  const int samples = s.samples > 0 ? s.samples : 1000;
  s.cfg.c_db = single(s.c_db, s.cfg.c_db, "c_db");
  const double rho = db_to_linear(single(s.rho_db, s.cfg.rho_db, "rho_db"));
  for (int n : nts) {
    if (n < 1) throw UsageError("verify: antenna counts must be >= 1");
  }
  try {
    s.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  constexpr double kGridTol = 1e-6, kSampleTol = 1e-9, kActivityTol = 1e-6, kFeasTol = 1e-9;
  double worst_grid = INFINITY, worst_sample = INFINITY, worst_activity = 0, worst_si_excess = -INFINITY;
  int failures = 0, grid_skipped = 0;

  for (int i = 0; i < instances; ++i) {
    SystemConfig cfg = s.cfg;
    cfg.n_t = nts[static_cast<std::size_t>(i) % nts.size()];
    const RngState stream{cfg.seed, static_cast<std::uint64_t>(i)};
    const auto r = draw_realization<double>(cfg, stream);

    auto sol = optimal(r.h_d, r.H, r.v, r.epsilon);
    if (s.perturb_alpha != 0.0) {
      const double a = std::clamp(sol.alpha.value_or(0.0) + s.perturb_alpha, 0.0, 1.0);
      try {
        sol = family(a, r.h_d, matvec_adj(r.H, r.v));
      } catch (const DegenerateParallelError&) {
      }
    }
    const double rate_cf = dl_rate(sol.w, r.h_d, rho);
    const double si = si_power(sol.w, r.H, r.v);

    std::vector<std::string> problems;
    worst_si_excess = std::max(worst_si_excess, si - r.epsilon);
    if (!feasible(sol.w, r, kFeasTol)) problems.push_back("closed form infeasible");

    // oracle feasibility is relative to eps
    const double oracle_tol = tol::kEq * r.epsilon;
    const auto grid = grid_search(r, static_cast<std::size_t>(grid_points), rho, oracle_tol);
    if (grid.degenerate) {
      ++grid_skipped;
    } else {
      const double slack = rate_cf - grid.best_rate;
      worst_grid = std::min(worst_grid, slack);
      if (slack < -kGridTol) problems.push_back("grid search beats closed form by " + format_csv(-slack));
    }

    const RngState sampler{cfg.seed, static_cast<std::uint64_t>(i) | (std::uint64_t{1} << 63)};
    const auto rnd = random_feasible_search(r, static_cast<std::size_t>(samples), sampler, rho, oracle_tol);
    const double slack = rate_cf - rnd.best_rate;
    worst_sample = std::min(worst_sample, slack);
    if (slack < -kSampleTol) problems.push_back("random sampling beats closed form by " + format_csv(-slack));

    if (sol.alpha.value_or(0.0) > 0.0) {
      const double rel = std::abs(si - r.epsilon) / r.epsilon;
      worst_activity = std::max(worst_activity, rel);
      if (rel > kActivityTol) problems.push_back("SI constraint not active (rel. gap " + format_csv(rel) + ")");
    }

    if (!problems.empty()) {
      ++failures;
      out << "FAIL instance " << i << " (seed " << stream.seed << ", stream " << stream.stream << ", n_t " << cfg.n_t
          << "):";
      for (const auto& p : problems) out << " " << p << ";";
      out << "\n";
    }
  }

  out << "verify: " << instances << " instances, grid " << grid_points << " points, " << samples
      << " random samples each\n"
      << "  worst grid slack (rate_cf - rate_grid):     " << format_csv(worst_grid) << " bits/s/Hz\n"
      << "  worst sampling slack (rate_cf - rate_rand): " << format_csv(worst_sample) << " bits/s/Hz\n"
      << "  worst SI activity gap |si - eps| / eps:     " << format_csv(worst_activity) << "\n"
      << "  worst SI excess (si - eps):                 " << format_csv(worst_si_excess) << "\n";
  if (grid_skipped > 0) {
    out << "  grid had no feasible point on " << grid_skipped << " instance(s) (parallel channels)\n";
  }
  out << (failures == 0 ? "verify: OK\n" : "verify: " + std::to_string(failures) + " instance(s) FAILED\n");
  return failures == 0 ? kOk : kInvariantFailure;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const Raw& raw, std::ostream& out) {
  Settings s = resolve(raw);
  const std::vector<int> nts = s.nt.empty() ? std::vector<int>{2, 4, 8, 16, 32, 64} : s.nt;
  const int instances = s.instances > 0 ? s.instances : 128;
  const int grid_points = s.grid_points > 0 ? s.grid_points : 1000;
  const int repeats = s.repeats > 0 ? s.repeats : 9;
  s.cfg.c_db = single(s.c_db, s.cfg.c_db, "c_db");
  for (int n : nts) {
    if (n < 1) throw UsageError("bench: antenna counts must be >= 1");
  }
  try {
    s.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::string csv = "n_t,method,ns_per_solve_median,speedup\n";
  for (int n_t : nts) {
    SystemConfig cfg = s.cfg;
    cfg.n_t = n_t;
    std::vector<ChannelRealization<double>> rs;
    rs.reserve(static_cast<std::size_t>(instances));
    for (int i = 0; i < instances; ++i) rs.push_back(draw_realization<double>(cfg, {cfg.seed, static_cast<std::uint64_t>(i)}));
    const auto t = timing_bench(rs, static_cast<std::size_t>(grid_points), repeats);
    const std::string sp = format_csv(t.speedup);
    csv += std::to_string(n_t) + ",closed_form," + format_csv(t.closed_form_ns_per_solve) + "," + sp + "\n";
    csv += std::to_string(n_t) + ",grid," + format_csv(t.grid_ns_per_solve) + "," + sp + "\n";
    out << "n_t=" << n_t << "  closed_form " << format_csv(t.closed_form_ns_per_solve) << " ns  grid("
        << grid_points << ") " << format_csv(t.grid_ns_per_solve) << " ns  speedup " << sp << "\n";
  }

  std::string manifest = manifest_header("bench", "bench.csv");
  manifest += "nt = " + join(nts) + "\n";
  manifest += "c_db = " + format_exact(s.cfg.c_db) + "\n";
  manifest += "instances = " + std::to_string(instances) + "\n";
  manifest += "grid_points = " + std::to_string(grid_points) + "\n";
  manifest += "repeats = " + std::to_string(repeats) + "\n";
  manifest += manifest_config(s.cfg);

  ensure_dir(s.out_dir);
  write_file(s.out_dir / "bench.csv", csv);
  write_file(s.out_dir / "manifest.cfg", manifest);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Full-duplex transmit beamforming simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto common = [](Options& o) {
    o.add("--config", "flat key = value config file; flags override it")
        .add("--nt", "transmit antennas: value, list or lo..hi[:step]")
        .add("--nr", "receive antennas")
        .add("--rho-db", "downlink SNR in dB")
        .add("--c-db", "receive-chain SIC capability in dB")
        .add("--k-db", "Ricean K-factor of the SI channel in dB")
        .add("--omega-db", "SI channel pathloss in dB")
        .add("--pd-dbm", "downlink transmit power in dBm")
        .add("--rn-dbm", "noise floor in dBm")
        .add("--seed", "RNG seed (falls back to $FDBF_SEED)")
        .add("--threshold-model", "normalized | absolute | pathloss-stacked")
        .add("--eps-offset-db", "additive shift on the SI threshold in dB");
  };

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo throughput gain / power saving sweep");
  Options sweep_opts(sweep);
  common(sweep_opts);
  sweep_opts.add("--trials", "channel realizations per grid point")
      .add("--threads", "worker threads (0 = all cores)")
      .add("--out-dir", "directory for tg.csv, ps.csv and manifest.cfg");

  auto* verify = app.add_subcommand("verify", "certify the closed form against brute-force oracles");
  Options verify_opts(verify);
  common(verify_opts);
  verify_opts.add("--instances", "number of random realizations")
      .add("--grid-points", "alpha grid resolution")
      .add("--samples", "random feasible candidates per realization")
      .add("--threads", "accepted for symmetry; verify runs single-threaded")
      .add("--perturb-alpha", "test hook: add this to alpha* before checking");

  auto* bench = app.add_subcommand("bench", "closed form vs grid search wall time");
  Options bench_opts(bench);
  common(bench_opts);
  bench_opts.add("--instances", "realizations per antenna count")
      .add("--grid-points", "alpha grid resolution of the baseline")
      .add("--repeats", "timed passes; the median is reported")
      .add("--threads", "accepted for symmetry; timing is single-threaded")
      .add("--out-dir", "directory for bench.csv and manifest.cfg");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(sweep_opts.merged(), out);
    if (verify->parsed()) return cmd_verify(verify_opts.merged(), out);
    if (bench->parsed()) return cmd_bench(bench_opts.merged(), out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kUsageError;
}

}  // namespace fdbf::cli
