// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// hard criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fdbf/beamform.hpp"
#include "fdbf/channel.hpp"
#include "fdbf/cli.hpp"
#include "fdbf/experiment.hpp"
#include "fdbf/oracle.hpp"
#include "support/reference.hpp"

namespace {

using namespace fdbf;
using testing::Mat;
using testing::vec;
using testing::Vec;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(const std::string& id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << " " << what << " -- " << detail << std::endl;
  if (!ok) ++g_failures;
}

std::string pad(std::string s, std::size_t width) {
  s.resize(std::max(width, s.size()), ' ');
  return s;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  ChannelRealization<double> r;
  r.h_u = r.v = vec({1});
  r.H = (Mat(1, 2) << 1, 0).finished();
  r.h_d = vec({1, 1}) / std::sqrt(2.0);
  r.epsilon = 0.1;
  const auto s = optimal(r.h_d, r.H, r.v, r.epsilon);
  const double t_solve = seconds_since(t0);
  const Vec w_expected = vec({1, 3}) / std::sqrt(10.0);

  constexpr double tol = 1e-9;
  const double alpha_err = std::abs(s.alpha.value_or(-1) - 2.0 / 3.0);
  const double w_err = (s.w - w_expected).norm();
  const double si_err = std::abs(s.si_power - 0.1);
  const double gain_err = std::abs(s.dl_gain - 0.8);

  constexpr std::size_t kGrid = 1000000;
  const auto grid = grid_search(r, kGrid);
  const double rate = dl_rate(s.w, r.h_d, 1.0);
  const bool grid_ok = std::abs(grid.best_alpha - 2.0 / 3.0) <= 1.0 / (kGrid - 1) + 1e-12 &&
                       grid.best_rate <= rate + 1e-12 && grid.best_rate >= rate - 1e-6;

  const bool ok = alpha_err <= tol && w_err <= tol && si_err <= tol && gain_err <= tol && grid_ok;
  report("C1", ok, "canonical instance exactness",
         "alpha* err " + fmt("%.2e", alpha_err) + ", w err " + fmt("%.2e", w_err) + ", si err " +
             fmt("%.2e", si_err) + ", gain err " + fmt("%.2e", gain_err) + ", grid(1e6) alpha " +
             fmt("%.7f", grid.best_alpha) + ", solve " + fmt("%.1f", t_solve * 1e6) + " us");
}

void criterion2() {
  const auto t0 = Clock::now();
  constexpr int kRealizations = 1000;
  constexpr std::size_t kGrid = 100000;
  const int nts[] = {2, 4, 8};
  std::vector<double> rate_slack(kRealizations), activity(kRealizations, 0.0);
  parallel_for(kRealizations, [&](int i) {
    SystemConfig cfg;  // N_R = 2, K = 10 dB, normalized threshold
    cfg.n_t = nts[i % 3];
    const auto r = draw_realization<double>(cfg, {20260001, static_cast<std::uint64_t>(i)});
    const auto s = optimal(r.h_d, r.H, r.v, r.epsilon);
    const auto grid = grid_search(r, kGrid, 1.0, tol::kEq * r.epsilon);
    rate_slack[static_cast<std::size_t>(i)] = dl_rate(s.w, r.h_d, 1.0) - grid.best_rate;
    if (s.alpha.value_or(0) > 0) {
      activity[static_cast<std::size_t>(i)] = std::abs(si_power(s.w, r.H, r.v) - r.epsilon) / r.epsilon;
    }
  });
  const double worst_slack = *std::min_element(rate_slack.begin(), rate_slack.end());
  const double worst_activity = *std::max_element(activity.begin(), activity.end());
  const double elapsed = seconds_since(t0);
  report("C2", worst_slack >= -1e-6 && worst_activity <= 1e-6 && elapsed <= 60.0,
         "oracle equivalence vs 1e5-point grid (1000 realizations, grid feasibility si <= eps(1+1e-12))",
         "worst rate slack " + fmt("%.3e", worst_slack) + " (>= -1e-6), worst |si-eps|/eps " +
             fmt("%.3e", worst_activity) + " (<= 1e-6), " + fmt("%.1f", elapsed) + " s (<= 60)");
}

void criterion3() {
  const auto t0 = Clock::now();
  constexpr int kRealizations = 100;
  constexpr std::size_t kSamples = 10000;
  std::vector<double> excess(kRealizations);
  parallel_for(kRealizations, [&](int i) {
    SystemConfig cfg;
    cfg.n_t = 2 + 2 * (i % 4);
    const auto r = draw_realization<double>(cfg, {20260003, static_cast<std::uint64_t>(i)});
    const auto s = optimal(r.h_d, r.H, r.v, r.epsilon);
    const auto rnd = random_feasible_search(r, kSamples, {20260004, static_cast<std::uint64_t>(i)}, 1.0,
                                           tol::kEq * r.epsilon);
    excess[static_cast<std::size_t>(i)] = rnd.best_rate - dl_rate(s.w, r.h_d, 1.0);
  });
  const double worst = *std::max_element(excess.begin(), excess.end());
  const double elapsed = seconds_since(t0);
  report("C3", worst <= 1e-9 && elapsed <= 60.0, "global optimality sampling (100 x 1e4 candidates)",
         "max candidate advantage " + fmt("%.3e", worst) + " (<= 1e-9), " + fmt("%.1f", elapsed) + " s");
}

// Shared by C4-C6.
struct TrendRuns {
  SweepResult nt_rho;  // N_T in {2..10}, rho in {-10..20}, c = -110
  SweepResult c_axis;  // N_T in {2..10}, c in {-90..-120}, rho = 0
  double seconds = 0;
};

TrendRuns run_trends() {
  const auto t0 = Clock::now();
  SystemConfig cfg;
  cfg.trials = 10000;
  cfg.seed = 2016;
  TrendRuns t;
  t.nt_rho = run_sweep(cfg, {{2, 4, 6, 8, 10}, {-10, 0, 10, 20}, {-110}}, 0);
  t.c_axis = run_sweep(cfg, {{2, 4, 6, 8, 10}, {0}, {-90, -100, -110, -120}}, 0);
  t.seconds = seconds_since(t0);
  return t;
}

const SweepPoint& at(const SweepResult& r, int n_t, double rho, double c) {
  for (const auto& p : r.points) {
    if (p.n_t == n_t && p.rho_db == rho && p.c_db == c) return p;
  }
  throw std::logic_error("missing grid point");
}

void criterion4(const TrendRuns& t) {
  int violations = 0, degenerate = 0;
  double min_tg = INFINITY;
  for (const auto& p : t.nt_rho.points) {
    violations += p.dominance_violations;
    degenerate += p.degenerate;
    min_tg = std::min(min_tg, p.tg_mean);
  }
  report("C4", violations == 0 && min_tg > 0.0, "per-trial and average dominance over ZF",
         std::to_string(violations) + " trials with rate_opt < rate_zf over " +
             std::to_string(t.nt_rho.points.size() * static_cast<std::size_t>(t.nt_rho.trials)) +
             ", min TG-bar " + fmt("%.4f", min_tg) + " (> 0), degenerate " + std::to_string(degenerate));
}

void criterion5(const TrendRuns& t) {
  const std::vector<int> nts = {2, 4, 6, 8, 10};
  const std::vector<double> rhos = {-10, 0, 10, 20};
  const std::vector<double> cs = {-90, -100, -110, -120};
  std::vector<std::string> broken;

  for (double rho : rhos) {
    for (std::size_t i = 1; i < nts.size(); ++i) {
      if (!(at(t.nt_rho, nts[i], rho, -110).tg_mean < at(t.nt_rho, nts[i - 1], rho, -110).tg_mean)) {
        broken.push_back("TG(N_T) at rho " + fmt("%g", rho));
      }
    }
  }
  for (int n : nts) {
    for (std::size_t i = 1; i < rhos.size(); ++i) {
      if (!(at(t.nt_rho, n, rhos[i], -110).tg_mean < at(t.nt_rho, n, rhos[i - 1], -110).tg_mean)) {
        broken.push_back("TG(rho) at N_T " + std::to_string(n));
      }
    }
  }
  for (std::size_t i = 1; i < nts.size(); ++i) {
    if (!(at(t.nt_rho, nts[i], 0, -110).ps_mean < at(t.nt_rho, nts[i - 1], 0, -110).ps_mean)) {
      broken.push_back("PS(N_T) at N_T " + std::to_string(nts[i]));
    }
  }
  for (int n : nts) {
    for (std::size_t i = 1; i < cs.size(); ++i) {
      const auto& lo = at(t.c_axis, n, 0, cs[i - 1]);
      const auto& hi = at(t.c_axis, n, 0, cs[i]);
      if (!(hi.tg_mean > lo.tg_mean)) broken.push_back("TG(c) at N_T " + std::to_string(n));
      if (!(hi.ps_mean > lo.ps_mean)) broken.push_back("PS(c) at N_T " + std::to_string(n));
    }
  }

  std::ostringstream detail;
  detail << (broken.empty() ? "all orderings strict" : "broken: " + broken.front()) << "; TG(rho=0,c=-110) by N_T:";
  for (int n : nts) detail << " " << fmt("%.4f", at(t.nt_rho, n, 0, -110).tg_mean);
  detail << "; " << fmt("%.1f", t.seconds) << " s (<= 300)";
  report("C5", broken.empty() && t.seconds <= 300.0, "trend reproduction (1e4 trials, shared seeds)", detail.str());
}

void criterion6(const TrendRuns& t) {
  bool identical = true;
  for (const auto& p : t.nt_rho.points) {
    const auto& ref = at(t.nt_rho, p.n_t, -10, p.c_db);
    identical = identical && p.ps_mean == ref.ps_mean && p.ps_ci == ref.ps_ci;
  }
  report("C6", identical, "PS-bar SNR invariance", identical ? "bit-identical across all rho grid points" : "differs");
}

// ---------------------------------------------------------------------------
// C7: quantitative targets and the sensitivity report.

struct Targets {
  double tg_m10, tg_p20, ps_110, tg_120, ps_120;
};

Targets measure(SystemConfig cfg) {
  cfg.trials = 10000;
  cfg.seed = 2016;
  const auto a = run_sweep(cfg, {{2}, {-10, 20}, {-110}}, 0);
  const auto b = run_sweep(cfg, {{2}, {0}, {-120}}, 0);
  return {a.points[0].tg_mean, a.points[1].tg_mean, a.points[0].ps_mean, b.points[0].tg_mean, b.points[0].ps_mean};
}

// Target values (percent) and absolute tolerances (percentage points).
constexpr Targets kTarget{29.66, 11.1, 17.87, 110.21, 36.12};
constexpr Targets kTol{10, 10, 10, 30, 10};

bool hits(const Targets& m) {
  return std::abs(100 * m.tg_m10 - kTarget.tg_m10) <= kTol.tg_m10 &&
         std::abs(100 * m.tg_p20 - kTarget.tg_p20) <= kTol.tg_p20 &&
         std::abs(100 * m.ps_110 - kTarget.ps_110) <= kTol.ps_110 &&
         std::abs(100 * m.tg_120 - kTarget.tg_120) <= kTol.tg_120 &&
         std::abs(100 * m.ps_120 - kTarget.ps_120) <= kTol.ps_120;
}

std::string row(const Targets& m) {
  return fmt("%8.2f", 100 * m.tg_m10) + fmt("%9.2f", 100 * m.tg_p20) + fmt("%9.2f", 100 * m.ps_110) +
         fmt("%10.2f", 100 * m.tg_120) + fmt("%9.2f", 100 * m.ps_120) + (hits(m) ? "   yes" : "   no");
}

void criterion7() {
  const Targets base = measure(SystemConfig{});
  if (hits(base)) {
    report("C7", true, "quantitative targets (normalized threshold, N_R=2, K=10 dB)", row(base));
    return;
  }

  std::cout << "\n  Sensitivity report: N_T=2, values in percent; targets "
            << "TG(-10dB)=29.66+-10 TG(20dB)=11.1+-10 PS(-110)=17.87+-10 TG(-120)=110.21+-30 PS(-120)=36.12+-10\n"
            << "  threshold model      K_dB  offset   TG-10dB  TG+20dB  PS(-110)  TG(-120)  PS(-120)  hit\n";
  bool any_variant_hits = false;
  for (auto model : {ThresholdModel::kNormalized, ThresholdModel::kAbsolute, ThresholdModel::kPathlossStacked}) {
    for (double k : {0.0, 10.0, 20.0}) {
      SystemConfig cfg;
      cfg.threshold_model = model;
      cfg.k_factor_db = k;
      const auto m = measure(cfg);
      any_variant_hits = any_variant_hits || hits(m);
      std::cout << "  " << pad(std::string(to_string(model)), 18) << fmt("%6.0f", k)
                << fmt("%8.1f", 0.0) << "  " << row(m) << "\n";
    }
  }
  double best_offset = NAN;
  for (double off = -20; off <= 0; off += 2) {
    SystemConfig cfg;
    cfg.eps_offset_db = off;
    const auto m = measure(cfg);
    if (hits(m) && std::isnan(best_offset)) best_offset = off;
    std::cout << "  " << pad("normalized", 18) << fmt("%6.0f", cfg.k_factor_db) << fmt("%8.1f", off) << "  "
              << row(m) << "\n";
  }
  std::cout << std::endl;

  // Targets missed under the default threshold; the sensitivity report above is the criterion's required fallback.
  report("C7", true, "quantitative targets (soft; fallback sensitivity report emitted)",
         "default threshold MISSES targets: " + row(base) + "; a listed variant hits: " +
             (any_variant_hits ? "yes" : "no") +
             (std::isnan(best_offset) ? "" : "; first hitting eps offset " + fmt("%.0f", best_offset) + " dB"));
}

// ---------------------------------------------------------------------------

void criterion8() {
  const auto t0 = Clock::now();
  const std::vector<int> nts = {2, 4, 8, 16, 32, 64};
  std::vector<TimingResult> times;
  for (int n_t : nts) {
    SystemConfig cfg;
    cfg.n_t = n_t;
    std::vector<ChannelRealization<double>> rs;
    for (std::uint64_t i = 0; i < 200; ++i) rs.push_back(draw_realization<double>(cfg, {808, i}));
    times.push_back(timing_bench(rs, 1000, 15));
  }
  // At most linear in N_T * N_R (N_R fixed): t(n_j)/t(n_i) <= 1.25 n_j/n_i for all i < j;
  // the 25% allowance absorbs timer noise.
  bool linear = true;
  for (std::size_t i = 0; i < nts.size(); ++i) {
    for (std::size_t j = i + 1; j < nts.size(); ++j) {
      const double growth = times[j].closed_form_ns_per_solve / times[i].closed_form_ns_per_solve;
      linear = linear && growth <= 1.25 * nts[j] / nts[i];
    }
  }
  double min_speedup = INFINITY;
  std::ostringstream detail;
  detail << "closed-form ns/solve by N_T:";
  for (std::size_t i = 0; i < nts.size(); ++i) {
    min_speedup = std::min(min_speedup, times[i].speedup);
    detail << " " << nts[i] << ":" << fmt("%.0f", times[i].closed_form_ns_per_solve);
  }
  const double elapsed = seconds_since(t0);
  detail << "; min speedup vs 1e3 grid " << fmt("%.1f", min_speedup) << " (>= 10); " << fmt("%.1f", elapsed)
         << " s (<= 120)";
  report("C8", linear && min_speedup >= 10.0 && elapsed <= 120.0, "complexity: linear scaling and >= 10x speedup",
         detail.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion9() {
  const fs::path dir = fs::temp_directory_path() / "fdbf_acceptance_c9";
  fs::remove_all(dir);
  std::ostringstream sink;
  auto sweep = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  const std::vector<std::string> common = {"sweep", "--nt", "2..10", "--rho-db", "-10..20", "--trials", "1000",
                                           "--seed", "99"};
  auto with = [&](std::initializer_list<std::string> extra) {
    auto a = common;
    a.insert(a.end(), extra);
    return a;
  };
  bool ok = sweep(with({"--threads", "1", "--out-dir", (dir / "t1").string()})) == 0;
  ok = ok && sweep(with({"--threads", "7", "--out-dir", (dir / "t7").string()})) == 0;
  ok = ok && sweep({"sweep", "--config", (dir / "t1" / "manifest.cfg").string(), "--threads", "3", "--out-dir",
                    (dir / "replay").string()}) == 0;
  ok = ok && sweep({"sweep", "--c-db", "-120..-90", "--rho-db", "0", "--trials", "500", "--threads", "2",
                    "--out-dir", (dir / "c").string()}) == 0;
  ok = ok && sweep({"sweep", "--config", (dir / "c" / "manifest.cfg").string(), "--threads", "5", "--out-dir",
                    (dir / "c_replay").string()}) == 0;
  int compared = 0;
  for (const char* f : {"tg.csv", "ps.csv"}) {
    const auto ref = slurp(dir / "t1" / f);
    ok = ok && !ref.empty() && ref == slurp(dir / "t7" / f) && ref == slurp(dir / "replay" / f);
    const auto c_ref = slurp(dir / "c" / f);
    ok = ok && !c_ref.empty() && c_ref == slurp(dir / "c_replay" / f);
    compared += 3;
  }
  fs::remove_all(dir);
  report("C9", ok, "determinism across thread counts and manifest replay",
         std::to_string(compared) + " CSV comparisons, byte-identical: " + (ok ? "yes" : "no"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  const TrendRuns trends = run_trends();
  criterion4(trends);
  criterion5(trends);
  criterion6(trends);
  criterion7();
  criterion8();
  criterion9();
  std::cout << "\nacceptance: " << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " FAILED")
            << " in " << fmt("%.1f", seconds_since(t0)) << " s" << std::endl;
  return g_failures == 0 ? 0 : 1;
}
