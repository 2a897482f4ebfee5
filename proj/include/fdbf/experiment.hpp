#pragma once

#include <cstdint>
#include <vector>

#include "fdbf/channel.hpp"

namespace fdbf {

struct TrialRecord {
  int trial_index = 0;
  double alpha_star = 0;
  double rate_opt = 0;
  double rate_zf = 0;
  double gain_opt = 0;  // |h_d^H w*|^2
  double gain_zf = 0;   // |h_d^H w_ZF|^2, normalized ZF
  double si_opt = 0;
  double tg_ratio = 0;  // rate_opt / rate_zf
  double ps_ratio = 0;  // gain_zf / gain_opt
  bool degenerate = false;  // ZF undefined; excluded from averages
};

struct SweepAxes {
  std::vector<int> n_t;
  std::vector<double> rho_db;
  std::vector<double> c_db;
};

struct SweepPoint {
  int n_t = 0;
  double rho_db = 0;
  double c_db = 0;
  double tg_mean = 0;
  double tg_ci = 0;  // 95% half-width, normal approximation
  double ps_mean = 0;
  double ps_ci = 0;
  int trials = 0;
  int degenerate = 0;            // trials excluded from both averages
  int dominance_violations = 0;  // trials with rate_opt < rate_zf beyond round-off
};

struct SweepResult {
  SweepAxes axes;
  std::vector<SweepPoint> points;  // n_t outermost, then c_db, then rho_db
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Per-trial throughput gain contribution, rate_opt / rate_zf - 1.
double throughput_gain(double rate_opt, double rate_zf);

/// Per-trial power saving contribution, 1 - gain_zf / gain_opt.
double power_saving(double gain_opt, double gain_zf);

struct MeanCi {
  double mean = 0;
  double half_width = 0;
};

/// Sample mean with a 95% normal-approximation half-width. Compensated
/// summation in index order.
MeanCi mean_ci95(const std::vector<double>& xs);

/// One Monte Carlo trial at cfg's (n_t, c_db, rho_db), channel stream
/// (cfg.seed, trial_index).
TrialRecord run_trial(const SystemConfig& cfg, int trial_index);

/// Every grid point draws the same per-trial streams, so the channel
/// realizations are shared across rho and c at a given n_t. threads <= 0
/// means hardware concurrency; results do not depend on it.
SweepResult run_sweep(const SystemConfig& cfg, const SweepAxes& axes, int threads = 1);

/// p_u |v^H h_u|^2 / (p_d |v^H H w|^2 + sigma2 ||v||^2), powers in mW.
double uplink_sinr(const ChannelRealization<double>& r, const CVector<double>& w, double p_u, double p_d,
                   double sigma2);

}  // namespace fdbf
