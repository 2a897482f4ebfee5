#include "fdbf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fdbf/beamform.hpp"

namespace fdbf {
namespace {

// Channel-dependent part of a trial; independent of rho.
struct Outcome {
  double alpha_star = 0;
  double gain_opt = 0;
  double gain_zf = 0;
  double si_opt = 0;
  bool degenerate = false;
};

Outcome evaluate(const ChannelRealization<double>& r) {
  const auto opt = optimal(r.h_d, r.H, r.v, r.epsilon);
  const auto zero_forcing = zf(r.h_d, matvec_adj(r.H, r.v));
  Outcome o;
  o.alpha_star = opt.alpha.value_or(0.0);
  o.gain_opt = opt.dl_gain;
  o.gain_zf = zero_forcing.dl_gain;
  o.si_opt = opt.si_power;
  o.degenerate = zero_forcing.degenerate || zero_forcing.dl_gain <= 0.0;
  return o;
}

double rate(double gain, double rho) { return std::log2(1.0 + rho * gain); }

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace

double throughput_gain(double rate_opt, double rate_zf) {
  if (!(rate_zf > 0.0)) throw std::domain_error("throughput_gain: ZF rate is zero");
  return rate_opt / rate_zf - 1.0;
}

double power_saving(double gain_opt, double gain_zf) {
  if (!(gain_opt > 0.0)) throw std::domain_error("power_saving: optimal gain must be positive");
  return 1.0 - gain_zf / gain_opt;
}

MeanCi mean_ci95(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nan(""), std::nan("")};
  // Neumaier summation.
  auto sum = [](const std::vector<double>& v, auto&& f) {
    double s = 0, c = 0;
    for (double x : v) {
      const double y = f(x), t = s + y;
      c += std::abs(s) >= std::abs(y) ? (s - t) + y : (y - t) + s;
      s = t;
    }
    return s + c;
  };
  const double n = static_cast<double>(xs.size());
  const double mean = sum(xs, [](double x) { return x; }) / n;
  if (xs.size() < 2) return {mean, 0.0};
  const double var = sum(xs, [mean](double x) { return (x - mean) * (x - mean); }) / (n - 1.0);
  return {mean, 1.959963984540054 * std::sqrt(var / n)};
}

TrialRecord run_trial(const SystemConfig& cfg, int trial_index) {
  const auto r = draw_realization<double>(cfg, {cfg.seed, static_cast<std::uint64_t>(trial_index)});
  const Outcome o = evaluate(r);
  const double rho = db_to_linear(cfg.rho_db);
  TrialRecord t;
  t.trial_index = trial_index;
  t.alpha_star = o.alpha_star;
  t.gain_opt = o.gain_opt;
  t.gain_zf = o.gain_zf;
  t.si_opt = o.si_opt;
  t.rate_opt = rate(o.gain_opt, rho);
  t.rate_zf = rate(o.gain_zf, rho);
  t.degenerate = o.degenerate;
  if (!o.degenerate) {
    t.tg_ratio = t.rate_opt / t.rate_zf;
    t.ps_ratio = o.gain_zf / o.gain_opt;
  }
  return t;
}

SweepResult run_sweep(const SystemConfig& cfg, const SweepAxes& axes, int threads) {
  if (axes.n_t.empty() || axes.rho_db.empty() || axes.c_db.empty()) {
    throw std::invalid_argument("run_sweep: every axis needs at least one value");
  }
  cfg.validate();

  SweepResult result;
  result.axes = axes;
  result.trials = cfg.trials;
  result.seed = cfg.seed;

  std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.trials));
  for (int n_t : axes.n_t) {
    for (double c_db : axes.c_db) {
      SystemConfig point = cfg;
      point.n_t = n_t;
      point.c_db = c_db;
      point.validate();
      parallel_for(cfg.trials, threads, [&](int i) {
        outcomes[static_cast<std::size_t>(i)] =
            evaluate(draw_realization<double>(point, {cfg.seed, static_cast<std::uint64_t>(i)}));
      });

      std::vector<double> ps;
      ps.reserve(outcomes.size());
      int degenerate = 0;
      for (const auto& o : outcomes) {
        if (o.degenerate) {
          ++degenerate;
          continue;
        }
        ps.push_back(power_saving(o.gain_opt, o.gain_zf));
      }
      const MeanCi ps_stats = mean_ci95(ps);

      for (double rho_db : axes.rho_db) {
        const double rho = db_to_linear(rho_db);
        std::vector<double> tg;
        tg.reserve(outcomes.size());
        int violations = 0;
        for (const auto& o : outcomes) {
          if (o.degenerate) continue;
          const double r_opt = rate(o.gain_opt, rho), r_zf = rate(o.gain_zf, rho);
          if (r_opt < r_zf * (1.0 - tol::kEq)) ++violations;
          tg.push_back(throughput_gain(r_opt, r_zf));
        }
        const MeanCi tg_stats = mean_ci95(tg);
        SweepPoint p;
        p.n_t = n_t;
        p.rho_db = rho_db;
        p.c_db = c_db;
        p.tg_mean = tg_stats.mean;
        p.tg_ci = tg_stats.half_width;
        p.ps_mean = ps_stats.mean;
        p.ps_ci = ps_stats.half_width;
        p.trials = cfg.trials;
        p.degenerate = degenerate;
        p.dominance_violations = violations;
        result.points.push_back(p);
      }
    }
  }
  return result;
}

double uplink_sinr(const ChannelRealization<double>& r, const CVector<double>& w, double p_u, double p_d,
                   double sigma2) {
  if (p_u < 0 || p_d < 0 || sigma2 < 0) throw std::invalid_argument("uplink_sinr: powers must be >= 0");
  const double denom = p_d * si_power(w, r.H, r.v) + sigma2 * r.v.squaredNorm();
  if (!(denom > 0.0)) throw std::domain_error("uplink_sinr: zero interference-plus-noise power");
  return p_u * std::norm(inner(r.v, r.h_u)) / denom;
}

}  // namespace fdbf
