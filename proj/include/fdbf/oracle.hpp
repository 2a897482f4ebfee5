#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

#include "fdbf/beamform.hpp"
#include "fdbf/channel.hpp"
#include "fdbf/random.hpp"

// Brute-force certifiers for the closed-form beamformer. They evaluate the
// objective and the SI constraint directly from (H, v, h_d) and never touch
// the zeta/eta/alpha* algebra.

namespace fdbf {

template <typename Scalar = double>
struct OracleReport {
  Scalar best_alpha = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar best_rate = -std::numeric_limits<Scalar>::infinity();
  Scalar best_gain = 0;
  CVector<Scalar> best_w;
  std::size_t samples_tested = 0;
  std::size_t feasible_count = 0;
  Scalar max_violation = 0;  // worst SI overshoot among accepted candidates
  bool degenerate = false;   // no feasible candidate was found
};

template <typename Scalar>
bool feasible(const CVector<Scalar>& w, const ChannelRealization<Scalar>& r, Scalar tol) {
  return si_power(w, r.H, r.v) <= r.epsilon + tol && w.squaredNorm() <= Scalar(1) + tol;
}

namespace detail {
template <typename Scalar>
void consider(OracleReport<Scalar>& rep, const CVector<Scalar>& w, Scalar alpha, const ChannelRealization<Scalar>& r,
              Scalar rho, Scalar tol) {
  ++rep.samples_tested;
  if (!feasible(w, r, tol)) return;
  ++rep.feasible_count;
  rep.max_violation = std::max(rep.max_violation, si_power(w, r.H, r.v) - r.epsilon);
  const Scalar rate = dl_rate(w, r.h_d, rho);
  if (rate > rep.best_rate) {
    rep.best_rate = rate;
    rep.best_gain = dl_gain(w, r.h_d);
    rep.best_alpha = alpha;
    rep.best_w = w;
  }
}
}  // namespace detail

/// Evaluates family(alpha) on alpha_k = k / (grid_points - 1) and keeps the
/// best feasible candidate. grid_points = 1 evaluates MRT only.
template <typename Scalar>
OracleReport<Scalar> grid_search(const ChannelRealization<Scalar>& r, std::size_t grid_points, Scalar rho = Scalar(1),
                                 Scalar tol = Scalar(1e-9)) {
  if (grid_points < 1) throw std::invalid_argument("grid_search: grid_points must be >= 1");
  const CVector<Scalar> a = matvec_adj(r.H, r.v);
  OracleReport<Scalar> rep;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const Scalar alpha = grid_points == 1 ? Scalar(0) : static_cast<Scalar>(k) / static_cast<Scalar>(grid_points - 1);
    CVector<Scalar> w;
    try {
      w = family(alpha, r.h_d, a).w;
    } catch (const DegenerateParallelError&) {
      ++rep.samples_tested;
      continue;
    }
    detail::consider(rep, w, alpha, r, rho, tol);
  }
  rep.degenerate = rep.feasible_count == 0;
  return rep;
}

/// Isotropic unit vectors (normalized CN(0, I) draws), each scaled back to
/// meet the SI threshold when it exceeds it.
template <typename Scalar>
OracleReport<Scalar> random_feasible_search(const ChannelRealization<Scalar>& r, std::size_t samples, RngState state,
                                            Scalar rho = Scalar(1), Scalar tol = Scalar(1e-9)) {
  if (samples < 1) throw std::invalid_argument("random_feasible_search: samples must be >= 1");
  PhiloxEngine rng(state);
  const std::complex<Scalar> zero{};
  OracleReport<Scalar> rep;
  for (std::size_t s = 0; s < samples; ++s) {
    CVector<Scalar> w = sample_complex_gaussian<Scalar>(rng, r.h_d.size(), zero, Scalar(1));
    const Scalar n = w.norm();
    if (n == Scalar(0)) continue;
    w /= n;
    const Scalar si = si_power(w, r.H, r.v);
    if (si > r.epsilon) w *= std::sqrt(r.epsilon / si);
    detail::consider(rep, w, std::numeric_limits<Scalar>::quiet_NaN(), r, rho, tol);
  }
  rep.degenerate = rep.feasible_count == 0;
  return rep;
}

struct TimingResult {
  double closed_form_ns_per_solve = 0;
  double grid_ns_per_solve = 0;
  double speedup = 0;
};

/// Median wall time per solve of optimal() and grid_search() on the same
/// realizations, single-threaded. Each repeat times one full pass.
TimingResult timing_bench(std::span<const ChannelRealization<double>> realizations, std::size_t grid_points,
                          int repeats = 9);

}  // namespace fdbf
