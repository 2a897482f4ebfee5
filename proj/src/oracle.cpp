#include "fdbf/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

namespace fdbf {
namespace {

// Keeps the optimizer from discarding the timed work.
volatile double g_sink = 0;

template <typename Fn>
double median_ns_per_solve(std::size_t n, int repeats, Fn&& pass) {
  std::vector<double> per_solve;
  per_solve.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    g_sink = g_sink + pass();
    const auto t1 = std::chrono::steady_clock::now();
    per_solve.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(n));
  }
  auto mid = per_solve.begin() + static_cast<std::ptrdiff_t>(per_solve.size() / 2);
  std::nth_element(per_solve.begin(), mid, per_solve.end());
  return *mid;
}

}  // namespace

TimingResult timing_bench(std::span<const ChannelRealization<double>> realizations, std::size_t grid_points,
                          int repeats) {
  if (realizations.empty()) throw std::invalid_argument("timing_bench: no realizations");
  if (repeats < 1) throw std::invalid_argument("timing_bench: repeats must be >= 1");
  const std::size_t n = realizations.size();

  TimingResult out;
  out.closed_form_ns_per_solve = median_ns_per_solve(n, repeats, [&] {
    double acc = 0;
    for (const auto& r : realizations) acc += optimal(r.h_d, r.H, r.v, r.epsilon).dl_gain;
    return acc;
  });
  out.grid_ns_per_solve = median_ns_per_solve(n, repeats, [&] {
    double acc = 0;
    for (const auto& r : realizations) acc += grid_search(r, grid_points).best_gain;
    return acc;
  });
  out.speedup = out.grid_ns_per_solve / out.closed_form_ns_per_solve;
  return out;
}

}  // namespace fdbf
