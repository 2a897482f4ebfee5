#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fdbf/numerics.hpp"
#include "fdbf/random.hpp"

namespace fdbf {

/// How the pre-cancellation SI budget r_n - c is mapped onto the threshold
/// used in the normalized-signal constraint |v^H H w|^2 <= eps.
enum class ThresholdModel {
  kNormalized,     // eps = 10^((r_n - c - p_d)/10): budget relative to transmit power
  kAbsolute,       // eps = 10^((r_n - c)/10): budget in mW with unit-power symbols
  kPathlossStacked,  // normalized, and the pathloss Omega subtracted once more
};

std::string_view to_string(ThresholdModel m);
ThresholdModel threshold_model_from_string(std::string_view s);

struct SystemConfig {
  int n_t = 2;
  int n_r = 2;
  double p_d_dbm = 30.0;
  double r_n_dbm = -116.4;
  double c_db = -110.0;
  double omega_db = -30.0;
  double k_factor_db = 10.0;
  double rho_db = 0.0;
  int trials = 10000;
  std::uint64_t seed = 1;
  ThresholdModel threshold_model = ThresholdModel::kNormalized;
  // Additive shift on eps, for sensitivity studies only.
  double eps_offset_db = 0.0;

  /// Throws std::invalid_argument on a config that cannot produce realizations.
  void validate() const;
};

struct RiceanParams {
  double mu;
  double nu;
};

double db_to_linear(double x_db);

/// Pre-cancellation SI budget in dBm: r_n - c.
double si_budget_dbm(const SystemConfig& cfg);

/// Linear threshold eps for the normalized constraint (see ThresholdModel).
double si_threshold(const SystemConfig& cfg);

/// LOS mean and scatter std of the SI channel entries, mu^2 + nu^2 = Omega.
/// k_factor_db = -inf gives Rayleigh, +inf gives a deterministic channel.
RiceanParams ricean_params(double k_factor_db, double omega_db);

template <typename Scalar = double>
struct ChannelRealization {
  CVector<Scalar> h_u;  // uplink, N_R
  CVector<Scalar> h_d;  // downlink, N_T
  CMatrix<Scalar> H;    // SI channel, N_R x N_T
  CVector<Scalar> v;    // unit-norm MRC combiner
  Scalar epsilon = 0;
};

/// One draw of (h_d, h_u, H) from the given stream, in that order.
/// v = h_u / ||h_u||; a zero h_u is redrawn from the same stream.
template <typename Scalar = double>
ChannelRealization<Scalar> draw_realization(const SystemConfig& cfg, RngState state) {
  cfg.validate();
  const auto [mu, nu] = ricean_params(cfg.k_factor_db, cfg.omega_db);
  const std::complex<Scalar> zero{};
  const std::complex<Scalar> los{static_cast<Scalar>(mu), Scalar(0)};

  PhiloxEngine rng(state);
  ChannelRealization<Scalar> r;
  r.h_d = sample_complex_gaussian<Scalar>(rng, cfg.n_t, zero, Scalar(1));
  do {
    r.h_u = sample_complex_gaussian<Scalar>(rng, cfg.n_r, zero, Scalar(1));
  } while (r.h_u.squaredNorm() == Scalar(0));
  const CVector<Scalar> h = sample_complex_gaussian<Scalar>(rng, Eigen::Index{cfg.n_r} * cfg.n_t, los,
                                                            static_cast<Scalar>(nu));
  r.H = Eigen::Map<const CMatrix<Scalar>>(h.data(), cfg.n_r, cfg.n_t);
  r.v = r.h_u / r.h_u.norm();
  r.epsilon = static_cast<Scalar>(si_threshold(cfg));
  return r;
}

}  // namespace fdbf
