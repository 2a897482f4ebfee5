#include "fdbf/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fdbf {

std::string_view to_string(ThresholdModel m) {
  switch (m) {
    case ThresholdModel::kNormalized:
      return "normalized";
    case ThresholdModel::kAbsolute:
      return "absolute";
    case ThresholdModel::kPathlossStacked:
      return "pathloss-stacked";
  }
  return "normalized";
}

ThresholdModel threshold_model_from_string(std::string_view s) {
  if (s == "normalized") return ThresholdModel::kNormalized;
  if (s == "absolute") return ThresholdModel::kAbsolute;
  if (s == "pathloss-stacked") return ThresholdModel::kPathlossStacked;
  throw std::invalid_argument("unknown threshold model '" + std::string(s) + "'");
}

void SystemConfig::validate() const {
  if (n_t < 1) throw std::invalid_argument("n_t must be >= 1");
  if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (double x : {p_d_dbm, r_n_dbm, c_db, omega_db, rho_db, eps_offset_db}) {
    if (!std::isfinite(x)) throw std::invalid_argument("power/gain parameters must be finite");
  }
  if (std::isnan(k_factor_db)) throw std::invalid_argument("k_factor_db is NaN");
  const double eps = si_threshold(*this);
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("derived SI threshold must be positive");
}

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double si_budget_dbm(const SystemConfig& cfg) { return cfg.r_n_dbm - cfg.c_db; }

double si_threshold(const SystemConfig& cfg) {
  double eps_db = si_budget_dbm(cfg) + cfg.eps_offset_db;
  switch (cfg.threshold_model) {
    case ThresholdModel::kNormalized:
      eps_db -= cfg.p_d_dbm;
      break;
    case ThresholdModel::kAbsolute:
      break;
    case ThresholdModel::kPathlossStacked:
      eps_db += cfg.omega_db - cfg.p_d_dbm;
      break;
  }
  return db_to_linear(eps_db);
}

RiceanParams ricean_params(double k_factor_db, double omega_db) {
  const double omega = db_to_linear(omega_db);
  if (std::isinf(k_factor_db)) {
    return k_factor_db > 0 ? RiceanParams{std::sqrt(omega), 0.0} : RiceanParams{0.0, std::sqrt(omega)};
  }
  const double k = db_to_linear(k_factor_db);
  return {std::sqrt(k * omega / (k + 1.0)), std::sqrt(omega / (k + 1.0))};
}

}  // namespace fdbf
