#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fdbf/numerics.hpp"

// Transmit beamformers for a full-duplex radio whose downlink transmission
// must keep the self-interference seen by the receive combiner below eps:
//
//   max_w  log2(1 + rho |h_d^H w|^2)   s.t.  |v^H H w|^2 <= eps,  ||w||^2 <= 1.
//
// Everything here works on a = H^H v, since v^H H w = a^H w. The optimum lies
// on the one-parameter family w(alpha) ~ alpha w_ZF + (1 - alpha) w_MRT, and
// alpha is available in closed form; no iteration and no matrix inverse.

namespace fdbf {

/// h_d parallel to H^H v: the ZF direction does not exist.
class DegenerateParallelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Scalar = double>
struct BeamformerSolution {
  CVector<Scalar> w;
  std::optional<Scalar> alpha;
  Scalar si_power = 0;  // |v^H H w|^2
  Scalar dl_gain = 0;   // |h_d^H w|^2
  Scalar norm_w = 0;
  // Set by zf() when h_d is parallel to a; w is then the zero vector.
  bool degenerate = false;
};

template <typename Scalar>
Scalar si_power(const CVector<Scalar>& w, const CMatrix<Scalar>& H, const CVector<Scalar>& v) {
  detail::require_same_size(H.cols(), w.size(), "si_power");
  detail::require_same_size(H.rows(), v.size(), "si_power");
  return std::norm(v.dot(H * w));
}

template <typename Scalar>
Scalar dl_gain(const CVector<Scalar>& w, const CVector<Scalar>& h_d) {
  return std::norm(inner(h_d, w));
}

/// Downlink spectral efficiency in bits/s/Hz; rho is the linear SNR.
template <typename Scalar>
Scalar dl_rate(const CVector<Scalar>& w, const CVector<Scalar>& h_d, Scalar rho) {
  if (rho < Scalar(0)) throw std::invalid_argument("dl_rate: rho must be >= 0");
  return std::log2(Scalar(1) + rho * dl_gain(w, h_d));
}

namespace detail {
template <typename Scalar>
BeamformerSolution<Scalar> make_solution(CVector<Scalar> w, std::optional<Scalar> alpha, const CVector<Scalar>& h_d,
                                         const CVector<Scalar>& a) {
  BeamformerSolution<Scalar> s;
  s.si_power = std::norm(a.dot(w));
  s.dl_gain = std::norm(h_d.dot(w));
  s.norm_w = w.norm();
  s.w = std::move(w);
  s.alpha = alpha;
  return s;
}

template <typename Scalar>
void require_nonzero(const CVector<Scalar>& h_d, const char* what) {
  if (h_d.squaredNorm() == Scalar(0)) throw std::invalid_argument(std::string(what) + ": h_d must be nonzero");
}
}  // namespace detail

/// Maximum ratio transmission, w = h_d / ||h_d||. Equivalent to family(0).
template <typename Scalar>
BeamformerSolution<Scalar> mrt(const CVector<Scalar>& h_d, const CVector<Scalar>& a) {
  detail::require_same_size(h_d.size(), a.size(), "mrt");
  detail::require_nonzero(h_d, "mrt");
  return detail::make_solution<Scalar>(h_d / h_d.norm(), Scalar(0), h_d, a);
}

/// Normalized projection of h_d onto the null space of a^H; nulls the SI.
/// A vanishing projection is reported through `degenerate`, not thrown.
template <typename Scalar>
BeamformerSolution<Scalar> zf(const CVector<Scalar>& h_d, const CVector<Scalar>& a) {
  detail::require_nonzero(h_d, "zf");
  CVector<Scalar> p = project_complement(a, h_d);
  const Scalar p2 = p.squaredNorm();
  if (p2 <= Scalar(tol::kParallel) * h_d.squaredNorm()) {
    auto s = detail::make_solution<Scalar>(CVector<Scalar>::Zero(h_d.size()), Scalar(1), h_d, a);
    s.degenerate = true;
    return s;
  }
  p /= std::sqrt(p2);
  return detail::make_solution<Scalar>(std::move(p), Scalar(1), h_d, a);
}

/// w(alpha) = (alpha w_ZF + (1 - alpha) w_MRT) / ||.|| with the unnormalized
/// w_ZF = (I - a a^#) h_d and w_MRT = h_d.
template <typename Scalar>
BeamformerSolution<Scalar> family(Scalar alpha, const CVector<Scalar>& h_d, const CVector<Scalar>& a) {
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) throw std::invalid_argument("family: alpha must lie in [0, 1]");
  detail::require_nonzero(h_d, "family");
  CVector<Scalar> u = alpha * project_complement(a, h_d) + (Scalar(1) - alpha) * h_d;
  const Scalar n2 = u.squaredNorm();
  if (n2 <= Scalar(tol::kParallel) * h_d.squaredNorm()) {
    throw DegenerateParallelError("family: h_d is parallel to H^H v and alpha = 1");
  }
  u /= std::sqrt(n2);
  return detail::make_solution<Scalar>(std::move(u), alpha, h_d, a);
}

template <typename Scalar>
struct ZetaEta {
  Scalar zeta;
  Scalar eta;
};

/// zeta = (1 - eps/||a||^2) |a^H h_d|^2,  eta = |a^H h_d|^2 - eps ||h_d||^2.
/// `gram` is ||a||^2 = v^H H H^H v, computed once by the caller.
template <typename Scalar>
ZetaEta<Scalar> zeta_eta(const CVector<Scalar>& h_d, const CVector<Scalar>& a, Scalar epsilon, Scalar gram) {
  if (epsilon < Scalar(0)) throw std::invalid_argument("zeta_eta: epsilon must be >= 0");
  const Scalar d2 = h_d.squaredNorm();
  if (gram == Scalar(0)) return {Scalar(0), -epsilon * d2};
  const Scalar g = std::norm(inner(a, h_d));
  return {(Scalar(1) - epsilon / gram) * g, g - epsilon * d2};
}

/// 1 - min(1, sqrt(max(0, zeta - eta) / zeta)), evaluated only when the SI
/// constraint binds (eta > 0, which forces zeta > 0). Otherwise 0.
template <typename Scalar>
Scalar alpha_star(Scalar zeta, Scalar eta) {
  if (eta <= Scalar(0)) return Scalar(0);
  if (!(zeta > Scalar(0))) throw std::logic_error("alpha_star: eta > 0 requires zeta > 0");
  const Scalar r = std::sqrt(std::max(Scalar(0), zeta - eta) / zeta);
  return Scalar(1) - std::min(Scalar(1), r);
}

/// Closed-form solution of the SI-constrained rate maximization.
///
/// When h_d is (numerically) parallel to H^H v and MRT violates the threshold,
/// no unit-norm vector is both useful and feasible; the MRT direction is then
/// scaled back until the SI equals eps, leaving ||w|| < 1.
template <typename Scalar>
BeamformerSolution<Scalar> optimal(const CVector<Scalar>& h_d, const CMatrix<Scalar>& H, const CVector<Scalar>& v,
                                   Scalar epsilon) {
  detail::require_nonzero(h_d, "optimal");
  if (!(epsilon > Scalar(0))) throw std::invalid_argument("optimal: epsilon must be > 0");
  const CVector<Scalar> a = matvec_adj(H, v);
  detail::require_same_size(a.size(), h_d.size(), "optimal");

  const Scalar gram = a.squaredNorm();
  const auto [zeta, eta] = zeta_eta(h_d, a, epsilon, gram);
  const Scalar alpha = alpha_star(zeta, eta);
  if (alpha == Scalar(0)) return mrt(h_d, a);

  // Parallel-channel case: ||(I - a a^#) h_d||^2 = (zeta - eta) / epsilon.
  const Scalar residual = (zeta - eta) / epsilon;
  if (residual <= Scalar(tol::kParallel) * h_d.squaredNorm()) {
    const CVector<Scalar> u = h_d / h_d.norm();
    const Scalar leak = std::abs(a.dot(u));
    return detail::make_solution<Scalar>(CVector<Scalar>(u * (std::sqrt(epsilon) / leak)), alpha, h_d, a);
  }
  return family(alpha, h_d, a);
}

}  // namespace fdbf
