// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "irscf/config.hpp"
#include "irscf/linalg.hpp"
#include "irscf/random.hpp"

namespace irscf {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

/// Node placement. UE positions are usually drawn per realization inside the
/// disc (ue_center_x, ue_center_y, ue_radius) at height ue_height.
struct Geometry {
  std::vector<Point3> bs;
  std::vector<Point3> irs;
  std::vector<Point3> ue;
  double ue_center_x = 100.0;
  double ue_center_y = 100.0;
  double ue_radius = 10.0;
  double ue_height = 1.5;

  void validate(const SystemConfig& cfg) const {
    if (static_cast<int>(bs.size()) != cfg.num_bs) throw ConfigError("geometry: bs count != num_bs");
    if (static_cast<int>(irs.size()) != cfg.num_irs) throw ConfigError("geometry: irs count != num_irs");
    if (static_cast<int>(ue.size()) != cfg.num_ue) throw ConfigError("geometry: ue count != num_ue");
    auto positive = [](const std::vector<Point3>& v) {
      for (const auto& p : v)
        if (!(p.z > 0.0)) return false;
      return true;
    };
    if (!positive(bs) || !positive(irs) || !positive(ue)) throw ConfigError("geometry: heights must be positive");
    if (ue_radius < 0.0) throw ConfigError("geometry: negative UE radius");
  }
};

/// Uniform placement of `count` UEs in the configured disc.
inline std::vector<Point3> sample_ue_positions(const Geometry& g, int count, Rng& rng) {
  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double r = g.ue_radius * std::sqrt(uniform01(rng));
    const double phi = 2.0 * kPi * uniform01(rng);
    out.push_back({g.ue_center_x + r * std::cos(phi), g.ue_center_y + r * std::sin(phi), g.ue_height});
  }
  return out;
}

/// Angles (radians) for the LOS components.
struct SteeringAngles {
  std::vector<double> bs_departure;           // per BS
  std::vector<double> ue_arrival;             // per UE
  std::vector<double> irs_arrival_azimuth;    // per IRS
  std::vector<double> irs_arrival_elevation;  // per IRS, [0, pi)
  std::vector<double> irs_departure_azimuth;
  std::vector<double> irs_departure_elevation;
};

inline SteeringAngles sample_angles(const SystemConfig& cfg, Rng& rng) {
  auto draw = [&](int n, double hi) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = hi * uniform01(rng);
    return v;
  };
  SteeringAngles a;
  a.bs_departure = draw(cfg.num_bs, 2.0 * kPi);
  a.ue_arrival = draw(cfg.num_ue, 2.0 * kPi);
  a.irs_arrival_azimuth = draw(cfg.num_irs, 2.0 * kPi);
  a.irs_arrival_elevation = draw(cfg.num_irs, kPi);
  a.irs_departure_azimuth = draw(cfg.num_irs, 2.0 * kPi);
  a.irs_departure_elevation = draw(cfg.num_irs, kPi);
  return a;
}

/// Per-link channels. direct[l][k] is M_b x M_u, irs_ue[r][k] is N x M_u,
/// bs_irs[l][r] is N x M_b.
struct ChannelSet {
  Grid<CMat> direct;
  Grid<CMat> irs_ue;
  Grid<CMat> bs_irs;

  [[nodiscard]] int num_bs() const { return static_cast<int>(direct.size()); }
  [[nodiscard]] int num_ue() const { return direct.empty() ? 0 : static_cast<int>(direct.front().size()); }
  [[nodiscard]] int num_irs() const { return static_cast<int>(irs_ue.size()); }
  [[nodiscard]] int bs_antennas() const { return static_cast<int>(direct.at(0).at(0).rows()); }
  [[nodiscard]] int ue_antennas() const { return static_cast<int>(direct.at(0).at(0).cols()); }
  [[nodiscard]] int irs_elements() const { return irs_ue.empty() ? 0 : static_cast<int>(irs_ue[0].at(0).rows()); }

  /// Copy with all IRS links removed (the "without IRS" system).
  [[nodiscard]] ChannelSet without_irs() const {
    ChannelSet c;
    c.direct = direct;
    c.bs_irs.assign(direct.size(), {});
    return c;
  }

  void check() const {
    const int L = num_bs(), K = num_ue(), R = num_irs();
    if (L == 0 || K == 0) throw ConfigError("ChannelSet: empty direct channels");
    const auto mb = bs_antennas(), mu = ue_antennas();
    for (const auto& row : direct) {
      if (static_cast<int>(row.size()) != K) throw ConfigError("ChannelSet: ragged direct grid");
      for (const auto& d : row)
        if (d.rows() != mb || d.cols() != mu) throw ConfigError("ChannelSet: direct channel shape mismatch");
    }
    if (static_cast<int>(bs_irs.size()) != L) throw ConfigError("ChannelSet: bs_irs outer size != L");
    const int n = irs_elements();
    for (const auto& row : irs_ue) {
      if (static_cast<int>(row.size()) != K) throw ConfigError("ChannelSet: ragged irs_ue grid");
      for (const auto& g : row)
        if (g.rows() != n || g.cols() != mu) throw ConfigError("ChannelSet: irs_ue shape mismatch");
    }
    for (const auto& row : bs_irs) {
      if (static_cast<int>(row.size()) != R) throw ConfigError("ChannelSet: bs_irs inner size != R");
      for (const auto& s : row)
        if (s.rows() != n || s.cols() != mb) throw ConfigError("ChannelSet: bs_irs shape mismatch");
    }
  }
};

/// Large-scale gain c0 * (d/d0)^(-exponent), linear power.
inline double path_loss(double distance_m, double exponent, double c0, double d0 = 1.0) {
  if (!(distance_m > 0.0)) throw std::domain_error("path_loss: distance must be positive");
  if (!(d0 > 0.0)) throw std::domain_error("path_loss: d0 must be positive");
  if (exponent < 0.0) throw std::domain_error("path_loss: negative exponent");
  return c0 * std::pow(distance_m / d0, -exponent);
}

/// Half-wavelength ULA response, element i = exp(j*pi*i*sin(angle)).
inline CVec ula_steering(double angle, int m) {
  if (m < 1) throw std::domain_error("ula_steering: antenna count must be >= 1");
  CVec a(m);
  const double s = std::sin(angle);
  for (int i = 0; i < m; ++i) a(i) = std::polar(1.0, kPi * i * s);
  return a;
}

/// UPA response a_v (x) a_h with vertical phase pi*sin(az)*sin(el) and
/// horizontal phase pi*cos(el).
inline CVec upa_steering(double azimuth, double elevation, int n_v, int n_h) {
  if (n_v < 1 || n_h < 1) throw std::domain_error("upa_steering: element counts must be >= 1");
  const double sv = std::sin(azimuth) * std::sin(elevation);
  const double sh = std::cos(elevation);
  CVec a(static_cast<Eigen::Index>(n_v) * n_h);
  for (int v = 0; v < n_v; ++v)
    for (int h = 0; h < n_h; ++h) a(v * n_h + h) = std::polar(1.0, kPi * v * sv) * std::polar(1.0, kPi * h * sh);
  return a;
}

namespace detail {

/// Rician factor at or above this is treated as pure LOS.
inline constexpr double kPureLos = 1e9;

inline CMat rician(const CMat& los, double beta, Rng& rng) {
  CMat nlos = complex_gaussian_matrix(los.rows(), los.cols(), rng);
  if (std::isinf(beta) || beta >= kPureLos) return los;
  return std::sqrt(beta / (1.0 + beta)) * los + std::sqrt(1.0 / (1.0 + beta)) * nlos;
}

}  // namespace detail

/// Draws one channel realization. Path loss is a power gain, so the matrices
/// are scaled by its square root. Rayleigh direct links, Rician IRS links.
inline ChannelSet sample_channels(const SystemConfig& cfg, const Geometry& geo, const SteeringAngles& ang, Rng& rng) {
  cfg.validate();
  geo.validate(cfg);
  const int L = cfg.num_bs, K = cfg.num_ue, R = cfg.num_irs;
  const int mb = cfg.bs_antennas, mu = cfg.ue_antennas, nv = cfg.irs_rows, nh = cfg.irs_cols;

  ChannelSet ch;
  ch.direct.assign(L, std::vector<CMat>(K));
  ch.irs_ue.assign(R, std::vector<CMat>(K));
  ch.bs_irs.assign(L, std::vector<CMat>(R));

  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      const double pl = path_loss(distance(geo.bs[l], geo.ue[k]), cfg.pathloss_direct, cfg.c0, cfg.d0);
      ch.direct[l][k] = std::sqrt(pl) * complex_gaussian_matrix(mb, mu, rng);
    }

  for (int r = 0; r < R; ++r) {
    const CVec irs_dep = upa_steering(ang.irs_departure_azimuth.at(r), ang.irs_departure_elevation.at(r), nv, nh);
    const CVec irs_arr = upa_steering(ang.irs_arrival_azimuth.at(r), ang.irs_arrival_elevation.at(r), nv, nh);
    for (int k = 0; k < K; ++k) {
      const double pl = path_loss(distance(geo.irs[r], geo.ue[k]), cfg.pathloss_irs, cfg.c0, cfg.d0);
      const CMat los = irs_dep * ula_steering(ang.ue_arrival.at(k), mu).adjoint();
      ch.irs_ue[r][k] = std::sqrt(pl) * detail::rician(los, cfg.beta_g, rng);
    }
    for (int l = 0; l < L; ++l) {
      const double pl = path_loss(distance(geo.bs[l], geo.irs[r]), cfg.pathloss_irs, cfg.c0, cfg.d0);
      const CMat los = irs_arr * ula_steering(ang.bs_departure.at(l), mb).adjoint();
      ch.bs_irs[l][r] = std::sqrt(pl) * detail::rician(los, cfg.beta_s, rng);
    }
  }
  return ch;
}

namespace detail {

inline CMat perturb(const CMat& h, double rho, Rng& rng) {
  CMat delta = complex_gaussian_matrix(h.rows(), h.cols(), rng);
  const double hn = h.norm();
  const double dn = delta.norm();
  if (rho == 0.0 || hn == 0.0 || dn == 0.0) return h;
  // ||delta|| = rho*||h||/(1+rho) implies ||delta|| <= rho*||h - delta||.
  delta *= rho * hn / ((1.0 + rho) * dn);
  return h - delta;
}

}  // namespace detail

/// Estimated channels H_hat = H - Delta under the bounded error model
/// ||Delta||_F <= rho * ||H_hat||_F, per matrix.
inline ChannelSet apply_csi_error(const ChannelSet& truth, double rho, Rng& rng) {
  if (rho < 0.0 || !std::isfinite(rho)) throw std::domain_error("apply_csi_error: rho must be >= 0");
  ChannelSet est = truth;
  for (auto& row : est.direct)
    for (auto& m : row) m = detail::perturb(m, rho, rng);
  for (auto& row : est.irs_ue)
    for (auto& m : row) m = detail::perturb(m, rho, rng);
  for (auto& row : est.bs_irs)
    for (auto& m : row) m = detail::perturb(m, rho, rng);
  return est;
}

}  // namespace irscf
