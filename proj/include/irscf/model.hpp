// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "irscf/channel.hpp"
#include "irscf/config.hpp"
#include "irscf/linalg.hpp"
#include "irscf/random.hpp"

namespace irscf {

/// Transmit precoders, w[l][k] is M_b x M_u.
struct BeamformerSet {
  Grid<CMat> w;

  [[nodiscard]] int num_bs() const { return static_cast<int>(w.size()); }
  [[nodiscard]] int num_ue() const { return w.empty() ? 0 : static_cast<int>(w.front().size()); }

  static BeamformerSet zeros(int L, int K, int mb, int mu) {
    BeamformerSet b;
    b.w.assign(L, std::vector<CMat>(K, CMat::Zero(mb, mu)));
    return b;
  }

  /// sum_k ||W_{l,k}||_F^2
  [[nodiscard]] double bs_power(int l) const {
    double p = 0.0;
    for (const auto& m : w.at(l)) p += m.squaredNorm();
    return p;
  }

  [[nodiscard]] bool feasible(const std::vector<double>& p_max, double slack = 1e-6) const {
    for (int l = 0; l < num_bs(); ++l)
      if (bs_power(l) > p_max.at(l) + slack) return false;
    return true;
  }

  /// Stacked precoder of UE k, (L*M_b) x M_u, BS 0 on top.
  [[nodiscard]] CMat stacked(int k) const {
    const auto mb = w.at(0).at(k).rows(), mu = w.at(0).at(k).cols();
    CMat s(mb * num_bs(), mu);
    for (int l = 0; l < num_bs(); ++l) s.middleRows(l * mb, mb) = w[l][k];
    return s;
  }
};

/// Concatenated reflection coefficients of all IRSs (IRS 0 first), each of
/// modulus alpha. levels > 0 restricts phases to the grid 2*pi*m/levels.
struct PhaseVector {
  CVec theta;
  double alpha = 1.0;
  int levels = 0;

  [[nodiscard]] Eigen::Index size() const { return theta.size(); }

  static PhaseVector from_phases(const RVec& phases, double alpha, int levels = 0) {
    PhaseVector p;
    p.alpha = alpha;
    p.levels = levels;
    p.theta.resize(phases.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) p.theta(i) = std::polar(alpha, phases(i));
    return p;
  }

  /// Uniform phases on [0, 2*pi), snapped to the grid when levels > 0.
  static PhaseVector random(Eigen::Index n, double alpha, int levels, Rng& rng) {
    RVec ph(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (levels > 0) {
        const int m = std::uniform_int_distribution<int>(0, levels - 1)(rng);
        ph(i) = 2.0 * kPi * m / levels;
      } else {
        ph(i) = 2.0 * kPi * uniform01(rng);
      }
    }
    return from_phases(ph, alpha, levels);
  }

  [[nodiscard]] bool satisfies_modulus(double tol = 1e-12) const {
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      if (std::abs(std::abs(theta(i)) - alpha) > tol) return false;
    return true;
  }

  [[nodiscard]] bool on_grid(double tol = 1e-12) const {
    if (levels <= 0) return true;
    const double step = 2.0 * kPi / levels;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      double ph = std::arg(theta(i) / alpha);
      if (ph < 0) ph += 2.0 * kPi;
      const double m = std::round(ph / step);
      if (std::abs(ph - m * step) > tol) return false;
    }
    return true;
  }

  /// Diagonal of Theta_r, N entries.
  [[nodiscard]] CVec block(int r, int n) const { return theta.segment(static_cast<Eigen::Index>(r) * n, n); }
};

/// Stacked channels. d[k]: (L*M_b) x M_u, g[k]: (R*N) x M_u,
/// s: (R*N) x (L*M_b) with block (r, l) = S_{l,r}.
struct StackedChannels {
  std::vector<CMat> d;
  std::vector<CMat> g;
  CMat s;
};

inline StackedChannels stack(const ChannelSet& ch) {
  ch.check();
  const int L = ch.num_bs(), K = ch.num_ue(), R = ch.num_irs();
  const int mb = ch.bs_antennas(), mu = ch.ue_antennas(), n = ch.irs_elements();
  StackedChannels st;
  st.d.assign(K, CMat(L * mb, mu));
  st.g.assign(K, CMat(R * n, mu));
  st.s = CMat::Zero(R * n, L * mb);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) st.d[k].middleRows(l * mb, mb) = ch.direct[l][k];
    for (int r = 0; r < R; ++r) st.g[k].middleRows(r * n, n) = ch.irs_ue[r][k];
  }
  for (int r = 0; r < R; ++r)
    for (int l = 0; l < L; ++l) st.s.block(r * n, l * mb, n, mb) = ch.bs_irs[l][r];
  return st;
}

/// Effective channels H_{l,k} (M_b x M_u) with H^H = D^H + sum_r G_r^H Theta_r S_{l,r}.
inline Grid<CMat> effective_channel(const ChannelSet& ch, const PhaseVector& theta) {
  ch.check();
  const int L = ch.num_bs(), K = ch.num_ue(), R = ch.num_irs(), n = ch.irs_elements();
  if (R > 0 && theta.size() != static_cast<Eigen::Index>(R) * n)
    throw ConfigError("effective_channel: theta length != R*N");
  Grid<CMat> h(L, std::vector<CMat>(K));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      CMat hh = ch.direct[l][k];
      for (int r = 0; r < R; ++r) {
        // S^H Theta^H G
        const CVec t = theta.block(r, n).conjugate();
        hh.noalias() += ch.bs_irs[l][r].adjoint() * (t.asDiagonal() * ch.irs_ue[r][k]);
      }
      h[l][k] = std::move(hh);
    }
  return h;
}

/// Per-UE second-order quantities under coherent joint transmission.
struct UserTerms {
  CMat signal;        // B_k = sum_l H_{l,k}^H W_{l,k}, M_u x M_u
  CMat interference;  // V_k = sum_{i != k} B_{k,i} B_{k,i}^H + sigma2 I
  CMat total;         // Vbar_k = V_k + B_k B_k^H
};

/// B_{k,i} = sum_l H_{l,k}^H W_{l,i}.
inline CMat cross_gain(const Grid<CMat>& h, const BeamformerSet& w, int k, int i) {
  const auto mu = h.at(0).at(k).cols();
  CMat b = CMat::Zero(mu, w.w.at(0).at(i).cols());
  for (std::size_t l = 0; l < h.size(); ++l) b.noalias() += h[l][k].adjoint() * w.w[l][i];
  return b;
}

inline std::vector<UserTerms> user_terms(const Grid<CMat>& h, const BeamformerSet& w, double sigma2) {
  if (h.size() != w.w.size()) throw ConfigError("user_terms: BS count mismatch");
  const int K = static_cast<int>(h.at(0).size());
  const auto mu = h[0][0].cols();
  std::vector<UserTerms> out(K);
  for (int k = 0; k < K; ++k) {
    CMat v = sigma2 * CMat::Identity(mu, mu);
    for (int i = 0; i < K; ++i) {
      const CMat b = cross_gain(h, w, k, i);
      if (i == k) {
        out[k].signal = b;
      } else {
        v.noalias() += b * b.adjoint();
      }
    }
    out[k].interference = hermitian_part(v);
    out[k].total = hermitian_part(v + out[k].signal * out[k].signal.adjoint());
  }
  return out;
}

/// SINR matrices Gamma_k = (B_k B_k^H) V_k^{-1} (receive-space orientation).
inline std::vector<CMat> sinr(const Grid<CMat>& h, const BeamformerSet& w, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("sinr: sigma2 must be positive");
  std::vector<CMat> out;
  for (const auto& t : user_terms(h, w, sigma2)) {
    // X V^{-1} = (V^{-1} X^H)^H for Hermitian V.
    const CMat s = t.signal * t.signal.adjoint();
    out.push_back(solve_hpd(t.interference, s.adjoint()).adjoint());
  }
  return out;
}

/// Stream-space SINR B_k^H V_k^{-1} B_k (Hermitian PSD). Same log det(I + .)
/// as sinr(); this is the form that maximizes the fractional-programming
/// surrogate.
inline std::vector<CMat> stream_sinr(const Grid<CMat>& h, const BeamformerSet& w, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("stream_sinr: sigma2 must be positive");
  std::vector<CMat> out;
  for (const auto& t : user_terms(h, w, sigma2))
    out.push_back(hermitian_part(t.signal.adjoint() * solve_hpd(t.interference, t.signal)));
  return out;
}

/// Sum rate in nats, sum_k log det(Vbar_k) - log det(V_k).
inline double sum_rate(const Grid<CMat>& h, const BeamformerSet& w, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("sum_rate: sigma2 must be positive");
  double r = 0.0;
  for (const auto& t : user_terms(h, w, sigma2)) r += log_det_hpd(t.total) - log_det_hpd(t.interference);
  return r;
}

inline double sum_rate(const ChannelSet& ch, const BeamformerSet& w, const PhaseVector& theta, double sigma2) {
  return sum_rate(effective_channel(ch, theta), w, sigma2);
}

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

}  // namespace irscf
