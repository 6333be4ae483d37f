// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
//
// Independent reference computations for the test suite. Nothing here calls
// the library's solvers; only plain data types are shared.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "irscf/irscf.hpp"

namespace oracle {

using irscf::CMat;
using irscf::cplx;
using irscf::CVec;
using irscf::Grid;
using irscf::Rng;

// ---- random instances --------------------------------------------------------

struct Dims {
  int L = 2, K = 2, R = 1, mb = 2, mu = 2, n = 4;
};

inline irscf::ChannelSet random_channels(const Dims& d, Rng& rng, double scale = 1.0) {
  irscf::ChannelSet ch;
  ch.direct.assign(d.L, std::vector<CMat>(d.K));
  ch.irs_ue.assign(d.R, std::vector<CMat>(d.K));
  ch.bs_irs.assign(d.L, std::vector<CMat>(d.R));
  for (int l = 0; l < d.L; ++l)
    for (int k = 0; k < d.K; ++k) ch.direct[l][k] = scale * irscf::complex_gaussian_matrix(d.mb, d.mu, rng);
  for (int r = 0; r < d.R; ++r)
    for (int k = 0; k < d.K; ++k) ch.irs_ue[r][k] = irscf::complex_gaussian_matrix(d.n, d.mu, rng);
  for (int l = 0; l < d.L; ++l)
    for (int r = 0; r < d.R; ++r) ch.bs_irs[l][r] = scale * irscf::complex_gaussian_matrix(d.n, d.mb, rng);
  return ch;
}

inline irscf::BeamformerSet random_w(const Dims& d, Rng& rng, double scale = 1.0) {
  irscf::BeamformerSet w;
  w.w.assign(d.L, std::vector<CMat>(d.K));
  for (auto& row : w.w)
    for (auto& m : row) m = scale * irscf::complex_gaussian_matrix(d.mb, d.mu, rng);
  return w;
}

inline irscf::PhaseVector random_theta(Eigen::Index n, double alpha, Rng& rng) {
  return irscf::PhaseVector::random(n, alpha, 0, rng);
}

inline CMat random_psd(int n, Rng& rng) {
  const CMat g = irscf::complex_gaussian_matrix(n, n, rng);
  return g * g.adjoint();
}

/// Random CMC-QP data with PSD Zc.
inline irscf::CmcQp random_qp(int n, Rng& rng, double omega_scale = 1.0) {
  irscf::CmcQp d;
  d.zcal = random_psd(n, rng);
  d.zcal = 0.5 * (d.zcal + d.zcal.adjoint()).eval();
  d.omega = omega_scale * irscf::complex_gaussian_matrix(n, 1, rng).col(0);
  return d;
}

inline irscf::SystemConfig config_for(const Dims& d, double p = 1.0, double sigma2 = 1.0) {
  irscf::SystemConfig c;
  c.num_bs = d.L;
  c.num_ue = d.K;
  c.num_irs = d.R;
  c.bs_antennas = d.mb;
  c.ue_antennas = d.mu;
  c.irs_rows = 1;
  c.irs_cols = d.n;
  c.p_max.assign(d.L, p);
  c.sigma2 = sigma2;
  return c;
}

// ---- naive channel / rate evaluation ----------------------------------------

/// H_{l,k} by explicit element loops: H^H(a, b) = D^H(a, b) + sum_r sum_n conj(G(n, a)) t_n S(n, b).
inline Grid<CMat> naive_effective(const irscf::ChannelSet& ch, const CVec& theta) {
  const int L = ch.num_bs(), K = ch.num_ue(), R = ch.num_irs();
  Grid<CMat> h(L, std::vector<CMat>(K));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      const CMat& d = ch.direct[l][k];
      CMat hh(d.cols(), d.rows());  // M_u x M_b, this is H^H
      for (Eigen::Index a = 0; a < d.cols(); ++a)
        for (Eigen::Index b = 0; b < d.rows(); ++b) {
          cplx v = std::conj(d(b, a));
          for (int r = 0; r < R; ++r) {
            const CMat& g = ch.irs_ue[r][k];
            const CMat& s = ch.bs_irs[l][r];
            const auto n = g.rows();
            for (Eigen::Index i = 0; i < n; ++i) v += std::conj(g(i, a)) * theta(r * n + i) * s(i, b);
          }
          hh(a, b) = v;
        }
      h[l][k] = hh.adjoint();
    }
  return h;
}

inline CMat matmul(const CMat& a, const CMat& b) {
  CMat c = CMat::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index t = 0; t < a.cols(); ++t) c(i, j) += a(i, t) * b(t, j);
  return c;
}

inline CMat herm(const CMat& a) {
  CMat b(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) b(j, i) = std::conj(a(i, j));
  return b;
}

/// Gaussian-elimination determinant (partial pivoting).
inline cplx det(CMat a) {
  const auto n = a.rows();
  cplx d = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (std::abs(a(p, c)) == 0.0) return 0.0;
    if (p != c) {
      a.row(p).swap(a.row(c));
      d = -d;
    }
    d *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const cplx f = a(r, c) / a(c, c);
      for (Eigen::Index j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return d;
}

/// Gauss-Jordan inverse.
inline CMat inverse(CMat a) {
  const auto n = a.rows();
  CMat inv = CMat::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    a.row(p).swap(a.row(c));
    inv.row(p).swap(inv.row(c));
    const cplx piv = a(c, c);
    a.row(c) /= piv;
    inv.row(c) /= piv;
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != c) {
        const cplx f = a(r, c);
        a.row(r) -= f * a.row(c);
        inv.row(r) -= f * inv.row(c);
      }
  }
  return inv;
}

/// Coherent joint-transmission rate, triple loops and log|I + S V^{-1}|.
inline double naive_sum_rate(const Grid<CMat>& h, const irscf::BeamformerSet& w, double sigma2) {
  const int L = static_cast<int>(h.size()), K = static_cast<int>(h[0].size());
  const auto mu = h[0][0].cols();
  double rate = 0.0;
  for (int k = 0; k < K; ++k) {
    CMat v = sigma2 * CMat::Identity(mu, mu);
    CMat sig = CMat::Zero(mu, mu);
    for (int i = 0; i < K; ++i) {
      CMat b = CMat::Zero(mu, w.w[0][i].cols());
      for (int l = 0; l < L; ++l) b += matmul(herm(h[l][k]), w.w[l][i]);
      const CMat bb = matmul(b, herm(b));
      if (i == k)
        sig += bb;
      else
        v += bb;
    }
    const CMat gamma = matmul(sig, inverse(v));
    rate += std::log(std::abs(det(CMat::Identity(mu, mu) + gamma)));
  }
  return rate;
}

// ---- transmit subproblem reference -----------------------------------------

/// Projected gradient on f5 with per-BS ball projection, step 1/(2 L_f).
inline irscf::BeamformerSet projected_gradient_f5(const Grid<CMat>& h, const irscf::AuxState& aux,
                                                  const std::vector<double>& p_max, int iters = 200000) {
  const int L = static_cast<int>(h.size()), K = static_cast<int>(h[0].size());
  const auto mb = h[0][0].rows(), mu = h[0][0].cols();
  // Build A and C from scratch: f5 = sum_i Tr(W_i^H A W_i) - 2 Re Tr(W_i^H C_i).
  CMat a = CMat::Zero(L * mb, L * mb);
  std::vector<CMat> c(K);
  for (int k = 0; k < K; ++k) {
    CMat hk(L * mb, mu);
    for (int l = 0; l < L; ++l) hk.middleRows(l * mb, mb) = h[l][k];
    const CMat ub = aux.u[k] + CMat::Identity(mu, mu);
    a += hk * aux.y[k] * ub * aux.y[k].adjoint() * hk.adjoint();
    c[k] = hk * aux.y[k] * ub;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (a + a.adjoint()));
  const double lip = std::max(es.eigenvalues().maxCoeff(), 1e-300);
  std::vector<CMat> w(K, CMat::Zero(L * mb, mu));
  for (int it = 0; it < iters; ++it) {
    double moved = 0.0;
    for (int k = 0; k < K; ++k) {
      const CMat next = w[k] - (a * w[k] - c[k]) / lip;
      moved += (next - w[k]).squaredNorm();
      w[k] = next;
    }
    for (int l = 0; l < L; ++l) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += w[k].middleRows(l * mb, mb).squaredNorm();
      if (p > p_max[l])
        for (int k = 0; k < K; ++k) w[k].middleRows(l * mb, mb) *= std::sqrt(p_max[l] / p);
    }
    if (moved < 1e-30) break;
  }
  irscf::BeamformerSet out;
  out.w.assign(L, std::vector<CMat>(K));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) out.w[l][k] = w[k].middleRows(l * mb, mb);
  return out;
}

// ---- phase references --------------------------------------------------------

/// f7 through its definition with explicit sums.
inline double f7(const CVec& t, const CMat& z, const CVec& w) {
  cplx quad = 0.0, lin = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    lin += std::conj(t(i)) * w(i);
    for (Eigen::Index j = 0; j < t.size(); ++j) quad += std::conj(t(i)) * z(i, j) * t(j);
  }
  return -quad.real() + 2.0 * lin.real();
}

/// Best value of f7 over a uniform phase grid for coordinate i, others fixed.
inline double grid_best_coordinate(CVec t, Eigen::Index i, const CMat& z, const CVec& w, double alpha, int points) {
  double best = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < points; ++m) {
    t(i) = std::polar(alpha, 2.0 * irscf::kPi * m / points);
    best = std::max(best, f7(t, z, w));
  }
  return best;
}

/// Joint enumeration over all levels^n grid assignments; returns the maximizer.
inline CVec brute_force_discrete(const CMat& z, const CVec& w, double alpha, int levels) {
  const auto n = w.size();
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= levels;
  CVec best(n), t(n);
  double best_val = -std::numeric_limits<double>::infinity();
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (Eigen::Index i = 0; i < n; ++i) {
      t(i) = std::polar(alpha, 2.0 * irscf::kPi * static_cast<double>(c % levels) / levels);
      c /= levels;
    }
    const double v = f7(t, z, w);
    if (v > best_val) {
      best_val = v;
      best = t;
    }
  }
  return best;
}

/// Central-difference directional derivative of f at x along dir.
template <class F, class X>
double directional_derivative(F&& f, const X& x, const X& dir, double h = 1e-6) {
  return (f(x + h * dir) - f(x - h * dir)) / (2.0 * h);
}

}  // namespace oracle
