// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "irscf/config.hpp"
#include "irscf/fp_core.hpp"
#include "irscf/model.hpp"

namespace irscf {

/// Dual variables of the per-BS power constraints.
struct DualState {
  std::vector<double> lambda;
  std::vector<double> tau;
  int iteration = 0;
};

/// f5: convex quadratic in W whose minimization is the transmit subproblem.
/// f4 = -f5 - sigma2 * sum_k Tr(Ubar_k Y_k^H Y_k).
inline double eval_f5(const Grid<CMat>& h, const BeamformerSet& w, const AuxState& aux) {
  const int K = static_cast<int>(h.at(0).size());
  double f = 0.0;
  for (int k = 0; k < K; ++k) {
    const CMat ub = aux.u.at(k) + CMat::Identity(aux.u[k].rows(), aux.u[k].cols());
    const CMat& y = aux.y.at(k);
    for (int i = 0; i < K; ++i) {
      const CMat b = cross_gain(h, w, k, i);
      f += (ub * y.adjoint() * b * b.adjoint() * y).trace().real();
      if (i == k) f -= 2.0 * (ub * y.adjoint() * b).trace().real();
    }
  }
  return f;
}

/// Data of the Lagrangian minimization in stacked form:
/// minimize sum_i Tr(W_i^H A W_i) - 2 Re Tr(W_i^H C_i) + sum_l lambda_l ||W_{l,.}||^2.
struct TxQuadratic {
  CMat a;               // (L*M_b)^2, Hermitian PSD
  std::vector<CMat> c;  // per UE, (L*M_b) x M_u
  int num_bs = 0;
  int bs_antennas = 0;
};

inline TxQuadratic build_tx_quadratic(const Grid<CMat>& h, const AuxState& aux) {
  const int L = static_cast<int>(h.size());
  const int K = static_cast<int>(h.at(0).size());
  const int mb = static_cast<int>(h[0][0].rows());
  TxQuadratic q;
  q.num_bs = L;
  q.bs_antennas = mb;
  q.a = CMat::Zero(L * mb, L * mb);
  for (int k = 0; k < K; ++k) {
    CMat hk(L * mb, h[0][k].cols());
    for (int l = 0; l < L; ++l) hk.middleRows(l * mb, mb) = h[l][k];
    const CMat ub = aux.u.at(k) + CMat::Identity(aux.u[k].rows(), aux.u[k].cols());
    const CMat hy = hk * aux.y.at(k);
    q.a.noalias() += hy * ub * hy.adjoint();
    q.c.push_back(hy * ub);
  }
  q.a = hermitian_part(q.a);
  return q;
}

/// Closed-form Lagrangian minimizer W_i = (A + blkdiag(lambda_l I))^{-1} C_i,
/// plus the slope d P_l / d lambda_l of each BS power at that point.
/// Falls back to the pseudo-inverse when the regularized matrix is singular.
struct PrimalSolution {
  BeamformerSet w;
  std::vector<double> power_slope;  // <= 0
};

inline PrimalSolution primal_solve(const std::vector<double>& lambda, const TxQuadratic& q) {
  const int L = q.num_bs, mb = q.bs_antennas, K = static_cast<int>(q.c.size());
  CMat m = q.a;
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < mb; ++j) m(l * mb + j, l * mb + j) += lambda.at(l);

  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  const RVec& ev = es.eigenvalues();
  const double cut = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  RVec inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) inv(i) = ev(i) > cut ? 1.0 / ev(i) : 0.0;
  const CMat minv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();

  PrimalSolution out;
  out.w = BeamformerSet::zeros(L, K, mb, static_cast<int>(q.c.at(0).cols()));
  out.power_slope.assign(L, 0.0);
  for (int k = 0; k < K; ++k) {
    const CMat wk = minv * q.c[k];
    for (int l = 0; l < L; ++l) {
      out.w.w[l][k] = wk.middleRows(l * mb, mb);
      const CMat& x = out.w.w[l][k];
      out.power_slope[l] -= 2.0 * (x.adjoint() * minv.block(l * mb, l * mb, mb, mb) * x).trace().real();
    }
  }
  return out;
}

inline BeamformerSet primal_w(const std::vector<double>& lambda, const TxQuadratic& q) {
  return primal_solve(lambda, q).w;
}

inline BeamformerSet primal_w(const DualState& s, const TxQuadratic& q) { return primal_w(s.lambda, q); }

/// Projected sub-gradient step lambda_l <- [lambda_l + tau_l (P_l(W) - P_max,l)]^+.
inline DualState dual_step(const DualState& s, const BeamformerSet& w, const std::vector<double>& p_max) {
  DualState out = s;
  for (std::size_t l = 0; l < s.lambda.size(); ++l) {
    const double violation = w.bs_power(static_cast<int>(l)) - p_max.at(l);
    out.lambda[l] = std::max(0.0, s.lambda[l] + s.tau.at(l) * violation);
  }
  ++out.iteration;
  return out;
}

enum class DualStrategy {
  kSubgradient,  // projected sub-gradient with sign-adaptive step sizes
  kBisection,    // cyclic per-BS bisection on the monotone power function
};

struct TxResult {
  BeamformerSet w;
  DualState dual;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

/// Scales each BS block down onto its power budget if it overshoots.
inline void clip_to_budget(BeamformerSet& w, const std::vector<double>& p_max) {
  for (int l = 0; l < w.num_bs(); ++l) {
    const double p = w.bs_power(l);
    if (p > p_max[l]) {
      const double s = std::sqrt(p_max[l] / p);
      for (auto& m : w.w[l]) m *= s;
    }
  }
}

/// Rough magnitude of the multipliers: value at which an isolated BS with
/// curvature trace(A_ll)/M_b would just meet its budget.
inline double lambda_scale(const TxQuadratic& q, int l, double p_max) {
  const int mb = q.bs_antennas;
  double cn = 0.0;
  for (const auto& c : q.c) cn += c.middleRows(l * mb, mb).squaredNorm();
  const double curv = q.a.block(l * mb, l * mb, mb, mb).trace().real() / mb;
  return std::max(std::sqrt(cn / p_max) + curv, std::numeric_limits<double>::min());
}

inline TxResult bisection(const TxQuadratic& q, const std::vector<double>& p_max, std::vector<double> lambda,
                          const SystemConfig& cfg) {
  const int L = q.num_bs;
  TxResult res;
  for (int cycle = 0; cycle < cfg.max_dual; ++cycle) {
    double change = 0.0;
    for (int l = 0; l < L; ++l) {
      const double old = lambda[l];
      auto power_at = [&](double v) {
        auto lam = lambda;
        lam[l] = v;
        return primal_w(lam, q).bs_power(l);
      };
      if (power_at(0.0) <= p_max[l]) {
        lambda[l] = 0.0;
      } else {
        double lo = 0.0, hi = std::max(lambda_scale(q, l, p_max[l]), old);
        while (power_at(hi) > p_max[l]) hi *= 2.0;
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          (power_at(mid) > p_max[l] ? lo : hi) = mid;
        }
        lambda[l] = hi;
      }
      const double denom = lambda[l] > 0.0 ? lambda[l] : 1.0;
      change = std::max(change, std::abs(lambda[l] - old) / denom);
    }
    res.iterations = cycle + 1;
    if (change < cfg.eps1) {
      res.converged = true;
      break;
    }
  }
  res.dual.lambda = lambda;
  res.dual.tau.assign(L, 0.0);
  res.dual.iteration = res.iterations;
  res.w = primal_w(lambda, q);
  clip_to_budget(res.w, p_max);
  return res;
}

}  // namespace detail

/// Transmit beamforming for fixed (Theta, U, Y): alternates the closed-form
/// primal update with projected dual sub-gradient steps. `warm_lambda`
/// seeds the multipliers (e.g. from the previous outer iteration).
inline TxResult optimize_w(const Grid<CMat>& h, const AuxState& aux, const SystemConfig& cfg,
                           const std::vector<double>* warm_lambda = nullptr,
                           DualStrategy strategy = DualStrategy::kSubgradient) {
  const TxQuadratic q = build_tx_quadratic(h, aux);
  const int L = q.num_bs;
  const auto& p_max = cfg.p_max;
  std::vector<double> lambda = warm_lambda && static_cast<int>(warm_lambda->size()) == L
                                   ? *warm_lambda
                                   : std::vector<double>(L, 0.0);

  if (strategy == DualStrategy::kBisection) return detail::bisection(q, p_max, lambda, cfg);

  // Step sizes: fixed tau from the config when given, otherwise the inverse
  // of the power slope in the BS's own multiplier (a diagonal Newton step on
  // the dual). Either way the step is halved whenever f_l changes sign.
  DualState s;
  s.lambda = lambda;
  s.tau.assign(L, 0.0);
  std::vector<double> damping(L, 1.0);
  std::vector<int> last_sign(L, 0);

  TxResult res;
  BeamformerSet best;
  double best_f5 = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_dual; ++it) {
    PrimalSolution ps = primal_solve(s.lambda, q);
    {
      BeamformerSet feasible = ps.w;
      detail::clip_to_budget(feasible, p_max);
      const double f = eval_f5(h, feasible, aux);
      if (f < best_f5) {
        best_f5 = f;
        best = std::move(feasible);
      }
    }
    for (int l = 0; l < L; ++l) {
      const double v = ps.w.bs_power(l) - p_max[l];
      const int sign = (v > 0) - (v < 0);
      if (sign != 0 && last_sign[l] != 0 && sign != last_sign[l]) damping[l] = std::max(0.5 * damping[l], 1e-6);
      if (sign != 0) last_sign[l] = sign;
      if (!cfg.tau.empty()) {
        s.tau[l] = damping[l] * cfg.tau[l];
      } else if (ps.power_slope[l] < 0.0) {
        s.tau[l] = damping[l] / -ps.power_slope[l];
      } else {
        s.tau[l] = damping[l] * detail::lambda_scale(q, l, p_max[l]) / (2.0 * p_max[l]);
      }
    }
    const DualState next = dual_step(s, ps.w, p_max);
    bool done = true;
    for (int l = 0; l < L; ++l) {
      const double diff = std::abs(next.lambda[l] - s.lambda[l]);
      if (next.lambda[l] > 0.0 ? diff / next.lambda[l] >= cfg.eps1 : diff >= cfg.eps1) done = false;
    }
    s = next;
    res.iterations = it + 1;
    if (done) {
      res.converged = true;
      res.w = std::move(ps.w);
      detail::clip_to_budget(res.w, p_max);
      break;
    }
  }
  if (!res.converged) res.w = std::move(best);
  res.dual = s;
  return res;
}

inline TxResult optimize_w(const ChannelSet& ch, const PhaseVector& theta, const AuxState& aux,
                           const SystemConfig& cfg) {
  return optimize_w(effective_channel(ch, theta), aux, cfg);
}

}  // namespace irscf
