// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "irscf/fp_core.hpp"
#include "irscf/model.hpp"
#include "irscf/random.hpp"

namespace irscf {

/// Constant-modulus QP  max f7(theta) = -theta^H Zc theta + 2 Re{theta^H omega},
/// |theta_i| = alpha, with Zc = Z (.) Q^T and omega = diag(E - A).
/// The remaining members are the intermediates of the construction.
struct CmcQp {
  CMat zcal;
  CVec omega;
  CMat z;  // sum_k G_k Y_k Ubar_k Y_k^H G_k^H
  CMat q;  // S Wsum S^H
  CMat a;  // sum_k G_k Y_k Ubar_k Y_k^H D_k^H Wsum S^H
  CMat e;  // sum_k G_k Y_k Ubar_k W_k^H S^H

  [[nodiscard]] Eigen::Index size() const { return omega.size(); }
};

inline CmcQp build_cmcqp(const StackedChannels& st, const BeamformerSet& w, const AuxState& aux) {
  const int K = static_cast<int>(st.g.size());
  const auto n = st.s.rows();
  const auto lmb = st.s.cols();
  CMat wsum = CMat::Zero(lmb, lmb);
  std::vector<CMat> wk(K);
  for (int k = 0; k < K; ++k) {
    wk[k] = w.stacked(k);
    wsum.noalias() += wk[k] * wk[k].adjoint();
  }

  CmcQp out;
  out.z = CMat::Zero(n, n);
  out.a = CMat::Zero(n, n);
  out.e = CMat::Zero(n, n);
  const CMat wsh = wsum * st.s.adjoint();
  for (int k = 0; k < K; ++k) {
    const CMat ub = aux.u.at(k) + CMat::Identity(aux.u[k].rows(), aux.u[k].cols());
    const CMat gyu = st.g[k] * aux.y.at(k) * ub;  // G_k Y_k Ubar_k
    out.z.noalias() += gyu * (st.g[k] * aux.y[k]).adjoint();
    out.a.noalias() += gyu * aux.y[k].adjoint() * st.d[k].adjoint() * wsh;
    out.e.noalias() += gyu * wk[k].adjoint() * st.s.adjoint();
  }
  out.z = hermitian_part(out.z);
  out.q = hermitian_part(st.s * wsh);
  out.zcal = hermitian_part(out.z.cwiseProduct(out.q.transpose()));
  out.omega = (out.e - out.a).diagonal();
  return out;
}

inline double eval_f7(const CVec& theta, const CmcQp& d) {
  return -theta.dot(d.zcal * theta).real() + 2.0 * theta.dot(d.omega).real();
}

inline double eval_f7(const PhaseVector& theta, const CmcQp& d) { return eval_f7(theta.theta, d); }

/// mu_i = omega_i - sum_{n != i} Zc_{i,n} theta_n.
inline cplx aso_mu(const CVec& theta, Eigen::Index i, const CmcQp& d) {
  return d.omega(i) - (d.zcal.row(i) * theta)(0) + d.zcal(i, i) * theta(i);
}

/// Exact maximizer over coordinate i: theta_i = alpha * exp(j arg mu_i).
/// Leaves theta_i unchanged when mu_i = 0.
inline void aso_coordinate(CVec& theta, Eigen::Index i, const CmcQp& d, double alpha) {
  const cplx mu = aso_mu(theta, i, d);
  if (std::abs(mu) == 0.0) return;
  theta(i) = alpha * mu / std::abs(mu);
}

inline void aso_coordinate(PhaseVector& theta, Eigen::Index i, const CmcQp& d) {
  aso_coordinate(theta.theta, i, d, theta.alpha);
}

struct AsoResult {
  PhaseVector theta;
  std::vector<double> trace;  // f7 before the first sweep and after each sweep
  int sweeps = 0;
  bool converged = false;
};

/// Coordinate ascent over all elements, repeated until the objective gain of
/// a full sweep is at most eps2. `order` (optional) fixes the visiting order.
inline AsoResult aso_solve(const PhaseVector& theta0, const CmcQp& d, double eps2, int max_sweeps,
                           const std::vector<Eigen::Index>* order = nullptr) {
  AsoResult res;
  res.theta = theta0;
  const auto n = d.size();
  if (theta0.size() != n) throw ConfigError("aso_solve: theta length mismatch");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  if (order) idx = *order;

  double rho = eval_f7(res.theta, d);
  res.trace.push_back(rho);
  for (int u = 0; u < max_sweeps; ++u) {
    for (auto i : idx) aso_coordinate(res.theta, i, d);
    const double next = eval_f7(res.theta, d);
    res.trace.push_back(next);
    res.sweeps = u + 1;
    const bool done = std::abs(next - rho) <= eps2;
    rho = next;
    if (done) {
      res.converged = true;
      break;
    }
  }
  return res;
}

struct QcrResult {
  PhaseVector theta;       // projected onto |theta_i| = alpha
  CVec relaxed;            // solution of the disc-relaxed problem
  double relaxed_objective = 0.0;
  double projected_objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Disc relaxation |theta_i|^2 <= alpha^2 solved by projected gradient ascent
/// with step 1/(2 lambda_max(Zc)), then mapped to the modulus circle.
inline QcrResult qcr_solve(const PhaseVector& theta0, const CmcQp& d, double tol = 1e-10, int max_iter = 20000) {
  const double alpha = theta0.alpha;
  if (!(alpha > 0.0)) throw std::domain_error("qcr_solve: alpha must be positive");
  const auto n = d.size();
  auto project_disc = [alpha](CVec& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i)
      if (std::abs(t(i)) > alpha) t(i) *= alpha / std::abs(t(i));
  };

  QcrResult res;
  CVec t = theta0.theta;
  project_disc(t);
  const double lmax = max_eigenvalue(d.zcal);
  const double scale = std::max({lmax, d.omega.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min()});
  if (lmax <= 1e-14 * scale) {
    // Linear objective: maximized on the boundary, aligned with omega.
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(d.omega(i)) > 0.0) t(i) = alpha * d.omega(i) / std::abs(d.omega(i));
    res.iterations = 1;
    res.converged = true;
  } else {
    for (int it = 0; it < max_iter; ++it) {
      CVec next = t + (d.omega - d.zcal * t) / lmax;
      project_disc(next);
      const double step = (next - t).norm();
      t = std::move(next);
      res.iterations = it + 1;
      if (step <= tol * alpha * std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1)))) {
        res.converged = true;
        break;
      }
    }
  }
  res.relaxed = t;
  res.relaxed_objective = eval_f7(t, d);
  res.theta = theta0;
  for (Eigen::Index i = 0; i < n; ++i)
    res.theta.theta(i) = std::abs(t(i)) > 0.0 ? alpha * t(i) / std::abs(t(i)) : cplx(alpha, 0.0);
  res.projected_objective = eval_f7(res.theta, d);
  return res;
}

struct SdrOptions {
  int n_randomizations = 200;
  double tol = 1e-6;
  int max_iter = 20000;
};

struct SdrResult {
  PhaseVector theta;
  CMat v;                     // relaxed (N+1)x(N+1) solution, diag = alpha^2
  CMat zhat;                  // lambda_max I - Zbar
  double sdp_objective = 0.0;  // Tr(zhat v)
  double dual_bound = 0.0;     // certified upper bound on the SDP optimum
  double rounded_objective = 0.0;  // thetahat^H zhat thetahat for the returned theta
  int iterations = 0;
  bool admm_converged = false;
};

/// Lifted matrix Zbar = [[Zc, -omega/alpha], [-omega^H/alpha, 0]] so that
/// thetahat^H Zbar thetahat = -f7(theta) for thetahat = [theta; alpha].
inline CMat sdr_lift(const CmcQp& d, double alpha) {
  const auto n = d.size();
  CMat zb = CMat::Zero(n + 1, n + 1);
  zb.topLeftCorner(n, n) = d.zcal;
  zb.topRightCorner(n, 1) = -d.omega / alpha;
  zb.bottomLeftCorner(1, n) = -d.omega.adjoint() / alpha;
  return zb;
}

namespace detail {

inline CMat project_psd(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(x));
  const RVec ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

inline CVec round_to_phases(const CVec& varpi, double alpha) {
  const auto n = varpi.size() - 1;
  CVec th(n);
  const cplx ref = varpi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx r = std::abs(ref) > 0.0 ? varpi(i) / ref : varpi(i);
    th(i) = std::abs(r) > 0.0 ? alpha * r / std::abs(r) : cplx(alpha, 0.0);
  }
  return th;
}

}  // namespace detail

/// Semidefinite relaxation: max Tr(zhat V) s.t. V_ii = alpha^2, V >= 0, solved
/// by ADMM (diagonal-affine step alternated with PSD projection), then
/// Gaussian randomization. Candidates are scored by f7 after mapping to the
/// modulus circle; the principal eigenvector is always a candidate.
inline SdrResult sdr_solve(const CmcQp& d, double alpha, Rng& rng, const SdrOptions& opt = {}) {
  const auto n = d.size();
  if (n < 1) throw std::domain_error("sdr_solve: empty problem");
  if (!(alpha > 0.0)) throw std::domain_error("sdr_solve: alpha must be positive");
  const auto nb = n + 1;
  const double a2 = alpha * alpha;

  SdrResult res;
  const CMat zbar = sdr_lift(d, alpha);
  const double lmax = max_eigenvalue(zbar);
  res.zhat = hermitian_part(lmax * CMat::Identity(nb, nb) - zbar);

  // Scaled ADMM on the normalized problem (unit diagonal, off-diagonal
  // objective of unit norm), X with the diagonal fixed and Y PSD, residual balancing.
  CMat c = res.zhat;
  c.diagonal().setZero();
  const double zn = c.norm();
  if (zn > 0.0) c /= zn;
  double rho = 1.0 / static_cast<double>(nb);
  CMat y = CMat::Identity(nb, nb);
  CMat lam = CMat::Zero(nb, nb);
  for (int it = 0; it < opt.max_iter; ++it) {
    CMat x = y - lam + c / rho;
    x.diagonal().setOnes();
    const CMat y_old = y;
    y = detail::project_psd(x + lam);
    lam += x - y;
    res.iterations = it + 1;
    const double r = (x - y).norm();
    const double sd = rho * (y - y_old).norm();
    const double eps_pri = opt.tol * std::max(x.norm(), y.norm());
    const double eps_dual = opt.tol * std::max(rho * lam.norm(), 1.0);
    if (r <= eps_pri && sd <= eps_dual) {
      res.admm_converged = true;
      break;
    }
    if (it % 10 == 9) {
      if (r > 10.0 * sd) {
        rho *= 2.0;
        lam /= 2.0;
      } else if (sd > 10.0 * r) {
        rho /= 2.0;
        lam *= 2.0;
      }
    }
  }
  y *= a2;

  // Restore the diagonal exactly by a congruence, which keeps V PSD.
  RVec dscale(nb);
  for (Eigen::Index i = 0; i < nb; ++i) {
    const double di = y(i, i).real();
    dscale(i) = di > 0.0 ? alpha / std::sqrt(di) : 0.0;
  }
  res.v = hermitian_part(dscale.asDiagonal() * y * dscale.asDiagonal());
  for (Eigen::Index i = 0; i < nb; ++i)
    if (dscale(i) == 0.0) res.v(i, i) = a2;
  res.sdp_objective = (res.zhat * res.v).trace().real();

  // For any y, Tr(zhat V) <= alpha^2 (sum y + nb * lambda_max(zhat - Diag y)).
  {
    RVec yv(nb);
    const CMat zv = res.zhat * res.v;
    for (Eigen::Index i = 0; i < nb; ++i) yv(i) = zv(i, i).real() / a2;
    CMat m = res.zhat;
    for (Eigen::Index i = 0; i < nb; ++i) m(i, i) -= yv(i);
    res.dual_bound = a2 * (yv.sum() + static_cast<double>(nb) * max_eigenvalue(m));
  }

  Eigen::SelfAdjointEigenSolver<CMat> es(res.v);
  const RVec sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMat factor = es.eigenvectors() * sq.asDiagonal();

  CVec best = detail::round_to_phases(es.eigenvectors().col(nb - 1), alpha);
  double best_val = eval_f7(best, d);
  // Without a converged V only the principal eigenvector is trusted.
  const int draws = res.admm_converged ? opt.n_randomizations : 0;
  for (int s = 0; s < draws; ++s) {
    CVec zeta(nb);
    for (Eigen::Index i = 0; i < nb; ++i) zeta(i) = complex_gaussian(rng);
    const CVec cand = detail::round_to_phases(factor * zeta, alpha);
    const double val = eval_f7(cand, d);
    if (val > best_val) {
      best_val = val;
      best = cand;
    }
  }
  res.theta.theta = best;
  res.theta.alpha = alpha;
  res.theta.levels = 0;
  CVec th(nb);
  th.head(n) = best;
  th(n) = alpha;
  res.rounded_objective = th.dot(res.zhat * th).real();
  return res;
}

struct DiscreteResult {
  PhaseVector theta;
  std::vector<double> trace;
  int sweeps = 0;
  bool converged = false;
};

/// Grid index maximizing cos(eta - 2 pi m / levels); ties go to the lower index.
inline int nearest_level(double eta, int levels) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < levels; ++m) {
    const double v = std::cos(eta - 2.0 * kPi * m / levels);
    if (v > best_val + 1e-12) {
      best_val = v;
      best = m;
    }
  }
  return best;
}

/// Discrete-phase coordinate ascent: each element takes the grid phase nearest
/// arg(mu_i) (exhaustive over the levels); sweeps until no element changes.
inline DiscreteResult discrete_sweep(const PhaseVector& theta0, const CmcQp& d, int levels, int max_sweeps) {
  if (levels < 2) throw std::domain_error("discrete_sweep: levels must be >= 2");
  DiscreteResult res;
  res.theta = theta0;
  res.theta.levels = levels;
  const double alpha = theta0.alpha;
  const auto n = d.size();
  CVec& t = res.theta.theta;
  res.trace.push_back(eval_f7(t, d));
  for (int u = 0; u < max_sweeps; ++u) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx mu = aso_mu(t, i, d);
      const double eta = std::abs(mu) > 0.0 ? std::arg(mu) : std::arg(t(i));
      const cplx next = std::polar(alpha, 2.0 * kPi * nearest_level(eta, levels) / levels);
      if (std::abs(next - t(i)) > 1e-12 * alpha) changed = true;
      t(i) = next;
    }
    res.trace.push_back(eval_f7(t, d));
    res.sweeps = u + 1;
    if (!changed) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace irscf
