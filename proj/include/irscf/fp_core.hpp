// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "irscf/model.hpp"

namespace irscf {

/// Auxiliary matrices of the Lagrangian-dual and quadratic transforms.
/// Both are dense M_u x M_u; their optimizers are not diagonal in general.
struct AuxState {
  std::vector<CMat> u;  // U_k
  std::vector<CMat> y;  // Y_k
};

/// U_k <- SINR_k. Pass stream_sinr() output to maximize the surrogate.
inline std::vector<CMat> update_u(const std::vector<CMat>& gamma) { return gamma; }

/// MMSE receive filters Y_k = Vbar_k^{-1} B_k.
inline std::vector<CMat> update_y(const Grid<CMat>& h, const BeamformerSet& w, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("update_y: sigma2 must be positive");
  std::vector<CMat> y;
  for (const auto& t : user_terms(h, w, sigma2)) y.push_back(solve_hpd(t.total, t.signal));
  return y;
}

/// U then Y at the current (W, Theta).
inline AuxState refresh_aux(const Grid<CMat>& h, const BeamformerSet& w, double sigma2) {
  return {update_u(stream_sinr(h, w, sigma2)), update_y(h, w, sigma2)};
}

namespace detail {

inline CMat ubar(const CMat& u) { return u + CMat::Identity(u.rows(), u.cols()); }

}  // namespace detail

/// sum_k log|I + U_k| - Tr(U_k); the U-only part of f3.
inline double aux_constant(const AuxState& aux) {
  double c = 0.0;
  for (const auto& u : aux.u) {
    const cplx ld = log_det(detail::ubar(u));
    if (ld.real() < std::log(1e-12)) throw std::domain_error("aux_constant: I + U is singular");
    c += ld.real() - real_trace(u);
  }
  return c;
}

/// f4: the (W, Theta, Y)-dependent part of the quadratic-transform surrogate.
inline double eval_f4(const Grid<CMat>& h, const BeamformerSet& w, const AuxState& aux, double sigma2) {
  const int K = static_cast<int>(h.at(0).size());
  if (static_cast<int>(aux.u.size()) != K || static_cast<int>(aux.y.size()) != K)
    throw ConfigError("eval_f4: aux size != K");
  double f = 0.0;
  const auto terms = user_terms(h, w, sigma2);
  for (int k = 0; k < K; ++k) {
    const CMat ub = detail::ubar(aux.u[k]);
    const CMat& y = aux.y[k];
    const CMat& b = terms[k].signal;
    const CMat quad = terms[k].total - sigma2 * CMat::Identity(b.rows(), b.rows());
    const cplx lin = (ub * y.adjoint() * b).trace() + (ub * b.adjoint() * y).trace();
    const cplx q = (ub * y.adjoint() * quad * y).trace();
    const cplx noise = sigma2 * (ub * y.adjoint() * y).trace();
    f += lin.real() - q.real() - noise.real();
  }
  return f;
}

inline double eval_f4(const ChannelSet& ch, const PhaseVector& theta, const BeamformerSet& w, const AuxState& aux,
                      double sigma2) {
  return eval_f4(effective_channel(ch, theta), w, aux, sigma2);
}

/// f3 = f4 + sum_k (log|Ubar_k| - Tr U_k). Equals the sum rate at the
/// closed-form U and Y.
inline double eval_f3(const Grid<CMat>& h, const BeamformerSet& w, const AuxState& aux, double sigma2) {
  return eval_f4(h, w, aux, sigma2) + aux_constant(aux);
}

inline double eval_f3(const ChannelSet& ch, const PhaseVector& theta, const BeamformerSet& w, const AuxState& aux,
                      double sigma2) {
  return eval_f3(effective_channel(ch, theta), w, aux, sigma2);
}

}  // namespace irscf
