// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "irscf/channel.hpp"
#include "irscf/fp_core.hpp"
#include "irscf/irs_opt.hpp"
#include "irscf/model.hpp"
#include "irscf/random.hpp"
#include "irscf/tx_opt.hpp"

namespace irscf {

enum class PhaseSolver { kAso, kQcr, kSdr, kDiscrete, kRandom, kNone };

inline std::string to_string(PhaseSolver s) {
  switch (s) {
    case PhaseSolver::kAso: return "ASO";
    case PhaseSolver::kQcr: return "QCR";
    case PhaseSolver::kSdr: return "SDR";
    case PhaseSolver::kDiscrete: return "DISCRETE";
    case PhaseSolver::kRandom: return "RANDOM";
    case PhaseSolver::kNone: return "NONE";
  }
  return "?";
}

inline PhaseSolver parse_phase_solver(const std::string& s) {
  for (auto p : {PhaseSolver::kAso, PhaseSolver::kQcr, PhaseSolver::kSdr, PhaseSolver::kDiscrete,
                 PhaseSolver::kRandom, PhaseSolver::kNone})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown phase solver '" + s + "'");
}

/// One benchmark scheme. NONE evaluates the system without any IRS link.
struct SchemeSpec {
  PhaseSolver solver = PhaseSolver::kAso;
  int levels = 0;              // DISCRETE only
  double csi_error_rho = 0.0;  // optimize on perturbed CSI, report on true CSI
  std::string label;
  int sdr_randomizations = 200;

  [[nodiscard]] std::string name() const {
    if (!label.empty()) return label;
    std::string n = to_string(solver);
    if (solver == PhaseSolver::kDiscrete && levels > 0) n += "-M" + std::to_string(levels);
    return n;
  }
};

struct RunTrace {
  std::vector<double> sum_rate;  // nats on the optimization channels; entry 0 = initial point
  std::vector<double> true_rate;  // nats on the true channels (differs only with CSI error)
  std::vector<double> f3;         // surrogate after the W and theta steps of each iteration
  std::vector<int> dual_iterations;
  std::vector<int> aso_sweeps;
  double ms_aux = 0.0;
  double ms_tx = 0.0;
  double ms_phase = 0.0;
  int iterations = 0;
  bool converged = false;
  bool dual_warning = false;  // some transmit step hit max_dual
};

struct JointResult {
  BeamformerSet w;
  PhaseVector theta;
  RunTrace trace;
  double rate = 0.0;  // final sum rate (nats) on the true channels
};

/// Equal-power matched filter: W_{l,k} = sqrt(P_l / K) H_{l,k} / ||H_{l,k}||_F.
inline BeamformerSet matched_filter_init(const Grid<CMat>& h, const std::vector<double>& p_max) {
  const int L = static_cast<int>(h.size()), K = static_cast<int>(h.at(0).size());
  BeamformerSet w;
  w.w.assign(L, std::vector<CMat>(K));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      const double nrm = h[l][k].norm();
      w.w[l][k] = nrm > 0.0 ? CMat(std::sqrt(p_max.at(l) / K) / nrm * h[l][k])
                            : CMat(CMat::Zero(h[l][k].rows(), h[l][k].cols()));
    }
  return w;
}

/// Crude capacity bound K*M_u*log(1 + (sum_l sqrt(P_l) max_k ||H_{l,k}||_F)^2 / sigma2)
/// that holds for every feasible theta.
inline double rate_upper_bound(const ChannelSet& ch, const SystemConfig& cfg) {
  double amp = 0.0;
  for (int l = 0; l < ch.num_bs(); ++l) {
    double hmax = 0.0;
    for (int k = 0; k < ch.num_ue(); ++k) {
      double nrm = ch.direct[l][k].norm();
      for (int r = 0; r < ch.num_irs(); ++r) nrm += cfg.alpha * ch.irs_ue[r][k].norm() * ch.bs_irs[l][r].norm();
      hmax = std::max(hmax, nrm);
    }
    amp += std::sqrt(cfg.p_max.at(l)) * hmax;
  }
  return ch.num_ue() * ch.ue_antennas() * std::log(1.0 + amp * amp / cfg.sigma2);
}

namespace detail {

using Clock = std::chrono::steady_clock;
inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace detail

/// Alternating optimization U -> Y -> W -> theta until the relative sum-rate
/// change drops below eps3. The rng supplies the CSI perturbation (when the
/// scheme asks for one) and the initial phases.
inline JointResult joint_optimize(const ChannelSet& truth, const SystemConfig& cfg, const SchemeSpec& scheme,
                                  Rng& rng) {
  cfg.validate();
  truth.check();
  const bool no_irs = scheme.solver == PhaseSolver::kNone || truth.num_irs() == 0;
  const ChannelSet true_ch = no_irs ? truth.without_irs() : truth;
  const ChannelSet opt_ch = apply_csi_error(true_ch, scheme.csi_error_rho, rng);
  const Eigen::Index n_el = no_irs ? 0 : static_cast<Eigen::Index>(truth.num_irs()) * truth.irs_elements();

  const int levels = scheme.solver == PhaseSolver::kDiscrete ? (scheme.levels > 0 ? scheme.levels : cfg.discrete_levels) : 0;
  if (scheme.solver == PhaseSolver::kDiscrete && levels < 2)
    throw ConfigError("DISCRETE scheme needs levels >= 2");

  JointResult res;
  res.theta = PhaseVector::random(n_el, cfg.alpha, levels, rng);
  const StackedChannels st = no_irs ? StackedChannels{} : stack(opt_ch);

  Grid<CMat> h = effective_channel(opt_ch, res.theta);
  res.w = matched_filter_init(h, cfg.p_max);
  RunTrace& tr = res.trace;
  tr.sum_rate.push_back(sum_rate(h, res.w, cfg.sigma2));
  tr.true_rate.push_back(sum_rate(true_ch, res.w, res.theta, cfg.sigma2));

  std::vector<double> lambda;
  for (int t = 0; t < cfg.max_outer; ++t) {
    auto t0 = detail::Clock::now();
    const AuxState aux = refresh_aux(h, res.w, cfg.sigma2);
    tr.ms_aux += detail::ms_since(t0);

    t0 = detail::Clock::now();
    TxResult tx = optimize_w(h, aux, cfg, lambda.empty() ? nullptr : &lambda);
    tr.ms_tx += detail::ms_since(t0);
    tr.dual_iterations.push_back(tx.iterations);
    if (!tx.converged) tr.dual_warning = true;
    lambda = tx.dual.lambda;
    res.w = std::move(tx.w);

    t0 = detail::Clock::now();
    int sweeps = 0;
    if (!no_irs && scheme.solver != PhaseSolver::kRandom) {
      const CmcQp qp = build_cmcqp(st, res.w, aux);
      const double before = eval_f7(res.theta, qp);
      switch (scheme.solver) {
        case PhaseSolver::kAso: {
          auto r = aso_solve(res.theta, qp, cfg.eps2, cfg.max_aso);
          sweeps = r.sweeps;
          res.theta = std::move(r.theta);
          break;
        }
        case PhaseSolver::kDiscrete: {
          auto r = discrete_sweep(res.theta, qp, levels, cfg.max_aso);
          sweeps = r.sweeps;
          res.theta = std::move(r.theta);
          break;
        }
        case PhaseSolver::kQcr: {
          auto r = qcr_solve(res.theta, qp);
          if (eval_f7(r.theta, qp) >= before) res.theta = std::move(r.theta);
          break;
        }
        case PhaseSolver::kSdr: {
          SdrOptions opt;
          opt.n_randomizations = scheme.sdr_randomizations;
          auto r = sdr_solve(qp, cfg.alpha, rng, opt);
          if (eval_f7(r.theta, qp) >= before) res.theta = std::move(r.theta);
          break;
        }
        default: break;
      }
    }
    tr.ms_phase += detail::ms_since(t0);
    tr.aso_sweeps.push_back(sweeps);

    h = effective_channel(opt_ch, res.theta);
    tr.f3.push_back(eval_f3(h, res.w, aux, cfg.sigma2));
    const double rate = sum_rate(h, res.w, cfg.sigma2);
    const double prev = tr.sum_rate.back();
    tr.sum_rate.push_back(rate);
    tr.true_rate.push_back(sum_rate(true_ch, res.w, res.theta, cfg.sigma2));
    tr.iterations = t + 1;
    if (rate > 0.0 && std::abs(rate - prev) / rate < cfg.eps3) {
      tr.converged = true;
      break;
    }
  }
  res.rate = tr.true_rate.back();
  return res;
}

/// One Monte-Carlo row: a scheme evaluated on one channel realization.
struct McRow {
  std::string scheme;
  double sweep_value = 0.0;
  int seed = 0;
  double rate = 0.0;  // nats
  int iterations = 0;
  double wall_ms = 0.0;
  bool converged = false;
  std::vector<double> trace;  // per-iteration rate on true channels (nats)
};

struct McSummary {
  std::string scheme;
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

/// Seed of realization `seed_index`: channels and UE drop.
inline std::uint64_t realization_seed(std::uint64_t master, int seed_index) {
  return derive_seed(master, {0x7265616cULL, static_cast<std::uint64_t>(seed_index)});
}

/// Seed of a scheme's own stream (initial phases, CSI error, randomization).
/// Depends only on (seed_index, scheme name), so adding schemes never shifts
/// the draws of others.
inline std::uint64_t scheme_seed(std::uint64_t master, int seed_index, const std::string& scheme) {
  return derive_seed(master, {0x736368ULL, static_cast<std::uint64_t>(seed_index), fnv1a(scheme)});
}

/// Channels of one realization. UE positions are drawn in the template's disc
/// and the steering angles uniformly.
inline ChannelSet draw_realization(const SystemConfig& cfg, const Geometry& geometry_template, std::uint64_t seed) {
  Rng rng(seed);
  Geometry g = geometry_template;
  g.ue = sample_ue_positions(g, cfg.num_ue, rng);
  const SteeringAngles ang = sample_angles(cfg, rng);
  return sample_channels(cfg, g, ang, rng);
}

/// Runs every scheme on the same realizations. Rows are ordered by
/// (seed, scheme order); `threads` > 1 processes seeds concurrently.
inline std::vector<McRow> monte_carlo(const SystemConfig& cfg, const Geometry& geometry_template,
                                      const std::vector<SchemeSpec>& schemes, int n_seeds, std::uint64_t master_seed,
                                      double sweep_value = 0.0, int threads = 1) {
  if (n_seeds < 1) throw ConfigError("monte_carlo: n_seeds must be >= 1");
  const std::size_t S = schemes.size();
  std::vector<McRow> rows(static_cast<std::size_t>(n_seeds) * S);

  auto work = [&](int seed) {
    const ChannelSet ch = draw_realization(cfg, geometry_template, realization_seed(master_seed, seed));
    for (std::size_t s = 0; s < S; ++s) {
      const auto t0 = detail::Clock::now();
      Rng rng(scheme_seed(master_seed, seed, schemes[s].name()));
      const JointResult jr = joint_optimize(ch, cfg, schemes[s], rng);
      McRow& row = rows[static_cast<std::size_t>(seed) * S + s];
      row.scheme = schemes[s].name();
      row.sweep_value = sweep_value;
      row.seed = seed;
      row.rate = jr.rate;
      row.iterations = jr.trace.iterations;
      row.converged = jr.trace.converged;
      row.trace = jr.trace.true_rate;
      row.wall_ms = detail::ms_since(t0);
    }
  };

  threads = std::max(1, std::min(threads, n_seeds));
  if (threads == 1) {
    for (int seed = 0; seed < n_seeds; ++seed) work(seed);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int seed = t; seed < n_seeds; seed += threads) work(seed);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

/// Mean and standard error of the rate per scheme, in first-appearance order.
inline std::vector<McSummary> summarize_rows(const std::vector<McRow>& rows) {
  std::vector<McSummary> out;
  std::map<std::string, std::vector<double>> by;
  for (const auto& r : rows) {
    if (!by.count(r.scheme)) out.push_back({r.scheme, 0.0, 0.0, 0});
    by[r.scheme].push_back(r.rate);
  }
  for (auto& s : out) {
    const auto& v = by[s.scheme];
    s.count = static_cast<int>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= s.count;
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    s.mean = m;
    s.stderr_ = s.count > 1 ? std::sqrt(var / (s.count - 1) / s.count) : 0.0;
  }
  return out;
}

/// Per-seed differences rate(a) - rate(b), ordered by seed.
inline std::vector<double> paired_differences(const std::vector<McRow>& rows, const std::string& a,
                                              const std::string& b) {
  std::map<int, double> ra, rb;
  for (const auto& r : rows) {
    if (r.scheme == a) ra[r.seed] = r.rate;
    if (r.scheme == b) rb[r.seed] = r.rate;
  }
  std::vector<double> d;
  for (const auto& [seed, v] : ra)
    if (rb.count(seed)) d.push_back(v - rb[seed]);
  return d;
}

}  // namespace irscf
