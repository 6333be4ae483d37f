// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors

#include <gtest/gtest.h>

#include <cmath>

#include "irscf/irscf.hpp"
#include "oracles.hpp"

using namespace irscf;

namespace {

struct Instance {
  oracle::Dims d;
  Grid<CMat> h;
  BeamformerSet w;
  AuxState aux;
  SystemConfig cfg;
};

Instance make(std::uint64_t seed, double p_max = 1.0, oracle::Dims d = {}) {
  Rng rng(seed);
  Instance in;
  in.d = d;
  const ChannelSet ch = oracle::random_channels(d, rng);
  in.h = effective_channel(ch, oracle::random_theta(d.R * d.n, 1.0, rng));
  in.w = oracle::random_w(d, rng, 0.3);
  in.cfg = oracle::config_for(d, p_max, 0.5);
  in.aux = refresh_aux(in.h, in.w, in.cfg.sigma2);
  return in;
}

double lagrangian(const Instance& in, const BeamformerSet& w, const std::vector<double>& lambda) {
  double f = eval_f5(in.h, w, in.aux);
  for (int l = 0; l < in.d.L; ++l) f += lambda[l] * w.bs_power(l);
  return f;
}

BeamformerSet axpy(const BeamformerSet& a, double t, const BeamformerSet& b) {
  BeamformerSet c = a;
  for (std::size_t l = 0; l < c.w.size(); ++l)
    for (std::size_t k = 0; k < c.w[l].size(); ++k) c.w[l][k] += t * b.w[l][k];
  return c;
}

}  // namespace

TEST(EvalF5, ZeroPrecoderIsZero) {
  const Instance in = make(1);
  EXPECT_EQ(eval_f5(in.h, BeamformerSet::zeros(in.d.L, in.d.K, in.d.mb, in.d.mu), in.aux), 0.0);
}

TEST(EvalF5, DifferenceIdentityWithF4) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Instance in = make(s);
    Rng rng(s + 100);
    const BeamformerSet w1 = oracle::random_w(in.d, rng), w2 = oracle::random_w(in.d, rng);
    const double lhs = eval_f4(in.h, w1, in.aux, in.cfg.sigma2) - eval_f4(in.h, w2, in.aux, in.cfg.sigma2);
    const double rhs = eval_f5(in.h, w2, in.aux) - eval_f5(in.h, w1, in.aux);
    EXPECT_NEAR(lhs, rhs, 1e-9 * (std::abs(lhs) + 1.0));
  }
}

TEST(EvalF5, ScalarQuadratic) {
  const cplx hv(0.7, 0.1), yv(0.2, -0.5);
  const double u = 1.5;
  Grid<CMat> h(1, std::vector<CMat>(1, CMat::Constant(1, 1, hv)));
  AuxState aux{{CMat::Constant(1, 1, u)}, {CMat::Constant(1, 1, yv)}};
  // f5 = a|w|^2 - 2 Re(b^* w) with a = (1+u)|h|^2|y|^2 and b = (1+u) h y.
  const double a = (1 + u) * std::norm(hv) * std::norm(yv);
  const cplx b = (1 + u) * hv * yv;
  for (cplx wv : {cplx(1, 0), cplx(-0.3, 2.0)}) {
    BeamformerSet w;
    w.w.assign(1, std::vector<CMat>(1, CMat::Constant(1, 1, wv)));
    EXPECT_NEAR(eval_f5(h, w, aux), a * std::norm(wv) - 2 * (std::conj(b) * wv).real(), 1e-12);
  }
  const TxQuadratic q = build_tx_quadratic(h, aux);
  const cplx wmin = primal_w({0.0}, q).w[0][0](0, 0);
  EXPECT_LT(std::abs(wmin - b / a), 1e-12);
  // Scalar closed form with a multiplier.
  const double lam = 0.8;
  EXPECT_LT(std::abs(primal_w({lam}, q).w[0][0](0, 0) - b / (a + lam)), 1e-12);
}

TEST(PrimalW, VanishesAsLambdaGrows) {
  const Instance in = make(2);
  const TxQuadratic q = build_tx_quadratic(in.h, in.aux);
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e4, 1e8}) {
    const BeamformerSet w = primal_w(std::vector<double>(in.d.L, lam), q);
    double nrm = 0.0;
    for (int l = 0; l < in.d.L; ++l) nrm += w.bs_power(l);
    EXPECT_LT(nrm, prev);
    prev = nrm;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(PrimalW, StationaryPointOfLagrangian) {
  const Instance in = make(3);
  const std::vector<double> lambda(in.d.L, 1.0);
  const BeamformerSet w = primal_w(lambda, build_tx_quadratic(in.h, in.aux));
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    const BeamformerSet dir = oracle::random_w(in.d, rng);
    const double hstep = 1e-6;
    const double dd =
        (lagrangian(in, axpy(w, hstep, dir), lambda) - lagrangian(in, axpy(w, -hstep, dir), lambda)) / (2 * hstep);
    EXPECT_LT(std::abs(dd), 1e-5);
  }
}

TEST(PrimalW, PowerMonotoneInOwnMultiplier) {
  const Instance in = make(4);
  const TxQuadratic q = build_tx_quadratic(in.h, in.aux);
  for (int l = 0; l < in.d.L; ++l) {
    std::vector<double> lam(in.d.L, 0.5);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
      lam[l] = std::pow(10.0, -3.0 + 0.15 * i);
      const double p = primal_w(lam, q).bs_power(l);
      EXPECT_LE(p, prev * (1 + 1e-12));
      prev = p;
    }
  }
}

TEST(DualStep, ZeroViolationKeepsLambda) {
  DualState s{{0.7}, {0.5}, 0};
  BeamformerSet w;
  w.w.assign(1, std::vector<CMat>(1, CMat::Constant(1, 1, cplx(1.0, 0.0))));
  EXPECT_DOUBLE_EQ(dual_step(s, w, {1.0}).lambda[0], 0.7);
}

TEST(DualStep, ProjectionAtZero) {
  DualState s{{0.0}, {0.5}, 0};
  BeamformerSet w;
  w.w.assign(1, std::vector<CMat>(1, CMat::Constant(1, 1, cplx(0.5, 0.0))));
  EXPECT_DOUBLE_EQ(dual_step(s, w, {1.0}).lambda[0], 0.0);
}

TEST(DualStep, Arithmetic) {
  DualState s{{1.0}, {0.5}, 0};
  BeamformerSet w;
  w.w.assign(1, std::vector<CMat>(1, CMat::Constant(1, 1, cplx(std::sqrt(3.0), 0.0))));
  const DualState n = dual_step(s, w, {1.0});
  EXPECT_NEAR(n.lambda[0], 2.0, 1e-15);
  EXPECT_EQ(n.iteration, 1);
}

TEST(OptimizeW, InactiveConstraintGivesUnconstrainedMinimizer) {
  const Instance in = make(5, 1e9);
  const TxResult r = optimize_w(in.h, in.aux, in.cfg);
  EXPECT_TRUE(r.converged);
  for (double lam : r.dual.lambda) EXPECT_LT(lam, 1e-12);
  const BeamformerSet w0 = primal_w(std::vector<double>(in.d.L, 0.0), build_tx_quadratic(in.h, in.aux));
  for (int l = 0; l < in.d.L; ++l)
    for (int k = 0; k < in.d.K; ++k) EXPECT_LT((r.w.w[l][k] - w0.w[l][k]).norm(), 1e-9 * (1 + w0.w[l][k].norm()));
}

TEST(OptimizeW, TinyBudgetIsActive) {
  const Instance in = make(6, 1e-4);
  const TxResult r = optimize_w(in.h, in.aux, in.cfg);
  EXPECT_TRUE(r.converged);
  for (int l = 0; l < in.d.L; ++l) EXPECT_NEAR(r.w.bs_power(l), 1e-4, 1e-3 * 1e-4);
}

TEST(OptimizeW, MatchesProjectedGradientReference) {
  for (std::uint64_t s = 10; s < 30; ++s) {
    const Instance in = make(s, 0.2);
    const TxResult r = optimize_w(in.h, in.aux, in.cfg);
    const BeamformerSet ref = oracle::projected_gradient_f5(in.h, in.aux, in.cfg.p_max);
    const double f = eval_f5(in.h, r.w, in.aux), fr = eval_f5(in.h, ref, in.aux);
    EXPECT_NEAR(f, fr, 1e-4 * std::abs(fr)) << "seed " << s;
    EXPECT_TRUE(r.w.feasible(in.cfg.p_max));
  }
}

TEST(OptimizeW, ComplementarySlackness) {
  for (std::uint64_t s = 30; s < 50; ++s) {
    const Instance in = make(s, s % 2 ? 0.05 : 50.0);
    const TxResult r = optimize_w(in.h, in.aux, in.cfg);
    for (int l = 0; l < in.d.L; ++l)
      EXPECT_LT(std::abs(r.dual.lambda[l] * (r.w.bs_power(l) - in.cfg.p_max[l])), 1e-4 * in.cfg.p_max[l]);
  }
}

TEST(OptimizeW, BlockAscentOnF4) {
  for (std::uint64_t s = 50; s < 70; ++s) {
    Instance in = make(s, 0.3);
    // Start from a feasible W.
    detail::clip_to_budget(in.w, in.cfg.p_max);
    const double before = eval_f4(in.h, in.w, in.aux, in.cfg.sigma2);
    const TxResult r = optimize_w(in.h, in.aux, in.cfg);
    EXPECT_GE(eval_f4(in.h, r.w, in.aux, in.cfg.sigma2), before - 1e-9 * std::abs(before));
  }
}

TEST(OptimizeW, FixedStepFromConfigAlsoConverges) {
  Instance in = make(71, 0.3);
  in.cfg.tau.assign(in.d.L, 1.0 / 0.3);
  const TxResult r = optimize_w(in.h, in.aux, in.cfg);
  EXPECT_TRUE(r.w.feasible(in.cfg.p_max));
  const TxResult b = optimize_w(in.h, in.aux, in.cfg, nullptr, DualStrategy::kBisection);
  EXPECT_NEAR(eval_f5(in.h, r.w, in.aux), eval_f5(in.h, b.w, in.aux), 1e-4 * std::abs(eval_f5(in.h, b.w, in.aux)));
}

TEST(OptimizeW, BisectionAgreesWithSubgradient) {
  oracle::Dims d;
  d.L = 3;
  for (std::uint64_t s = 80; s < 90; ++s) {
    const Instance in = make(s, 0.1, d);
    const TxResult a = optimize_w(in.h, in.aux, in.cfg);
    const TxResult b = optimize_w(in.h, in.aux, in.cfg, nullptr, DualStrategy::kBisection);
    EXPECT_TRUE(a.converged);
    EXPECT_TRUE(b.converged);
    for (int l = 0; l < d.L; ++l) EXPECT_NEAR(a.dual.lambda[l], b.dual.lambda[l], 1e-6 * (1 + b.dual.lambda[l]));
  }
}

TEST(OptimizeW, IterationCapReturnsFeasibleWithFlag) {
  Instance in = make(91, 0.05);
  in.cfg.max_dual = 2;
  const TxResult r = optimize_w(in.h, in.aux, in.cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(r.w.feasible(in.cfg.p_max));
}
