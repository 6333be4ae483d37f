// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
//
// Single realization of a small scenario, all schemes side by side.

#include <cstdio>

#include "irscf/irscf.hpp"

int main() {
  using namespace irscf;
  SystemConfig cfg;
  cfg.num_bs = 3;
  cfg.num_ue = 2;
  cfg.num_irs = 2;
  cfg.irs_rows = 2;
  cfg.irs_cols = 8;
  cfg.p_max.assign(3, 0.1);

  Geometry geo;
  geo.bs = {{0, 0, 3}, {100, 0, 3}, {200, 0, 3}};
  geo.irs = {{90, 110, 6}, {110, 110, 6}};
  geo.ue_center_x = 100;
  geo.ue_center_y = 100;

  const ChannelSet ch = draw_realization(cfg, geo, 7);
  for (auto s : {PhaseSolver::kAso, PhaseSolver::kQcr, PhaseSolver::kSdr, PhaseSolver::kRandom, PhaseSolver::kNone}) {
    SchemeSpec scheme{s};
    Rng rng(11);
    const JointResult r = joint_optimize(ch, cfg, scheme, rng);
    std::printf("%-8s %8.4f bit/s/Hz  (%d iterations)\n", scheme.name().c_str(), nats_to_bits(r.rate),
                r.trace.iterations);
  }
  return 0;
}
