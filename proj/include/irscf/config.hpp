// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace irscf {

/// Thrown when dimensions or parameters of a scenario are inconsistent.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Scenario dimensions, powers, channel statistics and solver tolerances.
/// Defaults reproduce the reference simulation setup (six BSs, three IRSs,
/// four UEs, 60-element IRSs).
struct SystemConfig {
  int num_bs = 6;           // L
  int num_ue = 4;           // K
  int num_irs = 3;          // R; 0 means no IRS deployed
  int bs_antennas = 4;      // M_b
  int ue_antennas = 2;      // M_u
  int irs_rows = 6;         // N_v
  int irs_cols = 10;        // N_h
  double alpha = 1.0;       // reflecting efficiency
  std::vector<double> p_max = std::vector<double>(6, 0.1);  // W per BS
  double sigma2 = dbm_to_watt(-80.0);                        // W
  double beta_g = db_to_linear(3.0);
  double beta_s = db_to_linear(3.0);
  double c0 = db_to_linear(-30.0);
  double d0 = 1.0;
  double pathloss_direct = 3.75;
  double pathloss_irs = 2.2;
  int discrete_levels = 0;  // 0 = continuous phases
  double eps1 = 1e-10;      // dual relative tolerance
  double eps2 = 1e-10;      // ASO objective tolerance
  double eps3 = 1e-4;       // outer relative rate tolerance
  std::vector<double> tau;  // dual step sizes; empty = automatic
  int max_outer = 50;
  int max_dual = 2000;
  int max_aso = 200;

  [[nodiscard]] int irs_elements() const { return irs_rows * irs_cols; }  // N
  [[nodiscard]] int total_elements() const { return num_irs * irs_elements(); }

  void validate() const {
    auto need = [](bool ok, const std::string& what) {
      if (!ok) throw ConfigError("invalid SystemConfig: " + what);
    };
    need(num_bs >= 1, "num_bs must be >= 1");
    need(num_ue >= 1, "num_ue must be >= 1");
    need(num_irs >= 0, "num_irs must be >= 0");
    need(bs_antennas >= 1 && ue_antennas >= 1, "antenna counts must be >= 1");
    need(irs_rows >= 1 && irs_cols >= 1, "IRS rows/cols must be >= 1");
    need(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    need(static_cast<int>(p_max.size()) == num_bs, "p_max must have num_bs entries");
    for (double p : p_max) need(p > 0.0 && std::isfinite(p), "p_max entries must be positive");
    need(sigma2 > 0.0, "sigma2 must be positive");
    need(beta_g >= 0.0 && beta_s >= 0.0, "Rician factors must be >= 0");
    need(c0 > 0.0 && d0 > 0.0, "c0 and d0 must be positive");
    need(pathloss_direct >= 0.0 && pathloss_irs >= 0.0, "path-loss exponents must be >= 0");
    need(discrete_levels == 0 || discrete_levels >= 2, "discrete_levels must be 0 or >= 2");
    need(eps1 > 0.0 && eps2 >= 0.0 && eps3 > 0.0, "tolerances must be positive");
    need(tau.empty() || static_cast<int>(tau.size()) == num_bs, "tau must be empty or have num_bs entries");
    for (double t : tau) need(t > 0.0, "tau entries must be positive");
    need(max_outer >= 1 && max_dual >= 1 && max_aso >= 1, "iteration caps must be >= 1");
  }
};

}  // namespace irscf
