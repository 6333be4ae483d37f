// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irscf/pipeline.hpp"

#ifndef IRSCF_VERSION
#define IRSCF_VERSION "0.0.0"
#endif

namespace irscf {

using json = nlohmann::json;

inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> p = {"iterations",           "n_phase_shifts",        "ue_center_x",
                                             "irs_pathloss_exponent", "reflecting_efficiency", "csi_error_rho",
                                             "discrete_levels"};
  return p;
}

/// BSs spread along y = 0 over [0, 200] m at 3 m, IRSs along y = 110 m at 6 m,
/// UE disc centered at (100, 100) with radius 10 m at 1.5 m.
inline Geometry reference_geometry(const SystemConfig& cfg) {
  Geometry g;
  for (int l = 0; l < cfg.num_bs; ++l) {
    const double x = cfg.num_bs == 1 ? 100.0 : 200.0 * l / (cfg.num_bs - 1);
    g.bs.push_back({x, 0.0, 3.0});
  }
  for (int r = 0; r < cfg.num_irs; ++r) g.irs.push_back({200.0 * (r + 1) / (cfg.num_irs + 1), 110.0, 6.0});
  return g;
}

/// Splits N elements into an N_v x N_h panel, keeping N_v = `rows` when it
/// divides N and otherwise taking the largest divisor of N below it.
inline std::pair<int, int> panel_shape(int n, int rows) {
  if (n < 1) throw ConfigError("n_phase_shifts must be >= 1");
  int nv = std::max(1, std::min(rows, n));
  while (n % nv != 0) --nv;
  return {nv, n / nv};
}

struct ExperimentSpec {
  SystemConfig base;
  Geometry geometry;
  std::string sweep_param = "n_phase_shifts";
  std::vector<double> sweep_values;
  std::vector<SchemeSpec> schemes;
  int n_seeds = 1;
  std::uint64_t master_seed = 1;
  std::string output_dir = "results";
  bool record_timing = true;

  void validate() const {
    base.validate();
    if (std::find(sweep_parameters().begin(), sweep_parameters().end(), sweep_param) == sweep_parameters().end())
      throw ConfigError("unknown sweep parameter '" + sweep_param + "'");
    if (sweep_values.empty()) throw ConfigError("sweep values must be non-empty");
    if (schemes.empty()) throw ConfigError("at least one scheme is required");
    if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    std::vector<std::string> names;
    for (const auto& s : schemes) {
      const std::string n = s.name();
      if (n.find_first_of(",\"\n\r") != std::string::npos)
        throw ConfigError("scheme label '" + n + "' must not contain commas, quotes or newlines");
      if (std::find(names.begin(), names.end(), n) != names.end())
        throw ConfigError("duplicate scheme '" + n + "'");
      names.push_back(n);
      if (s.csi_error_rho < 0.0) throw ConfigError("csi_error_rho must be >= 0");
      if (s.solver == PhaseSolver::kDiscrete && s.levels < 2 && base.discrete_levels < 2 &&
          sweep_param != "discrete_levels")
        throw ConfigError("DISCRETE scheme '" + n + "' needs levels >= 2");
    }
    for (double v : sweep_values) {
      auto integral = [&](double lo) { return std::isfinite(v) && v == std::floor(v) && v >= lo; };
      if (sweep_param == "iterations" && !integral(0.0)) throw ConfigError("iterations values must be integers >= 0");
      if (sweep_param == "n_phase_shifts" && !integral(1.0))
        throw ConfigError("n_phase_shifts values must be integers >= 1");
      if (sweep_param == "discrete_levels" && !integral(2.0))
        throw ConfigError("discrete_levels values must be integers >= 2");
      if (sweep_param == "reflecting_efficiency" && !(v > 0.0 && v <= 1.0))
        throw ConfigError("reflecting_efficiency values must lie in (0, 1]");
      if ((sweep_param == "csi_error_rho" || sweep_param == "irs_pathloss_exponent") && !(v >= 0.0))
        throw ConfigError(sweep_param + " values must be >= 0");
      if (sweep_param == "ue_center_x" && !std::isfinite(v)) throw ConfigError("ue_center_x values must be finite");
    }
  }
};

/// One point of the sweep: config, geometry and schemes with the swept
/// parameter substituted.
struct SweepPoint {
  SystemConfig cfg;
  Geometry geometry;
  std::vector<SchemeSpec> schemes;
};

inline SweepPoint apply_sweep(const ExperimentSpec& spec, double value) {
  SweepPoint p{spec.base, spec.geometry, spec.schemes};
  const std::string& s = spec.sweep_param;
  if (s == "iterations") {
    p.cfg.max_outer = std::max(p.cfg.max_outer, static_cast<int>(value));
  } else if (s == "n_phase_shifts") {
    const auto [nv, nh] = panel_shape(static_cast<int>(value), spec.base.irs_rows);
    p.cfg.irs_rows = nv;
    p.cfg.irs_cols = nh;
  } else if (s == "ue_center_x") {
    p.geometry.ue_center_x = value;
  } else if (s == "irs_pathloss_exponent") {
    p.cfg.pathloss_irs = value;
  } else if (s == "reflecting_efficiency") {
    p.cfg.alpha = value;
  } else if (s == "csi_error_rho") {
    for (auto& sc : p.schemes) sc.csi_error_rho = value;
  } else if (s == "discrete_levels") {
    p.cfg.discrete_levels = static_cast<int>(value);
    for (auto& sc : p.schemes)
      if (sc.solver == PhaseSolver::kDiscrete) {
        if (sc.label.empty()) sc.label = to_string(sc.solver);
        sc.levels = static_cast<int>(value);
      }
  }
  p.cfg.validate();
  return p;
}

// ---- JSON schema ----------------------------------------------------------

namespace detail {

/// 1-based line of the first occurrence of "key" in the source text, or 0.
inline int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class SpecReader {
 public:
  explicit SpecReader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& key, const std::string& msg) const {
    const int line = line_of_key(text_, key);
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + path + ": " + msg);
  }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, path.substr(path.rfind('/') + 1), "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(path + "/" + k, k, "unknown key");
    }
  }

  double number(const json& obj, const std::string& path, const std::string& key, double def) const {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "/" + key, key, "expected a number");
    return v.get<double>();
  }

  int integer(const json& obj, const std::string& path, const std::string& key, int def) const {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "/" + key, key, "expected an integer");
    return v.get<int>();
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const std::string& key) const {
    const json& v = obj.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) fail(path + "/" + key, key, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(path + "/" + key, key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<Point3> points(const json& obj, const std::string& path, const std::string& key) const {
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "/" + key, key, "expected an array of [x, y, z]");
    std::vector<Point3> out;
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number())
        fail(path + "/" + key, key, "expected an array of [x, y, z]");
      out.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    }
    return out;
  }

 private:
  const std::string& text_;
};

}  // namespace detail

inline SystemConfig parse_system(const json& j, const detail::SpecReader& rd) {
  const std::string p = "/system";
  rd.only_keys(j, p,
               {"num_bs", "num_ue", "num_irs", "bs_antennas", "ue_antennas", "irs_rows", "irs_cols", "alpha",
                "p_max_w", "sigma2_dbm", "beta_g_db", "beta_s_db", "c0_db", "d0", "pathloss_direct", "pathloss_irs",
                "discrete_levels", "eps1", "eps2", "eps3", "tau", "max_outer", "max_dual", "max_aso"});
  SystemConfig c;
  c.num_bs = rd.integer(j, p, "num_bs", c.num_bs);
  c.num_ue = rd.integer(j, p, "num_ue", c.num_ue);
  c.num_irs = rd.integer(j, p, "num_irs", c.num_irs);
  c.bs_antennas = rd.integer(j, p, "bs_antennas", c.bs_antennas);
  c.ue_antennas = rd.integer(j, p, "ue_antennas", c.ue_antennas);
  c.irs_rows = rd.integer(j, p, "irs_rows", c.irs_rows);
  c.irs_cols = rd.integer(j, p, "irs_cols", c.irs_cols);
  c.alpha = rd.number(j, p, "alpha", c.alpha);
  c.p_max.assign(static_cast<std::size_t>(std::max(c.num_bs, 0)), 0.1);
  if (j.contains("p_max_w")) {
    const auto v = rd.numbers(j, p, "p_max_w");
    if (v.size() == 1)
      std::fill(c.p_max.begin(), c.p_max.end(), v[0]);
    else
      c.p_max = v;
  }
  if (j.contains("sigma2_dbm")) c.sigma2 = dbm_to_watt(rd.number(j, p, "sigma2_dbm", -80.0));
  if (j.contains("beta_g_db")) c.beta_g = db_to_linear(rd.number(j, p, "beta_g_db", 3.0));
  if (j.contains("beta_s_db")) c.beta_s = db_to_linear(rd.number(j, p, "beta_s_db", 3.0));
  if (j.contains("c0_db")) c.c0 = db_to_linear(rd.number(j, p, "c0_db", -30.0));
  c.d0 = rd.number(j, p, "d0", c.d0);
  c.pathloss_direct = rd.number(j, p, "pathloss_direct", c.pathloss_direct);
  c.pathloss_irs = rd.number(j, p, "pathloss_irs", c.pathloss_irs);
  c.discrete_levels = rd.integer(j, p, "discrete_levels", c.discrete_levels);
  c.eps1 = rd.number(j, p, "eps1", c.eps1);
  c.eps2 = rd.number(j, p, "eps2", c.eps2);
  c.eps3 = rd.number(j, p, "eps3", c.eps3);
  if (j.contains("tau")) c.tau = rd.numbers(j, p, "tau");
  c.max_outer = rd.integer(j, p, "max_outer", c.max_outer);
  c.max_dual = rd.integer(j, p, "max_dual", c.max_dual);
  c.max_aso = rd.integer(j, p, "max_aso", c.max_aso);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    // Messages read "invalid SystemConfig: <field> ..."; point at that field.
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    const std::string field = colon == std::string::npos ? "" : msg.substr(colon + 2, msg.find(' ', colon + 2) - colon - 2);
    if (!field.empty() && j.contains(field)) rd.fail(p + "/" + field, field, msg);
    rd.fail(p, "system", msg);
  }
  return c;
}

inline Geometry parse_geometry(const json& j, const SystemConfig& cfg, const detail::SpecReader& rd) {
  const std::string p = "/geometry";
  rd.only_keys(j, p, {"bs", "irs", "ue_center", "ue_radius", "ue_height"});
  Geometry g = reference_geometry(cfg);
  if (j.contains("bs")) g.bs = rd.points(j, p, "bs");
  if (j.contains("irs")) g.irs = rd.points(j, p, "irs");
  if (j.contains("ue_center")) {
    const auto c = rd.numbers(j, p, "ue_center");
    if (c.size() != 2) rd.fail(p + "/ue_center", "ue_center", "expected [x, y]");
    g.ue_center_x = c[0];
    g.ue_center_y = c[1];
  }
  g.ue_radius = rd.number(j, p, "ue_radius", g.ue_radius);
  g.ue_height = rd.number(j, p, "ue_height", g.ue_height);
  if (static_cast<int>(g.bs.size()) != cfg.num_bs) rd.fail(p + "/bs", "bs", "count must equal num_bs");
  if (static_cast<int>(g.irs.size()) != cfg.num_irs) rd.fail(p + "/irs", "irs", "count must equal num_irs");
  if (g.ue_radius < 0.0) rd.fail(p + "/ue_radius", "ue_radius", "must be >= 0");
  if (!(g.ue_height > 0.0)) rd.fail(p + "/ue_height", "ue_height", "must be > 0");
  for (const auto* set : {&g.bs, &g.irs})
    for (const auto& pt : *set)
      if (!(pt.z > 0.0)) rd.fail(p, set == &g.bs ? "bs" : "irs", "heights must be > 0");
  return g;
}

inline SchemeSpec parse_scheme(const json& j, std::size_t idx, const detail::SpecReader& rd) {
  const std::string p = "/schemes/" + std::to_string(idx);
  rd.only_keys(j, p, {"solver", "levels", "csi_error_rho", "label", "sdr_randomizations"});
  if (!j.contains("solver") || !j.at("solver").is_string()) rd.fail(p + "/solver", "solver", "expected a string");
  SchemeSpec s;
  std::string name = j.at("solver").get<std::string>();
  int levels_in_name = 0;
  if (const auto open = name.find('('); open != std::string::npos && name.back() == ')') {
    try {
      levels_in_name = std::stoi(name.substr(open + 1, name.size() - open - 2));
    } catch (const std::exception&) {
      rd.fail(p + "/solver", "solver", "malformed solver '" + name + "'");
    }
    name = name.substr(0, open);
  }
  try {
    s.solver = parse_phase_solver(name);
  } catch (const ConfigError& e) {
    rd.fail(p + "/solver", "solver", e.what());
  }
  s.levels = rd.integer(j, p, "levels", levels_in_name);
  s.csi_error_rho = rd.number(j, p, "csi_error_rho", 0.0);
  s.sdr_randomizations = rd.integer(j, p, "sdr_randomizations", s.sdr_randomizations);
  if (j.contains("label")) {
    if (!j.at("label").is_string()) rd.fail(p + "/label", "label", "expected a string");
    s.label = j.at("label").get<std::string>();
  }
  if (s.csi_error_rho < 0.0) rd.fail(p + "/csi_error_rho", "csi_error_rho", "must be >= 0");
  if (s.sdr_randomizations < 1) rd.fail(p + "/sdr_randomizations", "sdr_randomizations", "must be >= 1");
  if (s.solver == PhaseSolver::kDiscrete && s.levels != 0 && s.levels < 2)
    rd.fail(p + "/levels", "levels", "must be >= 2");
  return s;
}

/// Parses and validates an experiment spec from JSON text.
inline ExperimentSpec parse_experiment(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  const detail::SpecReader rd(text);
  rd.only_keys(j, "", {"system", "geometry", "sweep", "schemes", "n_seeds", "master_seed", "output_dir", "record_timing"});

  ExperimentSpec spec;
  spec.base = parse_system(j.value("system", json::object()), rd);
  spec.geometry = parse_geometry(j.value("geometry", json::object()), spec.base, rd);

  if (!j.contains("sweep")) rd.fail("/sweep", "sweep", "missing");
  const json& sw = j.at("sweep");
  rd.only_keys(sw, "/sweep", {"param", "values"});
  if (!sw.contains("param") || !sw.at("param").is_string()) rd.fail("/sweep/param", "param", "expected a string");
  spec.sweep_param = sw.at("param").get<std::string>();
  if (!sw.contains("values")) rd.fail("/sweep/values", "values", "missing");
  spec.sweep_values = rd.numbers(sw, "/sweep", "values");

  if (!j.contains("schemes") || !j.at("schemes").is_array()) rd.fail("/schemes", "schemes", "expected an array");
  for (std::size_t i = 0; i < j.at("schemes").size(); ++i)
    spec.schemes.push_back(parse_scheme(j.at("schemes")[i], i, rd));

  spec.n_seeds = rd.integer(j, "", "n_seeds", spec.n_seeds);
  if (j.contains("master_seed")) {
    if (!j.at("master_seed").is_number_unsigned()) rd.fail("/master_seed", "master_seed", "expected an unsigned integer");
    spec.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) rd.fail("/output_dir", "output_dir", "expected a string");
    spec.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("record_timing")) {
    if (!j.at("record_timing").is_boolean()) rd.fail("/record_timing", "record_timing", "expected true or false");
    spec.record_timing = j.at("record_timing").get<bool>();
  }

  try {
    spec.validate();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const bool about_sweep = msg.find("sweep") != std::string::npos || msg.find("values") != std::string::npos;
    rd.fail(about_sweep ? "/sweep" : "", about_sweep ? "sweep" : "schemes", msg);
  }
  return spec;
}

inline ExperimentSpec load_experiment(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read spec file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

inline json to_json(const SystemConfig& c) {
  return {{"num_bs", c.num_bs},
          {"num_ue", c.num_ue},
          {"num_irs", c.num_irs},
          {"bs_antennas", c.bs_antennas},
          {"ue_antennas", c.ue_antennas},
          {"irs_rows", c.irs_rows},
          {"irs_cols", c.irs_cols},
          {"alpha", c.alpha},
          {"p_max_w", c.p_max},
          {"sigma2_w", c.sigma2},
          {"beta_g", c.beta_g},
          {"beta_s", c.beta_s},
          {"c0", c.c0},
          {"d0", c.d0},
          {"pathloss_direct", c.pathloss_direct},
          {"pathloss_irs", c.pathloss_irs},
          {"discrete_levels", c.discrete_levels},
          {"eps1", c.eps1},
          {"eps2", c.eps2},
          {"eps3", c.eps3},
          {"tau", c.tau},
          {"max_outer", c.max_outer},
          {"max_dual", c.max_dual},
          {"max_aso", c.max_aso}};
}

inline json to_json(const Geometry& g) {
  auto pts = [](const std::vector<Point3>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back({p.x, p.y, p.z});
    return a;
  };
  return {{"bs", pts(g.bs)},
          {"irs", pts(g.irs)},
          {"ue_center", {g.ue_center_x, g.ue_center_y}},
          {"ue_radius", g.ue_radius},
          {"ue_height", g.ue_height}};
}

inline json to_json(const ExperimentSpec& s) {
  json schemes = json::array();
  for (const auto& sc : s.schemes) {
    json o = {{"solver", to_string(sc.solver)}, {"csi_error_rho", sc.csi_error_rho}, {"name", sc.name()}};
    if (sc.solver == PhaseSolver::kDiscrete) o["levels"] = sc.levels;
    if (sc.solver == PhaseSolver::kSdr) o["sdr_randomizations"] = sc.sdr_randomizations;
    schemes.push_back(o);
  }
  return {{"system", to_json(s.base)},
          {"geometry", to_json(s.geometry)},
          {"sweep", {{"param", s.sweep_param}, {"values", s.sweep_values}}},
          {"schemes", schemes},
          {"n_seeds", s.n_seeds},
          {"master_seed", s.master_seed},
          {"record_timing", s.record_timing}};
}

// ---- Running --------------------------------------------------------------

struct ResultRow {
  std::string sweep_param;
  double value = 0.0;
  std::string scheme;
  int seed = 0;
  double sum_rate_bits = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  bool converged = false;
};

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline const char* kResultsHeader = "sweep_param,value,scheme,seed,sum_rate_bits,iterations,wall_ms,converged";

inline std::string to_csv_line(const ResultRow& r) {
  return r.sweep_param + ',' + format_g12(r.value) + ',' + r.scheme + ',' + std::to_string(r.seed) + ',' +
         format_g12(r.sum_rate_bits) + ',' + std::to_string(r.iterations) + ',' + format_g12(r.wall_ms) + ',' +
         (r.converged ? "1" : "0");
}

/// Runs the whole sweep. Rows are ordered by (sweep value, seed, scheme).
/// For the iterations sweep one run per seed supplies every value: the row
/// for value t holds the rate after t outer iterations (the initial point
/// for t = 0), held at its final value once the run has stopped.
inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, int threads = 1) {
  spec.validate();
  std::vector<ResultRow> out;
  auto emit = [&](double value, const std::vector<McRow>& rows) {
    for (const auto& r : rows)
      out.push_back({spec.sweep_param, value, r.scheme, r.seed, nats_to_bits(r.rate), r.iterations,
                     spec.record_timing ? r.wall_ms : 0.0, r.converged});
  };

  if (spec.sweep_param == "iterations") {
    const double vmax = *std::max_element(spec.sweep_values.begin(), spec.sweep_values.end());
    const SweepPoint p = apply_sweep(spec, vmax);
    const auto rows = monte_carlo(p.cfg, p.geometry, p.schemes, spec.n_seeds, spec.master_seed, 0.0, threads);
    for (double v : spec.sweep_values) {
      std::vector<McRow> at = rows;
      for (auto& r : at) {
        const auto t = std::min(static_cast<std::size_t>(v), r.trace.size() - 1);
        r.rate = r.trace[t];
      }
      emit(v, at);
    }
    return out;
  }

  for (double v : spec.sweep_values) {
    const SweepPoint p = apply_sweep(spec, v);
    emit(v, monte_carlo(p.cfg, p.geometry, p.schemes, spec.n_seeds, spec.master_seed, v, threads));
  }
  return out;
}

inline void write_results_csv(const std::filesystem::path& file, const std::vector<ResultRow>& rows) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << kResultsHeader << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
  if (!os) throw std::runtime_error("write failed: " + file.string());
}

inline json make_manifest(const ExperimentSpec& spec, std::size_t n_rows) {
  json names = json::array();
  for (const auto& s : spec.schemes) names.push_back(s.name());
  return {{"library", "irscf"},
          {"version", IRSCF_VERSION},
          {"spec", to_json(spec)},
          {"master_seed", spec.master_seed},
          {"seed_rule",
           "realization = splitmix64 chain of (master, 'real', seed); scheme stream = chain of (master, 'sch', seed, "
           "fnv1a(scheme name))"},
          {"rate_unit", "bit/s/Hz"},
          {"rows", n_rows},
          {"results", "results.csv"}};
}

/// Runs the spec and writes results.csv and manifest.json into `dir`.
inline std::vector<ResultRow> run_to_directory(const ExperimentSpec& spec, const std::filesystem::path& dir,
                                               int threads = 1) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto rows = run_experiment(spec, threads);
  write_results_csv(dir / "results.csv", rows);
  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  mf << make_manifest(spec, rows.size()).dump(2) << '\n';
  if (!mf) throw std::runtime_error("write failed: " + (dir / "manifest.json").string());
  return rows;
}

// ---- Summaries -------------------------------------------------------------

/// Thrown for unreadable or malformed results files.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  f.push_back(cur);
  return f;
}

inline std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw CsvError("row 1: unexpected header");
  std::vector<ResultRow> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    auto bad = [&](const std::string& what) { return CsvError("row " + std::to_string(row) + ": " + what); };
    if (f.size() != 8) throw bad("expected 8 fields, got " + std::to_string(f.size()));
    auto num = [&](const std::string& s, const char* col) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != s.size()) throw bad(std::string("non-numeric ") + col + " '" + s + "'");
      return v;
    };
    auto integer = [&](const std::string& s, const char* col) {
      const double v = num(s, col);
      if (v != std::floor(v)) throw bad(std::string("non-integer ") + col + " '" + s + "'");
      return static_cast<int>(v);
    };
    ResultRow r;
    r.sweep_param = f[0];
    r.value = num(f[1], "value");
    r.scheme = f[2];
    r.seed = integer(f[3], "seed");
    r.sum_rate_bits = num(f[4], "sum_rate_bits");
    r.iterations = integer(f[5], "iterations");
    r.wall_ms = num(f[6], "wall_ms");
    if (f[7] != "0" && f[7] != "1") throw bad("converged must be 0 or 1");
    r.converged = f[7] == "1";
    if (r.scheme.empty()) throw bad("empty scheme");
    rows.push_back(r);
  }
  return rows;
}

struct SummaryRow {
  std::string sweep_param;
  double value = 0.0;
  std::string scheme;
  double mean_bits = 0.0;
  double stderr_bits = 0.0;
  int n_seeds = 0;
};

inline const char* kSummaryHeader = "sweep_param,value,scheme,mean_bits,stderr_bits,n_seeds";

/// Mean and standard error per (sweep value, scheme), in first-appearance order.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::tuple<std::string, double, std::string>, std::vector<double>> groups;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.sweep_param, r.value, r.scheme);
    if (!groups.count(key)) out.push_back({r.sweep_param, r.value, r.scheme, 0.0, 0.0, 0});
    groups[key].push_back(r.sum_rate_bits);
  }
  for (auto& s : out) {
    const auto& v = groups[std::make_tuple(s.sweep_param, s.value, s.scheme)];
    const double n = static_cast<double>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    s.mean_bits = m;
    s.stderr_bits = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    s.n_seeds = static_cast<int>(v.size());
  }
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& s : rows)
    os << s.sweep_param << ',' << format_g12(s.value) << ',' << s.scheme << ',' << format_g12(s.mean_bits) << ','
       << format_g12(s.stderr_bits) << ',' << s.n_seeds << '\n';
}

}  // namespace irscf
