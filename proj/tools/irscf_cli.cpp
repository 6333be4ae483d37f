// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
//
// irscf run <spec.json> [--out DIR] [--threads N] [--seed S] [--no-timing]
// irscf summarize <results.csv> [--out FILE]
//
// Exit status: 0 success, 2 configuration or input error, 3 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "irscf/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

int cmd_run(const std::string& spec_file, const std::optional<std::string>& out, int threads,
            const std::optional<std::uint64_t>& seed, bool no_timing) {
  irscf::ExperimentSpec spec;
  try {
    spec = irscf::load_experiment(spec_file);
    if (seed) spec.master_seed = *seed;
    if (out) spec.output_dir = *out;
    if (no_timing) spec.record_timing = false;
    if (threads < 1) throw irscf::ConfigError("--threads must be >= 1");
  } catch (const irscf::ConfigError& e) {
    std::cerr << spec_file << ": " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const auto rows = irscf::run_to_directory(spec, spec.output_dir, threads);
    std::cout << "wrote " << rows.size() << " rows to " << spec.output_dir << "/results.csv\n";
  } catch (const irscf::ConfigError& e) {
    std::cerr << spec_file << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}

int cmd_summarize(const std::string& csv, const std::optional<std::string>& out) {
  std::vector<irscf::SummaryRow> summary;
  try {
    std::ifstream in(csv);
    if (!in) throw irscf::CsvError("cannot read " + csv);
    summary = irscf::summarize(irscf::read_results_csv(in));
  } catch (const irscf::CsvError& e) {
    std::cerr << csv << ": " << e.what() << '\n';
    return kConfigError;
  }
  if (!out) {
    irscf::write_summary_csv(std::cout, summary);
    return std::cout ? 0 : kRuntimeError;
  }
  std::ofstream os(*out);
  if (os) irscf::write_summary_csv(os, summary);
  if (!os) {
    std::cerr << "cannot write " << *out << '\n';
    return kRuntimeError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint BS/IRS beamforming experiments for IRS-assisted cell-free MIMO", "irscf"};
  app.set_version_flag("--version", IRSCF_VERSION);
  app.require_subcommand(1);

  std::string spec_file, csv_file;
  std::optional<std::string> run_out, sum_out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool no_timing = false;

  auto* run = app.add_subcommand("run", "Run an experiment spec, writing results.csv and manifest.json");
  run->add_option("spec", spec_file, "Experiment spec (JSON)")->required();
  run->add_option("--out", run_out, "Output directory (overrides output_dir)");
  run->add_option("--threads", threads, "Worker threads")->default_val(1);
  run->add_option("--seed", seed, "Master seed (overrides master_seed)");
  run->add_flag("--no-timing", no_timing, "Write wall_ms as 0 for byte-reproducible output");

  auto* sum = app.add_subcommand("summarize", "Mean and standard error per sweep value and scheme");
  sum->add_option("results", csv_file, "results.csv from a run")->required();
  sum->add_option("--out", sum_out, "Write the summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*run) return cmd_run(spec_file, run_out, threads, seed, no_timing);
  return cmd_summarize(csv_file, sum_out);
}
