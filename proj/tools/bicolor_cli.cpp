// Copyright 2026 The bicolor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
// Command-line driver: run experiments from config files and print derived
// parameters.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "bicolor/harness.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> alpha;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> max_iters;
  std::optional<double> bit_budget;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--alpha", o.alpha, "Downlink weight in TotalCom")->check(CLI::NonNegativeNumber);
  cmd->add_option("--strategy", o.strategy, "subset_k_natural | rand_K_natural | custom")
      ->check(CLI::IsMember({"subset_k_natural", "rand_K_natural", "custom"}));
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap");
  cmd->add_option("--bit-budget", o.bit_budget, "Stop once TotalCom reaches this many bits");
}

bicolor::ExperimentConfig load(const std::string& path, const Overrides& o) {
  auto c = bicolor::load_config(path);
  if (o.seed) c.seeds = {*o.seed};
  if (o.out) c.output = *o.out;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.strategy) c.strategy = *o.strategy;
  if (o.max_iters) c.max_iters = *o.max_iters;
  if (o.bit_budget) c.bit_budget = *o.bit_budget;
  return c;
}

int cmd_run(const bicolor::ExperimentConfig& c, const std::string& format) {
  const auto result = bicolor::run_experiment(c);
  if (result.sweep) {
    for (const auto& e : result.sweep->entries)
      std::printf("sweep gamma=%s/L metric=%s%s\n",
                  bicolor::format_double(e.gamma_units).c_str(),
                  bicolor::format_double(e.metric).c_str(),
                  e.diverged ? " (diverged)" : "");
  }
  std::printf("gamma=%s/L\n", bicolor::format_double(result.gamma_units).c_str());
  for (const auto& tr : result.traces)
    std::printf("%s seed=%llu status=%s iterations=%llu rounds=%llu total_bits=%s metric=%s\n",
                tr.label.c_str(), static_cast<unsigned long long>(tr.seed),
                bicolor::to_string(tr.status),
                static_cast<unsigned long long>(tr.iterations),
                static_cast<unsigned long long>(tr.rounds),
                bicolor::format_double(tr.total_bits).c_str(),
                bicolor::format_double(tr.final_metric).c_str());
  const auto fmt = format == "svg" ? bicolor::OutputFormat::svg : bicolor::OutputFormat::csv;
  const auto files = bicolor::emit(result.traces, fmt, c.output, bicolor::fingerprint(c),
                                   bicolor::parse_stop_metric(c.stop_metric));
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  return 0;
}

std::string describe(const bicolor::CompressorSpec& s) {
  using K = bicolor::CompressorKind;
  switch (s.kind()) {
    case K::identity: return "identity";
    case K::natural: return "natural";
    case K::rand_k: return "rand_k(K=" + std::to_string(s.k()) + ")";
    case K::composed: return describe(s.outer()) + " o " + describe(s.inner());
  }
  return "?";
}

int cmd_params(const bicolor::ExperimentConfig& c) {
  const auto e = bicolor::build_experiment(c);
  const auto& P = e.problem;
  const auto& a = e.algo;
  std::printf("fingerprint %s\n", bicolor::fingerprint(c).c_str());
  std::printf("n %zu\nd %zu\nL %s\nmu %s\n", P.n(), P.d(),
              bicolor::format_double(P.L()).c_str(), bicolor::format_double(P.mu()).c_str());
  std::printf("omega %s\nomega_av %s\nomega_s %s\n",
              bicolor::format_double(e.omega).c_str(),
              bicolor::format_double(a.omega_av).c_str(),
              bicolor::format_double(e.omega_s).c_str());
  std::printf("gamma %s\nrho %s\nrho_y %s\neta %s\neta_y %s\nk %zu\n",
              bicolor::format_double(a.gamma).c_str(), bicolor::format_double(a.rho).c_str(),
              bicolor::format_double(a.rho_y).c_str(), bicolor::format_double(a.eta).c_str(),
              bicolor::format_double(a.eta_y).c_str(), a.k);
  if (a.schedule.kind() == bicolor::PSchedule::Kind::constant)
    std::printf("p %s\n", bicolor::format_double(a.schedule.p()).c_str());
  else
    std::printf("p_t sqrt(b/(a+t)) a=%s b=%s\n", bicolor::format_double(a.schedule.a()).c_str(),
                bicolor::format_double(a.schedule.b()).c_str());
  std::printf("uplink %s\ndownlink %s\n", describe(a.uplink_specs.front()).c_str(),
              describe(a.downlink_spec).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bicolor: simulator for compressed local training with a shared variable"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_path;
  std::string format = "csv";
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", run_path, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);
  run->add_option("--format", format, "csv | svg")->check(CLI::IsMember({"csv", "svg"}));
  add_overrides(run, run_o);

  Overrides par_o;
  std::string par_path;
  auto* params = app.add_subcommand("params", "Print the derived step sizes and compressors");
  params->add_option("config", par_path, "Config file")->required()->check(CLI::ExistingFile);
  add_overrides(params, par_o);

  Overrides show_o;
  std::string show_path;
  auto* show = app.add_subcommand("config", "Print the normalized config and its fingerprint");
  show->add_option("config", show_path, "Config file")->required()->check(CLI::ExistingFile);
  add_overrides(show, show_o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(load(run_path, run_o), format);
    if (*params) return cmd_params(load(par_path, par_o));
    if (*show) {
      const auto c = load(show_path, show_o);
      std::cout << bicolor::serialize(c) << "# fingerprint " << bicolor::fingerprint(c) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
