// cogmac: command-line runner for the cognitive multiple-access experiments.
//
//   cogmac outage   --scenario s.json --sweep ratio=0:40:2db --samples 1000000
//   cogmac bounds   --scenario s.json --sweep snr=0:20:5db --regime strong
//   cogmac allocate --scenario s.json --sweep snr_p=10:40:1db
//   cogmac slope    --scenario s.json --sweep snr_p=40:60:1db
//   cogmac validate --scenario s.json
//
// CSV goes to --out (stdout when omitted). COGMAC_WORKERS sets the Monte
// Carlo thread count and never changes results.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "cogmac/experiments.hpp"
#include "cogmac/outage.hpp"
#include "cogmac/power_alloc.hpp"
#include "cogmac/scenario.hpp"

namespace {

struct CommonArgs {
  std::string scenario;
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  std::string out;
  std::string sweep;
  std::string regime = "strong";
  std::string csi = "stat";
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_regime) {
  cmd->add_option("--scenario", a.scenario, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "Monte Carlo seed");
  cmd->add_option("--samples", a.samples, "Monte Carlo sample count");
  cmd->add_option("--out", a.out, "output CSV path (default: stdout)");
  cmd->add_option("--sweep", a.sweep,
                  "<param>=<start>:<stop>:<step><db|lin>")
      ->required();
  cmd->add_option("--csi", a.csi, "CSI model for allocation")
      ->check(CLI::IsMember({"stat", "inst"}));
  if (with_regime) {
    cmd->add_option("--regime", a.regime, "strong or weak primary interference")
        ->check(CLI::IsMember({"strong", "weak"}));
  }
}

int run(cogmac::ExperimentKind kind, const CommonArgs& a) {
  cogmac::ExperimentSpec spec;
  spec.kind = kind;
  spec.scenario = cogmac::load_scenario(a.scenario);
  spec.sweep = cogmac::parse_sweep(a.sweep);
  spec.samples = a.samples;
  spec.seed = a.seed;
  spec.regime = a.regime == "weak" ? cogmac::BoundsRegime::Weak
                                   : cogmac::BoundsRegime::Strong;
  spec.mode = a.csi == "inst" ? cogmac::CsiMode::Instantaneous
                              : cogmac::CsiMode::Statistical;

  const auto data = cogmac::run_experiment(spec);
  if (a.out.empty()) {
    data.write_csv(std::cout);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    data.write_csv(out);
    if (!out) throw std::runtime_error("write failed: " + a.out);
  }
  if (data.fitted_slope) {
    std::fprintf(stderr, "fitted slope: %.6f bits/s/Hz per dB\n",
                 *data.fitted_slope);
  }
  return 0;
}

int run_validate(const std::string& path) {
  const auto s = cogmac::load_scenario(path);
  const auto d = cogmac::derive_constants(s);
  const auto [p_min, p_max] = cogmac::power_limits(s, cogmac::CsiMode::Statistical);
  std::printf("users            %zu\n", s.users.size());
  std::printf("snr_p_db         %.6f\n", cogmac::linear_to_db(s.snr_p()));
  std::printf("gamma_th         %.17g\n", d.gamma_th);
  std::printf("zeta             %.17g\n", d.zeta);
  std::printf("c_p              %.17g\n", d.c_p);
  std::printf("rho_0            %.17g\n", cogmac::baseline_outage(s));
  std::printf("rho_m            %.17g\n", s.outage_margin);
  std::printf("coexistence      %s\n",
              cogmac::coexistence_feasible(s) ? "feasible" : "infeasible");
  std::printf("pivot_p_min      %.17g\n", p_min);
  std::printf("pivot_p_max      %.17g\n", p_max);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognitive multiple-access experiments: outage, ergodic bounds, "
               "outage-constrained power allocation"};
  app.require_subcommand(1);

  const std::map<std::string, cogmac::ExperimentKind> kinds = {
      {"outage", cogmac::ExperimentKind::OutageSweep},
      {"bounds", cogmac::ExperimentKind::BoundsSweep},
      {"allocate", cogmac::ExperimentKind::AllocationSweep},
      {"slope", cogmac::ExperimentKind::SlopeFit}};
  const std::map<std::string, std::string> help = {
      {"outage", "primary outage vs SNR_p/SNR_sp (closed form and Monte Carlo)"},
      {"bounds", "ergodic secondary rate vs per-user SNR with closed bounds"},
      {"allocate", "KKT power allocation vs primary SNR"},
      {"slope", "least-squares high-SNR slope of the allocation objective"}};

  std::map<std::string, CommonArgs> args;
  std::map<std::string, CLI::App*> cmds;
  for (const auto& [name, kind] : kinds) {
    cmds[name] = app.add_subcommand(name, help.at(name));
    add_common(cmds[name], args[name], kind == cogmac::ExperimentKind::BoundsSweep);
  }
  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "lint a scenario file");
  validate_cmd->add_option("--scenario", validate_path, "scenario JSON file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return run_validate(validate_path);
    for (const auto& [name, kind] : kinds) {
      if (cmds[name]->parsed()) return run(kind, args[name]);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cogmac: error: %s\n", e.what());
    return 1;
  }
  return 1;
}
