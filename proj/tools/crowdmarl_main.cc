// Copyright 2026 The crowdmarl Authors.
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

// Command-line front end: train, eval, sweep, oracle, plot.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crowdmarl/checkpoint.h"
#include "crowdmarl/errors.h"
#include "crowdmarl/experiment.h"
#include "crowdmarl/experiment_config.h"
#include "crowdmarl/maddpg.h"
#include "crowdmarl/svg_chart.h"

namespace crowdmarl {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

constexpr char kOutEnv[] = "CROWDMARL_OUT";
constexpr char kDefaultOut[] = "crowdmarl_out";

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig ResolveConfig(const GlobalFlags& flags) {
  ExperimentConfig config = flags.config_path.empty()
                                ? DefaultExperimentConfig()
                                : LoadConfig(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.out.empty()) {
    config.output_dir = flags.out;
  } else if (config.output_dir.empty()) {
    const char* env = std::getenv(kOutEnv);
    config.output_dir = (env != nullptr && *env != '\0') ? env : kDefaultOut;
  }
  return config;
}

void Check(const ExperimentConfig& config) {
  std::vector<std::string> errors = Validate(config);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

void Log(const std::string& line) { std::cerr << line << "\n"; }

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- train ---------------------------------------------------------------

struct TrainFlags {
  std::optional<int> episodes;
  std::optional<int> runs;
  bool no_checkpoints = false;
};

int RunTrain(const GlobalFlags& g, const TrainFlags& f) {
  ExperimentConfig config = ResolveConfig(g);
  if (f.episodes) config.trainer.episodes = *f.episodes;
  if (f.runs) config.runs = *f.runs;
  Check(config);
  RunOptions options;
  options.write_checkpoints = !f.no_checkpoints;
  options.log = Log;
  const std::vector<RunRecord> records = RunExperiment(config, options);
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::printf("run %zu eval mean:", r);
    for (Eigen::Index i = 0; i < records[r].eval_mean.size(); ++i) {
      std::printf(" %.4f", records[r].eval_mean[i]);
    }
    std::printf("\n");
  }
  std::printf("outputs written to %s\n", config.output_dir.c_str());
  return kExitOk;
}

// --- eval ----------------------------------------------------------------

struct EvalFlags {
  std::string baseline = "trained";
  std::string checkpoints;
  double constant = 0.0;
  std::optional<int> episodes;
};

int RunEval(const GlobalFlags& g, const EvalFlags& f) {
  ExperimentConfig config = ResolveConfig(g);
  if (f.episodes) config.eval_episodes = *f.episodes;
  Check(config);
  const EnvConfig& env = config.env;
  std::vector<Policy> policies;
  if (f.baseline == "trained") {
    namespace fs = std::filesystem;
    const fs::path dir = f.checkpoints.empty()
                             ? fs::path(config.output_dir) / "checkpoints" / "run_0"
                             : fs::path(f.checkpoints);
    for (int i = 0; i < env.n_agents; ++i) {
      const fs::path file = dir / ("agent_" + std::to_string(i) + ".json");
      Mlp actor = LoadActor(file.string());
      if (actor.input_size() != env.ObservationSize()) {
        throw ConfigError("checkpoint '" + file.string() + "' expects " +
                          std::to_string(actor.input_size()) +
                          " inputs but the config observes " +
                          std::to_string(env.ObservationSize()));
      }
      policies.push_back(ActorPolicy(std::move(actor), env.effort_cap));
    }
  } else {
    BaselineKind kind;
    if (f.baseline == "random") {
      kind = BaselineKind::kRandom;
    } else if (f.baseline == "zero") {
      kind = BaselineKind::kZero;
    } else if (f.baseline == "constant") {
      kind = BaselineKind::kConstant;
    } else {
      throw ConfigError("unknown baseline '" + f.baseline + "'");
    }
    policies.assign(env.n_agents, BaselinePolicy(kind, env.effort_cap, f.constant));
  }
  const EvaluationResult result =
      Evaluate(policies, env, config.eval_episodes, DeriveSeed(config.seed, 5),
               config.discounted);
  std::string csv = "agent,mean,variance\n";
  for (int i = 0; i < env.n_agents; ++i) {
    csv += std::to_string(i) + "," + Num(result.mean[i]) + "," +
           Num(result.variance[i]) + "\n";
    std::printf("agent %d mean %.4f variance %.4f\n", i, result.mean[i],
                result.variance[i]);
  }
  std::printf("overall mean %.4f\n", result.mean.mean());
  WriteText(std::filesystem::path(config.output_dir) / ("eval_" + f.baseline + ".csv"),
            csv);
  return kExitOk;
}

// --- sweep ---------------------------------------------------------------

struct SweepFlags {
  std::optional<int> episodes;
  std::optional<int> runs;
  std::vector<int> windows;
  std::vector<std::string> families;
};

int RunSweep(const GlobalFlags& g, const SweepFlags& f) {
  ExperimentConfig config = ResolveConfig(g);
  if (f.episodes) config.trainer.episodes = *f.episodes;
  if (f.runs) config.runs = *f.runs;
  if (!f.windows.empty()) config.k_sweep = f.windows;
  if (!f.families.empty()) config.sweep_families = f.families;
  Check(config);
  RunOptions options;
  options.write_checkpoints = false;
  options.log = Log;
  const SweepTable table = SweepMemoryLength(config, options);
  std::fputs(RenderSweepTable(table).c_str(), stdout);
  return kExitOk;
}

// --- oracle --------------------------------------------------------------

struct OracleFlags {
  double q = 1.0;
  double others = 1.0;
  double budget = 10.0;
  double cost = 1.0;
  double cap = 5.0;
  int n_agents = 0;
};

int RunOracle(const OracleFlags& f) {
  const BestResponse br = BestResponseDetail(f.q, f.others, f.budget, f.cost, f.cap);
  std::printf("best_response closed_form %.6f grid %.6f\n", br.closed_form, br.grid);
  if (f.n_agents > 0) {
    const SymmetricEquilibrium eq =
        SymmetricStaticEquilibrium(f.n_agents, f.budget, f.cost);
    std::printf("symmetric_equilibrium effort %.6f payoff %.6f\n", eq.effort,
                eq.payoff);
  }
  return kExitOk;
}

// --- plot ----------------------------------------------------------------

struct PlotFlags {
  std::string runs_dir;
  std::string plot_dir;
};

int RunPlot(const GlobalFlags& g, const PlotFlags& f) {
  ExperimentConfig config = ResolveConfig(g);
  namespace fs = std::filesystem;
  const std::string source = f.runs_dir.empty() ? config.output_dir : f.runs_dir;
  const std::string target =
      f.plot_dir.empty() ? (fs::path(config.output_dir) / "plots").string() : f.plot_dir;
  const std::vector<RunRecord> records = ReadRunDirectory(source);
  for (const std::string& file : EmitPlots(records, target)) {
    std::printf("%s\n", file.c_str());
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Multi-agent crowdsensing incentive simulator and trainer."};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(std::string("Default output directory: --out, else the config's "
                         "output_dir, else $") +
             kOutEnv + ", else ./" + kDefaultOut + ".");

  GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON config file (see docs/config.md)");
  app.add_option("--seed", g.seed, "Master seed; overrides the config");
  app.add_option("--out", g.out, "Output directory");

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train and evaluate agents for every run seed; write CSVs and checkpoints.");
  train_cmd->add_option("--episodes", train.episodes, "Training episodes per run");
  train_cmd->add_option("--runs", train.runs, "Number of independent seeds");
  train_cmd->add_flag("--no-checkpoints", train.no_checkpoints,
                      "Skip writing agent checkpoints");

  EvalFlags eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Evaluate trained actors or a baseline policy without exploration.");
  eval_cmd->add_option("--baseline", eval.baseline, "trained | random | zero | constant")
      ->check(CLI::IsMember({"trained", "random", "zero", "constant"}));
  eval_cmd->add_option("--checkpoints", eval.checkpoints,
                       "Directory of agent_<i>.json (default <out>/checkpoints/run_0)");
  eval_cmd->add_option("--constant", eval.constant, "Effort for the constant baseline");
  eval_cmd->add_option("--episodes", eval.episodes, "Evaluation episodes");

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Memory-length sweep: every dynamics family against every window K.");
  sweep_cmd->add_option("--episodes", sweep.episodes,
                        "Training episodes per run (reduce for a smoke run)");
  sweep_cmd->add_option("--runs", sweep.runs, "Seeds per cell");
  sweep_cmd->add_option("--k", sweep.windows, "Window lengths, e.g. --k 10 30");
  sweep_cmd->add_option("--families", sweep.families,
                        "Families: sine linear markov mixed");

  OracleFlags oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Static best response to the others' total contribution.");
  oracle_cmd->add_option("--q", oracle.q, "Own quality of information (> 0)");
  oracle_cmd->add_option("--others", oracle.others,
                         "Others' total contribution S = sum x_j q_j (> 0)");
  oracle_cmd->add_option("--budget", oracle.budget, "Reward budget R (> 0)");
  oracle_cmd->add_option("--cost", oracle.cost, "Unit effort cost (> 0)");
  oracle_cmd->add_option("--cap", oracle.cap, "Effort cap (> 0)");
  oracle_cmd->add_option("--n-agents", oracle.n_agents,
                         "Also print the symmetric equilibrium for N agents");

  PlotFlags plot;
  CLI::App* plot_cmd = app.add_subcommand(
      "plot", "Render per-agent payoff charts from runs/run_<r>.csv files.");
  plot_cmd->add_option("--runs-dir", plot.runs_dir,
                       "Directory containing runs/ (default <out>)");
  plot_cmd->add_option("--plot-dir", plot.plot_dir, "Chart directory (default <out>/plots)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*train_cmd) return RunTrain(g, train);
    if (*eval_cmd) return RunEval(g, eval);
    if (*sweep_cmd) return RunSweep(g, sweep);
    if (*oracle_cmd) return RunOracle(oracle);
    if (*plot_cmd) return RunPlot(g, plot);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace
}  // namespace crowdmarl

int main(int argc, char** argv) { return crowdmarl::Main(argc, argv); }
