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

#include "crowdmarl/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crowdmarl/checkpoint.h"
#include "crowdmarl/errors.h"
#include "crowdmarl/rng.h"

namespace crowdmarl {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kEvalStream = 5;
constexpr double kGridStep = 1e-4;
constexpr double kOracleAgreement = 1e-3;

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void Log(const RunOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

double MeanOf(const Eigen::VectorXd& v) { return v.size() ? v.mean() : 0.0; }

}  // namespace

std::vector<std::uint64_t> RunSeeds(const ExperimentConfig& config) {
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < config.runs; ++r) {
    seeds.push_back(DeriveSeed(config.seed, static_cast<std::uint64_t>(r)));
  }
  return seeds;
}

RunRecord RunSingle(const ExperimentConfig& config, std::uint64_t run_seed,
                    std::vector<Agent>* agents_out) {
  const auto start = std::chrono::steady_clock::now();
  TrainerConfig trainer = config.trainer;
  trainer.seed = run_seed;
  TrainResult trained = Train(config.env, trainer);
  const std::vector<Policy> policies = ExtractPolicies(trained.agents);
  const EvaluationResult eval =
      Evaluate(policies, config.env, config.eval_episodes,
               DeriveSeed(run_seed, kEvalStream), config.discounted);

  RunRecord record;
  record.seed = run_seed;
  record.episode_payoffs = std::move(trained.metrics.episode_payoffs);
  record.eval_mean = eval.mean;
  record.eval_variance = eval.variance;
  record.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  if (agents_out != nullptr) *agents_out = std::move(trained.agents);
  return record;
}

std::vector<RunRecord> RunExperiment(const ExperimentConfig& config,
                                     const RunOptions& options) {
  std::vector<std::string> violations = Validate(config);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  const fs::path out_dir = config.output_dir.empty() ? fs::path(".")
                                                     : fs::path(config.output_dir);
  if (options.write_files) {
    EnsureDirectory(out_dir / "runs");
    WriteText(out_dir / "config.resolved.json", ConfigToText(config));
  }

  const std::vector<std::uint64_t> seeds = RunSeeds(config);
  std::vector<RunRecord> records;
  records.reserve(seeds.size());
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    std::vector<Agent> agents;
    RunRecord record = RunSingle(config, seeds[r], &agents);
    char line[160];
    std::snprintf(line, sizeof(line),
                  "run %zu/%zu seed %llu: eval mean %.3f (%.1fs)", r + 1,
                  seeds.size(), static_cast<unsigned long long>(seeds[r]),
                  MeanOf(record.eval_mean), record.wall_seconds);
    Log(options, line);
    if (options.write_files) {
      WriteRunCsv((out_dir / "runs" / ("run_" + std::to_string(r) + ".csv")).string(),
                  record);
      if (options.write_checkpoints) {
        const fs::path ckpt_dir = out_dir / "checkpoints" / ("run_" + std::to_string(r));
        EnsureDirectory(ckpt_dir);
        for (std::size_t i = 0; i < agents.size(); ++i) {
          SaveAgentCheckpoint(
              (ckpt_dir / ("agent_" + std::to_string(i) + ".json")).string(),
              AgentCheckpoint{static_cast<int>(i), agents[i].actor,
                              agents[i].critic});
        }
      }
    }
    records.push_back(std::move(record));
  }
  if (options.write_files) {
    WriteAggregateCsv((out_dir / "aggregate.csv").string(), records);
    WriteEvaluationCsv((out_dir / "evaluation.csv").string(), records);
  }
  return records;
}

std::vector<AggregateRow> Aggregate(const std::vector<RunRecord>& records) {
  std::vector<AggregateRow> rows;
  if (records.empty()) return rows;
  const Eigen::Index episodes = records.front().episode_payoffs.rows();
  const Eigen::Index agents = records.front().episode_payoffs.cols();
  for (const RunRecord& r : records) {
    if (r.episode_payoffs.rows() != episodes || r.episode_payoffs.cols() != agents) {
      throw ShapeError("Aggregate: runs have different shapes");
    }
  }
  const double n = static_cast<double>(records.size());
  for (Eigen::Index e = 0; e < episodes; ++e) {
    for (Eigen::Index i = 0; i < agents; ++i) {
      double sum = 0.0;
      for (const RunRecord& r : records) sum += r.episode_payoffs(e, i);
      const double mean = sum / n;
      double sq = 0.0;
      for (const RunRecord& r : records) {
        const double d = r.episode_payoffs(e, i) - mean;
        sq += d * d;
      }
      rows.push_back({static_cast<int>(e), static_cast<int>(i), mean, sq / n});
    }
  }
  return rows;
}

void WriteRunCsv(const std::string& path, const RunRecord& record) {
  std::string text = "episode,agent,payoff\n";
  for (Eigen::Index e = 0; e < record.episode_payoffs.rows(); ++e) {
    for (Eigen::Index i = 0; i < record.episode_payoffs.cols(); ++i) {
      text += std::to_string(e) + "," + std::to_string(i) + "," +
              Num(record.episode_payoffs(e, i)) + "\n";
    }
  }
  WriteText(path, text);
}

void WriteAggregateCsv(const std::string& path,
                       const std::vector<RunRecord>& records) {
  std::string text = "episode,agent,mean,variance\n";
  for (const AggregateRow& row : Aggregate(records)) {
    text += std::to_string(row.episode) + "," + std::to_string(row.agent) + "," +
            Num(row.mean) + "," + Num(row.variance) + "\n";
  }
  WriteText(path, text);
}

void WriteEvaluationCsv(const std::string& path,
                        const std::vector<RunRecord>& records) {
  std::string text = "run,seed,agent,mean,variance\n";
  for (std::size_t r = 0; r < records.size(); ++r) {
    const RunRecord& rec = records[r];
    for (Eigen::Index i = 0; i < rec.eval_mean.size(); ++i) {
      text += std::to_string(r) + "," + std::to_string(rec.seed) + "," +
              std::to_string(i) + "," + Num(rec.eval_mean[i]) + "," +
              Num(rec.eval_variance[i]) + "\n";
    }
  }
  WriteText(path, text);
}

RunRecord ReadRunCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "episode,agent,payoff") {
    throw ConfigError("'" + path + "': unexpected header '" + line + "'");
  }
  struct Entry {
    int episode;
    int agent;
    double payoff;
  };
  std::vector<Entry> entries;
  int max_episode = -1;
  int max_agent = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Entry e{};
    char* end = nullptr;
    const char* p = line.c_str();
    e.episode = static_cast<int>(std::strtol(p, &end, 10));
    bool ok = *end == ',';
    if (ok) {
      p = end + 1;
      e.agent = static_cast<int>(std::strtol(p, &end, 10));
      ok = *end == ',';
    }
    if (ok) {
      p = end + 1;
      e.payoff = std::strtod(p, &end);
      ok = end != p && *end == '\0';
    }
    if (!ok || e.episode < 0 || e.agent < 0) {
      throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                        ": malformed row");
    }
    max_episode = std::max(max_episode, e.episode);
    max_agent = std::max(max_agent, e.agent);
    entries.push_back(e);
  }
  RunRecord record;
  record.episode_payoffs = Eigen::MatrixXd::Zero(max_episode + 1, max_agent + 1);
  for (const Entry& e : entries) record.episode_payoffs(e.episode, e.agent) = e.payoff;
  return record;
}

std::vector<RunRecord> ReadRunDirectory(const std::string& dir) {
  const fs::path runs = fs::path(dir) / "runs";
  std::vector<RunRecord> records;
  for (int r = 0;; ++r) {
    const fs::path file = runs / ("run_" + std::to_string(r) + ".csv");
    if (!fs::exists(file)) break;
    records.push_back(ReadRunCsv(file.string()));
  }
  if (records.empty()) {
    throw IoError("no run CSVs found under '" + runs.string() + "'");
  }
  return records;
}

const SweepCell& SweepTable::at(const std::string& family, int window) const {
  for (const SweepCell& c : cells) {
    if (c.family == family && c.window == window) return c;
  }
  throw std::out_of_range("no sweep cell for " + family + "/K=" +
                          std::to_string(window));
}

std::optional<double> ReferenceReward(const std::string& family, int window) {
  static const std::map<std::string, std::map<int, double>> kReference = {
      {"sine", {{10, 28.25}, {30, 25.88}, {50, 33.52}, {100, 28.07}}},
      {"linear", {{10, 46.41}, {30, 48.36}, {50, 50.01}, {100, 48.79}}},
      {"markov", {{10, 35.89}, {30, 38.88}, {50, 44.73}, {100, 42.31}}},
      {"mixed", {{10, 22.43}, {30, 35.75}, {50, 36.91}, {100, 27.77}}},
  };
  const auto f = kReference.find(family);
  if (f == kReference.end()) return std::nullopt;
  const auto k = f->second.find(window);
  if (k == f->second.end()) return std::nullopt;
  return k->second;
}

SweepTable SweepMemoryLength(const ExperimentConfig& config,
                             const RunOptions& options) {
  std::vector<std::string> violations = Validate(config);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  const fs::path out_dir = config.output_dir.empty() ? fs::path(".")
                                                     : fs::path(config.output_dir);
  SweepTable table;
  table.families = config.sweep_families;
  table.windows = config.k_sweep;
  for (const std::string& family : config.sweep_families) {
    for (int k : config.k_sweep) {
      ExperimentConfig cell_config = WithFamily(config, family);
      cell_config.env.window = k;
      cell_config.output_dir =
          (out_dir / "sweep" / (family + "_k" + std::to_string(k))).string();
      Log(options, "sweep " + family + " K=" + std::to_string(k));
      RunOptions cell_options = options;
      cell_options.write_checkpoints = false;
      const std::vector<RunRecord> records = RunExperiment(cell_config, cell_options);
      SweepCell cell;
      cell.family = family;
      cell.window = k;
      for (const RunRecord& r : records) cell.run_means.push_back(MeanOf(r.eval_mean));
      double sum = 0.0;
      for (double m : cell.run_means) sum += m;
      cell.mean_reward = cell.run_means.empty()
                             ? 0.0
                             : sum / static_cast<double>(cell.run_means.size());
      cell.reference = ReferenceReward(family, k);
      table.cells.push_back(std::move(cell));
    }
  }
  if (options.write_files) {
    EnsureDirectory(out_dir);
    WriteSweepCsv((out_dir / "sweep.csv").string(), table);
    WriteText(out_dir / "sweep.txt", RenderSweepTable(table));
  }
  return table;
}

void WriteSweepCsv(const std::string& path, const SweepTable& table) {
  std::string text = "dynamics,window,mean_reward,reference\n";
  for (const SweepCell& c : table.cells) {
    text += c.family + "," + std::to_string(c.window) + "," + Num(c.mean_reward) +
            "," + (c.reference ? Num(*c.reference) : std::string()) + "\n";
  }
  WriteText(path, text);
}

std::string RenderSweepTable(const SweepTable& table) {
  std::ostringstream out;
  char buf[64];
  auto row_label = [&](const std::string& label) {
    std::snprintf(buf, sizeof(buf), "%-16s", label.c_str());
    out << buf;
  };
  row_label("memory length");
  for (int k : table.windows) {
    std::snprintf(buf, sizeof(buf), " | %9d", k);
    out << buf;
  }
  out << "\n";
  out << std::string(16 + 12 * table.windows.size(), '-') << "\n";
  for (const std::string& family : table.families) {
    row_label(family);
    for (int k : table.windows) {
      std::snprintf(buf, sizeof(buf), " | %9.2f", table.at(family, k).mean_reward);
      out << buf;
    }
    out << "\n";
    row_label("  reference");
    for (int k : table.windows) {
      const auto ref = table.at(family, k).reference;
      if (ref) {
        std::snprintf(buf, sizeof(buf), " | %9.2f", *ref);
      } else {
        std::snprintf(buf, sizeof(buf), " | %9s", "-");
      }
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

Policy BaselinePolicy(BaselineKind kind, double effort_cap,
                      double constant_effort) {
  if (!(effort_cap > 0.0)) throw ContractViolation("effort cap must be positive");
  switch (kind) {
    case BaselineKind::kRandom:
      return [effort_cap](std::span<const double>, Rng& rng) {
        return rng.Uniform(0.0, effort_cap);
      };
    case BaselineKind::kConstant:
      if (!(constant_effort >= 0.0 && constant_effort <= effort_cap)) {
        throw ContractViolation("constant effort " + Num(constant_effort) +
                                " is outside [0, " + Num(effort_cap) + "]");
      }
      return [constant_effort](std::span<const double>, Rng&) {
        return constant_effort;
      };
    case BaselineKind::kZero:
      return [](std::span<const double>, Rng&) { return 0.0; };
  }
  throw ContractViolation("unknown baseline kind");
}

BestResponse BestResponseDetail(double qoi, double others, double budget,
                                double cost, double effort_cap) {
  if (!(qoi > 0.0) || !(others > 0.0) || !(budget > 0.0) || !(cost > 0.0) ||
      !(effort_cap > 0.0)) {
    throw ContractViolation(
        "best response needs q > 0, S > 0, R > 0, c > 0 and x_max > 0");
  }
  auto payoff = [&](double x) {
    return x * qoi * budget / (x * qoi + others) - cost * x;
  };
  BestResponse out;
  out.closed_form = std::clamp(
      (std::sqrt(qoi * budget * others / cost) - others) / qoi, 0.0, effort_cap);

  const auto steps = static_cast<long long>(std::floor(effort_cap / kGridStep));
  double best_x = 0.0;
  double best = payoff(0.0);
  for (long long k = 1; k <= steps + 1; ++k) {
    const double x = std::min(static_cast<double>(k) * kGridStep, effort_cap);
    const double v = payoff(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  out.grid = best_x;
  if (std::abs(out.closed_form - out.grid) > kOracleAgreement) {
    throw std::logic_error("best response closed form " + Num(out.closed_form) +
                           " disagrees with grid search " + Num(out.grid));
  }
  return out;
}

double BestResponseOracle(double qoi, double others, double budget,
                          double cost, double effort_cap) {
  return BestResponseDetail(qoi, others, budget, cost, effort_cap).closed_form;
}

SymmetricEquilibrium SymmetricStaticEquilibrium(int n_agents, double budget,
                                                double cost) {
  if (n_agents < 1 || !(budget > 0.0) || !(cost > 0.0)) {
    throw ContractViolation("symmetric equilibrium needs N >= 1, R > 0, c > 0");
  }
  const double n = static_cast<double>(n_agents);
  return {budget * (n - 1.0) / (n * n * cost), budget / (n * n)};
}

}  // namespace crowdmarl
