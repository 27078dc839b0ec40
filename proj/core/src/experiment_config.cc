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

#include "crowdmarl/experiment_config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "crowdmarl/errors.h"
#include "crowdmarl/rng.h"

namespace crowdmarl {
namespace {

using nlohmann::json;

constexpr std::uint64_t kDynamicsStream = 77;
constexpr double kDefaultBudget = 10.0;
constexpr double kDefaultCost = 1.5;

// Pulls typed values out of one JSON object and remembers which keys were
// used, so leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path,
               std::vector<std::string>& errors)
      : object_(object), path_(std::move(path)), errors_(errors) {
    if (!object_.is_object()) {
      errors_.push_back(Where("") + "expected an object");
    }
  }

  bool Has(const std::string& key) const {
    return object_.is_object() && object_.contains(key);
  }

  const json* Raw(const std::string& key) {
    if (!Has(key)) return nullptr;
    used_.insert(key);
    return &object_.at(key);
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    const json* v = Raw(key);
    if (v == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw std::invalid_argument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned() &&
              v->get<std::int64_t>() < 0) {
            throw std::invalid_argument("expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("expected a string");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      errors_.push_back(Where(key) + e.what());
    }
  }

  // A scalar or a list of numbers.
  void ReadNumbers(const std::string& key, std::vector<double>& out,
                   bool& was_scalar) {
    const json* v = Raw(key);
    if (v == nullptr) return;
    if (v->is_number()) {
      out = {v->get<double>()};
      was_scalar = true;
      return;
    }
    if (v->is_array() &&
        std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number(); })) {
      out = v->get<std::vector<double>>();
      was_scalar = false;
      return;
    }
    errors_.push_back(Where(key) + "expected a number or a list of numbers");
  }

  void ReadInts(const std::string& key, std::vector<int>& out) {
    const json* v = Raw(key);
    if (v == nullptr) return;
    if (v->is_array() && std::all_of(v->begin(), v->end(), [](const json& e) {
          return e.is_number_integer();
        })) {
      out = v->get<std::vector<int>>();
      return;
    }
    errors_.push_back(Where(key) + "expected a list of integers");
  }

  void ReadStrings(const std::string& key, std::vector<std::string>& out) {
    const json* v = Raw(key);
    if (v == nullptr) return;
    if (v->is_array() && std::all_of(v->begin(), v->end(), [](const json& e) {
          return e.is_string();
        })) {
      out = v->get<std::vector<std::string>>();
      return;
    }
    errors_.push_back(Where(key) + "expected a list of strings");
  }

  void RejectUnknown() {
    if (!object_.is_object()) return;
    for (const auto& item : object_.items()) {
      if (!used_.count(item.key())) {
        errors_.push_back(Where(item.key()) + "unknown key");
      }
    }
  }

  std::string Where(const std::string& key) const {
    std::string p = path_;
    if (!key.empty()) p += p.empty() ? key : "." + key;
    return p.empty() ? std::string() : "'" + p + "': ";
  }

 private:
  const json& object_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

DynamicsSpec ParseDynamics(const json& j, const std::string& path,
                           std::vector<std::string>& errors) {
  ObjectReader r(j, path, errors);
  std::string kind;
  r.Read("kind", kind);
  DynamicsSpec spec;
  if (kind == "sine") {
    SineDynamics s;
    r.Read("amplitude", s.amplitude);
    r.Read("period", s.period);
    r.Read("phase", s.phase);
    r.Read("offset", s.offset);
    spec = s;
  } else if (kind == "linear") {
    LinearDynamics l;
    r.Read("slope", l.slope);
    r.Read("period", l.period);
    r.Read("offset", l.offset);
    spec = l;
  } else if (kind == "markov") {
    MarkovDynamics m;
    std::vector<double> values;
    bool scalar = false;
    r.ReadNumbers("values", values, scalar);
    m.values = values;
    if (const json* t = r.Raw("transition")) {
      try {
        m.transition = t->get<std::vector<std::vector<double>>>();
      } catch (const json::exception&) {
        errors.push_back(r.Where("transition") + "expected a matrix of numbers");
      }
    }
    r.Read("initial_state", m.initial_state);
    spec = m;
  } else {
    errors.push_back(r.Where("kind") + "expected \"sine\", \"linear\" or \"markov\"");
  }
  r.RejectUnknown();
  return spec;
}

json DynamicsToJson(const DynamicsSpec& spec) {
  json j;
  if (const auto* s = std::get_if<SineDynamics>(&spec)) {
    j = {{"kind", "sine"},
         {"amplitude", s->amplitude},
         {"period", s->period},
         {"phase", s->phase},
         {"offset", s->offset}};
  } else if (const auto* l = std::get_if<LinearDynamics>(&spec)) {
    j = {{"kind", "linear"},
         {"slope", l->slope},
         {"period", l->period},
         {"offset", l->offset}};
  } else {
    const auto& m = std::get<MarkovDynamics>(spec);
    j = {{"kind", "markov"},
         {"values", m.values},
         {"transition", m.transition},
         {"initial_state", m.initial_state}};
  }
  return j;
}

bool IsFamily(const std::string& name) {
  return name == "sine" || name == "linear" || name == "markov" ||
         name == "mixed";
}

}  // namespace

std::vector<DynamicsSpec> MakeDynamicsFamily(const std::string& family,
                                             int n_agents, std::uint64_t seed) {
  if (!IsFamily(family)) {
    throw ConfigError("unknown dynamics family '" + family + "'");
  }
  const auto n = static_cast<std::size_t>(std::max(n_agents, 0));
  Rng rng(DeriveSeed(seed, kDynamicsStream));
  std::vector<DynamicsSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (family == "sine") {
      out.emplace_back(DefaultSine(i, n));
    } else if (family == "linear") {
      out.emplace_back(DefaultLinear(i, n));
    } else if (family == "markov") {
      out.emplace_back(DefaultMarkov(rng));
    } else if (i + 1 == n) {
      // Mixed: the last agent follows a chain, the rest alternate.
      out.emplace_back(DefaultMarkov(rng));
    } else if (i % 2 == 0) {
      out.emplace_back(DefaultSine(i, n));
    } else {
      out.emplace_back(DefaultLinear(i, n));
    }
  }
  return out;
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig c;
  c.env.n_agents = 4;
  c.env.horizon = 45;
  c.env.window = 10;
  c.env.budget_schedule = {kDefaultBudget};
  c.env.costs.assign(4, kDefaultCost);
  c.env.dynamics = MakeDynamicsFamily("sine", 4, c.seed);
  c.env.discount = c.trainer.gamma;
  return c;
}

ExperimentConfig WithFamily(ExperimentConfig config, const std::string& family) {
  config.dynamics_family = family;
  config.env.dynamics = MakeDynamicsFamily(family, config.env.n_agents, config.seed);
  return config;
}

std::vector<std::string> Validate(const ExperimentConfig& c) {
  std::vector<std::string> out = Validate(c.env);
  for (std::string& v : Validate(c.trainer)) out.push_back("trainer: " + v);
  if (c.runs < 1) out.push_back("runs must be at least 1");
  if (c.eval_episodes < 0) out.push_back("eval_episodes must be non-negative");
  for (int k : c.k_sweep) {
    if (k <= 0) {
      out.push_back("k_sweep values must be positive");
      break;
    }
  }
  for (const std::string& f : c.sweep_families) {
    if (!IsFamily(f)) out.push_back("sweep_families: unknown family '" + f + "'");
  }
  if (c.trainer.gamma != c.env.discount) {
    out.push_back("trainer gamma and env discount disagree");
  }
  return out;
}

ExperimentConfig ParseConfig(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text, nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }

  ExperimentConfig c = DefaultExperimentConfig();
  std::vector<std::string> errors;
  ObjectReader r(root, "", errors);

  r.Read("n_agents", c.env.n_agents);
  r.Read("horizon", c.env.horizon);
  r.Read("window", c.env.window);
  r.Read("seed", c.seed);
  r.Read("runs", c.runs);
  r.Read("output_dir", c.output_dir);
  r.ReadInts("k_sweep", c.k_sweep);
  r.ReadStrings("sweep_families", c.sweep_families);
  r.Read("eval_episodes", c.eval_episodes);
  r.Read("discounted", c.discounted);
  r.Read("denominator_guard", c.env.denominator_guard);
  r.Read("effort_cap", c.env.effort_cap);
  double gamma = c.trainer.gamma;
  r.Read("gamma", gamma);
  c.trainer.gamma = gamma;
  c.env.discount = gamma;

  bool scalar = true;
  r.ReadNumbers("budget", c.env.budget_schedule, scalar);

  std::vector<double> costs = {kDefaultCost};
  bool costs_scalar = true;
  r.ReadNumbers("costs", costs, costs_scalar);
  const auto n = static_cast<std::size_t>(std::max(c.env.n_agents, 0));
  c.env.costs = costs_scalar ? std::vector<double>(n, costs.front()) : costs;

  c.dynamics_family = "sine";
  std::vector<DynamicsSpec> explicit_dynamics;
  bool has_explicit = false;
  if (const json* d = r.Raw("dynamics")) {
    if (d->is_string()) {
      c.dynamics_family = d->get<std::string>();
      if (!IsFamily(c.dynamics_family)) {
        errors.push_back("'dynamics': unknown family '" + c.dynamics_family + "'");
      }
    } else if (d->is_array()) {
      has_explicit = true;
      c.dynamics_family = "custom";
      for (std::size_t i = 0; i < d->size(); ++i) {
        explicit_dynamics.push_back(
            ParseDynamics((*d)[i], "dynamics[" + std::to_string(i) + "]", errors));
      }
    } else {
      errors.push_back("'dynamics': expected a family name or a list of specs");
    }
  }

  if (const json* t = r.Raw("trainer")) {
    ObjectReader tr(*t, "trainer", errors);
    TrainerConfig& tc = c.trainer;
    tr.Read("episodes", tc.episodes);
    tr.Read("minibatch", tc.minibatch);
    tr.Read("updates_per_step", tc.updates_per_step);
    tr.Read("noise_initial", tc.noise_initial_fraction);
    tr.Read("noise_decay", tc.noise_decay);
    tr.Read("noise_floor", tc.noise_floor);
    tr.Read("tau", tc.tau);
    tr.Read("use_targets", tc.use_targets);
    tr.Read("actor_lr", tc.actor_lr);
    tr.Read("critic_lr", tc.critic_lr);
    tr.Read("adam_beta1", tc.adam_beta1);
    tr.Read("adam_beta2", tc.adam_beta2);
    tr.Read("adam_epsilon", tc.adam_epsilon);
    tr.ReadInts("actor_hidden", tc.actor_hidden);
    tr.ReadInts("critic_hidden", tc.critic_hidden);
    tr.Read("actor_skip", tc.actor_skip);
    tr.Read("critic_skip", tc.critic_skip);
    tr.Read("buffer_capacity", tc.buffer_capacity);
    tr.Read("warmup", tc.warmup);
    tr.RejectUnknown();
  }
  r.RejectUnknown();
  c.trainer.seed = c.seed;

  if (errors.empty()) {
    if (has_explicit) {
      c.env.dynamics = std::move(explicit_dynamics);
    } else {
      c.env.dynamics = MakeDynamicsFamily(c.dynamics_family, c.env.n_agents, c.seed);
    }
    for (std::string& v : Validate(c)) errors.push_back(std::move(v));
  }
  if (!errors.empty()) {
    for (std::string& e : errors) e = source + ": " + e;
    throw ConfigError(std::move(errors));
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(), path);
}

std::string ConfigToText(const ExperimentConfig& c) {
  json j;
  j["n_agents"] = c.env.n_agents;
  j["horizon"] = c.env.horizon;
  j["window"] = c.env.window;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  j["k_sweep"] = c.k_sweep;
  j["sweep_families"] = c.sweep_families;
  j["eval_episodes"] = c.eval_episodes;
  j["discounted"] = c.discounted;
  j["denominator_guard"] = c.env.denominator_guard;
  j["effort_cap"] = c.env.effort_cap;
  j["gamma"] = c.trainer.gamma;
  j["budget"] = c.env.budget_schedule.size() == 1
                    ? json(c.env.budget_schedule.front())
                    : json(c.env.budget_schedule);
  j["costs"] = c.env.costs;
  json dyn = json::array();
  for (const DynamicsSpec& d : c.env.dynamics) dyn.push_back(DynamicsToJson(d));
  j["dynamics"] = std::move(dyn);
  const TrainerConfig& t = c.trainer;
  j["trainer"] = {{"episodes", t.episodes},
                  {"minibatch", t.minibatch},
                  {"updates_per_step", t.updates_per_step},
                  {"noise_initial", t.noise_initial_fraction},
                  {"noise_decay", t.noise_decay},
                  {"noise_floor", t.noise_floor},
                  {"tau", t.tau},
                  {"use_targets", t.use_targets},
                  {"actor_lr", t.actor_lr},
                  {"critic_lr", t.critic_lr},
                  {"adam_beta1", t.adam_beta1},
                  {"adam_beta2", t.adam_beta2},
                  {"adam_epsilon", t.adam_epsilon},
                  {"actor_hidden", t.actor_hidden},
                  {"critic_hidden", t.critic_hidden},
                  {"actor_skip", t.actor_skip},
                  {"critic_skip", t.critic_skip},
                  {"buffer_capacity", t.buffer_capacity},
                  {"warmup", t.warmup}};
  return j.dump(2) + "\n";
}

}  // namespace crowdmarl
