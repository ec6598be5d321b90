// Copyright 2026 The advgrasp Authors
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

#include "advgrasp/config.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "advgrasp/dataset.h"
#include "advgrasp/errors.h"
#include "nlohmann/json.hpp"

namespace advgrasp {

namespace {

using json = nlohmann::ordered_json;

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(Name(""), "expected an object");
  }

  std::string Name(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "<root>" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json* Find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void Read(const std::string& key, T& value) {
    const json* v = Find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError(Name(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) {
          throw ConfigError(Name(key), "expected an integer");
        }
        if (std::is_unsigned_v<T> && v->is_number_integer() &&
            !v->is_number_unsigned()) {
          throw ConfigError(Name(key), "expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError(Name(key), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError(Name(key), "expected a string");
      }
      value = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(Name(key), e.what());
    }
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(Name(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void ReadCounts(Section& parent, const std::string& key, ObjectCounts& counts) {
  const json* v = parent.Find(key);
  if (!v) return;
  Section s(*v, parent.Name(key));
  s.Read("easy", counts.easy);
  s.Read("medium", counts.medium);
  s.Read("hard", counts.hard);
  s.Finish();
}

json CountsToJson(const ObjectCounts& c) {
  return {{"easy", c.easy}, {"medium", c.medium}, {"hard", c.hard}};
}

void Require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

}  // namespace

RegimeSpec LowRegime() { return {"low", 7.0, 128, 1.0}; }
RegimeSpec HighRegime() { return {"high", 35.0, 1280, 1.25}; }

bool ExperimentConfig::HasArm(const std::string& arm) const {
  return std::find(arms.begin(), arms.end(), arm) != arms.end();
}

int ExperimentConfig::AdversarialBudget() const {
  return game.init_random_grasps + game.iterations * game.grasps_per_iteration;
}

int ExperimentConfig::BaselineBudget() const {
  return static_cast<int>(std::ceil(baseline_budget_multiplier * AdversarialBudget()));
}

ExperimentConfig ParseExperimentConfig(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section s(root, "");
  s.Read("name", c.name);
  if (const json* v = s.Find("seeds")) {
    Require(v->is_array(), "seeds", "expected a list of integers");
    c.seeds.clear();
    for (const json& e : *v) {
      Require(e.is_number_unsigned(), "seeds", "expected non-negative integers");
      c.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  if (const json* v = s.Find("objects")) {
    Section o(*v, "objects");
    ReadCounts(o, "train", c.objects.train);
    o.Read("train_seed", c.objects.train_seed);
    ReadCounts(o, "eval", c.objects.eval);
    o.Read("eval_seed", c.objects.eval_seed);
    o.Finish();
  }
  if (const json* v = s.Find("eval_regimes")) {
    Section r(*v, "eval_regimes");
    c.eval_regimes.clear();
    for (auto it = v->begin(); it != v->end(); ++it) {
      RegimeSpec spec{it.key()};
      if (it.key() == "low") spec = LowRegime();
      if (it.key() == "high") spec = HighRegime();
      const json* body = r.Find(it.key());
      Section b(*body, r.Name(it.key()));
      b.Read("grip_force", spec.grip_force);
      b.Read("n_candidates", spec.n_candidates);
      b.Read("friction_scale", spec.friction_scale);
      b.Finish();
      c.eval_regimes.push_back(spec);
    }
  }
  s.Read("tries_per_object", c.tries_per_object);
  if (const json* v = s.Find("arms")) {
    Require(v->is_array(), "arms", "expected a list of arm names");
    c.arms.clear();
    for (const json& e : *v) {
      Require(e.is_string(), "arms", "expected arm names");
      c.arms.push_back(e.get<std::string>());
    }
  }
  s.Read("baseline_budget_multiplier", c.baseline_budget_multiplier);
  if (const json* v = s.Find("game")) {
    Section g(*v, "game");
    g.Read("alpha", c.game.alpha);
    g.Read("iterations", c.game.iterations);
    g.Read("grasps_per_iteration", c.game.grasps_per_iteration);
    g.Read("init_random_grasps", c.game.init_random_grasps);
    g.Read("max_epochs", c.game.max_epochs);
    g.Read("accuracy_threshold", c.game.accuracy_threshold);
    g.Read("importance_beta", c.game.importance_beta);
    g.Read("outcome_based_labels", c.game.outcome_based_labels);
    g.Read("learning_rate", c.game.learning_rate);
    g.Read("rms_decay", c.game.rms_decay);
    g.Read("rms_epsilon", c.game.rms_epsilon);
    g.Read("batch_size", c.game.batch_size);
    g.Read("snatch_iterations", c.snatch_iterations);
    g.Read("snatch_grasps_per_iteration", c.snatch_grasps_per_iteration);
    g.Read("train_candidates", c.train_candidates);
    g.Finish();
  }
  if (const json* v = s.Find("sim")) {
    Section m(*v, "sim");
    m.Read("grip_force", c.sim.grip_force);
    m.Read("max_payload", c.sim.max_payload);
    m.Read("max_width", c.sim.max_width);
    m.Read("shake_freq", c.sim.shake_freq);
    m.Read("shake_amp", c.sim.shake_amp);
    m.Read("lever_gain", c.sim.lever_gain);
    m.Read("pull_force", c.sim.pull_force);
    m.Read("clearance", c.sim.clearance);
    m.Read("friction_scale", c.sim.friction_scale);
    m.Finish();
  }
  if (const json* v = s.Find("probes")) {
    Section p(*v, "probes");
    p.Read("adversary_probe_grasps", c.probes.adversary_probe_grasps);
    p.Read("robustness_probe_scenes", c.probes.robustness_probe_scenes);
    p.Finish();
  }
  s.Finish();
  ValidateExperimentConfig(c);
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError("<file>", e.what());
  }
  return ParseExperimentConfig(text);
}

void ValidateExperimentConfig(const ExperimentConfig& c) {
  Require(!c.name.empty(), "name", "must not be empty");
  Require(!c.seeds.empty(), "seeds", "must list at least one seed");
  Require(std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() ==
              c.seeds.size(),
          "seeds", "must be distinct");
  for (const auto& [key, counts] : {std::pair{"objects.train", c.objects.train},
                                    std::pair{"objects.eval", c.objects.eval}}) {
    Require(counts.easy >= 0 && counts.medium >= 0 && counts.hard >= 0, key,
            "counts must be non-negative");
    Require(counts.total() > 0, key, "needs at least one object");
  }
  Require(!c.eval_regimes.empty(), "eval_regimes", "needs at least one regime");
  for (const RegimeSpec& r : c.eval_regimes) {
    const std::string key = "eval_regimes." + r.name;
    Require(r.grip_force > 0.0, key + ".grip_force", "must be positive");
    Require(r.n_candidates >= 1, key + ".n_candidates", "must be >= 1");
    Require(r.friction_scale > 0.0, key + ".friction_scale", "must be positive");
  }
  Require(c.tries_per_object >= 1, "tries_per_object", "must be >= 1");
  Require(!c.arms.empty(), "arms", "must list at least one arm");
  for (const std::string& arm : c.arms) {
    Require(arm == kArmBaseline || arm == kArmShake || arm == kArmShakeSnatch,
            "arms", "unknown arm '" + arm + "'");
  }
  Require(c.baseline_budget_multiplier >= 1.0, "baseline_budget_multiplier",
          "must be >= 1");
  Require(c.game.alpha >= 0.0 && c.game.alpha <= 1.0, "game.alpha",
          "must lie in [0, 1]");
  Require(c.game.iterations >= 1, "game.iterations", "must be >= 1");
  Require(c.game.grasps_per_iteration >= 1, "game.grasps_per_iteration", "must be >= 1");
  Require(c.game.init_random_grasps >= 1, "game.init_random_grasps", "must be >= 1");
  Require(c.game.max_epochs >= 1, "game.max_epochs", "must be >= 1");
  Require(c.game.accuracy_threshold > 0.0 && c.game.accuracy_threshold <= 1.0,
          "game.accuracy_threshold", "must lie in (0, 1]");
  Require(c.game.importance_beta > 0.0, "game.importance_beta", "must be positive");
  Require(c.game.learning_rate > 0.0, "game.learning_rate", "must be positive");
  Require(c.game.rms_decay >= 0.0 && c.game.rms_decay < 1.0, "game.rms_decay",
          "must lie in [0, 1)");
  Require(c.game.rms_epsilon > 0.0, "game.rms_epsilon", "must be positive");
  Require(c.game.batch_size >= 1, "game.batch_size", "must be >= 1");
  Require(c.snatch_iterations >= 1, "game.snatch_iterations", "must be >= 1");
  Require(c.snatch_grasps_per_iteration >= 1, "game.snatch_grasps_per_iteration",
          "must be >= 1");
  Require(c.train_candidates >= 1, "game.train_candidates", "must be >= 1");
  for (const auto& [key, value] :
       {std::pair{"sim.grip_force", c.sim.grip_force},
        std::pair{"sim.max_payload", c.sim.max_payload},
        std::pair{"sim.max_width", c.sim.max_width},
        std::pair{"sim.shake_freq", c.sim.shake_freq},
        std::pair{"sim.shake_amp", c.sim.shake_amp},
        std::pair{"sim.lever_gain", c.sim.lever_gain},
        std::pair{"sim.pull_force", c.sim.pull_force},
        std::pair{"sim.clearance", c.sim.clearance},
        std::pair{"sim.friction_scale", c.sim.friction_scale}}) {
    Require(value > 0.0 && std::isfinite(value), key, "must be positive");
  }
  Require(c.probes.adversary_probe_grasps >= 1, "probes.adversary_probe_grasps",
          "must be >= 1");
  Require(c.probes.robustness_probe_scenes >= 1, "probes.robustness_probe_scenes",
          "must be >= 1");

  // Held-out objects must never appear in training.
  std::set<std::uint64_t> train_ids;
  for (const ObjectShape& o : MakeObjectPool(c.objects.train, c.objects.train_seed)) {
    train_ids.insert(o.seed);
  }
  for (const ObjectShape& o : MakeObjectPool(c.objects.eval, c.objects.eval_seed)) {
    Require(!train_ids.count(o.seed), "objects.eval_seed",
            "evaluation objects overlap the training pool");
  }
}

std::string ExperimentConfigToJson(const ExperimentConfig& c) {
  json regimes = json::object();
  for (const RegimeSpec& r : c.eval_regimes) {
    regimes[r.name] = {{"grip_force", r.grip_force},
                       {"n_candidates", r.n_candidates},
                       {"friction_scale", r.friction_scale}};
  }
  json j = {
      {"name", c.name},
      {"seeds", c.seeds},
      {"objects",
       {{"train", CountsToJson(c.objects.train)},
        {"train_seed", c.objects.train_seed},
        {"eval", CountsToJson(c.objects.eval)},
        {"eval_seed", c.objects.eval_seed}}},
      {"eval_regimes", regimes},
      {"tries_per_object", c.tries_per_object},
      {"arms", c.arms},
      {"baseline_budget_multiplier", c.baseline_budget_multiplier},
      {"game",
       {{"alpha", c.game.alpha},
        {"iterations", c.game.iterations},
        {"grasps_per_iteration", c.game.grasps_per_iteration},
        {"init_random_grasps", c.game.init_random_grasps},
        {"max_epochs", c.game.max_epochs},
        {"accuracy_threshold", c.game.accuracy_threshold},
        {"importance_beta", c.game.importance_beta},
        {"outcome_based_labels", c.game.outcome_based_labels},
        {"learning_rate", c.game.learning_rate},
        {"rms_decay", c.game.rms_decay},
        {"rms_epsilon", c.game.rms_epsilon},
        {"batch_size", c.game.batch_size},
        {"snatch_iterations", c.snatch_iterations},
        {"snatch_grasps_per_iteration", c.snatch_grasps_per_iteration},
        {"train_candidates", c.train_candidates}}},
      {"sim",
       {{"grip_force", c.sim.grip_force},
        {"max_payload", c.sim.max_payload},
        {"max_width", c.sim.max_width},
        {"shake_freq", c.sim.shake_freq},
        {"shake_amp", c.sim.shake_amp},
        {"lever_gain", c.sim.lever_gain},
        {"pull_force", c.sim.pull_force},
        {"clearance", c.sim.clearance},
        {"friction_scale", c.sim.friction_scale}}},
      {"probes",
       {{"adversary_probe_grasps", c.probes.adversary_probe_grasps},
        {"robustness_probe_scenes", c.probes.robustness_probe_scenes}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace advgrasp
