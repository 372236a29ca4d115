// Copyright 2026 The DiffABM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diffabm/io/config.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace diffabm::io {
namespace {

// A YAML mapping whose keys must all be consumed.
class Section {
 public:
  Section(const YAML::Node& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      Fail(ErrorKind::kConfig, path_ + ": expected a mapping");
    }
  }
  ~Section() = default;

  bool Has(const std::string& key) {
    used_.insert(key);
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  YAML::Node Node(const std::string& key) {
    used_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    return node_[key];
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    if (!Has(key)) return fallback;
    return As<T>(node_[key], Path(key));
  }

  template <typename T>
  T Need(const std::string& key) {
    if (!Has(key)) Fail(ErrorKind::kConfig, Path(key) + ": required");
    return As<T>(node_[key], Path(key));
  }

  Section Child(const std::string& key) { return Section(Node(key), Path(key)); }

  // Rejects keys that were never asked for.
  void Finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.contains(key)) {
        Fail(ErrorKind::kConfig, Path(key) + ": unknown key");
      }
    }
  }

  template <typename T>
  static T As(const YAML::Node& node, const std::string& path) {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(ErrorKind::kConfig, path + ": wrong type");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<YAML::Node> Items(const YAML::Node& node, const std::string& path) {
  std::vector<YAML::Node> out;
  if (!node || node.IsNull()) return out;
  if (!node.IsSequence()) Fail(ErrorKind::kConfig, path + ": expected a list");
  for (const auto& item : node) out.push_back(item);
  return out;
}

std::string Indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

template <typename V>
std::map<std::string, V> StringMap(const YAML::Node& node,
                                   const std::string& path) {
  std::map<std::string, V> out;
  if (!node || node.IsNull()) return out;
  if (!node.IsMap()) Fail(ErrorKind::kConfig, path + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    out[key] = Section::As<V>(kv.second, path + "." + key);
  }
  return out;
}

ad::SamplingMode ParseSampling(const std::string& name,
                               const std::string& path) {
  if (name == "hard") return ad::SamplingMode::kHard;
  if (name == "soft" || name == "relaxed") return ad::SamplingMode::kRelaxed;
  if (name == "straight-through") return ad::SamplingMode::kStraightThrough;
  if (name == "expected") return ad::SamplingMode::kExpected;
  Fail(ErrorKind::kConfig, path + ": unknown sampling mode '" + name + "'");
}

PopulationSpec ParsePopulation(Section s) {
  PopulationSpec p;
  p.size = s.Get<uint64_t>("size", p.size);
  p.initial_infected = s.Get<uint64_t>("initial_infected", p.initial_infected);
  const auto items = Items(s.Node("properties"), s.Path("properties"));
  for (std::size_t i = 0; i < items.size(); ++i) {
    Section ps(items[i], Indexed(s.Path("properties"), i));
    PropertySpec prop;
    prop.name = ps.Need<std::string>("name");
    prop.dynamic = ps.Get<bool>("dynamic", false);
    const YAML::Node cats = ps.Node("categories");
    if (!cats || !cats.IsMap() || cats.size() == 0) {
      Fail(ErrorKind::kConfig,
           ps.Path("categories") + ": expected a non-empty label: weight map");
    }
    for (const auto& kv : cats) {
      const auto label = kv.first.as<std::string>();
      prop.categories.push_back(
          {label, Section::As<double>(kv.second, ps.Path("categories." + label))});
    }
    ps.Finish();
    p.properties.push_back(std::move(prop));
  }
  s.Finish();
  return p;
}

std::vector<LayerSpec> ParseNetwork(Section s) {
  std::vector<LayerSpec> layers;
  const auto items = Items(s.Node("layers"), s.Path("layers"));
  for (std::size_t i = 0; i < items.size(); ++i) {
    Section ls(items[i], Indexed(s.Path("layers"), i));
    LayerSpec layer;
    layer.name = ls.Need<std::string>("name");
    const auto gen = ls.Need<std::string>("generator");
    if (gen == "household-blocks") {
      layer.generator = NetworkGenerator::kHouseholdBlocks;
      layer.household_size =
          ls.Get<uint32_t>("household_size", layer.household_size);
    } else if (gen == "small-world") {
      layer.generator = NetworkGenerator::kSmallWorld;
      layer.k = ls.Get<uint32_t>("k", layer.k);
      layer.rewire_p = ls.Get<double>("rewire_p", layer.rewire_p);
    } else if (gen == "complete") {
      layer.generator = NetworkGenerator::kComplete;
    } else {
      Fail(ErrorKind::kConfig,
           ls.Path("generator") + ": unknown generator '" + gen + "'");
    }
    layer.honors_isolation = ls.Get<bool>("honors_isolation", false);
    ls.Finish();
    layers.push_back(std::move(layer));
  }
  s.Finish();
  return layers;
}

epi::DiseaseParams ParseDisease(Section s) {
  epi::DiseaseParams d;
  d.beta = s.Get<double>("beta", d.beta);
  d.exposed_steps = s.Get<int>("exposed_steps", d.exposed_steps);
  d.infectious_steps = s.Get<int>("infectious_steps", d.infectious_steps);
  d.mortality_prob = s.Get<double>("mortality_prob", d.mortality_prob);
  d.vaccine_efficacy = s.Get<double>("vaccine_efficacy", d.vaccine_efficacy);
  d.vaccination_coverage =
      s.Get<double>("vaccination_coverage", d.vaccination_coverage);
  s.Finish();
  return d;
}

AgentPredicate ParsePredicate(const YAML::Node& node, const std::string& path) {
  AgentPredicate pred;
  if (!node || node.IsNull()) return pred;
  if (!node.IsMap()) Fail(ErrorKind::kConfig, path + ": expected a mapping");
  for (const auto& kv : node) {
    const auto column = kv.first.as<std::string>();
    const std::string cpath = path + "." + column;
    if (kv.second.IsSequence()) {
      pred.WhereIn(column, Section::As<std::vector<std::string>>(kv.second, cpath));
    } else {
      Section range(kv.second, cpath);
      const double lo = range.Need<double>("lower");
      const double hi = range.Need<double>("upper");
      range.Finish();
      pred.WhereRange(column, lo, hi);
    }
  }
  return pred;
}

BehaviorSpec ParseBehavior(Section s) {
  BehaviorSpec b;
  Section ps = s.Child("provider");
  const auto kind = ps.Get<std::string>("kind", "stub");
  if (kind == "stub") {
    b.provider.kind = ProviderKind::kStub;
    auto& stub = b.provider.stub;
    stub.bias = ps.Get<double>("bias", 0.0);
    stub.case_weight = ps.Get<double>("case_weight", 0.0);
    stub.noise_scale = ps.Get<double>("noise_scale", 0.0);
    stub.feature_weights =
        StringMap<double>(ps.Node("feature_weights"), ps.Path("feature_weights"));
    stub.flag_weights =
        StringMap<double>(ps.Node("flag_weights"), ps.Path("flag_weights"));
  } else if (kind == "constant") {
    b.provider.kind = ProviderKind::kConstant;
    b.provider.constant_option = ps.Get<int>("option", 0);
  } else if (kind == "external") {
    b.provider.kind = ProviderKind::kExternal;
    b.provider.command = ps.Need<std::vector<std::string>>("command");
    if (b.provider.command.empty()) {
      Fail(ErrorKind::kConfig, ps.Path("command") + ": empty command");
    }
    b.provider.external.timeout =
        std::chrono::milliseconds(ps.Get<int64_t>("timeout_ms", 2000));
    b.provider.external.max_attempts = ps.Get<int>("max_attempts", 3);
  } else {
    Fail(ErrorKind::kConfig,
         ps.Path("kind") + ": unknown provider '" + kind + "'");
  }
  ps.Finish();

  const int m = s.Get<int>("samples_per_action", 1);
  const auto items = Items(s.Node("archetypes"), s.Path("archetypes"));
  for (std::size_t i = 0; i < items.size(); ++i) {
    Section as(items[i], Indexed(s.Path("archetypes"), i));
    behavior::ArchetypeSpec spec;
    spec.id = static_cast<int>(i);
    spec.name = as.Need<std::string>("name");
    spec.predicate = ParsePredicate(as.Node("where"), as.Path("where"));
    spec.features = StringMap<double>(as.Node("features"), as.Path("features"));
    spec.samples_per_action = m;
    const auto actions = Items(as.Node("actions"), as.Path("actions"));
    for (std::size_t a = 0; a < actions.size(); ++a) {
      Section acs(actions[a], Indexed(as.Path("actions"), a));
      behavior::ActionSpec action;
      action.name = acs.Need<std::string>("name");
      action.options = acs.Need<std::vector<std::string>>("options");
      if (acs.Has("target")) action.target_column = acs.Need<std::string>("target");
      acs.Finish();
      spec.actions.push_back(std::move(action));
    }
    as.Finish();
    b.archetypes.push_back(std::move(spec));
  }
  s.Finish();
  return b;
}

CalibrationSpec ParseCalibration(Section s) {
  CalibrationSpec c;
  auto& cfg = c.config;
  cfg.steps = s.Get<int>("steps", cfg.steps);
  cfg.samples_per_step = s.Get<int>("samples_per_step", cfg.samples_per_step);
  cfg.kl_weight = s.Get<double>("kl_weight", cfg.kl_weight);
  cfg.kl_samples = s.Get<int>("kl_samples", cfg.kl_samples);
  cfg.adam.learning_rate = s.Get<double>("learning_rate", cfg.adam.learning_rate);
  cfg.net.noise_dim = s.Get<int>("noise_dim", cfg.net.noise_dim);
  cfg.net.hidden = s.Get<std::vector<int>>("hidden", cfg.net.hidden);
  cfg.init_output_scale = s.Get<double>("init_output_scale", cfg.init_output_scale);
  cfg.seed = s.Get<uint64_t>("seed", cfg.seed);
  cfg.common_random_numbers =
      s.Get<bool>("common_random_numbers", cfg.common_random_numbers);
  cfg.sim_seed = s.Get<uint64_t>("sim_seed", cfg.sim_seed);
  cfg.report_samples = s.Get<int>("report_samples", cfg.report_samples);
  c.posterior_samples = s.Get<int>("posterior_samples", c.posterior_samples);
  const auto loss = s.Get<std::string>("loss", "nmse");
  if (loss != "nmse") {
    Fail(ErrorKind::kConfig, s.Path("loss") + ": only 'nmse' is supported");
  }
  c.sampling.mode = ParseSampling(
      s.Get<std::string>("sampling", "straight-through"), s.Path("sampling"));
  c.sampling.temperature = s.Get<double>("temperature", c.sampling.temperature);
  if (s.Has("temperature_end")) {
    cfg.temperature_schedule = std::make_pair(
        c.sampling.temperature, s.Need<double>("temperature_end"));
  }
  if (s.Has("prior")) {
    Section ps = s.Child("prior");
    calib::GaussianPrior prior;
    prior.mean = ps.Need<std::vector<double>>("mean");
    prior.stddev = ps.Need<std::vector<double>>("stddev");
    ps.Finish();
    cfg.prior = std::move(prior);
  }
  const auto params = Items(s.Node("parameters"), s.Path("parameters"));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Section ps(params[i], Indexed(s.Path("parameters"), i));
    const auto name = ps.Need<std::string>("name");
    const double lo = ps.Need<double>("lower");
    const double hi = ps.Need<double>("upper");
    const double init = ps.Get<double>("initial", (lo + hi) / 2);
    ps.Finish();
    try {
      c.parameters.Add(name, init, lo, hi);
    } catch (const Error& e) {
      Fail(ErrorKind::kConfig,
           Indexed(s.Path("parameters"), i) + ": " + e.what());
    }
  }
  const auto observed = Items(s.Node("observed"), s.Path("observed"));
  for (std::size_t i = 0; i < observed.size(); ++i) {
    Section os(observed[i], Indexed(s.Path("observed"), i));
    ObservedSpec o;
    o.metric = os.Need<std::string>("metric");
    o.path = os.Need<std::string>("path");
    os.Finish();
    c.observed.push_back(std::move(o));
  }
  s.Finish();
  return c;
}

AnalyzeSpec ParseAnalyze(Section s) {
  AnalyzeSpec a;
  a.metrics = s.Get<std::vector<std::string>>(
      "metrics", {"new_infections", "new_deaths"});
  a.parameters =
      s.Get<std::vector<std::string>>("parameters", {"beta", "mortality_prob"});
  s.Finish();
  return a;
}

SecureSpec ParseSecure(Section s) {
  SecureSpec sec;
  sec.protocol_seed = s.Get<uint64_t>("protocol_seed", sec.protocol_seed);
  sec.delivery_seed = s.Get<uint64_t>("delivery_seed", sec.delivery_seed);
  sec.fractional_bits = s.Get<int>("fractional_bits", sec.fractional_bits);
  s.Finish();
  return sec;
}

RunSpec ParseRun(Section s) {
  RunSpec r;
  r.steps = s.Get<int64_t>("steps", r.steps);
  r.seed = s.Get<uint64_t>("seed", r.seed);
  const auto mode = s.Get<std::string>("mode", "simulate");
  const auto parsed = ParseRunMode(mode);
  if (!parsed) {
    Fail(ErrorKind::kConfig, s.Path("mode") + ": unknown mode '" + mode + "'");
  }
  r.mode = *parsed;
  r.sampling.mode =
      ParseSampling(s.Get<std::string>("sampling", "hard"), s.Path("sampling"));
  r.sampling.temperature = s.Get<double>("temperature", r.sampling.temperature);
  r.retain_tape = s.Get<bool>("retain_tape", r.retain_tape);
  r.plot_metrics = s.Get<std::vector<std::string>>("plot_metrics", r.plot_metrics);
  s.Finish();
  return r;
}

bool IsMetric(const std::string& name) {
  const auto& m = epi::SeirmMetrics();
  return std::find(m.begin(), m.end(), name) != m.end();
}

bool IsDiseaseParameter(const std::string& name) {
  return name == "beta" || name == "mortality_prob" ||
         name == "vaccine_efficacy";
}

}  // namespace

const char* RunModeName(RunMode mode) {
  switch (mode) {
    case RunMode::kSimulate:
      return "simulate";
    case RunMode::kCalibrate:
      return "calibrate";
    case RunMode::kAnalyze:
      return "analyze";
    case RunMode::kSecureSim:
      return "secure-sim";
  }
  return "simulate";
}

std::optional<RunMode> ParseRunMode(std::string_view name) {
  for (RunMode m : {RunMode::kSimulate, RunMode::kCalibrate, RunMode::kAnalyze,
                    RunMode::kSecureSim}) {
    if (name == RunModeName(m)) return m;
  }
  return std::nullopt;
}

SimConfig ParseConfig(std::string_view yaml, std::string base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    Fail(ErrorKind::kConfig, std::string("config is not valid YAML: ") + e.what());
  }
  Section top(root, "");
  SimConfig config;
  config.base_dir = std::move(base_dir);
  config.population = ParsePopulation(top.Child("population"));
  config.layers = ParseNetwork(top.Child("network"));
  config.disease = ParseDisease(top.Child("disease"));
  config.behavior = ParseBehavior(top.Child("behavior"));
  config.calibration = ParseCalibration(top.Child("calibration"));
  config.analyze = ParseAnalyze(top.Child("analyze"));
  config.secure = ParseSecure(top.Child("secure"));
  config.run = ParseRun(top.Child("run"));
  top.Finish();
  ValidateConfig(config);
  return config;
}

SimConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return ParseConfig(buffer.str(), dir.empty() ? "." : dir.string());
}

void ValidateConfig(const SimConfig& c) {
  auto bad = [](const std::string& msg) { Fail(ErrorKind::kConfig, msg); };
  if (c.population.size < 1) bad("population.size must be >= 1");
  if (c.population.size > UINT32_MAX) bad("population.size too large");
  if (c.population.initial_infected > c.population.size) {
    bad("population.initial_infected exceeds population.size");
  }
  static const std::set<std::string> reserved = {
      "disease_state", "state_timer", "susceptibility", "vaccinated",
      "isolating"};
  std::map<std::string, const PropertySpec*> properties;
  for (const auto& p : c.population.properties) {
    if (reserved.contains(p.name) || p.name.starts_with("mass.")) {
      bad("population property '" + p.name + "' clashes with a model column");
    }
    if (!properties.emplace(p.name, &p).second) {
      bad("duplicate population property '" + p.name + "'");
    }
    double total = 0.0;
    for (const auto& cat : p.categories) {
      if (!(cat.weight >= 0.0)) {
        bad("population property '" + p.name + "' has a negative weight");
      }
      total += cat.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      bad("population property '" + p.name + "' weights sum to " +
          std::to_string(total) + ", not 1");
    }
  }
  if (c.layers.empty()) bad("network.layers must name at least one layer");
  std::set<std::string> layer_names;
  for (const auto& l : c.layers) {
    if (!layer_names.insert(l.name).second) {
      bad("duplicate network layer '" + l.name + "'");
    }
  }
  try {
    c.disease.Validate();
  } catch (const Error& e) {
    bad(std::string("disease: ") + e.what());
  }

  // Columns a predicate or action may name, with their label sets.
  std::map<std::string, std::vector<std::string>> domains = {
      {"disease_state", epi::DiseaseStateDomain()},
      {"isolating", epi::FlagDomain()},
      {"vaccinated", epi::FlagDomain()}};
  for (const auto& [name, p] : properties) {
    auto& labels = domains[name];
    for (const auto& cat : p->categories) labels.push_back(cat.label);
  }
  std::set<std::string> names;
  for (const auto& a : c.behavior.archetypes) {
    if (!names.insert(a.name).second) {
      bad("duplicate archetype '" + a.name + "'");
    }
    if (a.samples_per_action < 1) bad("behavior.samples_per_action must be >= 1");
    for (const auto& cond : a.predicate.conditions()) {
      auto it = domains.find(cond.column);
      if (it == domains.end()) {
        bad("archetype '" + a.name + "' filters on unknown column '" +
            cond.column + "'");
      }
      if (cond.kind == AgentPredicate::Condition::Kind::kRange) {
        bad("archetype '" + a.name + "': range filters need a real column");
      }
      for (const auto& label : cond.labels) {
        if (std::find(it->second.begin(), it->second.end(), label) ==
            it->second.end()) {
          bad("archetype '" + a.name + "': '" + label + "' is not a label of '" +
              cond.column + "'");
        }
      }
    }
    if (a.actions.empty()) bad("archetype '" + a.name + "' has no actions");
    for (const auto& act : a.actions) {
      if (!act.target_column) continue;
      const auto& target = *act.target_column;
      const bool writable =
          target == "isolating" ||
          (properties.contains(target) && properties.at(target)->dynamic);
      if (!writable) {
        bad("action '" + act.name + "' targets '" + target +
            "', which is not a dynamic categorical column");
      }
      if (domains.at(target) != act.options) {
        bad("action '" + act.name + "' options differ from the labels of '" +
            target + "'");
      }
    }
  }

  const auto& cal = c.calibration;
  try {
    cal.config.Validate();
  } catch (const Error& e) {
    bad(std::string("calibration: ") + e.what());
  }
  for (const auto& e : cal.parameters.entries()) {
    if (!IsDiseaseParameter(e.name)) {
      bad("calibration parameter '" + e.name + "' is not a model parameter");
    }
  }
  if (cal.config.prior && (cal.config.prior->mean.size() != cal.parameters.size() ||
                           cal.config.prior->stddev.size() !=
                               cal.parameters.size())) {
    bad("calibration.prior needs one mean and stddev per parameter");
  }
  for (const auto& o : cal.observed) {
    if (!IsMetric(o.metric)) {
      bad("calibration observed metric '" + o.metric + "' is unknown");
    }
  }
  if (cal.posterior_samples < 1) bad("calibration.posterior_samples must be >= 1");
  for (const auto& m : c.analyze.metrics) {
    if (!IsMetric(m)) bad("analyze metric '" + m + "' is unknown");
  }
  for (const auto& p : c.analyze.parameters) {
    if (!IsDiseaseParameter(p)) bad("analyze parameter '" + p + "' is unknown");
  }
  for (const auto& m : c.run.plot_metrics) {
    if (!IsMetric(m)) bad("run.plot_metrics names unknown metric '" + m + "'");
  }
  if (c.run.steps < 1) bad("run.steps must be >= 1");
  if (c.secure.fractional_bits < 0 || c.secure.fractional_bits > 52) {
    bad("secure.fractional_bits must lie in [0, 52]");
  }
}

}  // namespace diffabm::io
