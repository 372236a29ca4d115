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

#ifndef DIFFABM_IO_CONFIG_H_
#define DIFFABM_IO_CONFIG_H_

// Run configuration, read from YAML. See docs/config.md for the schema.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffabm/behavior/archetypes.h"
#include "diffabm/behavior/provider.h"
#include "diffabm/calibration/calibrator.h"
#include "diffabm/epi/seirm.h"

namespace diffabm::io {

struct CategoryWeight {
  std::string label;
  double weight = 0.0;
};

// A categorical agent property drawn independently per agent.
struct PropertySpec {
  std::string name;
  std::vector<CategoryWeight> categories;
  bool dynamic = false;  // may be written by behavior actions
};

struct PopulationSpec {
  uint64_t size = 1000;
  std::vector<PropertySpec> properties;
  uint64_t initial_infected = 10;
};

enum class NetworkGenerator { kHouseholdBlocks, kSmallWorld, kComplete };

struct LayerSpec {
  std::string name;
  NetworkGenerator generator = NetworkGenerator::kSmallWorld;
  uint32_t household_size = 4;  // household-blocks
  uint32_t k = 2;               // small-world: ring degree 2k
  double rewire_p = 0.1;        // small-world
  bool honors_isolation = false;
};

enum class ProviderKind { kStub, kConstant, kExternal };

struct ProviderSpec {
  ProviderKind kind = ProviderKind::kStub;
  behavior::LogisticStubConfig stub;
  int constant_option = 0;
  std::vector<std::string> command;  // external: argv
  behavior::ExternalProviderOptions external;
};

struct BehaviorSpec {
  ProviderSpec provider;
  std::vector<behavior::ArchetypeSpec> archetypes;  // empty: no behavior
};

struct ObservedSpec {
  std::string metric;
  std::string path;  // resolved against the config file's directory
};

struct CalibrationSpec {
  calib::CalibConfig config;
  ThetaVector parameters;  // name, initial value and bounds
  std::vector<ObservedSpec> observed;
  ad::SamplingSpec sampling{ad::SamplingMode::kStraightThrough, 0.5};
  int posterior_samples = 1000;
};

struct AnalyzeSpec {
  std::vector<std::string> metrics;
  std::vector<std::string> parameters;
};

struct SecureSpec {
  uint64_t protocol_seed = 1;
  uint64_t delivery_seed = 2;
  int fractional_bits = 16;
};

enum class RunMode { kSimulate, kCalibrate, kAnalyze, kSecureSim };

struct RunSpec {
  int64_t steps = 30;
  uint64_t seed = 0;
  RunMode mode = RunMode::kSimulate;
  ad::SamplingSpec sampling{ad::SamplingMode::kHard, 0.5};
  bool retain_tape = false;
  std::vector<std::string> plot_metrics = {"S", "E", "I", "R", "M"};
};

struct SimConfig {
  PopulationSpec population;
  std::vector<LayerSpec> layers;
  epi::DiseaseParams disease;
  BehaviorSpec behavior;
  CalibrationSpec calibration;
  AnalyzeSpec analyze;
  SecureSpec secure;
  RunSpec run;
  std::string base_dir = ".";
};

// Parses and validates. Unknown keys, wrong types and unresolved names
// throw kConfig naming the offending key path.
SimConfig ParseConfig(std::string_view yaml, std::string base_dir = ".");
// Throws kIo when the file cannot be read.
SimConfig LoadConfig(const std::string& path);

// Cross-section checks (names resolve, ranges hold). ParseConfig calls it.
void ValidateConfig(const SimConfig& config);

const char* RunModeName(RunMode mode);
std::optional<RunMode> ParseRunMode(std::string_view name);

}  // namespace diffabm::io

#endif  // DIFFABM_IO_CONFIG_H_
