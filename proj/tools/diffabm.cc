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

// Command-line front end: simulate, calibrate, analyze, secure-sim and
// gen-data on a YAML configuration.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "diffabm/io/config.h"
#include "diffabm/io/scenario.h"
#include "diffabm/io/series.h"

namespace fs = std::filesystem;
using namespace diffabm;

namespace {

struct Options {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir = "out";
  bool retain_tape = false;
  std::string mode;
  double scale = 1.0;
  std::optional<int64_t> steps;
};

io::SimConfig Load(const Options& opt) {
  io::SimConfig config = io::LoadConfig(opt.config_path);
  if (opt.seed) config.run.seed = *opt.seed;
  if (opt.steps) config.run.steps = *opt.steps;
  if (opt.retain_tape) config.run.retain_tape = true;
  if (opt.mode == "hard") {
    config.run.sampling.mode = ad::SamplingMode::kHard;
  } else if (opt.mode == "soft") {
    config.run.sampling.mode = ad::SamplingMode::kRelaxed;
  }
  if (opt.scale != 1.0) {
    auto& pop = config.population;
    pop.size = std::max<uint64_t>(1, std::llround(pop.size * opt.scale));
    pop.initial_infected = std::min<uint64_t>(
        pop.size, std::llround(pop.initial_infected * opt.scale));
  }
  io::ValidateConfig(config);
  return config;
}

std::string OutPath(const Options& opt, const std::string& file) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) {
    Fail(ErrorKind::kIo,
         "cannot create output directory '" + opt.out_dir + "': " + ec.message());
  }
  return (fs::path(opt.out_dir) / file).string();
}

void WriteRun(const Options& opt, const io::SimConfig& config,
              const Trajectory<double>& trajectory) {
  io::WriteTrajectoryCsv(OutPath(opt, "trajectory.csv"), trajectory);
  io::WriteSvgPlot(OutPath(opt, "trajectory.svg"), trajectory,
                   config.run.plot_metrics);
  spdlog::info("wrote {} steps to {}", trajectory.steps(), opt.out_dir);
}

void RunAnalyze(const Options& opt, const io::SimConfig& config,
                const io::Scenario& scenario) {
  auto sampling = config.run.sampling;
  if (sampling.mode == ad::SamplingMode::kHard) {
    spdlog::warn("hard sampling has no pathwise gradient; partials are zero "
                 "through stochastic transitions");
  }
  const auto result = io::Analyze(scenario, config.analyze, config.disease,
                                  config.run.seed, sampling);
  WriteRun(opt, config, result.trajectory);
  io::WriteSensitivities(OutPath(opt, "sensitivities.csv"), result.report);
  spdlog::info("sensitivities from one recorded run ({} extra simulations)",
               result.report.simulations_consumed);
}

int Simulate(const Options& opt) {
  const auto config = Load(opt);
  const auto scenario = io::BuildScenario(config, config.run.seed);
  if (config.run.retain_tape) {
    RunAnalyze(opt, config, scenario);
  } else {
    WriteRun(opt, config,
             io::Simulate(scenario, config.run.seed, config.run.sampling));
  }
  return 0;
}

int Analyze(const Options& opt) {
  const auto config = Load(opt);
  RunAnalyze(opt, config, io::BuildScenario(config, config.run.seed));
  return 0;
}

int Calibrate(const Options& opt) {
  const auto config = Load(opt);
  const auto scenario = io::BuildScenario(config, config.run.seed);
  const auto result =
      io::Calibrate(scenario, config.calibration, config.base_dir);
  io::WriteCalibrationReport(OutPath(opt, "calibration.csv"), result.parameters,
                             result.steps);
  io::WritePosteriorSamples(OutPath(opt, "posterior.csv"), result.parameters,
                            result.posterior);
  for (std::size_t k = 0; k < result.parameters.size(); ++k) {
    double mean = 0.0;
    for (const auto& draw : result.posterior) mean += draw[k];
    mean /= static_cast<double>(result.posterior.size());
    spdlog::info("posterior mean {} = {:.6g}", result.parameters[k], mean);
  }
  return 0;
}

int SecureSim(const Options& opt) {
  const auto config = Load(opt);
  const auto scenario = io::BuildScenario(config, config.run.seed);
  WriteRun(opt, config, io::SimulateSecure(scenario, config, config.run.seed));
  return 0;
}

// Writes one observed series per calibration.observed entry from a hard-mode
// run at the configured disease parameters.
int GenData(const Options& opt) {
  const auto config = Load(opt);
  if (config.calibration.observed.empty()) {
    Fail(ErrorKind::kConfig, "calibration.observed names no series to write");
  }
  const auto scenario = io::BuildScenario(config, config.run.seed);
  const auto trajectory = io::Simulate(scenario, config.run.seed,
                                       {ad::SamplingMode::kHard, 0.5});
  for (const auto& o : config.calibration.observed) {
    const auto path = OutPath(opt, fs::path(o.path).filename().string());
    io::WriteObservedCsv(path, trajectory.Values(o.metric));
    spdlog::info("wrote {} to {}", o.metric, path);
  }
  return 0;
}

int Run(const Options& opt) {
  switch (io::LoadConfig(opt.config_path).run.mode) {
    case io::RunMode::kSimulate:
      return Simulate(opt);
    case io::RunMode::kCalibrate:
      return Calibrate(opt);
    case io::RunMode::kAnalyze:
      return Analyze(opt);
    case io::RunMode::kSecureSim:
      return SecureSim(opt);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("diffabm"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Differentiable agent-based epidemic simulator"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::function<int(const Options&)>>>
      verbs = {{"run", Run},
               {"simulate", Simulate},
               {"calibrate", Calibrate},
               {"analyze", Analyze},
               {"secure-sim", SecureSim},
               {"gen-data", GenData}};
  const std::map<std::string, std::string> help = {
      {"run", "Run the mode named by run.mode"},
      {"simulate", "Forward simulation; writes trajectory.csv and .svg"},
      {"calibrate", "Fit the posterior over calibration.parameters"},
      {"analyze", "Sensitivities of metric totals from one recorded run"},
      {"secure-sim", "Decentralized run over secret-shared messages"},
      {"gen-data", "Write observed series for calibration.observed"}};
  std::function<int(const Options&)> chosen;
  for (const auto& [name, fn] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("-c,--config", opt.config_path, "YAML configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override run.seed");
    sub->add_option("--steps", opt.steps, "Override run.steps");
    sub->add_option("-o,--out-dir", opt.out_dir, "Output directory");
    sub->add_flag("--retain-tape", opt.retain_tape,
                  "Keep the tape and write sensitivities");
    sub->add_option("--mode", opt.mode, "Sampling: hard or soft")
        ->check(CLI::IsMember({"hard", "soft"}));
    sub->add_option("--scale", opt.scale, "Multiply the population size")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, fn = fn] { chosen = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return chosen(opt);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 3;
  }
}
