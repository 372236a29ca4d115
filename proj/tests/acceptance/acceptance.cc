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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers to run a subset.

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diffabm/behavior/archetypes.h"
#include "diffabm/epi/seirm.h"
#include "diffabm/io/generate.h"
#include "diffabm/secure/decentralized.h"
#include "diffabm/secure/session.h"
#include "diffabm/sensitivity/sensitivity.h"
#include "support/recovery_benchmark.h"
#include "support/seirm_fixture.h"

namespace diffabm {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double RelativeError(double value, double reference) {
  if (value == reference) return 0.0;
  return std::abs(value - reference) / std::abs(reference);
}

// 1. -------------------------------------------------------------------------

struct GradientWorld {
  epi::DiseaseParams params;
  ContactGraph graph;
  AgentStateTable state;
};

template <typename Real>
Real CumulativeInfections(const GradientWorld& w, const Real& beta, int steps,
                          uint64_t seed) {
  SubstepRegistry<Real> registry;
  epi::RegisterSeirm(registry, w.params);
  auto state = w.state.template Convert<Real>();
  ParameterSet<Real> theta;
  theta.Set("beta", beta);
  EnvState env = testing::UnitEnv();
  const auto traj =
      RunSimulation(registry, epi::DefaultSeirmPipeline({"l"}, false), theta,
                    state, env, w.graph,
                    RunOptions{steps, seed, {ad::SamplingMode::kRelaxed, 0.5}});
  ad::Accumulator<Real> total;
  for (const Real& v : traj.Series("new_infections")) total.Add(v);
  return total.Result();
}

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  const uint32_t n = 1000;
  const int steps = 10;
  const uint64_t seed = 2024;  // shared by every evaluation
  GradientWorld w;
  w.params.mortality_prob = 0.05;
  w.graph = ContactGraph(n);
  w.graph.AddLayerFromEdges("l", testing::RandomEdges(n, 4 * n, 17));
  w.state = testing::SeirmPopulation(n, testing::FirstAgents(20), w.params);
  const double beta = 0.4, eps = 1e-4;

  ad::Tape tape;
  const ad::Var x = tape.Input("beta", beta);
  const double grad = tape.Backward(CumulativeInfections(w, x, steps, seed))[0];
  const double fd = (CumulativeInfections(w, beta + eps, steps, seed) -
                     CumulativeInfections(w, beta - eps, steps, seed)) /
                    (2 * eps);
  const double rel = RelativeError(grad, fd);
  const double secs = Seconds(start);
  return {rel <= 1e-4 && secs < 30.0 && std::abs(fd) > 0,
          Format("autodiff %.10g, central FD %.10g, rel err %.2e (<= 1e-4), "
                 "%.2f s (< 30 s)",
                 grad, fd, rel, secs)};
}

// 2. -------------------------------------------------------------------------

struct SecureWorld {
  epi::DiseaseParams disease;
  ContactGraph graph;
  AgentStateTable state;
  std::vector<std::string> layers;
};

SecureWorld TwoLayerWorld(uint32_t n, uint32_t seed) {
  SecureWorld w;
  w.disease.beta = 0.6;
  w.disease.mortality_prob = 0.1;
  w.disease.vaccination_coverage = 0.05;
  w.disease.vaccine_efficacy = 0.6;
  w.graph = ContactGraph(n);
  w.graph.AddLayerFromEdges("home", testing::RandomEdges(n, 2 * n, seed));
  w.graph.AddLayerFromEdges("work", testing::RandomEdges(n, 3 * n, seed + 1),
                            /*honors_isolation=*/true);
  w.layers = {"home", "work"};
  w.state = testing::SeirmPopulation(n, testing::FirstAgents(5), w.disease);
  auto isolating = w.state.MutableCodes("isolating");
  for (uint32_t i = 0; i < n; i += 7) isolating[i] = 1;
  return w;
}

Outcome DecentralizedEquivalence() {
  const SecureWorld w = TwoLayerWorld(100, 3);
  const int steps = 10;
  const uint64_t seed = 77;
  SubstepRegistry<double> registry;
  epi::RegisterSeirm(registry, w.disease);
  auto state = w.state;
  EnvState env = testing::UnitEnv();
  const auto central = RunSimulation(
      registry, epi::DefaultSeirmPipeline(w.layers, true),
      ParameterSet<double>{}, state, env, w.graph,
      RunOptions{steps, seed, {ad::SamplingMode::kHard, 0.5}});

  secure::DecentralizedConfig config;
  config.disease = w.disease;
  config.layers = w.layers;
  config.with_vaccination = true;
  config.seed = seed;
  config.protocol_seed = 99;
  secure::DecentralizedSeirm<double> sim(config, w.state, w.graph, {});
  secure::SimulatedNetwork net(5);
  std::size_t compared = 0, mismatched = 0;
  double infections = 0;
  for (int t = 0; t < steps; ++t) {
    const auto revealed = sim.Step(net, t);
    for (const auto& [name, value] : revealed) {
      ++compared;
      const double expected = central.Values(name)[t];
      if (std::memcmp(&value, &expected, sizeof value) != 0) ++mismatched;
    }
    infections += revealed.at("new_infections");
  }
  return {mismatched == 0 && compared == steps * central.metric_names().size() &&
              infections > 0,
          Format("%zu per-step aggregates compared, %zu differ bitwise; "
                 "%.0f infections",
                 compared, mismatched, infections)};
}

// 3. -------------------------------------------------------------------------

std::vector<uint32_t> Parties(uint32_t n) {
  std::vector<uint32_t> p(n);
  for (uint32_t i = 0; i < n; ++i) p[i] = i;
  return p;
}

double ChiSquareLowByte(uint32_t from, uint32_t to, int sessions) {
  std::vector<double> counts(256, 0.0);
  const secure::RingElement secrets[] = {7, 1ull << 40, 12345};
  secure::SimulatedNetwork net;
  net.set_record_transcript(true);
  double total = 0;
  for (int t = 0; t < sessions; ++t) {
    net.ClearTranscript();
    secure::SecureSum(secrets, net, t, 2024);
    for (const auto& f : net.transcript()) {
      const auto m = secure::DecodeWire(f.frame);
      if (m.type == secure::WireType::kShare && f.from == from && f.to == to) {
        counts[m.value & 0xFF] += 1;
        total += 1;
      }
    }
  }
  const double expected = total / counts.size();
  double chi = 0;
  for (double c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

Outcome SecretSharingExactness() {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<uint32_t> parties(1, 16);
  int round_trip_failures = 0, sum_failures = 0;
  for (int k = 0; k < 10000; ++k) {
    const uint32_t n = parties(gen);
    const auto holders = Parties(n);
    const secure::RingElement secret = gen();
    CounterRng rng(gen(), {});
    const auto shares = secure::ShareSecret(secret, 0, holders, rng);
    if (secure::Reconstruct(shares, holders) != secret) ++round_trip_failures;

    std::vector<secure::RingElement> secrets(n);
    secure::RingElement plain = 0;
    for (auto& s : secrets) {
      s = gen();
      plain += s;
    }
    secure::SimulatedNetwork net(k);
    if (secure::SecureSum(secrets, net, k, gen()) != plain) ++sum_failures;
  }
  const int sessions = 100000;
  const double critical =
      boost::math::quantile(boost::math::chi_squared(255), 0.99);
  const double chi01 = ChiSquareLowByte(0, 1, sessions);
  const double chi02 = ChiSquareLowByte(0, 2, sessions);
  return {round_trip_failures == 0 && sum_failures == 0 && chi01 < critical &&
              chi02 < critical,
          Format("10^4 round trips: %d inexact; secure sums: %d differ; "
                 "low-byte chi2 over 10^5 shares %.1f and %.1f (< %.1f at 0.01)",
                 round_trip_failures, sum_failures, chi01, chi02, critical)};
}

// 4. -------------------------------------------------------------------------

Outcome SecureGradientAggregation() {
  using D = ad::Dual<1>;
  const uint32_t n = 50;
  const int steps = 6;
  const uint64_t seed = 21;
  epi::DiseaseParams disease;
  disease.mortality_prob = 0.05;
  ContactGraph graph(n);
  graph.AddLayerFromEdges("l", testing::RandomEdges(n, 150, 8));
  const auto state0 = testing::SeirmPopulation(n, testing::FirstAgents(4), disease);
  const ad::SamplingSpec relaxed{ad::SamplingMode::kRelaxed, 0.5};
  ParameterSet<D> params;
  params.Set("beta", D::Seeded(0.5, 0));

  SubstepRegistry<D> registry;
  epi::RegisterSeirm(registry, disease);
  auto state = state0.Convert<D>();
  EnvState env = testing::UnitEnv();
  const auto central =
      RunSimulation(registry, epi::DefaultSeirmPipeline({"l"}, false), params,
                    state, env, graph, RunOptions{steps, seed, relaxed});

  secure::DecentralizedConfig config;
  config.disease = disease;
  config.layers = {"l"};
  config.sampling = relaxed;
  config.seed = seed;
  config.protocol_seed = 3;
  config.fractional_bits = 40;
  secure::DecentralizedSeirm<D> sim(config, state0.Convert<D>(), graph, params);
  secure::SimulatedNetwork net;
  const secure::FixedPointCodec codec(16);
  const double tolerance = n * std::ldexp(1.0, -16);
  double worst = 0, largest = 0;
  uint64_t saturated = 0;
  for (int t = 0; t < steps; ++t) {
    sim.Step(net, t);
    std::vector<double> local;
    for (const auto& node : sim.nodes()) local.push_back(node.new_infections.d[0]);
    const auto out =
        secure::SecureGradientAggregation(local, codec, net, 1ull << 40 | 2 * t, 5);
    const double expected = central.Series("new_infections")[t].d[0];
    worst = std::max(worst, std::abs(out.value - expected));
    largest = std::max(largest, std::abs(expected));
    saturated += out.saturated_nodes;
  }
  return {worst <= tolerance && saturated == 0 && largest > 1.0,
          Format("max |decoded - autodiff| %.3e (<= 50 * 2^-16 = %.3e) over "
                 "%d steps, largest gradient %.3f",
                 worst, tolerance, steps, largest)};
}

// 5. -------------------------------------------------------------------------

Outcome CalibrationRecovery() {
  const auto start = Clock::now();
  int within = 0;
  std::ostringstream means;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const auto result = testing::RunRecoveryBenchmark(seed);
    const double rel = std::abs(result.posterior_mean - testing::kRecoveryBetaStar) /
                       testing::kRecoveryBetaStar;
    if (rel <= 0.10) ++within;
    means << (seed > 1 ? " " : "") << Format("%.3f", result.posterior_mean);
  }
  const double minutes = Seconds(start) / 60.0;
  return {within >= 8 && minutes < 30.0,
          Format("%d/10 seeds within 10%% of beta*=0.3 (>= 8), %.1f min "
                 "(< 30 min); posterior means: ",
                 within, minutes) +
              means.str()};
}

// 6. -------------------------------------------------------------------------

Outcome ZeroShotSensitivity() {
  const uint32_t n = 200;
  epi::DiseaseParams disease;
  disease.vaccination_coverage = 0.02;
  ContactGraph graph(n);
  graph.AddLayerFromEdges("home", testing::RandomEdges(n, 3 * n, 2));
  graph.AddLayerFromEdges("work", testing::RandomEdges(n, 2 * n, 3));
  const auto state0 = testing::SeirmPopulation(n, testing::FirstAgents(20), disease);
  ThetaVector theta;
  theta.Add("beta", 0.6, 0.0, 2.0);
  theta.Add("mortality_prob", 0.1, 0.0, 1.0);
  theta.Add("vaccine_efficacy", 0.5, 0.0, 1.0);
  const RunOptions options{10, 77, {ad::SamplingMode::kRelaxed, 0.5}};
  const auto pipeline = epi::DefaultSeirmPipeline({"home", "work"}, true);
  const std::vector<std::string> metrics = {"new_infections", "new_deaths"};

  SubstepRegistry<ad::Var> registry;
  epi::RegisterSeirm(registry, disease);
  RecordedRun run = RecordRun(registry, pipeline, theta, state0,
                              testing::UnitEnv(), graph, options);
  const auto nodes = run.MetricNodes(metrics);
  const uint64_t before = SimulationCount();
  const auto report = Sensitivities(*run.tape, nodes, run.parameters);
  const uint64_t consumed = SimulationCount() - before;

  auto total = [&](const ThetaVector& t, const std::string& metric) {
    SubstepRegistry<double> reg;
    epi::RegisterSeirm(reg, disease);
    auto state = state0;
    EnvState env = testing::UnitEnv();
    const auto traj = RunSimulation(reg, pipeline,
                                    ParameterSet<double>::Constants(t), state,
                                    env, graph, options);
    double sum = 0;
    for (double v : traj.Values(metric)) sum += v;
    return sum;
  };
  const double eps = 1e-4;
  double worst = 0;
  std::string worst_at;
  int nonzero = 0;
  for (const auto& metric : metrics) {
    for (const ThetaEntry& e : theta.entries()) {
      ThetaVector up = theta, down = theta;
      up.Set(e.name, e.value + eps);
      down.Set(e.name, e.value - eps);
      const double fd = (total(up, metric) - total(down, metric)) / (2 * eps);
      const double ad = report.Get(metric + ".total", e.name);
      const double rel = RelativeError(ad, fd);
      if (fd != 0) ++nonzero;
      if (rel > worst) {
        worst = rel;
        worst_at = Format("d%s/d%s: autodiff %.8g vs FD %.8g", metric.c_str(),
                          e.name.c_str(), ad, fd);
      }
    }
  }
  return {consumed == 0 && report.simulations_consumed == 0 && worst <= 1e-4 &&
              nonzero > 0,
          Format("%llu simulations during sensitivities(); %zu partials, max "
                 "rel err %.2e (<= 1e-4)",
                 static_cast<unsigned long long>(consumed),
                 metrics.size() * theta.size(), worst) +
              (worst_at.empty() ? "" : " at " + worst_at)};
}

// 7. -------------------------------------------------------------------------

std::vector<behavior::ArchetypeSpec> YoungOld(int m) {
  std::vector<behavior::ArchetypeSpec> specs(2);
  const char* groups[] = {"young", "old"};
  for (int k = 0; k < 2; ++k) {
    specs[k].id = k;
    specs[k].name = groups[k];
    specs[k].predicate.WhereIn("age_group", {groups[k]});
    specs[k].actions = {{"isolate", {"no", "yes"}, "isolating"},
                        {"mask", {"no", "yes"}, std::nullopt}};
    specs[k].samples_per_action = m;
  }
  return specs;
}

Outcome ArchetypeEfficiency() {
  const int m = 7;
  behavior::LogisticStubConfig stub_config;
  stub_config.bias = -0.3;
  stub_config.noise_scale = 0.5;
  behavior::LogisticStubProvider stub(stub_config);
  const uint64_t expected = 2u * 2u * m;

  std::string counts;
  bool counts_ok = true;
  for (uint32_t n : {1000u, 100000u}) {
    auto state = testing::SeirmPopulation(n, {}, epi::DiseaseParams{});
    auto model = std::make_shared<behavior::BehaviorModel>(YoungOld(m), stub);
    SubstepRegistry<double> registry;
    epi::RegisterSeirm(registry, epi::DiseaseParams{});
    behavior::RegisterArchetypes(registry, model);
    ContactGraph graph(n);
    EnvState env = testing::UnitEnv();
    const int steps = 3;
    RunSimulation(registry, {behavior::ArchetypeSubstep()},
                  ParameterSet<double>(), state, env, graph,
                  RunOptions{steps, 9, {}});
    counts_ok &= model->queries() == steps * expected &&
                 model->QueriesPerStep() == expected;
    counts += Format("N=%u: %llu queries over %d steps; ", n,
                     static_cast<unsigned long long>(model->queries()), steps);
  }

  // Fidelity: members' isolation frequency against their archetype's row.
  const uint32_t n = 10000;
  const int seeds = 100;
  std::vector<int> passed(2, 0);
  for (int seed = 0; seed < seeds; ++seed) {
    auto state = testing::SeirmPopulation(n, {}, epi::DiseaseParams{});
    auto model = std::make_shared<behavior::BehaviorModel>(YoungOld(m), stub);
    SubstepRegistry<double> registry;
    epi::RegisterSeirm(registry, epi::DiseaseParams{});
    behavior::RegisterArchetypes(registry, model);
    ContactGraph graph(n);
    EnvState env = testing::UnitEnv();
    RunSimulation(registry, {behavior::ArchetypeSubstep()},
                  ParameterSet<double>(), state, env, graph,
                  RunOptions{1, static_cast<uint64_t>(seed), {}});
    const auto& dist = *model->last_distribution();
    const auto membership = behavior::AssignArchetypes(state, model->specs());
    const auto isolating = state.Codes("isolating");
    for (int k = 0; k < 2; ++k) {
      double members = 0, ones = 0;
      for (uint32_t i = 0; i < n; ++i) {
        if (membership[i] != k) continue;
        ++members;
        ones += isolating[i];
      }
      const double p = dist.p[k][0][1];
      const double sigma = std::sqrt(p * (1 - p) / members);
      if (std::abs(ones / members - p) <= 3 * sigma) ++passed[k];
    }
  }
  const bool fidelity_ok = passed[0] >= 99 && passed[1] >= 99;
  return {counts_ok && fidelity_ok,
          counts + Format("expected K*A*M = %llu per step; within 3 sigma: "
                          "young %d/100, old %d/100 seeds (>= 99)",
                          static_cast<unsigned long long>(expected), passed[0],
                          passed[1])};
}

// 8. -------------------------------------------------------------------------

struct SuiteRun {
  Trajectory<double> trajectory;
  double n;
};

SuiteRun RunConfigured(uint32_t n, uint64_t seed, ad::SamplingMode mode,
                       bool behavior_on) {
  epi::DiseaseParams disease;
  disease.beta = 0.7;
  disease.mortality_prob = 0.08;
  disease.vaccination_coverage = 0.01;
  disease.vaccine_efficacy = 0.5;
  ContactGraph graph(n);
  graph.AddLayerFromEdges("home", io::HouseholdEdges(n, 4));
  graph.AddLayerFromEdges("town", testing::RandomEdges(n, 3 * n, seed),
                          /*honors_isolation=*/true);
  auto state = testing::SeirmPopulation(n, testing::FirstAgents(n / 25), disease);
  SubstepRegistry<double> registry;
  epi::RegisterSeirm(registry, disease);
  behavior::LogisticStubProvider stub({-1.0, {}, 0.5, {}, 0.3});
  std::vector<SubstepSpec> pipeline;
  if (behavior_on) {
    auto model = std::make_shared<behavior::BehaviorModel>(YoungOld(5), stub);
    behavior::RegisterArchetypes(registry, model);
    pipeline.push_back(behavior::ArchetypeSubstep());
  }
  for (auto& s : epi::DefaultSeirmPipeline({"home", "town"}, true)) {
    pipeline.push_back(s);
  }
  EnvState env = testing::UnitEnv();
  auto traj = RunSimulation(registry, pipeline, ParameterSet<double>(), state,
                            env, graph, RunOptions{25, seed, {mode, 0.5}});
  return {std::move(traj), static_cast<double>(n)};
}

bool BitIdentical(const Trajectory<double>& a, const Trajectory<double>& b) {
  if (a.metric_names() != b.metric_names() || a.steps() != b.steps()) return false;
  for (const auto& name : a.metric_names()) {
    const auto& x = a.Series(name);
    const auto& y = b.Series(name);
    if (std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

Outcome ConservationAndDeterminism() {
  int runs = 0, conservation_failures = 0, rerun_failures = 0;
  double worst_relaxed = 0;
  const ad::SamplingMode modes[] = {ad::SamplingMode::kHard,
                                    ad::SamplingMode::kRelaxed,
                                    ad::SamplingMode::kStraightThrough};
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    for (auto mode : modes) {
      for (bool behavior_on : {false, true}) {
        const uint32_t n = 400 + 50 * seed;
        const auto a = RunConfigured(n, seed, mode, behavior_on);
        const auto b = RunConfigured(n, seed, mode, behavior_on);
        ++runs;
        if (!BitIdentical(a.trajectory, b.trajectory)) ++rerun_failures;
        for (std::size_t t = 0; t < a.trajectory.steps(); ++t) {
          ad::Accumulator<double> sum;
          for (const char* c : {"S", "E", "I", "R", "M"}) {
            sum.Add(a.trajectory.Series(c)[t]);
          }
          const double total = sum.Result();
          if (mode == ad::SamplingMode::kRelaxed) {
            worst_relaxed = std::max(worst_relaxed, std::abs(total - a.n) / a.n);
            if (std::abs(total - a.n) > 1e-9 * a.n) ++conservation_failures;
          } else if (total != a.n) {
            ++conservation_failures;
          }
        }
      }
    }
  }

  int permutation_failures = 0;
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    const uint32_t n = 20 + trial % 80;
    auto edges = testing::RandomEdges(n, 3 * n, 1000 + trial);
    ContactGraph base(n);
    base.AddLayerFromEdges("l", edges);
    std::shuffle(edges.begin(), edges.end(), gen);
    for (auto& e : edges) {
      if (gen() & 1) std::swap(e.first, e.second);
    }
    ContactGraph permuted(n);
    permuted.AddLayerFromEdges("l", edges);
    std::vector<double> values(n);
    for (auto& v : values) v = u(gen);
    for (Reduction r : {Reduction::kSum, Reduction::kMean, Reduction::kMax}) {
      const auto x = AggregateMessages<double>(base.layer("l"), values, r);
      const auto y = AggregateMessages<double>(permuted.layer("l"), values, r);
      if (std::memcmp(x.data(), y.data(), n * sizeof(double)) != 0) {
        ++permutation_failures;
      }
    }
  }
  return {conservation_failures == 0 && rerun_failures == 0 &&
              permutation_failures == 0,
          Format("%d runs x 25 steps: %d steps violate S+E+I+R+M = N (hard and "
                 "straight-through exact, relaxed within 1e-9 N, worst %.1e); "
                 "%d reruns differ; 100 graphs x 3 reductions: %d permutation "
                 "mismatches",
                 runs, conservation_failures, worst_relaxed, rerun_failures,
                 permutation_failures)};
}

// 9. -------------------------------------------------------------------------

struct ThroughputSample {
  uint32_t agents = 0;
  uint64_t entries = 0;
  double seconds = 0;
  double peak_bytes = 0;
  bool conserved = false;
};

// Child-side work: build and run one instance, report through the pipe.
void ThroughputChild(uint32_t n, int fd) {
  const auto start = Clock::now();
  epi::DiseaseParams disease;
  disease.beta = 0.4;
  disease.mortality_prob = 0.02;
  io::PopulationSpec pop;
  pop.size = n;
  pop.initial_infected = n / 1000;
  auto state = io::GeneratePopulation(pop, disease, 1);
  io::LayerSpec household{"household", io::NetworkGenerator::kHouseholdBlocks,
                          5, 0, 0.0, false};
  io::LayerSpec community{"community", io::NetworkGenerator::kSmallWorld, 4, 3,
                          0.1, true};
  const auto graph = io::GenerateNetwork({household, community}, n, 1);
  SubstepRegistry<double> registry;
  epi::RegisterSeirm(registry, disease);
  EnvState env = testing::UnitEnv();
  const auto traj =
      RunSimulation(registry, epi::DefaultSeirmPipeline({"household", "community"}, false),
                    ParameterSet<double>(), state, env, graph,
                    RunOptions{20, 5, {ad::SamplingMode::kHard, 0.5}});
  bool conserved = true;
  for (std::size_t t = 0; t < traj.steps(); ++t) {
    double total = 0;
    for (const char* c : {"S", "E", "I", "R", "M"}) total += traj.Series(c)[t];
    conserved &= total == n;
  }
  ThroughputSample s{n, graph.num_entries(), Seconds(start), 0, conserved};
  [[maybe_unused]] auto written = ::write(fd, &s, sizeof s);
}

ThroughputSample MeasureInChild(uint32_t n) {
  int fds[2];
  if (::pipe(fds) != 0) return {};
  const pid_t pid = ::fork();
  if (pid == 0) {
    ::close(fds[0]);
    ThroughputChild(n, fds[1]);
    ::_exit(0);
  }
  ::close(fds[1]);
  ThroughputSample s;
  const auto got = ::read(fds[0], &s, sizeof s);
  ::close(fds[0]);
  int status = 0;
  rusage usage{};
  ::wait4(pid, &status, 0, &usage);
  if (got != sizeof s || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    return {};
  }
  s.peak_bytes = usage.ru_maxrss * 1024.0;  // ru_maxrss is in KiB on Linux
  return s;
}

Outcome Throughput() {
  std::vector<ThroughputSample> samples;
  for (uint32_t n : {100000u, 500000u, 1000000u}) samples.push_back(MeasureInChild(n));
  for (const auto& s : samples) {
    if (s.agents == 0) return {false, "child process failed"};
  }
  // Least-squares line of peak memory against edge entries.
  double mx = 0, my = 0;
  for (const auto& s : samples) {
    mx += s.entries;
    my += s.peak_bytes;
  }
  mx /= samples.size();
  my /= samples.size();
  double sxy = 0, sxx = 0;
  for (const auto& s : samples) {
    sxy += (s.entries - mx) * (s.peak_bytes - my);
    sxx += (s.entries - mx) * (s.entries - mx);
  }
  const double slope = sxy / sxx, intercept = my - slope * mx;
  double worst_dev = 0;
  std::string points;
  bool conserved = true;
  for (const auto& s : samples) {
    const double fit = intercept + slope * s.entries;
    worst_dev = std::max(worst_dev, std::abs(s.peak_bytes - fit) / fit);
    conserved &= s.conserved;
    points += Format("N=%u: %.1f edges/agent, %.2f s, %.0f MiB; ", s.agents,
                     double(s.entries) / s.agents, s.seconds,
                     s.peak_bytes / (1 << 20));
  }
  const auto& big = samples.back();
  return {big.seconds < 120.0 && big.peak_bytes < 16.0 * (1ull << 30) &&
              worst_dev <= 0.25 && conserved,
          points + Format("1M run %.2f s (< 120 s), %.2f GiB (< 16 GiB); "
                          "max deviation from linear fit in edges %.1f%% "
                          "(<= 25%%)",
                          big.seconds, big.peak_bytes / (1ull << 30),
                          100 * worst_dev)};
}

}  // namespace
}  // namespace diffabm

int main(int argc, char** argv) {
  using namespace diffabm;
  // Throughput runs first so forked children start from a small parent.
  const std::vector<std::pair<int, std::pair<const char*, std::function<Outcome()>>>>
      criteria = {
          {9, {"throughput smoke test", Throughput}},
          {1, {"gradient correctness", GradientCorrectness}},
          {2, {"centralized/decentralized equivalence", DecentralizedEquivalence}},
          {3, {"secret-sharing exactness", SecretSharingExactness}},
          {4, {"secure gradient aggregation", SecureGradientAggregation}},
          {5, {"calibration recovery", CalibrationRecovery}},
          {6, {"zero-shot sensitivity", ZeroShotSensitivity}},
          {7, {"archetype efficiency and fidelity", ArchetypeEfficiency}},
          {8, {"conservation and determinism", ConservationAndDeterminism}},
      };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  std::map<int, std::string> lines;
  bool all = true;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.contains(id)) continue;
    const auto& [name, run] = entry;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    all &= outcome.pass;
    lines[id] = Format("%s [%d] %s: ", outcome.pass ? "PASS" : "FAIL", id, name) +
                outcome.detail;
    std::fprintf(stderr, "%s\n", lines[id].c_str());
  }
  std::printf("\n");
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  return all ? 0 : 1;
}
