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

#include "diffabm/epi/seirm.h"

#include <cmath>

#include "gtest/gtest.h"
#include "support/seirm_fixture.h"

namespace diffabm::epi {
namespace {

using testing::CompleteEdges;
using testing::FirstAgents;
using testing::SeirmPopulation;
using testing::UnitEnv;

template <typename T>
std::vector<T> Vec(std::span<const T> s) {
  return {s.begin(), s.end()};
}

SubstepSpec Spec(const std::string& name, const std::string& fn,
                 std::optional<std::string> layer = std::nullopt) {
  SubstepSpec spec;
  spec.name = name;
  spec.transition_fn = fn;
  spec.layer = std::move(layer);
  return spec;
}

template <typename Real = double>
StepRecord<Real> Apply(const SubstepRegistry<Real>& registry,
                       const SubstepSpec& spec, BasicStateTable<Real>& state,
                       const ContactGraph& graph,
                       const ParameterSet<Real>& params = {},
                       ad::SamplingSpec sampling = {}, uint64_t seed = 1) {
  EnvState env = UnitEnv();
  StepRecord<Real> record;
  ApplySubstep(registry, spec, state, env, graph, params, sampling, seed,
               record);
  return record;
}

TEST(InfectionProbabilityTest, ClosedFormExamples) {
  EXPECT_NEAR(InfectionProbability(0.5, 1.0, 1.0, 4, 2.0),
              1.0 - std::exp(-0.25), 1e-15);
  EXPECT_NEAR(InfectionProbability(0.5, 1.0, 1.0, 4, 2.0), 0.221199, 1e-6);
  EXPECT_EQ(InfectionProbability(0.5, 1.0, 1.0, 0, 3.0), 0.0);
  EXPECT_EQ(InfectionProbability(0.5, 1.0, 1.0, 4, 0.0), 0.0);
}

TEST(TransmissionTest, CompleteGraphOfThree) {
  DiseaseParams params;
  params.beta = 1.0;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(3);
  graph.AddLayerFromEdges("all", CompleteEdges(3));
  auto state = SeirmPopulation(3, {0}, params);
  Apply(registry, Spec("transmission.all", "seirm.transmission", "all"),
        state, graph, {}, {ad::SamplingMode::kExpected, 0.5});
  const auto exposed = state.Reals(StageColumn(kE, 3));
  EXPECT_NEAR(exposed[1], 1.0 - std::exp(-0.5), 1e-15);
  EXPECT_NEAR(exposed[2], 1.0 - std::exp(-0.5), 1e-15);
}

TEST(TransmissionTest, NoInfectedNeighboursNoTransition) {
  DiseaseParams params;
  params.beta = 3.0;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(4);
  const std::vector<testing::Edge> edges = {{0, 1}, {2, 3}};
  graph.AddLayerFromEdges("l", edges);
  auto state = SeirmPopulation(4, {0}, params);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto s = state;
    Apply(registry, Spec("t", "seirm.transmission", "l"), s, graph, {}, {},
          seed);
    EXPECT_EQ(s.Codes("disease_state")[2], kS);
    EXPECT_EQ(s.Codes("disease_state")[3], kS);
  }
}

TEST(ProgressionTest, AllSusceptibleUnchanged) {
  DiseaseParams params;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(10);
  auto state = SeirmPopulation(10, {}, params);
  const auto before = state;
  Apply(registry, Spec("progression", "seirm.progression"), state, graph);
  EXPECT_EQ(Vec(state.Codes("disease_state")),
            Vec(before.Codes("disease_state")));
  EXPECT_EQ(Vec(state.Reals("mass.S")), Vec(before.Reals("mass.S")));
}

TEST(ProgressionTest, ExposedTimerOneBecomesInfectious) {
  DiseaseParams params;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(1);
  AgentStateTable state(1);
  state.AddCategorical("disease_state", ColumnRole::kDynamic,
                       DiseaseStateDomain(), {kE});
  state.AddReal("state_timer", ColumnRole::kDynamic, false, {1.0});
  InitializeDiseaseColumns(state, params);
  Apply(registry, Spec("progression", "seirm.progression"), state, graph);
  EXPECT_EQ(state.Codes("disease_state")[0], kI);
  EXPECT_EQ(state.Reals("state_timer")[0], params.infectious_steps);
}

TEST(ProgressionTest, ForcedMortality) {
  DiseaseParams params;
  params.mortality_prob = 1.0;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(1);
  AgentStateTable state(1);
  state.AddCategorical("disease_state", ColumnRole::kDynamic,
                       DiseaseStateDomain(), {kI});
  state.AddReal("state_timer", ColumnRole::kDynamic, false, {1.0});
  InitializeDiseaseColumns(state, params);
  const auto record =
      Apply(registry, Spec("progression", "seirm.progression"), state, graph);
  EXPECT_EQ(state.Codes("disease_state")[0], kM);
  EXPECT_EQ(state.Reals("state_timer")[0], 0.0);
  EXPECT_EQ(record.values.at("new_deaths"), 1.0);
}

TEST(ProgressionTest, TimersOnlyForExposedAndInfectious) {
  DiseaseParams params;
  params.beta = 2.0;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(300);
  graph.AddLayerFromEdges("l", testing::RandomEdges(300, 1500, 2));
  auto state = SeirmPopulation(300, FirstAgents(10), params);
  EnvState env = UnitEnv();
  RunSimulation(registry, DefaultSeirmPipeline({"l"}, false),
                ParameterSet<double>(), state, env, graph,
                RunOptions{12, 3, {}});
  const auto disease = state.Codes("disease_state");
  const auto timer = state.Reals("state_timer");
  for (std::size_t i = 0; i < 300; ++i) {
    if (timer[i] > 0) {
      EXPECT_TRUE(disease[i] == kE || disease[i] == kI);
    }
    if (disease[i] == kE || disease[i] == kI) EXPECT_GT(timer[i], 0);
  }
}

TEST(VaccinationTest, ZeroCoverageNoChange) {
  DiseaseParams params;
  params.vaccine_efficacy = 0.9;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(100);
  auto state = SeirmPopulation(100, {}, params);
  const auto record =
      Apply(registry, Spec("vaccination", "seirm.vaccination"), state, graph);
  for (int32_t v : state.Codes("vaccinated")) EXPECT_EQ(v, 0);
  EXPECT_EQ(record.values.at("new_vaccinations"), 0.0);
}

TEST(VaccinationTest, FullCoverageFullEfficacyBlocksInfection) {
  DiseaseParams params;
  params.vaccination_coverage = 1.0;
  params.vaccine_efficacy = 1.0;
  params.beta = 5.0;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(50);
  graph.AddLayerFromEdges("all", CompleteEdges(50));
  auto state = SeirmPopulation(50, FirstAgents(5), params);
  Apply(registry, Spec("vaccination", "seirm.vaccination"), state, graph);
  const auto vaccinated = state.Codes("vaccinated");
  const auto susceptibility = state.Reals("susceptibility");
  for (uint32_t i = 5; i < 50; ++i) {
    EXPECT_EQ(vaccinated[i], 1);
    EXPECT_EQ(susceptibility[i], 0.0);
  }
  EXPECT_EQ(vaccinated[0], 0);
  const auto record = Apply(
      registry, Spec("transmission.all", "seirm.transmission", "all"), state,
      graph, {}, {ad::SamplingMode::kExpected, 0.5});
  EXPECT_EQ(record.values.at("new_infections"), 0.0);
}

TEST(VaccinationTest, CoverageFractionWithinBinomialInterval) {
  DiseaseParams params;
  params.vaccination_coverage = 0.1;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(10000);
  auto state = SeirmPopulation(10000, {}, params);
  const auto record =
      Apply(registry, Spec("vaccination", "seirm.vaccination"), state, graph);
  const double sigma = std::sqrt(10000 * 0.1 * 0.9);
  EXPECT_NEAR(record.values.at("new_vaccinations"), 1000.0, 3 * sigma);
}

TEST(IsolationTest, IsolatingAgentsNeitherInfectNorGetInfected) {
  DiseaseParams params;
  params.beta = 10.0;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(30);
  graph.AddLayerFromEdges("home", CompleteEdges(30), true);
  graph.AddLayerFromEdges("open", CompleteEdges(30), false);
  auto state = SeirmPopulation(30, FirstAgents(3), params);
  for (int32_t& v : state.MutableCodes("isolating")) v = 1;
  const ad::SamplingSpec expected{ad::SamplingMode::kExpected, 0.5};
  auto s1 = state;
  const auto home = Apply(registry, Spec("t", "seirm.transmission", "home"),
                          s1, graph, {}, expected);
  EXPECT_EQ(home.values.at("new_infections"), 0.0);
  auto s2 = state;
  const auto open = Apply(registry, Spec("t", "seirm.transmission", "open"),
                          s2, graph, {}, expected);
  EXPECT_GT(open.values.at("new_infections"), 0.0);

  // Only agent 0 (infectious) isolates: agents see 2 infected among 28
  // non-isolating neighbours.
  auto s3 = SeirmPopulation(30, FirstAgents(3), params);
  s3.MutableCodes("isolating")[0] = 1;
  Apply(registry, Spec("t", "seirm.transmission", "home"), s3, graph, {},
        expected);
  EXPECT_NEAR(s3.Reals(StageColumn(kE, 3))[10],
              1.0 - std::exp(-(10.0 / 28.0) * 2.0), 1e-14);
  EXPECT_EQ(s3.Reals(StageColumn(kE, 3))[0], 0.0);
}

// Flow S -> E -> I -> {R, M} only; never backwards.
TEST(SeirmInvariantsTest, MonotoneFlow) {
  DiseaseParams params;
  params.beta = 1.5;
  params.mortality_prob = 0.3;
  params.vaccination_coverage = 0.05;
  params.vaccine_efficacy = 0.5;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(500);
  graph.AddLayerFromEdges("l", testing::RandomEdges(500, 3000, 9));
  auto state = SeirmPopulation(500, FirstAgents(10), params);
  EnvState env = UnitEnv();
  const auto pipeline = DefaultSeirmPipeline({"l"}, true);
  const int allowed[5][5] = {
      // to: S E I R M
      {1, 1, 0, 0, 0},  // from S
      {0, 1, 1, 0, 0},  // from E
      {0, 0, 1, 1, 1},  // from I
      {0, 0, 0, 1, 0},  // from R
      {0, 0, 0, 0, 1},  // from M
  };
  for (int t = 0; t < 40; ++t) {
    const std::vector<int32_t> before(state.Codes("disease_state").begin(),
                                      state.Codes("disease_state").end());
    RunSimulation(registry, pipeline, ParameterSet<double>(), state, env,
                  graph, RunOptions{1, 77, {}});
    const auto after = state.Codes("disease_state");
    for (std::size_t i = 0; i < before.size(); ++i) {
      ASSERT_TRUE(allowed[before[i]][after[i]])
          << before[i] << " -> " << after[i];
    }
  }
}

double ExpectedCumulativeInfections(double beta) {
  DiseaseParams params;
  params.beta = beta;
  SubstepRegistry<double> registry;
  RegisterSeirm(registry, params);
  ContactGraph graph(200);
  graph.AddLayerFromEdges("l", testing::RandomEdges(200, 800, 21));
  auto state = SeirmPopulation(200, FirstAgents(5), params);
  EnvState env = UnitEnv();
  const auto traj = RunSimulation(
      registry, DefaultSeirmPipeline({"l"}, false), ParameterSet<double>(),
      state, env, graph,
      RunOptions{15, 5, {ad::SamplingMode::kExpected, 0.5}});
  double total = 0.0;
  for (double v : traj.Values("new_infections")) total += v;
  return total;
}

TEST(SeirmInvariantsTest, ExpectedInfectionsMonotoneInBeta) {
  double previous = -1.0;
  for (double beta = 0.0; beta <= 2.0; beta += 0.1) {
    const double total = ExpectedCumulativeInfections(beta);
    EXPECT_GE(total, previous) << "beta " << beta;
    previous = total;
  }
}

TEST(SeirmInvariantsTest, GradientSignOfFirstStepInfections) {
  for (double beta : {0.05, 0.3, 1.0, 4.0}) {
    ad::Tape tape;
    DiseaseParams params;
    SubstepRegistry<ad::Var> registry;
    RegisterSeirm(registry, params);
    ContactGraph graph(100);
    graph.AddLayerFromEdges("l", testing::RandomEdges(100, 400, 13));
    auto state =
        SeirmPopulation(100, FirstAgents(5), params).Convert<ad::Var>();
    ParameterSet<ad::Var> theta;
    theta.Set("beta", tape.Input("beta", beta));
    EnvState env = UnitEnv();
    const auto traj = RunSimulation(
        registry, DefaultSeirmPipeline({"l"}, false), theta, state, env, graph,
        RunOptions{1, 5, {ad::SamplingMode::kExpected, 0.5}});
    EXPECT_GE(tape.Backward(traj.Series("new_infections")[0])[0], 0.0);
  }
}

}  // namespace
}  // namespace diffabm::epi
