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

#include <algorithm>

namespace diffabm::epi {
namespace {

template <ad::Scalar Real>
struct StageSpans {
  std::span<Real> s;
  std::vector<std::span<Real>> e;  // e[k - 1] is E<k>
  std::vector<std::span<Real>> i;  // i[k - 1] is I<k>
  std::span<Real> r;
  std::span<Real> m;
};

template <ad::Scalar Real>
StageSpans<Real> MutableStages(BasicStateTable<Real>& state,
                               const DiseaseParams& p) {
  StageSpans<Real> out;
  out.s = state.MutableReals(StageColumn(kS));
  for (int k = 1; k <= p.exposed_steps; ++k) {
    out.e.push_back(state.MutableReals(StageColumn(kE, k)));
  }
  for (int k = 1; k <= p.infectious_steps; ++k) {
    out.i.push_back(state.MutableReals(StageColumn(kI, k)));
  }
  out.r = state.MutableReals(StageColumn(kR));
  out.m = state.MutableReals(StageColumn(kM));
  return out;
}

template <ad::Scalar Real>
void Progression(SubstepContext<Real>& ctx, const DiseaseParams& p) {
  auto stages = MutableStages(ctx.state, p);
  const Real mortality = ctx.params.Get("mortality_prob", p.mortality_prob);
  const int de = p.exposed_steps;
  const int di = p.infectious_steps;
  ad::Accumulator<Real> deaths;
  const std::size_t n = ctx.state.num_agents();
  for (std::size_t a = 0; a < n; ++a) {
    if (!ctx.IsActive(a)) continue;
    const Real e1 = stages.e[0][a];
    for (int k = 0; k + 1 < de; ++k) stages.e[k][a] = stages.e[k + 1][a];
    stages.e[de - 1][a] = Real(0.0);
    const Real leaving = stages.i[0][a];
    for (int k = 0; k + 1 < di; ++k) stages.i[k][a] = stages.i[k + 1][a];
    stages.i[di - 1][a] = e1;
    if (ad::ValueOf(leaving) == 0.0) continue;
    CounterRng rng = ctx.AgentStream(static_cast<uint32_t>(a));
    const Real y = ad::ReparamBernoulli(mortality, ctx.sampling, rng);
    const Real dead = leaving * y;
    stages.m[a] = stages.m[a] + dead;
    stages.r[a] = stages.r[a] + (leaving - dead);
    deaths.Add(dead);
  }
  ctx.record.Add("new_deaths", deaths.Result());
  SyncDiseaseState(ctx.state, p, ctx.active);
}

template <ad::Scalar Real>
void Vaccination(SubstepContext<Real>& ctx, const DiseaseParams& p) {
  const double coverage = p.vaccination_coverage;
  if (coverage <= 0.0) {
    ctx.record.Add("new_vaccinations", Real(0.0));
    return;
  }
  const Real efficacy =
      ctx.params.Get("vaccine_efficacy", p.vaccine_efficacy);
  const auto disease = ctx.state.Codes("disease_state");
  auto vaccinated = ctx.state.MutableCodes("vaccinated");
  auto susceptibility = ctx.state.MutableReals("susceptibility");
  double count = 0.0;
  for (std::size_t a = 0; a < ctx.state.num_agents(); ++a) {
    if (!ctx.IsActive(a) || vaccinated[a] == 1 || disease[a] != kS) continue;
    CounterRng rng = ctx.AgentStream(static_cast<uint32_t>(a));
    if (!ad::BernoulliFires(rng.Uniform(), coverage)) continue;
    vaccinated[a] = 1;
    susceptibility[a] = susceptibility[a] * (Real(1.0) - efficacy);
    count += 1.0;
  }
  ctx.record.Add("new_vaccinations", Real(count));
}

template <ad::Scalar Real>
void Transmission(SubstepContext<Real>& ctx, const DiseaseParams& p) {
  if (ctx.layer == nullptr) {
    Fail(ErrorKind::kConfig, "transmission substep needs a layer");
  }
  const GraphLayer& layer = *ctx.layer;
  const Real beta = ctx.params.Get("beta", p.beta);
  const double dt = ctx.env.Scalar("dt");
  const std::vector<uint8_t> include = TransmissionMask(ctx.state, layer);
  const std::vector<Real> infectious = InfectiousMass(ctx.state, p);
  const std::vector<Real> sums = AggregateMessages<Real>(
      layer, infectious, Reduction::kSum, include);
  const std::vector<uint32_t> degrees = EffectiveDegrees(layer, include);
  const auto susceptibility = ctx.state.Reals("susceptibility");
  auto s = ctx.state.MutableReals(StageColumn(kS));
  auto e_last = ctx.state.MutableReals(StageColumn(kE, p.exposed_steps));

  ad::Accumulator<Real> infections;
  for (std::size_t a = 0; a < ctx.state.num_agents(); ++a) {
    if (!ctx.IsActive(a)) continue;
    if (!include.empty() && !include[a]) continue;
    if (ad::ValueOf(s[a]) == 0.0 || degrees[a] == 0) continue;
    if (ad::ValueOf(sums[a]) == 0.0) continue;
    const Real prob = InfectionProbability(beta, susceptibility[a], dt,
                                           degrees[a], sums[a]);
    if (ad::ValueOf(prob) == 0.0) continue;
    CounterRng rng = ctx.AgentStream(static_cast<uint32_t>(a));
    const Real y = ad::ReparamBernoulli(prob, ctx.sampling, rng);
    const Real moved = s[a] * y;
    s[a] = s[a] - moved;
    e_last[a] = e_last[a] + moved;
    infections.Add(moved);
  }
  ctx.record.Add("new_infections", infections.Result());
  SyncDiseaseState(ctx.state, p, ctx.active);
}

}  // namespace

void DiseaseParams::Validate() const {
  if (!(beta >= 0.0)) Fail(ErrorKind::kConfig, "beta must be >= 0");
  if (exposed_steps < 1 || infectious_steps < 1) {
    Fail(ErrorKind::kConfig, "stage durations must be at least one step");
  }
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      Fail(ErrorKind::kConfig, std::string(name) + " must lie in [0, 1]");
    }
  };
  check(mortality_prob, "mortality_prob");
  check(vaccine_efficacy, "vaccine_efficacy");
  check(vaccination_coverage, "vaccination_coverage");
}

std::string StageColumn(DiseaseState state, int steps_left) {
  switch (state) {
    case kS:
      return "mass.S";
    case kE:
      return "mass.E" + std::to_string(steps_left);
    case kI:
      return "mass.I" + std::to_string(steps_left);
    case kR:
      return "mass.R";
    case kM:
      return "mass.M";
  }
  return "";
}

template <ad::Scalar Real>
void InitializeDiseaseColumns(BasicStateTable<Real>& state,
                              const DiseaseParams& params) {
  params.Validate();
  const std::size_t n = state.num_agents();
  const auto disease = state.Codes("disease_state");
  if (!state.HasReal("state_timer")) {
    std::vector<Real> timer(n, Real(0.0));
    state.AddReal("state_timer", ColumnRole::kDynamic, false, timer);
  }
  const auto timer = state.Reals("state_timer");

  auto full = [&](int code) {
    return code == kE ? params.exposed_steps : params.infectious_steps;
  };
  std::vector<Real> s(n, Real(0.0)), r(n, Real(0.0)), m(n, Real(0.0));
  std::vector<std::vector<Real>> e(params.exposed_steps,
                                   std::vector<Real>(n, Real(0.0)));
  std::vector<std::vector<Real>> inf(params.infectious_steps,
                                     std::vector<Real>(n, Real(0.0)));
  std::vector<Real> new_timer(n, Real(0.0));
  for (std::size_t a = 0; a < n; ++a) {
    const int code = disease[a];
    int left = static_cast<int>(ad::ValueOf(timer[a]));
    if (code == kE || code == kI) {
      if (left <= 0) left = full(code);
      if (left > full(code)) {
        Fail(ErrorKind::kValidation,
             "agent " + std::to_string(a) + " timer exceeds stage duration");
      }
      new_timer[a] = Real(double(left));
    }
    switch (code) {
      case kS:
        s[a] = Real(1.0);
        break;
      case kE:
        e[left - 1][a] = Real(1.0);
        break;
      case kI:
        inf[left - 1][a] = Real(1.0);
        break;
      case kR:
        r[a] = Real(1.0);
        break;
      default:
        m[a] = Real(1.0);
        break;
    }
  }
  std::copy(new_timer.begin(), new_timer.end(),
            state.MutableReals("state_timer").begin());
  state.AddReal(StageColumn(kS), ColumnRole::kDynamic, true, std::move(s));
  for (int k = 1; k <= params.exposed_steps; ++k) {
    state.AddReal(StageColumn(kE, k), ColumnRole::kDynamic, true,
                  std::move(e[k - 1]));
  }
  for (int k = 1; k <= params.infectious_steps; ++k) {
    state.AddReal(StageColumn(kI, k), ColumnRole::kDynamic, true,
                  std::move(inf[k - 1]));
  }
  state.AddReal(StageColumn(kR), ColumnRole::kDynamic, true, std::move(r));
  state.AddReal(StageColumn(kM), ColumnRole::kDynamic, true, std::move(m));
  if (!state.HasReal("susceptibility")) {
    state.AddReal("susceptibility", ColumnRole::kDynamic, true,
                  std::vector<Real>(n, Real(1.0)));
  }
  if (!state.HasCategorical("vaccinated")) {
    state.AddCategorical("vaccinated", ColumnRole::kDynamic, FlagDomain(),
                         std::vector<int32_t>(n, 0));
  }
  if (!state.HasCategorical("isolating")) {
    state.AddCategorical("isolating", ColumnRole::kDynamic, FlagDomain(),
                         std::vector<int32_t>(n, 0));
  }
}

template <ad::Scalar Real>
void SyncDiseaseState(BasicStateTable<Real>& state, const DiseaseParams& p,
                      std::span<const uint8_t> active) {
  const std::size_t n = state.num_agents();
  std::vector<std::span<const Real>> e, inf;
  for (int k = 1; k <= p.exposed_steps; ++k) {
    e.push_back(state.Reals(StageColumn(kE, k)));
  }
  for (int k = 1; k <= p.infectious_steps; ++k) {
    inf.push_back(state.Reals(StageColumn(kI, k)));
  }
  const auto s = state.Reals(StageColumn(kS));
  const auto r = state.Reals(StageColumn(kR));
  const auto m = state.Reals(StageColumn(kM));
  auto disease = state.MutableCodes("disease_state");
  auto timer = state.MutableReals("state_timer");

  auto best_stage = [](const std::vector<std::span<const Real>>& stages,
                       std::size_t a, double& total) {
    total = 0.0;
    int best = 0;
    double best_mass = -1.0;
    for (std::size_t k = 0; k < stages.size(); ++k) {
      const double v = ad::ValueOf(stages[k][a]);
      total += v;
      if (v > best_mass) {
        best_mass = v;
        best = static_cast<int>(k) + 1;
      }
    }
    return best;
  };

  for (std::size_t a = 0; a < n; ++a) {
    if (!active.empty() && !active[a]) continue;
    double e_total = 0.0, i_total = 0.0;
    const int e_left = best_stage(e, a, e_total);
    const int i_left = best_stage(inf, a, i_total);
    const std::array<double, 5> totals = {ad::ValueOf(s[a]), e_total, i_total,
                                          ad::ValueOf(r[a]), ad::ValueOf(m[a])};
    const auto code = static_cast<int32_t>(
        std::max_element(totals.begin(), totals.end()) - totals.begin());
    disease[a] = code;
    double left = 0.0;
    if (code == kE) left = e_left;
    if (code == kI) left = i_left;
    timer[a] = Real(left);
  }
}

template <ad::Scalar Real>
std::vector<Real> InfectiousMass(const BasicStateTable<Real>& state,
                                 const DiseaseParams& p) {
  std::vector<Real> out(state.num_agents(), Real(0.0));
  for (int k = 1; k <= p.infectious_steps; ++k) {
    const auto col = state.Reals(StageColumn(kI, k));
    for (std::size_t a = 0; a < out.size(); ++a) {
      if (ad::ValueOf(col[a]) != 0.0) out[a] = out[a] + col[a];
    }
  }
  return out;
}

template <ad::Scalar Real>
std::vector<uint8_t> TransmissionMask(const BasicStateTable<Real>& state,
                                      const GraphLayer& layer) {
  if (!layer.honors_isolation || !state.HasCategorical("isolating")) return {};
  const auto isolating = state.Codes("isolating");
  std::vector<uint8_t> mask(isolating.size());
  for (std::size_t a = 0; a < mask.size(); ++a) mask[a] = isolating[a] == 0;
  return mask;
}

template <ad::Scalar Real>
std::array<Real, 5> ComputeAggregates(const BasicStateTable<Real>& state,
                                      const DiseaseParams& p) {
  std::array<ad::Accumulator<Real>, 5> acc;
  auto add_column = [&](int slot, const std::string& name) {
    for (const Real& v : state.Reals(name)) {
      if (ad::ValueOf(v) != 0.0) acc[slot].Add(v);
    }
  };
  add_column(kS, StageColumn(kS));
  for (int k = 1; k <= p.exposed_steps; ++k) add_column(kE, StageColumn(kE, k));
  for (int k = 1; k <= p.infectious_steps; ++k) {
    add_column(kI, StageColumn(kI, k));
  }
  add_column(kR, StageColumn(kR));
  add_column(kM, StageColumn(kM));
  std::array<Real, 5> out;
  for (int c = 0; c < 5; ++c) out[c] = acc[c].Result();
  return out;
}

template <ad::Scalar Real>
void RegisterSeirm(SubstepRegistry<Real>& registry,
                   const DiseaseParams& params) {
  params.Validate();
  registry.RegisterTransition(
      "seirm.progression",
      [params](SubstepContext<Real>& ctx, const Signals<Real>&) {
        Progression(ctx, params);
      });
  registry.RegisterTransition(
      "seirm.vaccination",
      [params](SubstepContext<Real>& ctx, const Signals<Real>&) {
        Vaccination(ctx, params);
      });
  registry.RegisterTransition(
      "seirm.transmission",
      [params](SubstepContext<Real>& ctx, const Signals<Real>&) {
        Transmission(ctx, params);
      });
  registry.SetAggregator([params](const BasicStateTable<Real>& state,
                                  StepRecord<Real>& record) {
    const auto totals = ComputeAggregates(state, params);
    const auto& names = DiseaseStateDomain();
    for (int c = 0; c < 5; ++c) record.values[names[c]] = totals[c];
    record.EnsureMetric("new_infections");
    record.EnsureMetric("new_deaths");
    record.EnsureMetric("new_vaccinations");
  });
}

std::vector<SubstepSpec> DefaultSeirmPipeline(
    const std::vector<std::string>& layers, bool with_vaccination) {
  std::vector<SubstepSpec> pipeline;
  SubstepSpec progression;
  progression.name = "progression";
  progression.transition_fn = "seirm.progression";
  pipeline.push_back(progression);
  if (with_vaccination) {
    SubstepSpec vaccination;
    vaccination.name = "vaccination";
    vaccination.transition_fn = "seirm.vaccination";
    pipeline.push_back(vaccination);
  }
  for (const auto& layer : layers) {
    SubstepSpec transmission;
    transmission.name = "transmission." + layer;
    transmission.transition_fn = "seirm.transmission";
    transmission.layer = layer;
    pipeline.push_back(transmission);
  }
  return pipeline;
}

const std::vector<std::string>& SeirmMetrics() {
  static const std::vector<std::string> metrics = {
      "S", "E", "I", "R", "M", "new_infections", "new_deaths",
      "new_vaccinations"};
  return metrics;
}

#define DIFFABM_INSTANTIATE_SEIRM(Real)                                     \
  template void InitializeDiseaseColumns<Real>(BasicStateTable<Real>&,      \
                                               const DiseaseParams&);       \
  template void SyncDiseaseState<Real>(BasicStateTable<Real>&,              \
                                       const DiseaseParams&,                \
                                       std::span<const uint8_t>);           \
  template std::vector<Real> InfectiousMass<Real>(                          \
      const BasicStateTable<Real>&, const DiseaseParams&);                  \
  template std::vector<uint8_t> TransmissionMask<Real>(                     \
      const BasicStateTable<Real>&, const GraphLayer&);                     \
  template std::array<Real, 5> ComputeAggregates<Real>(                     \
      const BasicStateTable<Real>&, const DiseaseParams&);                  \
  template void RegisterSeirm<Real>(SubstepRegistry<Real>&,                 \
                                    const DiseaseParams&);

DIFFABM_INSTANTIATE_SEIRM(double)
DIFFABM_INSTANTIATE_SEIRM(ad::Var)
DIFFABM_INSTANTIATE_SEIRM(ad::Dual<1>)
DIFFABM_INSTANTIATE_SEIRM(ad::Dual<4>)
DIFFABM_INSTANTIATE_SEIRM(ad::Dual<32>)

#undef DIFFABM_INSTANTIATE_SEIRM

}  // namespace diffabm::epi
