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

#include "diffabm/secure/decentralized.h"

#include <algorithm>
#include <array>
#include <type_traits>

#include "diffabm/autodiff/reparam.h"
#include "diffabm/secure/session.h"

namespace diffabm::secure {
namespace {

// A scalar as the list of reals that have to be summed: the value, plus
// every tangent for dual numbers.
template <ad::Scalar Real>
std::vector<double> Parts(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return {x};
  } else {
    std::vector<double> out = {x.v};
    out.insert(out.end(), x.d.begin(), x.d.end());
    return out;
  }
}

template <ad::Scalar Real>
std::size_t NumParts() {
  return Parts(Real(0.0)).size();
}

template <ad::Scalar Real>
Real FromParts(std::span<const double> parts) {
  if constexpr (std::is_same_v<Real, double>) {
    return parts[0];
  } else {
    Real out(parts[0]);
    for (std::size_t k = 0; k < out.d.size(); ++k) out.d[k] = parts[k + 1];
    return out;
  }
}

struct StageIndex {
  int de, di;
  std::size_t S() const { return 0; }
  std::size_t E(int k) const { return k; }  // k in 1..de
  std::size_t I(int k) const { return de + k; }
  std::size_t R() const { return 1 + de + di; }
  std::size_t M() const { return 2 + de + di; }
  std::size_t size() const { return 3 + de + di; }
};

// Most likely compartment, with the tie-breaking of SyncDiseaseState.
template <ad::Scalar Real>
int32_t DiseaseCode(const AgentNode<Real>& node, const StageIndex& ix) {
  double e = 0.0, i = 0.0;
  for (int k = 1; k <= ix.de; ++k) e += ad::ValueOf(node.mass[ix.E(k)]);
  for (int k = 1; k <= ix.di; ++k) i += ad::ValueOf(node.mass[ix.I(k)]);
  const std::array<double, 5> totals = {ad::ValueOf(node.mass[ix.S()]), e, i,
                                        ad::ValueOf(node.mass[ix.R()]),
                                        ad::ValueOf(node.mass[ix.M()])};
  return static_cast<int32_t>(std::max_element(totals.begin(), totals.end()) -
                              totals.begin());
}

}  // namespace

template <ad::Scalar Real>
DecentralizedSeirm<Real>::DecentralizedSeirm(DecentralizedConfig config,
                                             const BasicStateTable<Real>& initial,
                                             const ContactGraph& graph,
                                             ParameterSet<Real> params)
    : config_(std::move(config)),
      graph_(graph),
      params_(std::move(params)),
      codec_(config_.fractional_bits) {
  config_.disease.Validate();
  for (const auto& name : config_.layers) {
    if (graph_.layer(name).weighted()) {
      Fail(ErrorKind::kConfig,
           "decentralized runs need unweighted layers; '" + name +
               "' is weighted");
    }
  }
  const std::size_t n = initial.num_agents();
  if (graph_.num_agents() != n) {
    Fail(ErrorKind::kValidation, "graph and state sizes differ");
  }
  const epi::DiseaseParams& p = config_.disease;
  const StageIndex ix{p.exposed_steps, p.infectious_steps};
  std::vector<std::span<const Real>> columns(ix.size());
  columns[ix.S()] = initial.Reals(epi::StageColumn(epi::kS));
  for (int k = 1; k <= ix.de; ++k) {
    columns[ix.E(k)] = initial.Reals(epi::StageColumn(epi::kE, k));
  }
  for (int k = 1; k <= ix.di; ++k) {
    columns[ix.I(k)] = initial.Reals(epi::StageColumn(epi::kI, k));
  }
  columns[ix.R()] = initial.Reals(epi::StageColumn(epi::kR));
  columns[ix.M()] = initial.Reals(epi::StageColumn(epi::kM));
  const auto susceptibility = initial.Reals("susceptibility");
  const auto isolating = initial.Codes("isolating");
  const auto vaccinated = initial.Codes("vaccinated");
  nodes_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    AgentNode<Real>& node = nodes_[a];
    node.id = static_cast<uint32_t>(a);
    node.mass.reserve(ix.size());
    for (const auto& col : columns) node.mass.push_back(col[a]);
    node.susceptibility = susceptibility[a];
    node.isolating = isolating[a] != 0;
    node.vaccinated = vaccinated[a] != 0;
  }
}

template <ad::Scalar Real>
std::vector<Real> DecentralizedSeirm<Real>::NeighborSums(
    const GraphLayer& layer, const std::vector<Real>& values,
    SimulatedNetwork& network) {
  const std::size_t n = values.size();
  const std::size_t parts = NumParts<Real>();
  std::vector<std::vector<double>> decoded(parts, std::vector<double>(n));
  for (std::size_t c = 0; c < parts; ++c) {
    std::vector<RingElement> encoded(n);
    for (std::size_t a = 0; a < n; ++a) {
      bool saturated = false;
      encoded[a] = codec_.EncodeClamped(Parts(values[a])[c], &saturated);
      if (saturated) {
        Fail(ErrorKind::kRuntimeState,
             "node " + std::to_string(a) + " value exceeds the codec range");
      }
    }
    const auto sums = SecureNeighborhoodSums(layer, encoded, network,
                                             next_session_,
                                             config_.protocol_seed);
    next_session_ += n;
    for (std::size_t a = 0; a < n; ++a) decoded[c][a] = codec_.Decode(sums[a]);
  }
  std::vector<Real> out(n);
  std::vector<double> scratch(parts);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < parts; ++c) scratch[c] = decoded[c][a];
    out[a] = FromParts<Real>(scratch);
  }
  return out;
}

template <ad::Scalar Real>
double DecentralizedSeirm<Real>::Reveal(std::span<const double> values,
                                        SimulatedNetwork& network) {
  std::vector<RingElement> encoded(values.size());
  for (std::size_t a = 0; a < values.size(); ++a) {
    bool saturated = false;
    encoded[a] = codec_.EncodeClamped(values[a], &saturated);
    if (saturated) {
      Fail(ErrorKind::kRuntimeState, "aggregate exceeds the codec range");
    }
  }
  return codec_.Decode(
      SecureSum(encoded, network, next_session_++, config_.protocol_seed));
}

template <ad::Scalar Real>
RevealedAggregates DecentralizedSeirm<Real>::Step(SimulatedNetwork& network,
                                                  int64_t step_index) {
  const epi::DiseaseParams& p = config_.disease;
  const StageIndex ix{p.exposed_steps, p.infectious_steps};
  const auto step = static_cast<uint32_t>(step_index);
  const std::size_t n = nodes_.size();
  std::vector<AgentNode<Real>> staged = nodes_;
  std::vector<double> vaccinations(n, 0.0);

  const Real mortality = params_.Get("mortality_prob", p.mortality_prob);
  const uint32_t progression_tag = StreamTag("progression");
  for (AgentNode<Real>& node : staged) {
    node.new_infections = Real(0.0);
    node.new_deaths = Real(0.0);
    auto& m = node.mass;
    const Real e1 = m[ix.E(1)];
    for (int k = 1; k < ix.de; ++k) m[ix.E(k)] = m[ix.E(k + 1)];
    m[ix.E(ix.de)] = Real(0.0);
    const Real leaving = m[ix.I(1)];
    for (int k = 1; k < ix.di; ++k) m[ix.I(k)] = m[ix.I(k + 1)];
    m[ix.I(ix.di)] = e1;
    if (ad::ValueOf(leaving) == 0.0) continue;
    CounterRng rng(config_.seed, StreamKey{node.id, step, progression_tag});
    const Real y = ad::ReparamBernoulli(mortality, config_.sampling, rng);
    const Real dead = leaving * y;
    m[ix.M()] = m[ix.M()] + dead;
    m[ix.R()] = m[ix.R()] + (leaving - dead);
    node.new_deaths = dead;
  }

  if (config_.with_vaccination && p.vaccination_coverage > 0.0) {
    const Real efficacy = params_.Get("vaccine_efficacy", p.vaccine_efficacy);
    const uint32_t tag = StreamTag("vaccination");
    for (AgentNode<Real>& node : staged) {
      if (node.vaccinated || DiseaseCode(node, ix) != epi::kS) continue;
      CounterRng rng(config_.seed, StreamKey{node.id, step, tag});
      if (!ad::BernoulliFires(rng.Uniform(), p.vaccination_coverage)) continue;
      node.vaccinated = true;
      node.susceptibility = node.susceptibility * (Real(1.0) - efficacy);
      vaccinations[node.id] = 1.0;
    }
  }

  const Real beta = params_.Get("beta", p.beta);
  for (const std::string& name : config_.layers) {
    const GraphLayer& layer = graph_.layer(name);
    const uint32_t tag = StreamTag("transmission." + name);
    std::vector<uint8_t> include(n, 1);
    std::vector<Real> infectious(n, Real(0.0));
    for (std::size_t a = 0; a < n; ++a) {
      include[a] = !(layer.honors_isolation && staged[a].isolating);
      if (!include[a]) continue;
      for (int k = 1; k <= ix.di; ++k) {
        const Real& v = staged[a].mass[ix.I(k)];
        if (ad::ValueOf(v) != 0.0) infectious[a] = infectious[a] + v;
      }
    }
    const std::vector<Real> sums = NeighborSums(layer, infectious, network);
    std::vector<RingElement> counted(include.begin(), include.end());
    const auto degrees = SecureNeighborhoodSums(
        layer, counted, network, next_session_, config_.protocol_seed);
    next_session_ += n;

    for (std::size_t a = 0; a < n; ++a) {
      AgentNode<Real>& node = staged[a];
      Real& s = node.mass[ix.S()];
      const auto degree = static_cast<uint32_t>(degrees[a]);
      if (!include[a] || ad::ValueOf(s) == 0.0 || degree == 0) continue;
      if (ad::ValueOf(sums[a]) == 0.0) continue;
      const Real prob = epi::InfectionProbability(beta, node.susceptibility,
                                                  config_.dt, degree, sums[a]);
      if (ad::ValueOf(prob) == 0.0) continue;
      CounterRng rng(config_.seed, StreamKey{node.id, step, tag});
      const Real y = ad::ReparamBernoulli(prob, config_.sampling, rng);
      const Real moved = s * y;
      s = s - moved;
      node.mass[ix.E(ix.de)] = node.mass[ix.E(ix.de)] + moved;
      node.new_infections = node.new_infections + moved;
    }
  }

  RevealedAggregates out;
  auto reveal = [&](const std::string& key, auto local) {
    std::vector<double> values(n);
    for (std::size_t a = 0; a < n; ++a) values[a] = local(staged[a]);
    out[key] = Reveal(values, network);
  };
  auto stage_total = [](const AgentNode<Real>& node, std::size_t from,
                        std::size_t to) {
    double total = 0.0;
    for (std::size_t k = from; k <= to; ++k) total += ad::ValueOf(node.mass[k]);
    return total;
  };
  reveal("S", [&](const auto& v) { return stage_total(v, ix.S(), ix.S()); });
  reveal("E", [&](const auto& v) {
    return stage_total(v, ix.E(1), ix.E(ix.de));
  });
  reveal("I", [&](const auto& v) {
    return stage_total(v, ix.I(1), ix.I(ix.di));
  });
  reveal("R", [&](const auto& v) { return stage_total(v, ix.R(), ix.R()); });
  reveal("M", [&](const auto& v) { return stage_total(v, ix.M(), ix.M()); });
  reveal("new_infections",
         [](const auto& v) { return ad::ValueOf(v.new_infections); });
  reveal("new_deaths", [](const auto& v) { return ad::ValueOf(v.new_deaths); });
  reveal("new_vaccinations",
         [&](const auto& v) { return vaccinations[v.id]; });

  nodes_ = std::move(staged);
  return out;
}

AggregatedGradient SecureGradientAggregation(
    std::span<const double> local_gradients, const FixedPointCodec& codec,
    SimulatedNetwork& network, uint64_t first_session, uint64_t seed) {
  std::vector<RingElement> encoded(local_gradients.size());
  std::vector<RingElement> flags(local_gradients.size(), 0);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    bool saturated = false;
    encoded[i] = codec.EncodeClamped(local_gradients[i], &saturated);
    flags[i] = saturated ? 1 : 0;
  }
  AggregatedGradient out;
  out.value =
      codec.Decode(SecureSum(encoded, network, first_session, seed));
  out.saturated_nodes = SecureSum(flags, network, first_session + 1, seed);
  return out;
}

template class DecentralizedSeirm<double>;
template class DecentralizedSeirm<ad::Dual<1>>;

}  // namespace diffabm::secure
