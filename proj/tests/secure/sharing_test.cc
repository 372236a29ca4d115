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

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "diffabm/secure/session.h"
#include "gtest/gtest.h"
#include "support/error_kind.h"
#include "support/seirm_fixture.h"

namespace diffabm::secure {
namespace {

using testing::ThrownKind;

constexpr RingElement kMax = std::numeric_limits<RingElement>::max();

TEST(RingTest, ArithmeticWrapsModuloTwoToThe64) {
  EXPECT_EQ(kMax + RingElement{1}, 0u);
  std::mt19937_64 gen(1);
  for (int k = 0; k < 1000; ++k) {
    const RingElement a = gen(), b = gen(), c = gen();
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + b, b + a);
  }
}

TEST(FixedPointCodecTest, RoundTripWithinHalfUnit) {
  const FixedPointCodec codec(16);
  const double unit = std::ldexp(1.0, -16);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> exponent(-20, 40);
  std::bernoulli_distribution negative(0.5);
  for (int k = 0; k < 20000; ++k) {
    double v = std::pow(2.0, exponent(gen));
    if (negative(gen)) v = -v;
    const auto r = codec.Encode(v);
    ASSERT_TRUE(r.has_value()) << v;
    EXPECT_LE(std::abs(codec.Decode(*r) - v), unit / 2) << v;
  }
  EXPECT_EQ(codec.Decode(*codec.Encode(-1.5)), -1.5);
  EXPECT_EQ(*codec.Encode(-1.0), kMax - 65535);
}

TEST(FixedPointCodecTest, EncodingIsAdditiveUpToRounding) {
  const FixedPointCodec codec(16);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> value(-1e6, 1e6);
  for (int k = 0; k < 10000; ++k) {
    const double a = value(gen), b = value(gen);
    const auto diff = static_cast<int64_t>(*codec.Encode(a) + *codec.Encode(b) -
                                           *codec.Encode(a + b));
    EXPECT_LE(std::abs(diff), 1);
  }
}

TEST(FixedPointCodecTest, OutOfRangeValuesSaturate) {
  const FixedPointCodec codec(16);
  EXPECT_FALSE(codec.Encode(std::ldexp(1.0, 46)).has_value());
  EXPECT_FALSE(codec.Encode(std::nan("")).has_value());
  bool saturated = false;
  const double clamped = codec.Decode(codec.EncodeClamped(1e30, &saturated));
  EXPECT_TRUE(saturated);
  EXPECT_GT(clamped, 0.99 * codec.max_magnitude());
  saturated = false;
  EXPECT_LT(codec.Decode(codec.EncodeClamped(-1e30, &saturated)), 0.0);
  EXPECT_TRUE(saturated);
  saturated = false;
  codec.EncodeClamped(3.0, &saturated);
  EXPECT_FALSE(saturated);
  EXPECT_EQ(ThrownKind([] { FixedPointCodec(53); }), ErrorKind::kConfig);
}

std::vector<uint32_t> Parties(uint32_t n) {
  std::vector<uint32_t> out(n);
  for (uint32_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

TEST(ShareTest, SinglePartyShareIsTheSecret) {
  CounterRng rng(1, {});
  const auto shares = ShareSecret(12345, 0, Parties(1), rng);
  ASSERT_EQ(shares.size(), 1u);
  EXPECT_EQ(shares[0].value, 12345u);
}

TEST(ShareTest, ZeroSecretSharesSumToZero) {
  for (uint32_t n = 1; n <= 16; ++n) {
    CounterRng rng(n, {});
    RingElement sum = 0;
    for (const Share& s : ShareSecret(0, 0, Parties(n), rng)) sum += s.value;
    EXPECT_EQ(sum, 0u);
  }
}

TEST(ShareTest, RandomRoundTripsAreExact) {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<uint32_t> parties(1, 16);
  for (int k = 0; k < 10000; ++k) {
    const RingElement secret = gen();
    const uint32_t n = parties(gen);
    CounterRng rng(7, StreamKey{static_cast<uint32_t>(k), 0, 0});
    const auto holders = Parties(n);
    const auto shares = ShareSecret(secret, 3, holders, rng);
    ASSERT_EQ(Reconstruct(shares, holders), secret);
  }
}

TEST(ShareTest, NoPartiesIsAContractError) {
  CounterRng rng(1, {});
  EXPECT_EQ(ThrownKind([&] { ShareSecret(1, 0, {}, rng); }),
            ErrorKind::kContract);
}

TEST(ReconstructTest, SumsSharesModularly) {
  const uint32_t one[] = {0};
  const Share five[] = {{0, 0, 5}};
  EXPECT_EQ(Reconstruct(five, one), 5u);
  const Share wrap[] = {{0, 0, kMax}, {0, 1, 1}};
  EXPECT_EQ(Reconstruct(wrap, Parties(2)), 0u);
  const RingElement values[] = {kMax, 1};
  EXPECT_EQ(RingSum(values), 0u);
}

TEST(ReconstructTest, MissingShareIsIncomplete) {
  const Share partial[] = {{0, 0, 5}, {0, 2, 1}};
  EXPECT_EQ(ThrownKind([&] { Reconstruct(partial, Parties(3)); }),
            ErrorKind::kIncompleteShares);
  const Share duplicate[] = {{0, 0, 5}, {0, 0, 1}};
  EXPECT_EQ(ThrownKind([&] { Reconstruct(duplicate, Parties(2)); }),
            ErrorKind::kContract);
}

TEST(WireTest, FrameLayoutIsLittleEndian) {
  const WireMessage m{WireType::kPartialSum, 0x0102030405060708ull, 0xAABBCCDD,
                      7, 0x1122334455667788ull};
  const Frame f = EncodeWire(m);
  const Frame expected = {25,   0,    0,    0,    2,    0x08, 0x07, 0x06,
                          0x05, 0x04, 0x03, 0x02, 0x01, 0xDD, 0xCC, 0xBB,
                          0xAA, 7,    0,    0,    0,    0x88, 0x77, 0x66,
                          0x55, 0x44, 0x33, 0x22, 0x11};
  EXPECT_EQ(f, expected);
  EXPECT_EQ(DecodeWire(f), m);
}

TEST(WireTest, MalformedFramesAreRejected) {
  Frame f = EncodeWire({});
  f.pop_back();
  EXPECT_EQ(ThrownKind([&] { DecodeWire(f); }), ErrorKind::kValidation);
  Frame bad_type = EncodeWire({});
  bad_type[4] = 9;
  EXPECT_EQ(ThrownKind([&] { DecodeWire(bad_type); }), ErrorKind::kValidation);
  Frame bad_length = EncodeWire({});
  bad_length[0] = 24;
  EXPECT_EQ(ThrownKind([&] { DecodeWire(bad_length); }),
            ErrorKind::kValidation);
}

TEST(SimulatedNetworkTest, LinksStayFifoWhileInterleaving) {
  auto arrival = [](uint64_t seed) {
    SimulatedNetwork net(seed);
    for (uint32_t k = 0; k < 50; ++k) {
      for (uint32_t from = 0; from < 3; ++from) {
        net.Send(from, 9, EncodeWire({WireType::kShare, k, from, 9, k}));
      }
    }
    return net.DeliverAll()[9];
  };
  const auto a = arrival(1), b = arrival(2);
  ASSERT_EQ(a.size(), 150u);
  std::map<uint32_t, RingElement> next;
  for (const Frame& f : a) {
    const WireMessage m = DecodeWire(f);
    EXPECT_EQ(m.value, next[m.origin]++);
  }
  EXPECT_NE(a, b);
  EXPECT_EQ(a, arrival(1));
}

TEST(SimulatedNetworkTest, OfflineNodesNeitherSendNorReceive) {
  SimulatedNetwork net;
  net.SetOnline(1, false);
  net.Send(0, 1, EncodeWire({}));
  net.Send(1, 0, EncodeWire({}));
  net.Send(0, 2, EncodeWire({}));
  EXPECT_EQ(net.frames_sent(), 1u);
  auto inbox = net.DeliverAll();
  EXPECT_EQ(inbox[2].size(), 1u);
  EXPECT_TRUE(inbox[1].empty());
}

TEST(SecureSumTest, SingleNodeRevealsItsSecret) {
  SimulatedNetwork net;
  const RingElement secrets[] = {42};
  EXPECT_EQ(SecureSum(secrets, net, 0, 1), 42u);
}

TEST(SecureSumTest, SumsRegardlessOfRandomness) {
  const RingElement secrets[] = {3, 5, 7};
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SimulatedNetwork net(seed);
    EXPECT_EQ(SecureSum(secrets, net, seed, seed * 31), 15u);
  }
}

TEST(SecureSumTest, WrapsPastTwoToThe64) {
  SimulatedNetwork net;
  const RingElement secrets[] = {kMax, kMax - 1, 5};
  EXPECT_EQ(SecureSum(secrets, net, 0, 0), RingElement{2});
}

TEST(SecureSumTest, EqualsPlaintextModularSum) {
  std::mt19937_64 gen(5);
  for (int k = 0; k < 300; ++k) {
    std::vector<RingElement> secrets(1 + gen() % 16);
    for (auto& s : secrets) s = gen();
    SimulatedNetwork net(k);
    ASSERT_EQ(SecureSum(secrets, net, k, 9), RingSum(secrets));
  }
}

TEST(SecureSessionTest, PhasesAdvanceInOrder) {
  SimulatedNetwork net;
  SecureSession session(3, Parties(4), net, 1);
  const RingElement secrets[] = {1, 2, 3, 4};
  const uint32_t recipients[] = {2};
  EXPECT_EQ(session.Run(secrets, recipients), 10u);
  EXPECT_EQ(session.history(),
            (std::vector<Phase>{Phase::kSharing, Phase::kPartialSum,
                                Phase::kReconstruction, Phase::kDone}));
  EXPECT_EQ(ThrownKind([&] { session.Run(secrets, recipients); }),
            ErrorKind::kContract);
}

TEST(SecureSessionTest, DropoutAbortsBeforeAnyReveal) {
  SimulatedNetwork net;
  net.set_record_transcript(true);
  net.SetOnline(2, false);
  SecureSession session(0, Parties(4), net, 1);
  const RingElement secrets[] = {1, 2, 3, 4};
  const auto all = Parties(4);
  EXPECT_EQ(ThrownKind([&] { session.Run(secrets, all); }),
            ErrorKind::kProtocolAbort);
  EXPECT_EQ(session.phase(), Phase::kAborted);
  for (const SentFrame& f : net.transcript()) {
    EXPECT_EQ(DecodeWire(f.frame).type, WireType::kShare);
  }
}

TEST(SecureSessionTest, TranscriptNeverCarriesASecret) {
  std::mt19937_64 gen(6);
  for (int k = 0; k < 50; ++k) {
    std::vector<RingElement> secrets(5);
    for (auto& s : secrets) s = gen();
    SimulatedNetwork net(k);
    net.set_record_transcript(true);
    SecureSum(secrets, net, k, 3);
    for (const SentFrame& f : net.transcript()) {
      const RingElement v = DecodeWire(f.frame).value;
      for (RingElement s : secrets) ASSERT_NE(v, s);
    }
  }
}

// Low 16 bits of one transmitted share, over 10^5 independent sessions.
double ChiSquareLowBits(uint32_t from, uint32_t to) {
  const int trials = 100000;
  std::vector<double> counts(1 << 16, 0.0);
  const RingElement secrets[] = {7, 1ull << 40, 12345};
  SimulatedNetwork net;
  net.set_record_transcript(true);
  for (int t = 0; t < trials; ++t) {
    net.ClearTranscript();
    SecureSum(secrets, net, t, 2024);
    for (const SentFrame& f : net.transcript()) {
      const WireMessage m = DecodeWire(f.frame);
      if (m.type == WireType::kShare && f.from == from && f.to == to) {
        counts[m.value & 0xFFFF] += 1;
      }
    }
  }
  const double expected = static_cast<double>(trials) / counts.size();
  double chi = 0;
  for (double c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

TEST(SecureSumTest, TransmittedSharesHaveUniformLowBits) {
  const boost::math::chi_squared dist((1 << 16) - 1);
  const double critical = boost::math::quantile(dist, 0.99);
  // 0 -> 1 carries a random draw, 0 -> 2 carries secret minus the others.
  EXPECT_LT(ChiSquareLowBits(0, 1), critical);
  EXPECT_LT(ChiSquareLowBits(0, 2), critical);
}

TEST(NeighborhoodSumTest, IsolatedNodeGetsZeroWithoutMessages) {
  ContactGraph graph(3);
  const testing::Edge edges[] = {{0, 1}};
  graph.AddLayerFromEdges("l", edges);
  SimulatedNetwork net;
  net.set_record_transcript(true);
  const RingElement values[] = {4, 9, 6};
  const auto sums = SecureNeighborhoodSums(graph.layer("l"), values, net, 0, 1);
  EXPECT_EQ(sums, (std::vector<RingElement>{9, 4, 0}));
  for (const SentFrame& f : net.transcript()) {
    EXPECT_NE(f.from, 2u);
    EXPECT_NE(f.to, 2u);
  }
}

TEST(NeighborhoodSumTest, PathCenterLearnsNeighbourTotal) {
  ContactGraph graph(3);
  const testing::Edge edges[] = {{0, 1}, {1, 2}};
  graph.AddLayerFromEdges("l", edges);
  SimulatedNetwork net;
  const RingElement values[] = {1, 1, 0};
  EXPECT_EQ(SecureNeighborhoodSums(graph.layer("l"), values, net, 0, 1)[1],
            1u);
}

TEST(NeighborhoodSumTest, OnlyTheOwnerReceivesPartialSums) {
  ContactGraph graph(4);
  const testing::Edge edges[] = {{0, 1}, {0, 2}, {0, 3}};
  graph.AddLayerFromEdges("l", edges);
  SimulatedNetwork net;
  net.set_record_transcript(true);
  const RingElement values[] = {0, 1, 0, 1};
  const GraphLayer& layer = graph.layer("l");
  SecureNeighborhoodSums(layer, values, net, 100, 1);
  for (const SentFrame& f : net.transcript()) {
    const WireMessage m = DecodeWire(f.frame);
    if (m.type != WireType::kPartialSum) continue;
    EXPECT_EQ(f.to, static_cast<uint32_t>(m.session - 100));
  }
}

TEST(NeighborhoodSumTest, RandomGraphMatchesPlaintext) {
  const uint32_t n = 30;
  for (uint32_t seed = 0; seed < 5; ++seed) {
    ContactGraph graph(n);
    graph.AddLayerFromEdges("l", testing::RandomEdges(n, 70, seed));
    std::mt19937_64 gen(seed);
    std::vector<RingElement> values(n);
    std::vector<double> plain(n);
    for (uint32_t i = 0; i < n; ++i) {
      values[i] = gen() % 1000;
      plain[i] = static_cast<double>(values[i]);
    }
    SimulatedNetwork net(seed);
    const auto secure =
        SecureNeighborhoodSums(graph.layer("l"), values, net, 0, seed);
    const auto expected = AggregateMessages<double>(graph.layer("l"), plain,
                                                    Reduction::kSum);
    for (uint32_t i = 0; i < n; ++i) {
      EXPECT_EQ(static_cast<double>(secure[i]), expected[i]) << i;
    }
  }
}

}  // namespace
}  // namespace diffabm::secure
