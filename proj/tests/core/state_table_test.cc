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

#include "diffabm/core/state_table.h"

#include "diffabm/core/predicate.h"
#include "gtest/gtest.h"

namespace diffabm {
namespace {

AgentStateTable MakeTable() {
  AgentStateTable t(4);
  t.AddCategorical("age_group", ColumnRole::kStatic, {"young", "old"},
                   {0, 1, 1, 0});
  t.AddCategorical("disease_state", ColumnRole::kDynamic,
                   {"S", "E", "I", "R", "M"}, {0, 0, 2, 3});
  t.AddReal("susceptibility", ColumnRole::kDynamic, true, {1.0, 0.5, 1.0, 0.2});
  t.AddReal("income", ColumnRole::kStatic, false, {10, 20, 30, 40});
  return t;
}

TEST(StateTableTest, RejectsWrongLengthAndDuplicates) {
  AgentStateTable t = MakeTable();
  try {
    t.AddReal("x", ColumnRole::kStatic, false, {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
  try {
    t.AddReal("income", ColumnRole::kStatic, false, {1, 2, 3, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(StateTableTest, RejectsOutOfDomainValues) {
  AgentStateTable t(2);
  try {
    t.AddCategorical("flag", ColumnRole::kStatic, {"no", "yes"}, {0, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(StateTableTest, StaticColumnsAreReadOnly) {
  AgentStateTable t = MakeTable();
  try {
    t.MutableCodes("age_group");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRuntimeState);
  }
  auto s = t.MutableReals("susceptibility");
  s[0] = 0.25;
  EXPECT_DOUBLE_EQ(t.Reals("susceptibility")[0], 0.25);
}

TEST(StateTableTest, CheckDomainsUsesRequestedKind) {
  AgentStateTable t = MakeTable();
  t.MutableCodes("disease_state")[1] = 9;
  try {
    t.CheckDomains(ErrorKind::kRuntimeState);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRuntimeState);
  }
}

TEST(StateTableTest, CommitDynamicRowsOnlyTouchesMaskedAgents) {
  AgentStateTable t = MakeTable();
  AgentStateTable staged = t;
  auto codes = staged.MutableCodes("disease_state");
  auto s = staged.MutableReals("susceptibility");
  for (int i = 0; i < 4; ++i) {
    codes[i] = 4;
    s[i] = 0.0;
  }
  const std::vector<uint8_t> mask = {0, 1, 0, 1};
  t.CommitDynamicRows(staged, mask);
  EXPECT_EQ(t.Codes("disease_state")[0], 0);
  EXPECT_EQ(t.Codes("disease_state")[1], 4);
  EXPECT_EQ(t.Codes("disease_state")[2], 2);
  EXPECT_EQ(t.Codes("disease_state")[3], 4);
  EXPECT_DOUBLE_EQ(t.Reals("susceptibility")[0], 1.0);
  EXPECT_DOUBLE_EQ(t.Reals("susceptibility")[1], 0.0);
}

TEST(StateTableTest, ConvertKeepsSchema) {
  AgentStateTable t = MakeTable();
  auto v = t.Convert<ad::Var>();
  EXPECT_EQ(v.num_agents(), 4u);
  EXPECT_DOUBLE_EQ(v.Reals("income")[2].value(), 30.0);
  EXPECT_TRUE(v.Reals("income")[2].is_constant());
  EXPECT_EQ(v.Codes("age_group")[1], 1);
  EXPECT_TRUE(v.real("susceptibility").differentiable);
}

TEST(PredicateTest, EmptyMatchesEveryone) {
  AgentStateTable t = MakeTable();
  AgentPredicate p;
  EXPECT_TRUE(p.matches_all());
  EXPECT_EQ(p.Evaluate(t), (std::vector<uint8_t>{1, 1, 1, 1}));
  EXPECT_EQ(p.Describe(), "true");
}

TEST(PredicateTest, ConjunctionOfConditions) {
  AgentStateTable t = MakeTable();
  AgentPredicate p;
  p.WhereIn("age_group", {"old"}).WhereRange("income", 0, 35);
  EXPECT_EQ(p.Evaluate(t), (std::vector<uint8_t>{0, 1, 1, 0}));
  AgentPredicate q;
  q.WhereIn("disease_state", {"S", "R"});
  EXPECT_EQ(q.Evaluate(t), (std::vector<uint8_t>{1, 1, 0, 1}));
}

TEST(PredicateTest, UnknownLabelIsConfigError) {
  AgentStateTable t = MakeTable();
  AgentPredicate p;
  p.WhereIn("age_group", {"middle"});
  try {
    p.Evaluate(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

}  // namespace
}  // namespace diffabm
