// Copyright 2026 The viewfuzz Authors.
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

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "viewfuzz/mutant.hpp"
#include "viewfuzz/oracle.hpp"

namespace viewfuzz {
namespace {

using vftest::scenario_path;
using vftest::tap;

struct WrongDelete {
  TestCase seed;
  Mutant mutant;
};

WrongDelete wrong_delete() {
  ScenarioApp app = load_scenario(scenario_path("diary"));
  WrongDelete f;
  Layout l = app.reset();
  std::vector<Layout> ls{l};
  for (auto [rid, text] : std::vector<std::pair<std::string, std::string>>{
           {"activity", "Cinema"}, {"camera", ""}, {"nav", ""}, {"pic", "Cinema"}, {"yes", ""}}) {
    f.seed.events.push_back(tap(ls.back(), rid, text));
    ls.push_back(app.fire(f.seed.events.back()));
  }
  f.mutant.mutant_id = 7;
  f.mutant.insert_pos = 2;
  f.mutant.trace.events = {tap(ls[2], "activity", "Cleaning"), tap(ls[1], "camera")};
  f.mutant.assembled = assemble(f.seed, 2, f.mutant.trace.events);
  return f;
}

std::vector<Violation> run_wrong_delete(bool fault) {
  ScenarioApp app = load_scenario(scenario_path("diary"));
  app.set_fault("wrong-delete", fault);
  WrongDelete f = wrong_delete();
  ExecutionTrace s = execute_seed(app, f.seed);
  ExecutionTrace m = execute_seed(app, f.mutant.assembled);
  return check(s, m, 2, 2);
}

TEST(Check, WrongDeletionIsCaught) {
  auto vs = run_wrong_delete(true);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].pair, std::make_pair(3, 5));
  EXPECT_EQ(vs[0].canonical_key, "diary|diary|DEL:pic_Cinema");
  EXPECT_EQ(vs[0].witness, EffectDelta({{std::string("ImageView|pic||Cinema"), std::nullopt}}));
}

TEST(Check, ExpectedBehaviourPasses) { EXPECT_TRUE(run_wrong_delete(false).empty()); }

TEST(Check, IdenticalMutantPasses) {
  ScenarioApp app = load_scenario(scenario_path("diary"));
  WrongDelete f = wrong_delete();
  ExecutionTrace s = execute_seed(app, f.seed);
  for (int k = 0; k <= 5; ++k) EXPECT_TRUE(check(s, s, k, 0).empty());
}

TEST(Check, AlignmentMismatch) {
  ScenarioApp app = load_scenario(scenario_path("diary"));
  WrongDelete f = wrong_delete();
  ExecutionTrace s = execute_seed(app, f.seed);
  EXPECT_THROW(check(s, s, 2, 1), Error);
}

TEST(Check, PairFilterSkipsUnaffectedPrefix) {
  // A pivot at the end leaves no pair reaching past the insertion.
  ScenarioApp app = load_scenario(scenario_path("diary"));
  app.set_fault("wrong-delete", true);
  WrongDelete f = wrong_delete();
  ExecutionTrace s = execute_seed(app, f.seed);
  ExecutionTrace m = execute_seed(app, f.mutant.assembled);
  ExecutionTrace m_end = s;
  m_end.layouts.push_back(m.layouts.back());
  EXPECT_TRUE(check(s, m_end, 5, 1).empty());
}

Layout texts(std::vector<std::string> ts) {
  std::vector<ViewNode> kids;
  for (auto& t : ts) kids.push_back(vftest::view("TextView", "", t));
  return vftest::layout("s", vftest::view("FrameLayout", "", "", kids));
}

TEST(PivotFilter, Examples) {
  EXPECT_FALSE(filter_pivot_return(texts({"a", "b"}), texts({"a", "b"})));
  EXPECT_DOUBLE_EQ(text_difference(texts({"a", "b", "c", "d"}), texts({"a", "x", "y", "z"})), 0.75);
  EXPECT_TRUE(filter_pivot_return(texts({"a", "b", "c", "d"}), texts({"a", "x", "y", "z"})));
  EXPECT_FALSE(filter_pivot_return(texts({"New Activity", "a", "b", "c", "d", "e"}),
                                   texts({"Gardening", "a", "b", "c", "d", "e"})));
  EXPECT_TRUE(filter_pivot_return(texts({"a"}), Layout::background()));
}

TEST(PivotFilter, AbstractStateMustMatch) {
  Layout pivot = texts({"a", "b"});
  Layout extra = pivot;
  extra.root->children.push_back(vftest::view("ImageView", "thumb"));
  finalize_tree(*extra.root);
  EXPECT_DOUBLE_EQ(text_difference(pivot, extra), 0.0);
  EXPECT_TRUE(filter_pivot_return(pivot, extra));
}

Violation violation(std::vector<EffectTuple> w, int mutant = 0) {
  Violation v;
  v.screen_i = v.screen_j = "s";
  v.mutant_id = mutant;
  v.witness = EffectDelta(std::move(w));
  v.canonical_key = encode_violation(v);
  return v;
}

TEST(Encode, OrderAndIdentityDoNotMatter) {
  EffectTuple a{std::string("T|x||1"), std::nullopt}, b{std::nullopt, std::string("T|y||2")},
      c{std::string("B|||"), std::string("B||d|")};
  EXPECT_EQ(encode_violation(violation({a, b, c}, 1)), encode_violation(violation({c, a, b}, 2)));
  EXPECT_EQ(encode_violation(violation({a, b, c})), "s|s|ADD:y_2;CHG:B->d;DEL:x_1");
}

TEST(Merge, OneErrorPerMutant) {
  EffectTuple a{std::string("T|x||1"), std::nullopt}, b{std::nullopt, std::string("T|y||2")};
  Violation v1 = violation({a}), v2 = violation({b});
  v1.pair = {0, 2};
  v2.pair = {1, 3};
  Violation m = merge_violations({v1, v2}, 4);
  EXPECT_EQ(m.mutant_id, 4);
  EXPECT_EQ(m.pair, std::make_pair(0, 2));
  EXPECT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.canonical_key, "s|s|ADD:y_2 & s|s|DEL:x_1");
  EXPECT_EQ(merge_violations({v1}, 4).canonical_key, v1.canonical_key);
}

std::vector<Violation> corpus(const std::vector<int>& multiplicities) {
  std::vector<Violation> out;
  int id = 0;
  for (std::size_t k = 0; k < multiplicities.size(); ++k)
    for (int i = 0; i < multiplicities[k]; ++i) {
      Violation v;
      v.mutant_id = id++;
      v.canonical_key = "key" + std::to_string(k);
      out.push_back(v);
    }
  return out;
}

TEST(Dedup, Examples) {
  auto r = dedup_and_rank(corpus({5, 1}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(r[0].surfaced);
  EXPECT_EQ(r[0].canonical_key, "key1");
  EXPECT_FALSE(r[1].surfaced);
  EXPECT_EQ(r[1].occurrences, 5);

  auto same = dedup_and_rank(corpus({5}));
  ASSERT_EQ(same.size(), 1u);
  EXPECT_FALSE(same[0].surfaced);

  auto mixed = dedup_and_rank(corpus({1, 1, 3, 7}));
  EXPECT_EQ(mixed.size(), 4u);
  EXPECT_EQ(std::count_if(mixed.begin(), mixed.end(), [](auto& b) { return b.surfaced; }), 2);
}

TEST(Dedup, RandomCorporaAreLossless) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> mult(1 + rng() % 12);
    for (auto& m : mult) m = 1 + static_cast<int>(rng() % 4);
    auto items = corpus(mult);
    std::shuffle(items.begin(), items.end(), rng);
    auto reports = dedup_and_rank(items);
    EXPECT_EQ(reports.size(), mult.size());
    int ones = static_cast<int>(std::count(mult.begin(), mult.end(), 1));
    EXPECT_EQ(std::count_if(reports.begin(), reports.end(), [](auto& b) { return b.surfaced; }), ones);
    for (std::size_t i = 1; i < reports.size(); ++i) {
      EXPECT_LE(reports[i - 1].occurrences, reports[i].occurrences);
      if (reports[i - 1].occurrences == reports[i].occurrences) {
        EXPECT_LT(reports[i - 1].canonical_key, reports[i].canonical_key);
      }
    }
    // Exemplar is the earliest mutant regardless of input order.
    for (const auto& r : reports) {
      int k = std::stoi(r.canonical_key.substr(3));
      int first = 0;
      for (int i = 0; i < k; ++i) first += mult[i];
      EXPECT_EQ(r.exemplar.mutant_id, first);
    }
  }
}

TEST(ReportJson, Fields) {
  auto vs = run_wrong_delete(true);
  Violation m = merge_violations(vs, 7);
  auto reports = dedup_and_rank({m});
  json j = report_to_json(reports[0], {"a.json"}, {"b.json"});
  for (const char* f : {"canonical_key", "occurrences", "surfaced", "seed_id", "mutant_id", "pair",
                        "witness", "snapshots"})
    EXPECT_TRUE(j.contains(f)) << f;
  EXPECT_EQ(j["witness"][0]["op"], "DEL");
  EXPECT_EQ(j["pair"], json::array({3, 5}));
  EXPECT_EQ(j["snapshots"]["mutant"][0], "b.json");
}

}  // namespace
}  // namespace viewfuzz
