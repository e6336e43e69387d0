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
#include "viewfuzz/tree_edit.hpp"

namespace viewfuzz {
namespace {

using vftest::view;

ViewNode finalized(ViewNode n) {
  finalize_tree(n);
  return n;
}

int count(const EditScript& s, EditOp::Kind k) {
  int c = 0;
  for (const auto& op : s.ops) c += op.kind == k;
  return c;
}

TEST(TreeEdit, IdenticalTreesNeedNothing) {
  ViewNode t = finalized(view("A", "", "", {view("B"), view("C")}));
  EditScript s = tree_edit_script(t, t);
  EXPECT_EQ(s.cost, 0);
  EXPECT_TRUE(s.ops.empty());
}

TEST(TreeEdit, SingleRelabel) {
  EditScript s = tree_edit_script(finalized(view("A")), finalized(view("B")));
  ASSERT_EQ(s.ops.size(), 1u);
  EXPECT_EQ(s.ops[0].kind, EditOp::Kind::kRelabel);
  EXPECT_EQ(s.cost, 1);
}

TEST(TreeEdit, DeletedLeafIsReported) {
  ViewNode a = finalized(view("L", "", "", {view("P", "", "1"), view("P", "", "2")}));
  ViewNode b = finalized(view("L", "", "", {view("P", "", "1")}));
  EditScript s = tree_edit_script(a, b);
  ASSERT_EQ(s.ops.size(), 1u);
  EXPECT_EQ(s.ops[0].kind, EditOp::Kind::kDelete);
  EXPECT_EQ(s.ops[0].from, 2);
  EXPECT_EQ(s.ops[0].to, -1);
}

TEST(TreeEdit, ClassicExample) {
  // f(d(a c(b)) e) vs f(c(d(a b)) e): distance 2.
  ViewNode t1 = finalized(view("f", "", "", {view("d", "", "", {view("a"), view("c", "", "", {view("b")})}),
                                             view("e")}));
  ViewNode t2 = finalized(view("f", "", "", {view("c", "", "", {view("d", "", "", {view("a"), view("b")})}),
                                             view("e")}));
  EXPECT_EQ(tree_edit_distance(t1, t2), 2);
  EXPECT_EQ(vftest::brute_force_ted(t1, t2), 2);
}

TEST(TreeEdit, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(20260);
  for (int trial = 0; trial < 300; ++trial) {
    int n1 = 1 + static_cast<int>(rng() % 8), n2 = 1 + static_cast<int>(rng() % 8);
    ViewNode a = vftest::random_tree(rng, n1), b = vftest::random_tree(rng, n2);
    int expected = vftest::brute_force_ted(a, b);
    EditScript s = tree_edit_script(a, b);
    ASSERT_EQ(s.cost, expected) << encode_view(a, true) << " vs " << encode_view(b, true);
    ASSERT_EQ(static_cast<int>(s.ops.size()), s.cost);
    // Every mapped node pair is accounted for: deletions minus insertions is
    // the size difference.
    EXPECT_EQ(count(s, EditOp::Kind::kDelete) - count(s, EditOp::Kind::kInsert), n1 - n2);
  }
}

TEST(TreeEdit, ScriptIsSymmetricInCost) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    ViewNode a = vftest::random_tree(rng, 1 + static_cast<int>(rng() % 10));
    ViewNode b = vftest::random_tree(rng, 1 + static_cast<int>(rng() % 10));
    EXPECT_EQ(tree_edit_distance(a, b), tree_edit_distance(b, a));
  }
}

}  // namespace
}  // namespace viewfuzz
