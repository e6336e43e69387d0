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

// Shared builders and independent oracles for the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "viewfuzz/event.hpp"
#include "viewfuzz/view.hpp"

namespace vftest {

using viewfuzz::Action;
using viewfuzz::Layout;
using viewfuzz::ViewNode;

inline ViewNode view(std::string type, std::string rid = "", std::string text = "",
                     std::vector<ViewNode> children = {}) {
  ViewNode n;
  n.view_type = std::move(type);
  if (!rid.empty()) n.resource_id = std::move(rid);
  if (!text.empty()) n.text = std::move(text);
  n.children = std::move(children);
  return n;
}

inline ViewNode clickable(ViewNode n) {
  n.actionable.add(Action::kClick);
  return n;
}

inline Layout layout(std::string screen, ViewNode root) {
  viewfuzz::finalize_tree(root);
  return Layout{std::move(screen), true, std::move(root)};
}

/// First view in preorder with the given resource id (and text, if given).
inline const ViewNode* find_view(const Layout& l, const std::string& rid,
                                 const std::string& text = "") {
  if (!l.root) return nullptr;
  for (const ViewNode* n : viewfuzz::preorder(*l.root))
    if (n->resource_id.value_or("") == rid && (text.empty() || n->text.value_or("") == text))
      return n;
  return nullptr;
}

inline viewfuzz::EventSpec tap(const Layout& l, const std::string& rid,
                               const std::string& text = "") {
  const ViewNode* n = find_view(l, rid, text);
  if (!n) throw std::runtime_error("no view " + rid + "/" + text);
  return viewfuzz::EventSpec::on(viewfuzz::EventType::kClick, *n);
}

inline std::string scenario_path(const std::string& name) {
  return std::string(VIEWFUZZ_SCENARIOS) + "/" + name + ".json";
}

/// Random tree with exactly `size` nodes; labels drawn from a small alphabet
/// so that equal labels are common.
inline ViewNode random_tree(std::mt19937_64& rng, int size, int alphabet = 3) {
  static const char* kTypes[] = {"A", "B", "C", "D", "E"};
  std::uniform_int_distribution<int> label(0, alphabet - 1);
  ViewNode root = view(kTypes[label(rng)]);
  // Grow by attaching each new node under a uniformly chosen existing node.
  std::vector<std::vector<int>> kids(1);
  std::vector<std::string> types{root.view_type};
  for (int i = 1; i < size; ++i) {
    int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    kids[parent].push_back(i);
    kids.emplace_back();
    types.push_back(kTypes[label(rng)]);
  }
  std::function<ViewNode(int)> build = [&](int id) {
    ViewNode n = view(types[id]);
    for (int c : kids[id]) n.children.push_back(build(c));
    return n;
  };
  ViewNode t = build(0);
  viewfuzz::finalize_tree(t);
  return t;
}

/// Brute-force ordered tree edit distance: minimum over all order- and
/// ancestry-preserving mappings, unit costs.
inline int brute_force_ted(const ViewNode& t1, const ViewNode& t2) {
  viewfuzz::TreeIndex a(t1), b(t2);
  const int n1 = static_cast<int>(a.size()), n2 = static_cast<int>(b.size());
  std::vector<std::pair<int, int>> mapping;
  int best = n1 + n2;
  std::function<void(int, int, int)> rec = [&](int i, int min_j, int relabels) {
    if (i == n1) {
      int m = static_cast<int>(mapping.size());
      best = std::min(best, relabels + (n1 - m) + (n2 - m));
      return;
    }
    rec(i + 1, min_j, relabels);
    for (int j = min_j; j < n2; ++j) {
      bool ok = true;
      for (auto [pi, pj] : mapping)
        if (a.is_ancestor(pi, i) != b.is_ancestor(pj, j)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      int cost = viewfuzz::encode_shallow(a.node(i)) ==
                         viewfuzz::encode_shallow(b.node(j))
                     ? 0
                     : 1;
      mapping.emplace_back(i, j);
      rec(i + 1, j + 1, relabels + cost);
      mapping.pop_back();
    }
  };
  rec(0, 0, 0);
  return best;
}

}  // namespace vftest
