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

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "viewfuzz/effect.hpp"
#include "viewfuzz/seed.hpp"

namespace viewfuzz {

struct Violation {
  int seed_id = -1;
  int mutant_id = -1;
  std::pair<int, int> pair{-1, -1};  // seed layout indices
  std::string screen_i, screen_j;
  EffectDelta witness;  // seed tuples missing from the mutant delta
  std::string canonical_key;
  std::vector<std::pair<int, int>> pairs;  // every violating pair, merged views only
};

inline std::string witness_token(const EffectTuple& t) {
  if (!t.right) return "DEL:" + compact_label(*t.left);
  if (!t.left) return "ADD:" + compact_label(*t.right);
  return "CHG:" + compact_label(*t.left) + "->" + compact_label(*t.right);
}

/// "<screen_i>|<screen_j>|<tokens>" with the witness tokens sorted and
/// joined by ';', e.g. "diary|diary|DEL:pic_Cinema".
inline std::string encode_violation(const Violation& v) {
  std::vector<std::string> tokens;
  for (const auto& t : v.witness.tuples()) tokens.push_back(witness_token(t));
  std::sort(tokens.begin(), tokens.end());
  std::string key = v.screen_i + "|" + v.screen_j + "|";
  for (std::size_t i = 0; i < tokens.size(); ++i) key += (i ? ";" : "") + tokens[i];
  return key;
}

/// Compares a seed with one of its mutants over every pair of seed layouts
/// that the insertion at `k` can affect. `tau_len` is the inserted length.
inline std::vector<Violation> check(const ExecutionTrace& seed, const ExecutionTrace& mutant, int k,
                                    int tau_len, const VolatileSet* vol = nullptr) {
  const int n = static_cast<int>(seed.layouts.size());
  if (static_cast<int>(mutant.layouts.size()) != n + tau_len)
    throw Error("alignment", "mutant has " + std::to_string(mutant.layouts.size()) +
                                 " layouts, expected " + std::to_string(n + tau_len));
  auto shifted = [&](int i) { return i <= k ? i : i + tau_len; };
  std::vector<Violation> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!((i <= k && k + 1 <= j) || k + 1 <= i)) continue;
      const Layout& li = seed.layouts[i];
      const Layout& lj = seed.layouts[j];
      if (!similar_layout_type(li, lj)) continue;
      EffectDelta d = gui_effect(li, lj, vol);
      if (d.empty()) continue;
      const Layout& mi = mutant.layouts[shifted(i)];
      const Layout& mj = mutant.layouts[shifted(j)];
      EffectDelta dm = similar_layout_type(mi, mj) ? gui_effect(mi, mj, vol) : EffectDelta{};
      if (delta_contained(d, dm)) continue;
      Violation v;
      v.seed_id = seed.test.origin.seed_id;
      v.pair = {i, j};
      v.screen_i = li.screen_id;
      v.screen_j = lj.screen_id;
      v.witness = delta_missing(d, dm);
      v.canonical_key = encode_violation(v);
      out.push_back(std::move(v));
    }
  }
  return out;
}

/// Folds every violation of one mutant into a single error: the first pair
/// is the exemplar, witnesses are pooled and the key lists each distinct
/// per-pair key once, joined by " & ".
inline Violation merge_violations(const std::vector<Violation>& vs, int mutant_id) {
  if (vs.empty()) throw Error("empty", "no violations to merge");
  Violation m = vs.front();
  m.mutant_id = mutant_id;
  std::vector<std::string> keys;
  for (const auto& v : vs) {
    m.pairs.push_back(v.pair);
    keys.push_back(v.canonical_key);
  }
  std::vector<EffectTuple> pooled;
  for (const auto& v : vs)
    pooled.insert(pooled.end(), v.witness.tuples().begin(), v.witness.tuples().end());
  m.witness = EffectDelta(std::move(pooled));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  m.canonical_key.clear();
  for (std::size_t i = 0; i < keys.size(); ++i) m.canonical_key += (i ? " & " : "") + keys[i];
  return m;
}

/// Text fields of a layout as a sorted multiset, volatile views left out.
inline std::vector<std::string> layout_texts(const Layout& l, const VolatileSet* vol = nullptr) {
  std::vector<std::string> out;
  if (!l.foreground || !l.root) return out;
  for (const ViewNode* n : preorder(*l.root)) {
    if (!n->text || n->text->empty()) continue;
    if (vol && vol->contains(encode_shallow(*n))) continue;
    out.push_back(*n->text);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Share of texts that differ between the pivot and the layout reached at
/// the end of the inserted trace: the larger one-sided multiset difference
/// over the larger text count.
inline double text_difference(const Layout& pivot, const Layout& trace_end,
                              const VolatileSet* vol = nullptr) {
  auto a = layout_texts(pivot, vol), b = layout_texts(trace_end, vol);
  if (a.empty() && b.empty()) return 0.0;
  std::vector<std::string> a_only, b_only;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(a_only));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(b_only));
  return static_cast<double>(std::max(a_only.size(), b_only.size())) /
         static_cast<double>(std::max(a.size(), b.size()));
}

/// True when the mutant should be dropped because the inserted trace did
/// not come back to the pivot page: a different screen, a layout outside the
/// pivot's abstract state, or more than half of the texts changed.
inline bool filter_pivot_return(const Layout& pivot, const Layout& trace_end,
                                const VolatileSet* vol = nullptr) {
  if (!similar_layout_type(pivot, trace_end)) return true;
  if (!equivalent_with(pivot, trace_end)) return true;
  return text_difference(pivot, trace_end, vol) > 0.5;
}

struct BugReport {
  std::string canonical_key;
  int occurrences = 0;
  bool surfaced = false;
  Violation exemplar;
};

/// Groups errors by key, ranks by ascending occurrence count (ties by key)
/// and surfaces only keys seen exactly once.
inline std::vector<BugReport> dedup_and_rank(const std::vector<Violation>& errors) {
  std::map<std::string, BugReport> groups;
  for (const auto& v : errors) {
    auto [it, fresh] = groups.try_emplace(v.canonical_key);
    BugReport& r = it->second;
    ++r.occurrences;
    if (fresh || std::pair(v.seed_id, v.mutant_id) <
                     std::pair(r.exemplar.seed_id, r.exemplar.mutant_id))
      r.exemplar = v;
    r.canonical_key = v.canonical_key;
  }
  std::vector<BugReport> out;
  for (auto& [k, r] : groups) {
    r.surfaced = r.occurrences == 1;
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const BugReport& a, const BugReport& b) {
    return a.occurrences < b.occurrences;
  });
  return out;
}

inline json report_to_json(const BugReport& r, const std::vector<std::string>& seed_snapshots,
                           const std::vector<std::string>& mutant_snapshots) {
  json witness = json::array();
  for (const auto& t : r.exemplar.witness.tuples()) witness.push_back(tuple_to_json(t));
  json pairs = json::array();
  for (const auto& [i, j] : r.exemplar.pairs) pairs.push_back({i, j});
  return {{"canonical_key", r.canonical_key},
          {"occurrences", r.occurrences},
          {"surfaced", r.surfaced},
          {"seed_id", r.exemplar.seed_id},
          {"mutant_id", r.exemplar.mutant_id},
          {"pair", {r.exemplar.pair.first, r.exemplar.pair.second}},
          {"pairs", pairs},
          {"witness", witness},
          {"snapshots", {{"seed", seed_snapshots}, {"mutant", mutant_snapshots}}}};
}

}  // namespace viewfuzz
