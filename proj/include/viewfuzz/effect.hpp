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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "viewfuzz/tree_edit.hpp"
#include "viewfuzz/view.hpp"

namespace viewfuzz {

/// (left, right) pair of shallow view encodings. Absent left is an addition,
/// absent right a deletion, both present a change.
struct EffectTuple {
  std::optional<std::string> left;
  std::optional<std::string> right;

  friend bool operator==(const EffectTuple&, const EffectTuple&) = default;
  friend auto operator<=>(const EffectTuple&, const EffectTuple&) = default;
};

/// Multiset of effect tuples.
class EffectDelta {
 public:
  EffectDelta() = default;
  explicit EffectDelta(std::vector<EffectTuple> tuples) {
    for (auto& t : tuples) add(std::move(t));
  }

  void add(EffectTuple t) {
    if (!t.left && !t.right)
      throw Error("invalid-tuple", "effect tuple with both sides absent");
    if (t.left && t.right && *t.left == *t.right)
      throw Error("invalid-tuple", "effect tuple with equal sides");
    tuples_.insert(std::upper_bound(tuples_.begin(), tuples_.end(), t), std::move(t));
  }

  const std::vector<EffectTuple>& tuples() const { return tuples_; }
  bool empty() const { return tuples_.empty(); }
  std::size_t size() const { return tuples_.size(); }

  friend bool operator==(const EffectDelta&, const EffectDelta&) = default;

 private:
  std::vector<EffectTuple> tuples_;  // kept sorted
};

/// Views that change across identical replays. Membership ignores the text
/// field so a clock label matches whatever time it shows.
class VolatileSet {
 public:
  static std::string key_of(const std::string& encoding) {
    std::size_t pos = 0;
    for (int i = 0; i < 3 && pos != std::string::npos; ++i)
      pos = encoding.find('|', i == 0 ? 0 : pos + 1);
    return pos == std::string::npos ? encoding : encoding.substr(0, pos);
  }

  void add(const std::string& encoding) { keys_.insert(key_of(encoding)); }
  bool contains(const std::string& encoding) const {
    return keys_.count(key_of(encoding)) > 0;
  }
  bool empty() const { return keys_.empty(); }
  const std::set<std::string>& keys() const { return keys_; }
  void insert_key(std::string key) { keys_.insert(std::move(key)); }

 private:
  std::set<std::string> keys_;
};

inline EffectDelta gui_effect(const Layout& li, const Layout& lj,
                              const VolatileSet* vol = nullptr) {
  if (!similar_layout_type(li, lj))
    throw Error("incomparable-layouts",
                "'" + li.screen_id + "' vs '" + lj.screen_id + "'");
  TreeIndex a(*li.root), b(*lj.root);
  EditScript script = tree_edit_script(*li.root, *lj.root);
  EffectDelta d;
  auto excluded = [&](const std::optional<std::string>& e) {
    return vol && e && vol->contains(*e);
  };
  for (const EditOp& op : script.ops) {
    EffectTuple t;
    if (op.from >= 0) t.left = encode_view(a.node(op.from), false);
    if (op.to >= 0) t.right = encode_view(b.node(op.to), false);
    if (excluded(t.left) || excluded(t.right)) continue;
    d.add(std::move(t));
  }
  return d;
}

/// Sub-multiset test: every tuple of `d1` occurs in `d2` at least as often.
inline bool delta_contained(const EffectDelta& d1, const EffectDelta& d2) {
  return std::includes(d2.tuples().begin(), d2.tuples().end(),
                       d1.tuples().begin(), d1.tuples().end());
}

/// Tuples of `d1` not covered by `d2` (multiset difference).
inline EffectDelta delta_missing(const EffectDelta& d1, const EffectDelta& d2) {
  std::vector<EffectTuple> out;
  std::set_difference(d1.tuples().begin(), d1.tuples().end(),
                      d2.tuples().begin(), d2.tuples().end(),
                      std::back_inserter(out));
  return EffectDelta(std::move(out));
}

/// Short human label of an encoded view: its non-empty id, description and
/// text joined by '_' (falling back to the view type), e.g. "pic_Cinema".
inline std::string compact_label(const std::string& encoding) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = encoding.find('|', start);
    parts.push_back(encoding.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::string out;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].empty()) continue;
    if (!out.empty()) out += '_';
    out += parts[i];
  }
  return out.empty() ? parts[0] : out;
}

inline std::string tuple_op(const EffectTuple& t) {
  if (!t.right) return "DEL";
  if (!t.left) return "ADD";
  return "CHG";
}

inline json tuple_to_json(const EffectTuple& t) {
  json j;
  j["op"] = tuple_op(t);
  if (t.left) j["left"] = *t.left;
  if (t.right) j["right"] = *t.right;
  return j;
}

inline EffectTuple tuple_from_json(const json& j) {
  EffectTuple t;
  if (j.contains("left")) t.left = j["left"].get<std::string>();
  if (j.contains("right")) t.right = j["right"].get<std::string>();
  return t;
}

}  // namespace viewfuzz
