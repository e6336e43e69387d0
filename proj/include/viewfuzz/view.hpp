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
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "viewfuzz/error.hpp"

namespace viewfuzz {

using json = nlohmann::json;

enum class Action : std::uint8_t {
  kClick = 1,
  kLongClick = 2,
  kEdit = 4,
  kScroll = 8,
};

inline constexpr Action kAllActions[] = {Action::kClick, Action::kLongClick,
                                         Action::kEdit, Action::kScroll};

inline std::string_view action_name(Action a) {
  switch (a) {
    case Action::kClick: return "click";
    case Action::kLongClick: return "long-click";
    case Action::kEdit: return "edit";
    case Action::kScroll: return "scroll";
  }
  return "click";
}

inline std::optional<Action> parse_action(std::string_view s) {
  for (Action a : kAllActions)
    if (action_name(a) == s) return a;
  return std::nullopt;
}

struct ActionSet {
  std::uint8_t bits = 0;

  bool has(Action a) const { return bits & static_cast<std::uint8_t>(a); }
  void add(Action a) { bits |= static_cast<std::uint8_t>(a); }
  bool empty() const { return bits == 0; }
  friend bool operator==(ActionSet, ActionSet) = default;
};

/// One view of a GUI tree. node_id is the preorder index within its layout.
struct ViewNode {
  int node_id = 0;
  std::string view_type;
  std::optional<std::string> resource_id;
  std::optional<std::string> content_desc;
  std::optional<std::string> text;
  ActionSet actionable;
  bool is_group = false;
  std::vector<ViewNode> children;

  friend bool operator==(const ViewNode&, const ViewNode&) = default;
};

/// A runtime GUI layout. A background layout (foreground == false) has no
/// root and stands for the app not being on screen.
struct Layout {
  std::string screen_id;
  bool foreground = true;
  std::optional<ViewNode> root;

  static Layout background() { return Layout{"", false, std::nullopt}; }
  friend bool operator==(const Layout&, const Layout&) = default;
};

inline const std::set<std::string>& default_group_types() {
  static const std::set<std::string> kTypes = {
      "RecyclerView", "ListView",    "GridView",  "ViewGroup",
      "RadioGroup",   "LinearLayout", "GridLayout"};
  return kTypes;
}

namespace detail {
inline void number_preorder(ViewNode& n, int& next) {
  n.node_id = next++;
  for (auto& c : n.children) number_preorder(c, next);
}

inline void assign_groups(ViewNode& n,
                          const std::set<std::string>& group_types) {
  n.is_group = group_types.count(n.view_type) > 0;
  for (auto& c : n.children) assign_groups(c, group_types);
}
}  // namespace detail

/// Assigns preorder node ids and group flags in place.
inline void finalize_tree(ViewNode& root,
                          const std::set<std::string>& group_types =
                              default_group_types()) {
  int next = 0;
  detail::number_preorder(root, next);
  detail::assign_groups(root, group_types);
}

/// Nodes of a tree in preorder.
inline std::vector<const ViewNode*> preorder(const ViewNode& root) {
  std::vector<const ViewNode*> out;
  auto walk = [&](auto&& self, const ViewNode& n) -> void {
    out.push_back(&n);
    for (const auto& c : n.children) self(self, c);
  };
  walk(walk, root);
  return out;
}

/// Flat preorder view of a tree with parent and depth tables.
class TreeIndex {
 public:
  TreeIndex() = default;
  explicit TreeIndex(const ViewNode& root) { visit(root, -1, 0); }
  explicit TreeIndex(const Layout& l) {
    if (l.foreground && l.root) visit(*l.root, -1, 0);
  }

  std::size_t size() const { return nodes_.size(); }
  const ViewNode& node(int id) const { return *nodes_.at(id); }
  int parent(int id) const { return parent_.at(id); }
  int depth(int id) const { return depth_.at(id); }
  const std::vector<const ViewNode*>& nodes() const { return nodes_; }

  /// Nearest strict ancestor that is a group view, or -1.
  int group_of(int id) const {
    for (int p = parent(id); p >= 0; p = parent(p))
      if (nodes_[p]->is_group) return p;
    return -1;
  }

  /// The direct child of `group` on the path to `id` (id itself when it is a
  /// direct child), or -1 when `id` is not below `group`.
  int member_of(int id, int group) const {
    int cur = id;
    while (cur >= 0 && parent(cur) != group) cur = parent(cur);
    return cur;
  }

  bool is_ancestor(int anc, int id) const {
    for (int p = parent(id); p >= 0; p = parent(p))
      if (p == anc) return true;
    return false;
  }

 private:
  void visit(const ViewNode& n, int parent, int depth) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(&n);
    parent_.push_back(parent);
    depth_.push_back(depth);
    for (const auto& c : n.children) visit(c, id, depth + 1);
  }

  std::vector<const ViewNode*> nodes_;
  std::vector<int> parent_;
  std::vector<int> depth_;
};

// ---------------------------------------------------------------------------
// Serialization

inline json action_set_to_json(ActionSet s) {
  json arr = json::array();
  for (Action a : kAllActions)
    if (s.has(a)) arr.push_back(std::string(action_name(a)));
  return arr;
}

inline json node_to_json(const ViewNode& n) {
  json j;
  j["type"] = n.view_type;
  if (n.resource_id) j["resource_id"] = *n.resource_id;
  if (n.content_desc) j["content_desc"] = *n.content_desc;
  if (n.text) j["text"] = *n.text;
  if (n.is_group) j["group"] = true;
  if (!n.actionable.empty()) j["actionable"] = action_set_to_json(n.actionable);
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  return j;
}

inline ViewNode node_from_json(const json& j,
                               const std::set<std::string>& group_types) {
  ViewNode n;
  n.view_type = j.at("type").get<std::string>();
  n.is_group = j.contains("group") ? j["group"].get<bool>()
                                   : group_types.count(n.view_type) > 0;
  if (j.contains("resource_id")) n.resource_id = j["resource_id"].get<std::string>();
  if (j.contains("content_desc")) n.content_desc = j["content_desc"].get<std::string>();
  if (j.contains("text")) n.text = j["text"].get<std::string>();
  if (j.contains("actionable")) {
    for (const auto& a : j["actionable"]) {
      auto act = parse_action(a.get<std::string>());
      if (!act) throw Error("parse", "unknown action " + a.get<std::string>());
      n.actionable.add(*act);
    }
  }
  if (j.contains("children"))
    for (const auto& c : j["children"])
      n.children.push_back(node_from_json(c, group_types));
  return n;
}

inline json layout_to_json(const Layout& l) {
  json j;
  j["screen_id"] = l.screen_id;
  j["foreground"] = l.foreground;
  if (l.foreground && l.root) j["root"] = node_to_json(*l.root);
  return j;
}

/// Parses a layout document. Group flags are recomputed from `group_types`
/// unless the document carries an explicit "group" field.
inline Layout layout_from_json(const json& j, const std::set<std::string>&
                                                  group_types =
                                                      default_group_types()) {
  Layout l;
  l.screen_id = j.value("screen_id", std::string{});
  l.foreground = j.value("foreground", true);
  if (l.foreground) {
    if (!j.contains("root")) throw Error("parse", "foreground layout without root");
    l.root = node_from_json(j["root"], group_types);
    int next = 0;
    detail::number_preorder(*l.root, next);
  }
  return l;
}

// ---------------------------------------------------------------------------
// Encodings and abstraction

inline std::string encode_shallow(const ViewNode& w) {
  std::string s = w.view_type;
  s += '|';
  s += w.resource_id.value_or("");
  s += '|';
  s += w.content_desc.value_or("");
  s += '|';
  s += w.text.value_or("");
  return s;
}

/// Canonical "type|resource_id|content_desc|text" string. With the subtree,
/// every descendant follows in preorder as "#<depth delta>:<encoding>", the
/// delta taken against the previously emitted node.
inline std::string encode_view(const ViewNode& w, bool with_subtree) {
  std::string s = encode_shallow(w);
  if (!with_subtree) return s;
  int prev_depth = 0;
  auto walk = [&](auto&& self, const ViewNode& n, int depth) -> void {
    for (const auto& c : n.children) {
      s += '#';
      s += std::to_string(depth + 1 - prev_depth);
      s += ':';
      s += encode_shallow(c);
      prev_depth = depth + 1;
      self(self, c, depth + 1);
    }
  };
  walk(walk, w, 0);
  return s;
}

struct AbstractSignature {
  std::set<std::tuple<std::string, std::string, std::string>> entries;

  friend bool operator==(const AbstractSignature&,
                         const AbstractSignature&) = default;
  friend auto operator<=>(const AbstractSignature&,
                          const AbstractSignature&) = default;

  std::string to_string() const {
    std::string s;
    for (const auto& [t, r, c] : entries) {
      s += t + "|" + r + "|" + c + "\n";
    }
    return s;
  }
};

inline AbstractSignature abstract_layout(const Layout& l) {
  if (!l.foreground || !l.root)
    throw Error("abstracting-background", "cannot abstract a background layout");
  AbstractSignature sig;
  for (const ViewNode* n : preorder(*l.root))
    sig.entries.emplace(n->view_type, n->resource_id.value_or(""),
                        n->content_desc.value_or(""));
  return sig;
}

inline bool equivalent_with(const Layout& a, const Layout& b) {
  if (!a.foreground || !b.foreground) return !a.foreground && !b.foreground;
  return abstract_layout(a) == abstract_layout(b);
}

inline bool similar_layout_type(const Layout& a, const Layout& b) {
  return a.foreground && b.foreground && a.screen_id == b.screen_id;
}

/// 64-bit FNV-1a; stable across platforms, used for signature hashes.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string signature_hash(const AbstractSignature& sig) {
  static const char* kHex = "0123456789abcdef";
  std::uint64_t h = fnv1a(sig.to_string());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xF];
  return out;
}

// ---------------------------------------------------------------------------
// Similar view location

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Locates the view of `l` matching a query given by its shallow and deep
/// encodings: exact shallow match first, then the smallest edit distance on
/// deep encodings, ties to the smallest preorder index.
inline const ViewNode* locate_similar(std::string_view shallow,
                                      std::string_view deep, const Layout& l) {
  if (!l.foreground || !l.root) return nullptr;
  const ViewNode* best = nullptr;
  std::size_t best_dist = std::numeric_limits<std::size_t>::max();
  for (const ViewNode* n : preorder(*l.root)) {
    if (encode_shallow(*n) != shallow) continue;
    std::size_t d = levenshtein(deep, encode_view(*n, true));
    if (d < best_dist) {
      best_dist = d;
      best = n;
      if (d == 0) break;
    }
  }
  return best;
}

inline const ViewNode* locate_similar_view(const ViewNode& w,
                                           const Layout& l_prime) {
  return locate_similar(encode_view(w, false), encode_view(w, true), l_prime);
}

}  // namespace viewfuzz
