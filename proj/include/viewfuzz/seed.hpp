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

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "viewfuzz/effect.hpp"
#include "viewfuzz/event.hpp"
#include "viewfuzz/harness.hpp"
#include "viewfuzz/model.hpp"
#include "viewfuzz/view.hpp"

namespace viewfuzz {

/// A view that may be mutated around, with the group it belongs to
/// (-1 for views outside every group view).
struct IndependentView {
  int view = -1;
  int group = -1;

  friend bool operator==(const IndependentView&, const IndependentView&) = default;
};

/// Group node id -> active member node id, both on the annotated layout.
using ActiveMap = std::map<int, int>;

struct ExecutionTrace {
  TestCase test;
  std::vector<Layout> layouts;                         // n + 1
  std::vector<std::vector<IndependentView>> independent;  // n + 1
  std::vector<ActiveMap> active;                       // n + 1
};

/// Independent views of a layout. A direct child of a group view qualifies
/// when the layout has another group view, or when it has a sibling of the
/// same type. Views outside every group are listed with group -1.
inline std::vector<IndependentView> independent_views(const Layout& l) {
  std::vector<IndependentView> out;
  if (!l.foreground || !l.root) return out;
  TreeIndex idx(*l.root);
  int groups = 0;
  for (const ViewNode* n : idx.nodes()) groups += n->is_group;
  for (const ViewNode* n : idx.nodes()) {
    int g = idx.group_of(n->node_id);
    if (g < 0) {
      out.push_back({n->node_id, -1});
      continue;
    }
    if (idx.parent(n->node_id) != g) continue;
    bool qualifies = groups >= 2;
    for (const auto& sib : idx.node(g).children)
      if (sib.node_id != n->node_id && sib.view_type == n->view_type) qualifies = true;
    if (qualifies) out.push_back({n->node_id, g});
  }
  return out;
}

/// The member of its nearest group that contains `node`, as {group, member};
/// {-1, -1} outside groups.
inline std::pair<int, int> group_membership(const TreeIndex& idx, int node) {
  int g = idx.group_of(node);
  if (g < 0) return {-1, -1};
  return {g, idx.member_of(node, g)};
}

namespace detail {

inline ActiveMap propagate_active(const Layout& l, const std::vector<Layout>& layouts,
                                  const std::vector<ActiveMap>& active) {
  ActiveMap h;
  if (!l.foreground) return h;
  TreeIndex target(*l.root);
  for (std::size_t k = active.size(); k-- > 0;) {
    if (!similar_layout_type(layouts[k], l)) continue;
    TreeIndex src(*layouts[k].root);
    for (const auto& [g, a] : active[k]) {
      const ViewNode* g2 = locate_similar_view(src.node(g), l);
      const ViewNode* a2 = locate_similar_view(src.node(a), l);
      if (!g2 || !a2 || target.parent(a2->node_id) != g2->node_id) continue;
      h[g2->node_id] = a2->node_id;
    }
    return h;
  }
  return h;
}

}  // namespace detail

/// Result of replaying a test: the trace up to the failure point and the
/// index of the event that could not be delivered (-1 when all ran).
struct Replay {
  ExecutionTrace trace;
  int failed_at = -1;
  std::string failure;
};

/// Runs a test from reset, recording independent views and propagating the
/// active view of each group across layouts of the same screen. Stops at the
/// first event whose receiver is missing or that finds the app closed.
inline Replay replay_test(ScenarioApp& app, const TestCase& t) {
  Replay r;
  ExecutionTrace& tr = r.trace;
  tr.test = t;
  tr.layouts.push_back(app.reset());
  tr.independent.push_back(independent_views(tr.layouts.back()));
  tr.active.emplace_back();
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const EventSpec& e = t.events[i];
    const Layout& cur = tr.layouts.back();
    if (!cur.foreground) {
      r.failed_at = static_cast<int>(i);
      r.failure = "background";
      return r;
    }
    if (e.receiver) {
      const ViewNode* w = locate_similar(e.receiver->shallow, e.receiver->deep, cur);
      if (!w) {
        r.failed_at = static_cast<int>(i);
        r.failure = "no-receiver";
        return r;
      }
      auto [g, m] = group_membership(TreeIndex(*cur.root), w->node_id);
      if (g >= 0) tr.active.back()[g] = m;
    }
    Layout next;
    try {
      next = app.fire(e);
    } catch (const Error& err) {
      r.failed_at = static_cast<int>(i);
      r.failure = err.code();
      return r;
    }
    ActiveMap h = detail::propagate_active(next, tr.layouts, tr.active);
    tr.layouts.push_back(std::move(next));
    tr.independent.push_back(independent_views(tr.layouts.back()));
    tr.active.push_back(std::move(h));
  }
  return r;
}

inline ExecutionTrace execute_seed(ScenarioApp& app, const TestCase& t) {
  Replay r = replay_test(app, t);
  if (r.failed_at >= 0)
    throw Error(r.failure, "event " + std::to_string(r.failed_at) + ": " +
                               t.events[r.failed_at].key());
  return std::move(r.trace);
}

/// True when `node` on layout `pos` belongs to an independent member of a
/// group that is not that group's active view.
inline bool inactive_independent(const ExecutionTrace& tr, std::size_t pos, int node) {
  const Layout& l = tr.layouts.at(pos);
  if (!l.foreground) return false;
  auto [g, m] = group_membership(TreeIndex(*l.root), node);
  if (g < 0) return false;
  bool independent = false;
  for (const auto& iv : tr.independent[pos])
    if (iv.view == m && iv.group == g) independent = true;
  if (!independent) return false;
  auto it = tr.active[pos].find(g);
  return it == tr.active[pos].end() || it->second != m;
}

struct SeedConfig {
  int count = 20;
  int max_len = 15;
  double motif_factor = 3.0;
  std::vector<std::string> motif_keywords{"OK", "Yes", "Save", "Done"};
  std::uint64_t rng_seed = 1;
};

inline bool is_motif_receiver(const ViewNode& n, const SeedConfig& cfg) {
  for (const auto& k : cfg.motif_keywords)
    if (n.text == k || n.content_desc == k) return true;
  return false;
}

/// Random seed tests. Events are drawn with probability proportional to
/// their weight, kept across seeds, times the motif factor for confirm-style
/// receivers right after an edit or a screen change.
inline std::vector<TestCase> generate_seeds(ScenarioApp& app, const SeedConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  WeightTable w;
  std::vector<TestCase> seeds;
  for (int s = 0; s < cfg.count; ++s) {
    TestCase t;
    t.origin.seed_id = s;
    Layout cur = app.reset();
    bool motif_context = false;
    for (int i = 0; i < cfg.max_len && cur.foreground; ++i) {
      auto events = enabled_events(cur);
      EventSpec e = EventSpec::back();
      if (!events.empty()) {
        TreeIndex idx(*cur.root);
        std::vector<double> weights;
        for (const auto& c : events) {
          double x = w.weight(AbstractEvent::of(c));
          if (motif_context && c.receiver &&
              is_motif_receiver(idx.node(c.receiver->hint), cfg))
            x *= cfg.motif_factor;
          weights.push_back(x);
        }
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        e = events[pick(rng)];
      }
      Layout next = app.fire(e);
      std::set<AbstractEvent> fresh;
      for (const auto& n : enabled_events(next))
        if (!w.known(AbstractEvent::of(n))) fresh.insert(AbstractEvent::of(n));
      AbstractEvent a = AbstractEvent::of(e);
      w.observe(a);
      w.update(a, fresh);
      motif_context = e.type == EventType::kEdit ||
                      (next.foreground && next.screen_id != cur.screen_id);
      t.events.push_back(std::move(e));
      cur = std::move(next);
    }
    seeds.push_back(std::move(t));
  }
  return seeds;
}

/// Views whose encoding differs between two replays of the same test.
inline VolatileSet detect_volatile_views(ScenarioApp& app, const TestCase& t) {
  ExecutionTrace a = execute_seed(app, t);
  ExecutionTrace b = execute_seed(app, t);
  VolatileSet vol;
  for (std::size_t i = 0; i < a.layouts.size(); ++i) {
    if (!similar_layout_type(a.layouts[i], b.layouts[i])) continue;
    EffectDelta d = gui_effect(a.layouts[i], b.layouts[i]);
    for (const auto& tup : d.tuples()) {
      if (tup.left) vol.add(*tup.left);
      if (tup.right) vol.add(*tup.right);
    }
  }
  return vol;
}

inline json trace_to_json(const ExecutionTrace& tr, const std::vector<std::string>& layout_refs) {
  json j;
  j["seed_id"] = tr.test.origin.seed_id;
  j["events"] = json::array();
  for (const auto& e : tr.test.events) j["events"].push_back(event_to_json(e));
  j["layouts"] = layout_refs;
  j["independent"] = json::array();
  j["active"] = json::array();
  for (std::size_t i = 0; i < tr.layouts.size(); ++i) {
    json ind = json::array(), act = json::array();
    if (tr.layouts[i].foreground) {
      TreeIndex idx(*tr.layouts[i].root);
      auto enc = [&](int id) { return id < 0 ? json() : json(encode_view(idx.node(id), false)); };
      for (const auto& iv : tr.independent[i])
        ind.push_back({{"view", enc(iv.view)}, {"group", enc(iv.group)}});
      for (const auto& [g, a] : tr.active[i]) act.push_back({{"group", enc(g)}, {"view", enc(a)}});
    }
    j["independent"].push_back(ind);
    j["active"].push_back(act);
  }
  return j;
}

}  // namespace viewfuzz
