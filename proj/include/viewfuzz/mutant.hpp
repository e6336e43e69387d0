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
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "viewfuzz/event.hpp"
#include "viewfuzz/model.hpp"
#include "viewfuzz/seed.hpp"

namespace viewfuzz {

struct IndependentTrace {
  std::vector<EventSpec> events;
  std::vector<int> transitions;  // model transitions after the start event
  int start_state = -1;
};

struct Mutant {
  int mutant_id = -1;
  int seed_id = -1;
  int insert_pos = 0;  // τ goes before the seed's event at this index
  IndependentTrace trace;
  TestCase assembled;
};

struct MutantConfig {
  int max_num = 300;     // accepted traces per pivot
  int max_length = 8;    // |τ| < max_length
  int max_self_loop = 2;
  int max_group_starts = 3;
  std::size_t max_frontier = 20000;  // partial traces kept per BFS level
};

/// t2's first receiver resolves on t1's last layout. Events without a
/// receiver always connect.
inline bool connect_with(const Layout& last, const EventSpec& first) {
  if (!first.receiver) return last.foreground;
  return locate_similar(first.receiver->shallow, first.receiver->deep, last) != nullptr;
}

inline TestCase assemble(const TestCase& seed, int pos, const std::vector<EventSpec>& tau) {
  TestCase t;
  t.origin = {true, seed.origin.seed_id, pos};
  t.events.assign(seed.events.begin(), seed.events.begin() + pos);
  t.events.insert(t.events.end(), tau.begin(), tau.end());
  t.events.insert(t.events.end(), seed.events.begin() + pos, seed.events.end());
  return t;
}

/// Loop traces from the pivot layout at `pos` back to its state, found by a
/// breadth-first search over the model with random order inside each level.
template <class Rng>
std::vector<IndependentTrace> search_traces(std::size_t pos, const ExecutionTrace& seed,
                                            const TransitionalModel& model, Rng& rng,
                                            const MutantConfig& cfg = {}) {
  std::vector<IndependentTrace> out;
  const Layout& pivot = seed.layouts.at(pos);
  if (!pivot.foreground) return out;
  const int start = model.state_of(pivot);
  if (start < 0) return out;
  const EventSpec* next = pos < seed.test.events.size() ? &seed.test.events[pos] : nullptr;
  TreeIndex idx(*pivot.root);

  struct Partial {
    IndependentTrace trace;
    int state;
    std::map<AbstractEvent, int> self_loops;
  };
  std::vector<Partial> level;
  std::map<int, std::set<std::string>> group_starts;
  for (int ti : model.outgoing(start)) {
    const Transition& t = model.transitions()[ti];
    if (!t.concrete.receiver) continue;
    const ViewNode* r = locate_similar(t.concrete.receiver->shallow, t.concrete.receiver->deep, pivot);
    if (!r || !inactive_independent(seed, pos, r->node_id)) continue;
    auto [g, m] = group_membership(idx, r->node_id);
    auto& starts = group_starts[g];
    std::string member = encode_view(idx.node(m), true);
    if (!starts.count(member) && static_cast<int>(starts.size()) >= cfg.max_group_starts) continue;
    starts.insert(member);
    Partial p;
    p.trace.start_state = start;
    p.trace.events.push_back(EventSpec::on(t.concrete.type, *r, t.concrete.data));
    p.trace.transitions.push_back(ti);
    p.state = t.to;
    if (t.to == start) p.self_loops[t.event] = 1;
    level.push_back(std::move(p));
  }

  while (!level.empty()) {
    std::shuffle(level.begin(), level.end(), rng);
    if (level.size() > cfg.max_frontier) level.resize(cfg.max_frontier);
    std::vector<Partial> deeper;
    for (auto& p : level) {
      const int len = static_cast<int>(p.trace.events.size());
      const Layout& rep = model.states()[p.state].representative;
      if (p.state == start && len < cfg.max_length && (!next || connect_with(rep, *next))) {
        out.push_back(std::move(p.trace));
        if (static_cast<int>(out.size()) >= cfg.max_num) return out;
        continue;
      }
      if (len + 1 >= cfg.max_length) continue;
      for (int ti : model.outgoing(p.state)) {
        const Transition& t = model.transitions()[ti];
        Partial q = p;
        if (t.from == t.to && ++q.self_loops[t.event] > cfg.max_self_loop) continue;
        q.trace.events.push_back(t.concrete);
        q.trace.transitions.push_back(ti);
        q.state = t.to;
        deeper.push_back(std::move(q));
      }
    }
    level = std::move(deeper);
  }
  return out;
}

/// Mutants for every pivot position of an executed seed, at most
/// cfg.max_num per position. Mutant ids are left for the caller to assign.
template <class Rng>
std::vector<Mutant> generate_mutants(const ExecutionTrace& seed, const TransitionalModel& model,
                                     Rng& rng, const MutantConfig& cfg = {}) {
  std::vector<Mutant> out;
  for (std::size_t pos = 0; pos < seed.layouts.size(); ++pos) {
    for (auto& tau : search_traces(pos, seed, model, rng, cfg)) {
      Mutant m;
      m.seed_id = seed.test.origin.seed_id;
      m.insert_pos = static_cast<int>(pos);
      m.assembled = assemble(seed.test, m.insert_pos, tau.events);
      m.trace = std::move(tau);
      out.push_back(std::move(m));
    }
  }
  return out;
}

/// Failing event prefixes of unreplayable mutants, per seed and position.
/// Safe to share between worker threads.
class UnreplayableRegistry {
 public:
  void add(int seed_id, int pos, const std::vector<EventSpec>& events, int failed_at) {
    std::vector<std::string> keys;
    for (int i = 0; i <= failed_at; ++i) keys.push_back(events[i].key());
    std::lock_guard<std::mutex> lock(mu_);
    prefixes_[{seed_id, pos}].insert(std::move(keys));
  }

  /// True when a registered prefix for the same seed and position is a
  /// prefix of `events`.
  bool covers(int seed_id, int pos, const std::vector<EventSpec>& events) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = prefixes_.find({seed_id, pos});
    if (it == prefixes_.end()) return false;
    for (const auto& prefix : it->second) {
      if (prefix.size() > events.size()) continue;
      bool match = true;
      for (std::size_t i = 0; i < prefix.size() && match; ++i) match = prefix[i] == events[i].key();
      if (match) return true;
    }
    return false;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t n = 0;
    for (const auto& [k, v] : prefixes_) n += v.size();
    return n;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::pair<int, int>, std::set<std::vector<std::string>>> prefixes_;
};

enum class MutantStatus { kExecuted, kUnreplayable, kSkipped };

inline std::string_view status_name(MutantStatus s) {
  switch (s) {
    case MutantStatus::kExecuted: return "executed";
    case MutantStatus::kUnreplayable: return "unreplayable";
    default: return "skipped";
  }
}

struct MutantRun {
  MutantStatus status = MutantStatus::kSkipped;
  ExecutionTrace trace;  // complete only when executed
  int failed_at = -1;
};

/// Executes a mutant unless a known failing prefix already rules it out.
/// A failure registers the prefix up to and including the failing event.
inline MutantRun execute_mutant(ScenarioApp& app, const Mutant& m, UnreplayableRegistry* registry) {
  MutantRun run;
  if (registry && registry->covers(m.seed_id, m.insert_pos, m.assembled.events)) return run;
  Replay r = replay_test(app, m.assembled);
  run.trace = std::move(r.trace);
  run.failed_at = r.failed_at;
  if (r.failed_at >= 0) {
    run.status = MutantStatus::kUnreplayable;
    if (registry) registry->add(m.seed_id, m.insert_pos, m.assembled.events, r.failed_at);
  } else {
    run.status = MutantStatus::kExecuted;
  }
  return run;
}

inline json mutant_to_json(const Mutant& m, MutantStatus status) {
  json trace = json::array();
  for (const auto& e : m.trace.events) trace.push_back(event_to_json(e));
  return {{"seed_id", m.seed_id},
          {"insert_pos", m.insert_pos},
          {"mutant_id", m.mutant_id},
          {"trace", trace},
          {"status", status_name(status)}};
}

}  // namespace viewfuzz
