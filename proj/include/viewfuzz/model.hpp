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
#include <tuple>
#include <vector>

#include "viewfuzz/event.hpp"
#include "viewfuzz/harness.hpp"
#include "viewfuzz/view.hpp"

namespace viewfuzz {

/// Position-independent event identity used as the model's alphabet.
struct AbstractEvent {
  EventType type = EventType::kClick;
  std::string receiver;  // shallow encoding, empty for back/system
  bool has_data = false;

  friend bool operator==(const AbstractEvent&, const AbstractEvent&) = default;
  friend auto operator<=>(const AbstractEvent&, const AbstractEvent&) = default;

  static AbstractEvent of(const EventSpec& e) {
    return {e.type, e.receiver ? e.receiver->shallow : std::string(),
            e.data && !e.data->empty()};
  }

  std::string key() const {
    return std::string(event_type_name(type)) + "@" + receiver + (has_data ? "=*" : "=");
  }
};

inline json abstract_event_to_json(const AbstractEvent& a) {
  return {{"type", event_type_name(a.type)},
          {"receiver", a.receiver},
          {"data_class", a.has_data ? "nonempty" : "empty"}};
}

inline AbstractEvent abstract_event_from_json(const json& j) {
  return {parse_event_type(j.at("type").get<std::string>()),
          j.value("receiver", std::string()), j.value("data_class", "empty") == "nonempty"};
}

struct EventStats {
  double weight = 100.0;
  int exec_times = 1;
  std::set<AbstractEvent> new_events;
};

/// Per-event weights driving systematic exploration.
class WeightTable {
 public:
  static constexpr double kInitialWeight = 100.0;

  /// Registers an event; returns true when it was not known before.
  bool observe(const AbstractEvent& e) { return stats_.try_emplace(e).second; }

  bool known(const AbstractEvent& e) const { return stats_.count(e) > 0; }

  double weight(const AbstractEvent& e) const {
    auto it = stats_.find(e);
    return it == stats_.end() ? kInitialWeight : it->second.weight;
  }

  void restore(const AbstractEvent& e, double weight, int exec_times) {
    EventStats& s = stats_[e];
    s.weight = weight;
    s.exec_times = exec_times;
  }

  const EventStats& stats(const AbstractEvent& e) const { return stats_.at(e); }
  const std::map<AbstractEvent, EventStats>& all() const { return stats_; }

  /// Records one execution of `executed` which revealed `fresh` and
  /// recomputes every weight from the previous round's values.
  void update(const AbstractEvent& executed, const std::set<AbstractEvent>& fresh) {
    for (const auto& f : fresh) observe(f);
    EventStats& s = stats_[executed];
    ++s.exec_times;
    s.new_events = fresh;
    std::map<AbstractEvent, double> prev;
    for (const auto& [e, st] : stats_) prev[e] = st.weight;
    for (auto& [e, st] : stats_) {
      double sum = prev[e];
      for (const auto& n : st.new_events) sum += prev[n];
      st.weight = sum / (static_cast<double>(st.exec_times) * st.exec_times);
    }
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& [e, st] : stats_) {
      json ne = json::array();
      for (const auto& n : st.new_events) ne.push_back(n.key());
      arr.push_back({{"event", abstract_event_to_json(e)},
                     {"weight", st.weight},
                     {"exec_times", st.exec_times},
                     {"new_events", ne}});
    }
    return arr;
  }

 private:
  std::map<AbstractEvent, EventStats> stats_;
};

/// Highest-weight enabled event; ties go to the earliest receiver in
/// preorder. A layout without actionable views yields back.
inline EventSpec select_event_systematic(const Layout& l, const WeightTable& w) {
  auto events = enabled_events(l);
  if (events.empty()) return EventSpec::back();
  std::size_t best = 0;
  for (std::size_t i = 1; i < events.size(); ++i)
    if (w.weight(AbstractEvent::of(events[i])) > w.weight(AbstractEvent::of(events[best])))
      best = i;
  return events[best];
}

enum class EventClass { kTouch, kLongTouch, kNavigation };

inline EventClass event_class(EventType t) {
  switch (t) {
    case EventType::kClick:
    case EventType::kEdit: return EventClass::kTouch;
    case EventType::kLongClick: return EventClass::kLongTouch;
    default: return EventClass::kNavigation;
  }
}

/// 60% touch, 35% long-touch, 5% navigation, renormalized over the classes
/// the layout offers, then a uniform choice within the class. Back joins
/// the navigation class when the layout has scroll targets and is the only
/// choice when nothing is actionable.
template <class Rng>
EventSpec select_event_random(const Layout& l, Rng& rng) {
  std::vector<EventSpec> by_class[3];
  for (auto& e : enabled_events(l))
    by_class[static_cast<int>(event_class(e.type))].push_back(std::move(e));
  auto& nav = by_class[static_cast<int>(EventClass::kNavigation)];
  if (!nav.empty()) nav.push_back(EventSpec::back());
  static constexpr double kShare[3] = {0.60, 0.35, 0.05};
  double total = 0;
  for (int c = 0; c < 3; ++c)
    if (!by_class[c].empty()) total += kShare[c];
  if (total == 0) return EventSpec::back();
  double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  int chosen = -1;
  for (int c = 0; c < 3; ++c) {
    if (by_class[c].empty()) continue;
    chosen = c;
    if (r < kShare[c]) break;
    r -= kShare[c];
  }
  auto& pool = by_class[chosen];
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

struct ModelState {
  AbstractSignature signature;
  std::string hash;
  Layout representative;
};

struct Transition {
  int from = -1;
  AbstractEvent event;
  EventSpec concrete;  // as first fired from `from`
  int to = -1;
};

/// Transitional model: abstract states, event-labeled transitions, weights.
class TransitionalModel {
 public:
  /// Adds the layout's state if unseen; returns {state id, inserted}.
  std::pair<int, bool> add_state(const Layout& l) {
    AbstractSignature sig = abstract_layout(l);
    auto it = index_.find(sig);
    if (it != index_.end()) return {it->second, false};
    int id = static_cast<int>(states_.size());
    std::string hash = signature_hash(sig);
    index_.emplace(sig, id);
    states_.push_back({std::move(sig), std::move(hash), l});
    return {id, true};
  }

  /// State id of a layout, or -1 if the model has not seen it.
  int state_of(const Layout& l) const {
    if (!l.foreground) return -1;
    auto it = index_.find(abstract_layout(l));
    return it == index_.end() ? -1 : it->second;
  }

  /// Adds (from, e, to) unless a transition with the same abstract event
  /// already connects the pair.
  bool add_transition(int from, const EventSpec& e, int to) {
    AbstractEvent a = AbstractEvent::of(e);
    if (!seen_.emplace(from, a, to).second) return false;
    out_.resize(states_.size());
    out_[from].push_back(static_cast<int>(transitions_.size()));
    transitions_.push_back({from, std::move(a), e, to});
    return true;
  }

  const std::vector<ModelState>& states() const { return states_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Indices into transitions() leaving `state`, in discovery order.
  const std::vector<int>& outgoing(int state) const {
    static const std::vector<int> kNone;
    return state < static_cast<int>(out_.size()) ? out_[state] : kNone;
  }

  WeightTable& weights() { return weights_; }
  const WeightTable& weights() const { return weights_; }

  json to_json() const {
    json j;
    j["states"] = json::array();
    for (const auto& s : states_)
      j["states"].push_back({{"sig_hash", s.hash},
                             {"representative_layout", layout_to_json(s.representative)}});
    j["transitions"] = json::array();
    for (const auto& t : transitions_)
      j["transitions"].push_back({{"from", states_[t.from].hash},
                                  {"event", abstract_event_to_json(t.event)},
                                  {"concrete", event_to_json(t.concrete)},
                                  {"to", states_[t.to].hash}});
    j["stats"] = weights_.to_json();
    return j;
  }

  static TransitionalModel from_json(const json& j, const std::set<std::string>&
                                                        group_types = default_group_types()) {
    TransitionalModel m;
    std::map<std::string, int> by_hash;
    for (const auto& s : j.at("states")) {
      auto [id, fresh] = m.add_state(layout_from_json(s.at("representative_layout"), group_types));
      if (!fresh) throw Error("parse", "duplicate model state");
      by_hash[s.at("sig_hash").get<std::string>()] = id;
    }
    auto state = [&](const json& h) {
      auto it = by_hash.find(h.get<std::string>());
      if (it == by_hash.end()) throw Error("parse", "transition to unknown state " + h.dump());
      return it->second;
    };
    for (const auto& t : j.at("transitions"))
      m.add_transition(state(t.at("from")), event_from_json(t.at("concrete")), state(t.at("to")));
    if (j.contains("stats")) {
      for (const auto& s : j["stats"]) {
        AbstractEvent e = abstract_event_from_json(s.at("event"));
        m.weights_.restore(e, s.at("weight").get<double>(), s.at("exec_times").get<int>());
      }
    }
    return m;
  }

 private:
  std::vector<ModelState> states_;
  std::map<AbstractSignature, int> index_;
  std::vector<Transition> transitions_;
  std::set<std::tuple<int, AbstractEvent, int>> seen_;
  std::vector<std::vector<int>> out_;
  WeightTable weights_;
};

struct MineConfig {
  int budget = 500;        // events fired
  int saturation = 30;     // events without a new state before going random
  int random_burst = 15;   // random events per burst
  std::uint64_t rng_seed = 1;
};

/// Mines a model by interleaving weight-guided and random exploration.
/// The app is reset whenever it leaves the foreground.
inline TransitionalModel mine(ScenarioApp& app, const MineConfig& cfg) {
  if (cfg.budget <= 0) throw Error("invalid-budget", "mining budget must be positive");
  std::mt19937_64 rng(cfg.rng_seed);
  TransitionalModel model;
  WeightTable& w = model.weights();

  auto observe_layout = [&](const Layout& l) {
    std::set<AbstractEvent> fresh;
    for (const auto& e : enabled_events(l)) {
      AbstractEvent a = AbstractEvent::of(e);
      if (!w.known(a)) fresh.insert(a);
    }
    return fresh;
  };

  Layout cur = app.reset();
  for (const auto& a : observe_layout(cur)) w.observe(a);
  int state = model.add_state(cur).first;
  bool random_mode = false;
  int quiet = 0, burst_left = 0;

  for (int step = 0; step < cfg.budget; ++step) {
    EventSpec e = random_mode ? select_event_random(cur, rng) : select_event_systematic(cur, w);
    Layout next = app.fire(e);
    AbstractEvent a = AbstractEvent::of(e);
    w.observe(a);
    if (!next.foreground) {
      w.update(a, {});
      cur = app.reset();
      for (const auto& f : observe_layout(cur)) w.observe(f);
      state = model.add_state(cur).first;
    } else {
      w.update(a, observe_layout(next));
      auto [to, fresh_state] = model.add_state(next);
      model.add_transition(state, e, to);
      quiet = fresh_state ? 0 : quiet + 1;
      state = to;
      cur = std::move(next);
    }
    if (random_mode) {
      if (--burst_left <= 0) {
        random_mode = false;
        quiet = 0;
      }
    } else if (quiet >= cfg.saturation) {
      random_mode = true;
      burst_left = cfg.random_burst;
    }
  }
  return model;
}

}  // namespace viewfuzz
