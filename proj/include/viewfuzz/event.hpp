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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viewfuzz/view.hpp"

namespace viewfuzz {

enum class EventType { kClick, kLongClick, kEdit, kScroll, kBack, kSystem };

inline std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::kClick: return "click";
    case EventType::kLongClick: return "long-click";
    case EventType::kEdit: return "edit";
    case EventType::kScroll: return "scroll";
    case EventType::kBack: return "back";
    case EventType::kSystem: return "system";
  }
  return "click";
}

inline EventType parse_event_type(std::string_view s) {
  for (EventType t : {EventType::kClick, EventType::kLongClick, EventType::kEdit,
                      EventType::kScroll, EventType::kBack, EventType::kSystem})
    if (event_type_name(t) == s) return t;
  throw Error("parse", "unknown event type '" + std::string(s) + "'");
}

inline EventType event_type_for(Action a) {
  switch (a) {
    case Action::kClick: return EventType::kClick;
    case Action::kLongClick: return EventType::kLongClick;
    case Action::kEdit: return EventType::kEdit;
    case Action::kScroll: return EventType::kScroll;
  }
  return EventType::kClick;
}

inline bool needs_receiver(EventType t) {
  return t != EventType::kBack && t != EventType::kSystem;
}

/// How an event finds its target view: shallow encoding for the exact stage,
/// deep encoding for ranking, preorder index as captured (informational).
struct Receiver {
  std::string shallow;
  std::string deep;
  int hint = -1;

  friend bool operator==(const Receiver&, const Receiver&) = default;
};

struct EventSpec {
  EventType type = EventType::kClick;
  std::optional<Receiver> receiver;
  std::optional<std::string> data;

  friend bool operator==(const EventSpec&, const EventSpec&) = default;

  static EventSpec on(EventType type, const ViewNode& target,
                      std::optional<std::string> data = std::nullopt) {
    EventSpec e;
    e.type = type;
    e.receiver = Receiver{encode_view(target, false), encode_view(target, true),
                          target.node_id};
    if (type == EventType::kEdit && !data) data = std::string("text");
    e.data = std::move(data);
    return e;
  }

  static EventSpec back() { return EventSpec{EventType::kBack, std::nullopt, std::nullopt}; }

  /// Position-independent identity: type, receiver shallow encoding, data.
  std::string key() const {
    std::string s(event_type_name(type));
    s += '@';
    if (receiver) s += receiver->shallow;
    s += '=';
    s += data.value_or("");
    return s;
  }

  void validate() const {
    if (needs_receiver(type) && !receiver)
      throw Error("invalid-event", std::string(event_type_name(type)) + " without receiver");
    if (!needs_receiver(type) && receiver)
      throw Error("invalid-event", std::string(event_type_name(type)) + " with receiver");
    if (type == EventType::kEdit && !data)
      throw Error("invalid-event", "edit without data");
  }
};

inline json event_to_json(const EventSpec& e) {
  json j;
  j["type"] = std::string(event_type_name(e.type));
  if (e.receiver) {
    j["receiver"] = {{"shallow", e.receiver->shallow},
                     {"deep", e.receiver->deep},
                     {"hint", e.receiver->hint}};
  }
  if (e.data) j["data"] = *e.data;
  return j;
}

inline EventSpec event_from_json(const json& j) {
  EventSpec e;
  e.type = parse_event_type(j.at("type").get<std::string>());
  if (j.contains("receiver")) {
    const auto& r = j["receiver"];
    e.receiver = Receiver{r.at("shallow").get<std::string>(),
                          r.value("deep", r.at("shallow").get<std::string>()),
                          r.value("hint", -1)};
  }
  if (j.contains("data")) e.data = j["data"].get<std::string>();
  e.validate();
  return e;
}

struct TestOrigin {
  bool is_mutant = false;
  int seed_id = -1;
  int insert_pos = -1;

  friend bool operator==(const TestOrigin&, const TestOrigin&) = default;
};

struct TestCase {
  std::vector<EventSpec> events;
  TestOrigin origin;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

inline json test_case_to_json(const TestCase& t) {
  json j;
  j["events"] = json::array();
  for (const auto& e : t.events) j["events"].push_back(event_to_json(e));
  j["origin"] = t.origin.is_mutant
                    ? json{{"kind", "mutant"}, {"seed_id", t.origin.seed_id},
                           {"insert_pos", t.origin.insert_pos}}
                    : json{{"kind", "seed"}, {"seed_id", t.origin.seed_id}};
  return j;
}

inline TestCase test_case_from_json(const json& j) {
  TestCase t;
  for (const auto& e : j.at("events")) t.events.push_back(event_from_json(e));
  if (t.events.empty()) throw Error("parse", "empty test case");
  if (j.contains("origin")) {
    const auto& o = j["origin"];
    t.origin.is_mutant = o.value("kind", std::string("seed")) == "mutant";
    t.origin.seed_id = o.value("seed_id", -1);
    t.origin.insert_pos = o.value("insert_pos", -1);
  }
  return t;
}

}  // namespace viewfuzz
