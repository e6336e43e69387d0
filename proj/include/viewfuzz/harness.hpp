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

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "viewfuzz/event.hpp"
#include "viewfuzz/view.hpp"

namespace viewfuzz {

// Scenario documents describe a simulated app declaratively:
//
//   {name, initial_screen, faults:{name:bool}, store:{...},
//    screens:[{id, tree-template, volatile:[paths]}],
//    rules:[{on_screen, event:{type, receiver_match}, when?, mutate:[ops], goto?}]}
//
// Paths are dot-separated ("entries.0.pics"). A leading segment naming a
// loop variable bound during rendering ("entry.pics") resolves relative to
// that element. "{path}" inside strings interpolates the value at path;
// "$data" is the data of the event being fired.
//
// Template nodes: {type, resource_id?, content_desc?, text?, actionable?,
// children?, if?, for_each?, as?, where?}; type "#fragment" splices its
// children into the parent.
//
// Conditions: {nonempty:p} {empty:p} {eq:[a,b]} {ne:[a,b]} {fault:name}
// {not:c} {all:[..]} {any:[..]}.
//
// Ops: set, incr, copy, insert (at front|back), remove, remove_where,
// move_to_front, if, find.

inline constexpr const char* kBackgroundTarget = "@background";

struct ScreenSpec {
  std::string id;
  json tree_template;
  std::vector<std::string> volatile_fields;
};

struct RuleSpec {
  std::string on_screen;
  EventType type = EventType::kClick;
  json receiver_match;  // object or null
  json when;            // condition or null
  json mutate = json::array();
  std::optional<std::string> go_to;
};

/// Loop-variable bindings: name -> JSON pointer of the bound element.
using Bindings = std::map<std::string, std::string>;

class ScenarioApp {
 public:
  static ScenarioApp from_json(const json& doc,
                               std::set<std::string> group_types =
                                   default_group_types()) {
    ScenarioApp app;
    app.group_types_ = std::move(group_types);
    if (!doc.is_object()) throw Error("parse", "scenario must be an object");
    app.name_ = doc.value("name", std::string("scenario"));
    if (doc.contains("faults"))
      for (auto& [k, v] : doc["faults"].items()) app.faults_[k] = v.get<bool>();
    app.initial_store_ = doc.value("store", json::object());
    if (!doc.contains("screens") || !doc["screens"].is_array() ||
        doc["screens"].empty())
      throw Error("validation", "scenario declares no screens");
    for (const auto& s : doc["screens"]) {
      ScreenSpec spec;
      spec.id = s.at("id").get<std::string>();
      if (!s.contains("tree-template"))
        throw Error("validation", "screen '" + spec.id + "' has no tree-template");
      spec.tree_template = s["tree-template"];
      if (spec.tree_template.value("type", std::string()) == "#fragment" ||
          spec.tree_template.contains("for_each"))
        throw Error("validation", "screen '" + spec.id + "' root must be a single view");
      if (s.contains("volatile"))
        spec.volatile_fields = s["volatile"].get<std::vector<std::string>>();
      if (app.screen_index_.count(spec.id))
        throw Error("duplicate-screen", "screen '" + spec.id + "' declared twice");
      app.screen_index_[spec.id] = app.screens_.size();
      app.screens_.push_back(std::move(spec));
    }
    app.initial_screen_ = doc.value("initial_screen", app.screens_.front().id);
    if (!app.screen_index_.count(app.initial_screen_))
      throw Error("dangling-reference", "initial_screen '" + app.initial_screen_ + "'");
    if (doc.contains("rules")) {
      for (const auto& r : doc["rules"]) {
        RuleSpec rule;
        rule.on_screen = r.at("on_screen").get<std::string>();
        if (!app.screen_index_.count(rule.on_screen))
          throw Error("dangling-reference", "rule on unknown screen '" + rule.on_screen + "'");
        const auto& ev = r.at("event");
        rule.type = parse_event_type(ev.at("type").get<std::string>());
        rule.receiver_match = ev.value("receiver_match", json());
        rule.when = r.value("when", json());
        rule.mutate = r.value("mutate", json::array());
        if (r.contains("goto")) {
          rule.go_to = r["goto"].get<std::string>();
          if (*rule.go_to != kBackgroundTarget && !app.screen_index_.count(*rule.go_to))
            throw Error("dangling-reference", "rule target '" + *rule.go_to + "'");
        }
        if (rule.mutate.empty() && (!rule.go_to || *rule.go_to == rule.on_screen))
          throw Error("validation", "rule on '" + rule.on_screen +
                                        "' changes neither store nor screen");
        app.rules_.push_back(std::move(rule));
      }
    }
    app.reset();
    return app;
  }

  const std::string& name() const { return name_; }
  const std::vector<ScreenSpec>& screens() const { return screens_; }
  const std::map<std::string, bool>& faults() const { return faults_; }
  const std::set<std::string>& group_types() const { return group_types_; }

  void set_fault(const std::string& fault, bool on) {
    if (!faults_.count(fault)) throw Error("unknown-fault", fault);
    faults_[fault] = on;
  }

  /// Number of events fired since construction.
  std::uint64_t interactions() const { return interactions_; }

  const Layout& current() const { return layout_; }
  const json& store() const { return store_; }

  Layout reset() {
    store_ = initial_store_;
    screen_ = initial_screen_;
    foreground_ = true;
    render();
    return layout_;
  }

  Layout fire(const EventSpec& e) {
    e.validate();
    if (!foreground_) throw Error("background", "app is not in the foreground");
    ++interactions_;
    Bindings bindings;
    const ViewNode* target = nullptr;
    if (e.receiver) {
      target = locate_similar(e.receiver->shallow, e.receiver->deep, layout_);
      if (!target || !accepts(*target, e.type))
        throw Error("no-receiver", e.key());
      bindings = node_bindings_.at(target->node_id);
    }
    data_ = e.data.value_or("");
    const RuleSpec* rule = nullptr;
    for (const auto& r : rules_) {
      if (r.on_screen != screen_ || r.type != e.type) continue;
      if (target && !receiver_matches(r.receiver_match, *target)) continue;
      if (!eval(r.when, bindings)) continue;
      rule = &r;
      break;
    }
    if (rule) {
      apply_all(rule->mutate, bindings);
      if (rule->go_to) {
        if (*rule->go_to == kBackgroundTarget)
          foreground_ = false;
        else
          screen_ = *rule->go_to;
      }
    } else if (e.type == EventType::kBack) {
      foreground_ = false;
    }
    render();
    return layout_;
  }

 private:
  static bool accepts(const ViewNode& n, EventType t) {
    switch (t) {
      case EventType::kClick: return n.actionable.has(Action::kClick);
      case EventType::kLongClick: return n.actionable.has(Action::kLongClick);
      case EventType::kEdit: return n.actionable.has(Action::kEdit);
      case EventType::kScroll: return n.actionable.has(Action::kScroll);
      default: return true;
    }
  }

  static bool receiver_matches(const json& m, const ViewNode& n) {
    if (m.is_null()) return true;
    auto field = [&](const char* k, const std::optional<std::string>& v) {
      return !m.contains(k) || m[k].get<std::string>() == v.value_or("");
    };
    if (m.contains("type") && m["type"].get<std::string>() != n.view_type) return false;
    return field("resource_id", n.resource_id) &&
           field("content_desc", n.content_desc) && field("text", n.text);
  }

  // ---- paths and values

  json::json_pointer pointer(const std::string& path, const Bindings& b) const {
    std::string ptr;
    std::size_t start = 0;
    bool first = true;
    for (;;) {
      auto dot = path.find('.', start);
      std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos
                                                                    : dot - start);
      auto it = first ? b.find(seg) : b.end();
      if (it != b.end())
        ptr += it->second;
      else
        ptr += "/" + seg;
      first = false;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return json::json_pointer(ptr);
  }

  const json* lookup(const std::string& path, const Bindings& b) const {
    if (path == "$data") {
      data_json_ = data_;
      return &data_json_;
    }
    auto ptr = pointer(path, b);
    return store_.contains(ptr) ? &store_.at(ptr) : nullptr;
  }

  static std::string scalar_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) return std::to_string(v.size());
    if (v.is_null()) return "";
    return v.dump();
  }

  std::string interpolate(const std::string& s, const Bindings& b) const {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '{') {
        auto close = s.find('}', i);
        if (close != std::string::npos) {
          const json* v = lookup(s.substr(i + 1, close - i - 1), b);
          if (v) out += scalar_string(*v);
          i = close;
          continue;
        }
      }
      out += s[i];
    }
    return out;
  }

  json eval_value(const json& v, const Bindings& b) const {
    if (v.is_string()) return interpolate(v.get<std::string>(), b);
    if (v.is_object()) {
      json o = json::object();
      for (auto& [k, x] : v.items()) o[k] = eval_value(x, b);
      return o;
    }
    if (v.is_array()) {
      json a = json::array();
      for (const auto& x : v) a.push_back(eval_value(x, b));
      return a;
    }
    return v;
  }

  bool nonempty(const std::string& path, const Bindings& b) const {
    const json* v = lookup(path, b);
    if (!v || v->is_null()) return false;
    if (v->is_string()) return !v->get<std::string>().empty();
    if (v->is_array() || v->is_object()) return !v->empty();
    if (v->is_boolean()) return v->get<bool>();
    return true;
  }

  bool eval(const json& c, const Bindings& b) const {
    if (c.is_null()) return true;
    if (c.contains("nonempty")) return nonempty(c["nonempty"].get<std::string>(), b);
    if (c.contains("empty")) return !nonempty(c["empty"].get<std::string>(), b);
    if (c.contains("eq"))
      return interpolate(c["eq"][0].get<std::string>(), b) ==
             interpolate(c["eq"][1].get<std::string>(), b);
    if (c.contains("ne"))
      return interpolate(c["ne"][0].get<std::string>(), b) !=
             interpolate(c["ne"][1].get<std::string>(), b);
    if (c.contains("fault")) {
      auto it = faults_.find(c["fault"].get<std::string>());
      return it != faults_.end() && it->second;
    }
    if (c.contains("not")) return !eval(c["not"], b);
    if (c.contains("all")) {
      for (const auto& x : c["all"])
        if (!eval(x, b)) return false;
      return true;
    }
    if (c.contains("any")) {
      for (const auto& x : c["any"])
        if (eval(x, b)) return true;
      return false;
    }
    throw Error("validation", "unknown condition " + c.dump());
  }

  // ---- mutation ops

  json& list_at(const std::string& path, const Bindings& b) {
    auto ptr = pointer(path, b);
    json& v = store_[ptr];
    if (v.is_null()) v = json::array();
    if (!v.is_array()) throw Error("store", path + " is not a list");
    return v;
  }

  void erase_at(const json::json_pointer& ptr) {
    if (!store_.contains(ptr)) return;
    json& parent = store_.at(ptr.parent_pointer());
    const std::string& last = ptr.back();
    if (parent.is_array())
      parent.erase(static_cast<std::size_t>(std::stoul(last)));
    else
      parent.erase(last);
  }

  void apply_all(const json& ops, const Bindings& b) {
    for (const auto& op : ops) apply(op, b);
  }

  void apply(const json& op, const Bindings& b) {
    const std::string kind = op.at("op").get<std::string>();
    if (kind == "set") {
      store_[pointer(op.at("path").get<std::string>(), b)] = eval_value(op.at("value"), b);
    } else if (kind == "incr") {
      json& v = store_[pointer(op.at("path").get<std::string>(), b)];
      v = (v.is_number_integer() ? v.get<long long>() : 0) + 1;
    } else if (kind == "copy") {
      const json* src = lookup(op.at("from").get<std::string>(), b);
      store_[pointer(op.at("path").get<std::string>(), b)] = src ? *src : json();
    } else if (kind == "insert") {
      json& list = list_at(op.at("path").get<std::string>(), b);
      json v = eval_value(op.at("value"), b);
      if (op.value("at", std::string("back")) == "front")
        list.insert(list.begin(), std::move(v));
      else
        list.push_back(std::move(v));
    } else if (kind == "remove") {
      erase_at(pointer(op.at("path").get<std::string>(), b));
    } else if (kind == "remove_where" || kind == "find") {
      const std::string path = op.at("path").get<std::string>();
      const std::string var = op.value("as", std::string("item"));
      auto base = pointer(path, b);
      json& list = list_at(path, b);
      for (std::size_t i = 0; i < list.size(); ++i) {
        Bindings inner = b;
        inner[var] = base.to_string() + "/" + std::to_string(i);
        if (!eval(op.value("where", json()), inner)) continue;
        if (kind == "find") {
          apply_all(op.value("then", json::array()), inner);
          return;
        }
        list.erase(i--);
      }
      if (kind == "find") apply_all(op.value("else", json::array()), b);
    } else if (kind == "move_to_front") {
      auto ptr = pointer(op.at("path").get<std::string>(), b);
      if (!store_.contains(ptr)) return;
      json v = store_.at(ptr);
      erase_at(ptr);
      json& parent = store_.at(ptr.parent_pointer());
      parent.insert(parent.begin(), std::move(v));
    } else if (kind == "if") {
      apply_all(eval(op.at("cond"), b) ? op.value("then", json::array())
                                        : op.value("else", json::array()),
                b);
    } else {
      throw Error("validation", "unknown op '" + kind + "'");
    }
  }

  // ---- rendering

  struct RenderNode {
    ViewNode view;  // children unused
    Bindings bindings;
    std::vector<RenderNode> children;
  };

  void emit(const json& tpl, const Bindings& b, std::vector<RenderNode>& out) const {
    if (tpl.contains("if") && !eval(tpl["if"], b)) return;
    if (tpl.contains("for_each")) {
      const std::string path = tpl["for_each"].get<std::string>();
      const std::string var = tpl.value("as", std::string("item"));
      const json* list = lookup(path, b);
      if (!list || !list->is_array()) return;
      auto base = pointer(path, b).to_string();
      json single = tpl;
      single.erase("for_each");
      single.erase("if");
      json where = single.value("where", json());
      single.erase("where");
      for (std::size_t i = 0; i < list->size(); ++i) {
        Bindings inner = b;
        inner[var] = base + "/" + std::to_string(i);
        if (!eval(where, inner)) continue;
        emit(single, inner, out);
      }
      return;
    }
    const std::string type = tpl.at("type").get<std::string>();
    if (type == "#fragment") {
      for (const auto& c : tpl.value("children", json::array())) emit(c, b, out);
      return;
    }
    RenderNode n;
    n.view.view_type = type;
    auto opt = [&](const char* key) -> std::optional<std::string> {
      if (!tpl.contains(key)) return std::nullopt;
      return interpolate(tpl[key].get<std::string>(), b);
    };
    n.view.resource_id = opt("resource_id");
    n.view.content_desc = opt("content_desc");
    n.view.text = opt("text");
    for (const auto& a : tpl.value("actionable", json::array())) {
      auto act = parse_action(a.get<std::string>());
      if (!act) throw Error("validation", "unknown action " + a.dump());
      n.view.actionable.add(*act);
    }
    n.bindings = b;
    for (const auto& c : tpl.value("children", json::array())) emit(c, b, n.children);
    out.push_back(std::move(n));
  }

  ViewNode flatten(RenderNode& r) {
    ViewNode v = std::move(r.view);
    v.node_id = static_cast<int>(node_bindings_.size());
    node_bindings_.push_back(std::move(r.bindings));
    for (auto& c : r.children) v.children.push_back(flatten(c));
    return v;
  }

  static std::string clock_label(std::uint64_t tick) {
    std::uint64_t secs = 9 * 3600 + tick * 37;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02llu:%02llu:%02llu",
                  static_cast<unsigned long long>((secs / 3600) % 24),
                  static_cast<unsigned long long>((secs / 60) % 60),
                  static_cast<unsigned long long>(secs % 60));
    return buf;
  }

  void render() {
    node_bindings_.clear();
    if (!foreground_) {
      layout_ = Layout::background();
      return;
    }
    const ScreenSpec& screen = screens_.at(screen_index_.at(screen_));
    for (const auto& f : screen.volatile_fields)
      store_[pointer(f, {})] = clock_label(tick_);
    ++tick_;
    std::vector<RenderNode> roots;
    emit(screen.tree_template, {}, roots);
    if (roots.size() != 1)
      throw Error("validation", "screen '" + screen_ + "' rendered no root");
    Layout l;
    l.screen_id = screen_;
    l.foreground = true;
    l.root = flatten(roots.front());
    detail::assign_groups(*l.root, group_types_);
    layout_ = std::move(l);
  }

  std::string name_;
  std::set<std::string> group_types_;
  std::map<std::string, bool> faults_;
  json initial_store_ = json::object();
  json store_ = json::object();
  std::vector<ScreenSpec> screens_;
  std::map<std::string, std::size_t> screen_index_;
  std::vector<RuleSpec> rules_;
  std::string initial_screen_;
  std::string screen_;
  bool foreground_ = true;
  Layout layout_;
  std::vector<Bindings> node_bindings_;
  std::uint64_t tick_ = 0;  // survives reset(): drives volatile fields
  std::uint64_t interactions_ = 0;
  std::string data_;
  mutable json data_json_;
};

inline ScenarioApp load_scenario(const std::string& path,
                                 std::set<std::string> group_types =
                                     default_group_types()) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open scenario " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("parse", path + ": " + e.what());
  }
  return ScenarioApp::from_json(doc, std::move(group_types));
}

/// Every event the layout enables, in receiver preorder; edit events carry a
/// fixed input string.
inline std::vector<EventSpec> enabled_events(const Layout& l) {
  std::vector<EventSpec> out;
  if (!l.foreground || !l.root) return out;
  for (const ViewNode* n : preorder(*l.root))
    for (Action a : kAllActions)
      if (n->actionable.has(a)) out.push_back(EventSpec::on(event_type_for(a), *n));
  return out;
}

}  // namespace viewfuzz
