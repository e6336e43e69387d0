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

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "viewfuzz/effect.hpp"
#include "viewfuzz/error.hpp"
#include "viewfuzz/view.hpp"

namespace viewfuzz {

inline std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

constexpr const char* kReportStyle =
    "body{font-family:sans-serif;margin:1em}"
    "table{border-collapse:collapse}td,th{vertical-align:top;padding:4px 8px;border-bottom:1px solid #ddd}"
    "tbody.inserted{outline:3px solid #c33}"
    "ul{margin:0;padding-left:1.2em}li{list-style:none;font-family:monospace;font-size:12px}"
    "li.witness{background:#fd7;font-weight:bold}li.changed{background:#f9b;font-weight:bold}"
    ".event{color:#555;font-size:12px}.bg{color:#999}";

inline std::string node_label(const ViewNode& n) {
  std::string s = n.view_type;
  if (n.resource_id && !n.resource_id->empty()) s += " #" + *n.resource_id;
  if (n.content_desc && !n.content_desc->empty()) s += " [" + *n.content_desc + "]";
  if (n.text && !n.text->empty()) s += " \"" + *n.text + "\"";
  return s;
}

inline void render_node(std::string& out, const ViewNode& n, const std::set<std::string>& marked,
                        const char* css) {
  out += marked.count(encode_shallow(n)) ? std::string("<li class=\"") + css + "\">" : std::string("<li>");
  out += html_escape(node_label(n));
  if (!n.children.empty()) {
    out += "<ul>";
    for (const auto& c : n.children) render_node(out, c, marked, css);
    out += "</ul>";
  }
  out += "</li>";
}

inline std::string render_layout(const Layout& l, const std::set<std::string>& marked, const char* css) {
  if (!l.foreground || !l.root) return "<span class=\"bg\">(background)</span>";
  std::string out = "<b>" + html_escape(l.screen_id) + "</b><ul>";
  render_node(out, *l.root, marked, css);
  return out + "</ul>";
}

inline Layout load_snapshot(const std::filesystem::path& dir, const json& ref) {
  std::filesystem::path p = dir / ref.get<std::string>();
  std::ifstream in(p);
  if (!in) throw Error("missing-snapshot", p.string());
  return layout_from_json(json::parse(in));
}

inline std::vector<Layout> load_snapshots(const std::filesystem::path& dir, const json& refs) {
  std::vector<Layout> out;
  for (const auto& r : refs) out.push_back(load_snapshot(dir, r));
  return out;
}

inline std::set<std::string> sides(const EffectDelta& d, bool left) {
  std::set<std::string> out;
  for (const auto& t : d.tuples())
    if (const auto& s = left ? t.left : t.right) out.insert(*s);
  return out;
}

}  // namespace detail

/// One page for a report entry of reports.json; snapshot paths resolve
/// against `dir`. Witness views are marked on the seed column, the views the
/// mutant changed instead on the mutant column.
inline std::string render_report_page(const std::filesystem::path& dir, const json& report,
                                      const VolatileSet* vol = nullptr) {
  auto seed = detail::load_snapshots(dir, report.at("snapshots").at("seed"));
  auto mutant = detail::load_snapshots(dir, report.at("snapshots").at("mutant"));
  const int p = report.at("insert_pos").get<int>();
  const int tau = report.at("trace_len").get<int>();
  if (mutant.size() != seed.size() + static_cast<std::size_t>(tau))
    throw Error("missing-snapshot", "snapshot counts do not line up for " + report.at("canonical_key").get<std::string>());
  const int i = report.at("pair")[0].get<int>(), j = report.at("pair")[1].get<int>();
  auto shifted = [&](int k) { return k <= p ? k : k + tau; };

  EffectDelta witness;
  {
    std::vector<EffectTuple> ts;
    for (const auto& t : report.at("witness")) ts.push_back(tuple_from_json(t));
    witness = EffectDelta(std::move(ts));
  }
  EffectDelta seed_delta = gui_effect(seed[i], seed[j], vol);
  EffectDelta mutant_delta;
  if (similar_layout_type(mutant[shifted(i)], mutant[shifted(j)]))
    mutant_delta = gui_effect(mutant[shifted(i)], mutant[shifted(j)], vol);
  EffectDelta instead = delta_missing(mutant_delta, seed_delta);

  json seed_events = json::array(), mutant_events = json::array();
  if (report.contains("events")) {
    seed_events = report["events"]["seed"];
    mutant_events = report["events"]["mutant"];
  }
  auto event_text = [](const json& events, int k) -> std::string {
    if (k <= 0 || k > static_cast<int>(events.size())) return "";
    const json& e = events[k - 1];
    std::string s = e.value("type", "");
    if (e.contains("receiver") && e["receiver"].is_object()) s += " " + e["receiver"].value("shallow", "");
    return "<div class=\"event\">&rarr; " + html_escape(s) + "</div>";
  };

  const std::string key = report.at("canonical_key").get<std::string>();
  std::string out = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + html_escape(key) +
                    "</title><style>" + detail::kReportStyle + "</style></head><body>\n";
  out += "<h1>" + html_escape(key) + "</h1>\n";
  out += "<p>seed " + std::to_string(report.at("seed_id").get<int>()) + ", mutant " +
         std::to_string(report.at("mutant_id").get<int>()) + ", pair (" + std::to_string(i) + ", " +
         std::to_string(j) + "), occurrences " + std::to_string(report.at("occurrences").get<int>()) + "</p>\n";
  out += "<p>missing from the mutant:</p><ul>";
  for (const auto& t : witness.tuples())
    out += "<li>" + html_escape(tuple_op(t) + " " + t.left.value_or("-") + " -> " + t.right.value_or("-")) + "</li>";
  out += "</ul>\n<table><thead><tr><th>#</th><th>seed</th><th>mutant</th></tr></thead>\n";

  const std::set<std::string> seed_left = detail::sides(witness, true), seed_right = detail::sides(witness, false);
  const std::set<std::string> mut_left = detail::sides(instead, true), mut_right = detail::sides(instead, false);
  const std::set<std::string> none;
  const int rows = static_cast<int>(mutant.size());
  for (int m = 0; m < rows; ++m) {
    const bool inserted = m > p && m <= p + tau;
    if (m == p + 1 && tau > 0) out += "<tbody class=\"inserted\">\n";
    const int s = m <= p ? m : (inserted ? -1 : m - tau);
    out += "<tr><td>" + std::to_string(m) + "</td><td>";
    if (s >= 0) {
      const auto& marks = s == i ? seed_left : (s == j ? seed_right : none);
      out += event_text(seed_events, s) + detail::render_layout(seed[s], marks, "witness");
    }
    out += "</td><td>";
    const auto& marks = m == shifted(i) ? mut_left : (m == shifted(j) ? mut_right : none);
    out += event_text(mutant_events, m) + detail::render_layout(mutant[m], marks, "changed");
    out += "</td></tr>\n";
    if (m == p + tau && tau > 0) out += "</tbody>\n";
  }
  out += "</table>\n</body></html>\n";
  return out;
}

inline std::string report_page_name(std::size_t rank) { return "report_" + std::to_string(rank) + ".html"; }

inline std::string render_index(const json& reports) {
  std::string out = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>viewfuzz report</title><style>" +
                    std::string(detail::kReportStyle) + "</style></head><body>\n<h1>viewfuzz report</h1>\n";
  int surfaced = 0;
  for (const auto& r : reports) surfaced += r.value("surfaced", false);
  if (surfaced == 0) {
    out += "<p>no violations</p>\n";
  } else {
    out += "<ol>\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (!reports[k].value("surfaced", false)) continue;
      out += "<li><a href=\"" + report_page_name(k) + "\">" +
             html_escape(reports[k].at("canonical_key").get<std::string>()) + "</a></li>\n";
    }
    out += "</ol>\n";
  }
  const std::size_t suppressed = reports.size() - static_cast<std::size_t>(surfaced);
  if (suppressed > 0) {
    out += "<h2>suppressed (seen more than once)</h2>\n<ul>\n";
    for (const auto& r : reports)
      if (!r.value("surfaced", false))
        out += "<li>" + html_escape(r.at("canonical_key").get<std::string>()) + " &times; " +
               std::to_string(r.at("occurrences").get<int>()) + "</li>\n";
    out += "</ul>\n";
  }
  return out + "</body></html>\n";
}

/// Reads `dir`/reports.json and writes `dir`/html/index.html plus one page
/// per surfaced report. Returns the number of pages written.
inline int write_html_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "reports.json");
  if (!in) throw Error("missing-reports", (dir / "reports.json").string());
  json reports = json::parse(in);
  std::filesystem::path html = dir / "html";
  std::filesystem::create_directories(html);
  int pages = 0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (!reports[k].value("surfaced", false)) continue;
    VolatileSet vol;
    std::ifstream trace(dir / "traces" / ("seed_" + std::to_string(reports[k].at("seed_id").get<int>()) + ".json"));
    if (trace) {
      json tj = json::parse(trace);
      if (tj.contains("volatile"))
        for (const auto& v : tj["volatile"]) vol.insert_key(v.get<std::string>());
    }
    std::ofstream(html / report_page_name(k), std::ios::binary) << render_report_page(dir, reports[k], &vol);
    ++pages;
  }
  std::ofstream(html / "index.html", std::ios::binary) << render_index(reports);
  return pages;
}

}  // namespace viewfuzz
