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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "viewfuzz/harness.hpp"
#include "viewfuzz/model.hpp"
#include "viewfuzz/mutant.hpp"
#include "viewfuzz/oracle.hpp"
#include "viewfuzz/seed.hpp"

namespace viewfuzz {

struct RunConfig {
  std::string scenario;
  int budget = 500;
  int seeds = 20;
  int seed_len = 15;
  int max_mutants = 300;
  int max_trace_len = 8;
  int workers = 1;
  std::uint64_t rng_seed = 1;
  double motif_factor = 3.0;
  std::vector<std::string> motif_keywords{"OK", "Yes", "Save", "Done"};
  std::set<std::string> group_types = default_group_types();
  std::map<std::string, bool> faults;
  std::string out_dir;  // empty: keep everything in memory
  bool volatile_filter = true;
  bool pivot_filter = true;
  int saturation = 30;
  int random_burst = 15;

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v <= 0) throw Error("config", std::string(name) + " must be positive");
    };
    positive(budget, "budget");
    positive(seeds, "seeds");
    positive(seed_len, "seed-len");
    positive(max_mutants, "max-mutants");
    positive(max_trace_len, "max-trace-len");
    positive(workers, "workers");
    if (scenario.empty()) throw Error("config", "no scenario given");
  }
};

struct Summary {
  int generated = 0;
  int executed = 0;
  int unreplayable = 0;
  int skipped = 0;
  int filtered = 0;  // executed but dropped by the pivot-return filter
  int error_mutants = 0;
  int distinct = 0;
  int surfaced = 0;

  json to_json() const {
    return {{"generated", generated}, {"executed", executed},           {"unreplayable", unreplayable},
            {"skipped", skipped},     {"filtered", filtered},           {"error_mutants", error_mutants},
            {"distinct", distinct},   {"surfaced", surfaced}};
  }
};

struct SeedRecord {
  ExecutionTrace trace;
  VolatileSet volatile_views;
};

struct MutantOutcome {
  MutantStatus status = MutantStatus::kSkipped;
  bool filtered = false;
  std::vector<Violation> violations;  // per pair
  ExecutionTrace trace;               // kept for mutants with violations
};

struct PipelineResult {
  TransitionalModel model;
  std::vector<SeedRecord> seeds;
  std::vector<Mutant> mutants;
  std::vector<MutantOutcome> outcomes;
  std::vector<BugReport> reports;
  Summary summary;
};

inline ScenarioApp make_app(const RunConfig& cfg) {
  ScenarioApp app = load_scenario(cfg.scenario, cfg.group_types);
  for (const auto& [name, on] : cfg.faults) app.set_fault(name, on);
  return app;
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + p.string());
  out << text;
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("io", "cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("parse", p.string() + ": " + e.what());
  }
}

inline std::mt19937_64 derived_rng(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const json::exception& e) {
    throw StageError(stage, Error("parse", e.what()));
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(stage, Error("io", e.what()));
  }
}

inline std::vector<std::string> snapshot_refs(const std::string& dir, std::size_t n) {
  std::vector<std::string> refs;
  for (std::size_t k = 0; k < n; ++k) refs.push_back("snapshots/" + dir + "/" + std::to_string(k) + ".json");
  return refs;
}

}  // namespace detail

inline TransitionalModel stage_mine(const RunConfig& cfg) {
  ScenarioApp app = make_app(cfg);
  return mine(app, MineConfig{cfg.budget, cfg.saturation, cfg.random_burst, cfg.rng_seed});
}

inline SeedConfig seed_config(const RunConfig& cfg, int count, std::uint64_t rng_seed) {
  SeedConfig s;
  s.count = count;
  s.max_len = cfg.seed_len;
  s.motif_factor = cfg.motif_factor;
  s.motif_keywords = cfg.motif_keywords;
  s.rng_seed = rng_seed;
  return s;
}

/// Generates seed tests; any seed that fails to replay is regenerated.
inline std::vector<TestCase> stage_generate_seeds(const RunConfig& cfg) {
  ScenarioApp app = make_app(cfg);
  auto seeds = generate_seeds(app, seed_config(cfg, cfg.seeds, cfg.rng_seed));
  for (auto& s : seeds) {
    for (int attempt = 1; replay_test(app, s).failed_at >= 0; ++attempt) {
      if (attempt > 10) throw Error("seeds", "seed " + std::to_string(s.origin.seed_id) + " never replays");
      int id = s.origin.seed_id;
      s = generate_seeds(app, seed_config(cfg, 1, cfg.rng_seed + 7919ULL * (id + 1) + attempt)).front();
      s.origin.seed_id = id;
    }
  }
  return seeds;
}

/// Executes seeds and records their volatile views.
inline std::vector<SeedRecord> stage_execute_seeds(const RunConfig& cfg, const std::vector<TestCase>& seeds) {
  ScenarioApp app = make_app(cfg);
  std::vector<SeedRecord> out;
  for (const auto& s : seeds) {
    SeedRecord r;
    r.trace = execute_seed(app, s);
    if (cfg.volatile_filter) r.volatile_views = detect_volatile_views(app, s);
    out.push_back(std::move(r));
  }
  return out;
}

inline MutantConfig mutant_config(const RunConfig& cfg) {
  MutantConfig m;
  m.max_num = cfg.max_mutants;
  m.max_length = cfg.max_trace_len;
  return m;
}

inline std::vector<Mutant> stage_generate_mutants(const RunConfig& cfg, const TransitionalModel& model,
                                                  const std::vector<SeedRecord>& seeds) {
  std::vector<Mutant> all;
  for (const auto& s : seeds) {
    auto rng = detail::derived_rng(cfg.rng_seed, static_cast<std::uint64_t>(s.trace.test.origin.seed_id), 1);
    for (auto& m : generate_mutants(s.trace, model, rng, mutant_config(cfg))) {
      m.mutant_id = static_cast<int>(all.size());
      all.push_back(std::move(m));
    }
  }
  return all;
}

/// Runs one mutant and checks it against its seed.
inline MutantOutcome evaluate_mutant(ScenarioApp& app, const Mutant& m, const SeedRecord& seed,
                                     UnreplayableRegistry& registry, const RunConfig& cfg) {
  MutantOutcome out;
  MutantRun run = execute_mutant(app, m, &registry);
  out.status = run.status;
  if (run.status != MutantStatus::kExecuted) return out;
  const VolatileSet* vol = cfg.volatile_filter ? &seed.volatile_views : nullptr;
  const int tau = static_cast<int>(m.trace.events.size());
  if (cfg.pivot_filter &&
      filter_pivot_return(run.trace.layouts[m.insert_pos], run.trace.layouts[m.insert_pos + tau], vol)) {
    out.filtered = true;
    return out;
  }
  out.violations = check(seed.trace, run.trace, m.insert_pos, tau, vol);
  for (auto& v : out.violations) v.mutant_id = m.mutant_id;
  if (!out.violations.empty()) out.trace = std::move(run.trace);
  return out;
}

/// Executes all mutants on `cfg.workers` threads, each with its own app.
inline std::vector<MutantOutcome> stage_execute_mutants(const RunConfig& cfg, const std::vector<Mutant>& mutants,
                                                        const std::vector<SeedRecord>& seeds) {
  std::map<int, const SeedRecord*> by_id;
  for (const auto& s : seeds) by_id[s.trace.test.origin.seed_id] = &s;
  std::vector<MutantOutcome> outcomes(mutants.size());
  UnreplayableRegistry registry;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      ScenarioApp app = make_app(cfg);
      for (std::size_t i = next++; i < mutants.size(); i = next++)
        outcomes[i] = evaluate_mutant(app, mutants[i], *by_id.at(mutants[i].seed_id), registry, cfg);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = mutants.size();
    }
  };
  if (cfg.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

inline Summary summarize(const std::vector<MutantOutcome>& outcomes, const std::vector<BugReport>& reports) {
  Summary s;
  s.generated = static_cast<int>(outcomes.size());
  for (const auto& o : outcomes) {
    s.executed += o.status == MutantStatus::kExecuted;
    s.unreplayable += o.status == MutantStatus::kUnreplayable;
    s.skipped += o.status == MutantStatus::kSkipped;
    s.filtered += o.filtered;
    s.error_mutants += !o.violations.empty();
  }
  s.distinct = static_cast<int>(reports.size());
  for (const auto& r : reports) s.surfaced += r.surfaced;
  return s;
}

inline std::vector<BugReport> stage_reduce(const std::vector<Mutant>& mutants,
                                           const std::vector<MutantOutcome>& outcomes) {
  std::vector<Violation> errors;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (!outcomes[i].violations.empty())
      errors.push_back(merge_violations(outcomes[i].violations, mutants[i].mutant_id));
  return dedup_and_rank(errors);
}

// ---- artifacts

inline json seeds_to_json(const std::vector<TestCase>& seeds) {
  json arr = json::array();
  for (const auto& s : seeds) arr.push_back(test_case_to_json(s));
  return arr;
}

inline std::vector<TestCase> seeds_from_json(const json& j) {
  std::vector<TestCase> out;
  for (const auto& s : j) out.push_back(test_case_from_json(s));
  return out;
}

inline void write_seed_artifacts(const std::filesystem::path& dir, const std::vector<SeedRecord>& seeds) {
  std::vector<TestCase> tests;
  for (const auto& s : seeds) {
    const int id = s.trace.test.origin.seed_id;
    tests.push_back(s.trace.test);
    const std::string sub = "seed_" + std::to_string(id);
    auto refs = detail::snapshot_refs(sub, s.trace.layouts.size());
    for (std::size_t k = 0; k < refs.size(); ++k) detail::write_json(dir / refs[k], layout_to_json(s.trace.layouts[k]));
    json tj = trace_to_json(s.trace, refs);
    json vol = json::array();
    for (const auto& k : s.volatile_views.keys()) vol.push_back(k);
    tj["volatile"] = vol;
    detail::write_json(dir / "traces" / (sub + ".json"), tj);
  }
  detail::write_json(dir / "seeds.json", seeds_to_json(tests));
}

/// Writes mutants.jsonl, mutant snapshots for reported errors, reports.json
/// and summary.json.
inline void write_fuzz_artifacts(const std::filesystem::path& dir, const PipelineResult& r) {
  std::string lines;
  for (std::size_t i = 0; i < r.mutants.size(); ++i) {
    json j = mutant_to_json(r.mutants[i], r.outcomes[i].status);
    if (r.outcomes[i].filtered) j["filtered"] = true;
    lines += j.dump() + "\n";
  }
  detail::write_text(dir / "mutants.jsonl", lines);

  std::map<int, const SeedRecord*> seeds;
  for (const auto& s : r.seeds) seeds[s.trace.test.origin.seed_id] = &s;
  json reports = json::array();
  for (const auto& rep : r.reports) {
    const int mid = rep.exemplar.mutant_id;
    const Mutant& m = r.mutants.at(mid);
    const ExecutionTrace& mt = r.outcomes.at(mid).trace;
    auto mutant_refs = detail::snapshot_refs("mutant_" + std::to_string(mid), mt.layouts.size());
    for (std::size_t k = 0; k < mutant_refs.size(); ++k)
      detail::write_json(dir / mutant_refs[k], layout_to_json(mt.layouts[k]));
    auto seed_refs = detail::snapshot_refs("seed_" + std::to_string(m.seed_id),
                                           seeds.at(m.seed_id)->trace.layouts.size());
    json j = report_to_json(rep, seed_refs, mutant_refs);
    j["insert_pos"] = m.insert_pos;
    j["trace_len"] = m.trace.events.size();
    json seed_events = json::array(), mutant_events = json::array();
    for (const auto& e : seeds.at(m.seed_id)->trace.test.events) seed_events.push_back(event_to_json(e));
    for (const auto& e : m.assembled.events) mutant_events.push_back(event_to_json(e));
    j["events"] = {{"seed", seed_events}, {"mutant", mutant_events}};
    reports.push_back(j);
  }
  detail::write_json(dir / "reports.json", reports);
  detail::write_json(dir / "summary.json", r.summary.to_json());
}

/// Mutant generation, execution, oracle and reduction over mined model and
/// executed seeds.
inline void run_fuzz(const RunConfig& cfg, PipelineResult& r) {
  r.mutants = detail::staged("mutate", [&] { return stage_generate_mutants(cfg, r.model, r.seeds); });
  r.outcomes = detail::staged("execute", [&] { return stage_execute_mutants(cfg, r.mutants, r.seeds); });
  r.reports = detail::staged("oracle", [&] { return stage_reduce(r.mutants, r.outcomes); });
  r.summary = summarize(r.outcomes, r.reports);
}

/// The whole workflow: mine, generate and execute seeds, fuzz, reduce.
/// Artifacts go to cfg.out_dir when set.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
  detail::staged("config", [&] { cfg.validate(); });
  PipelineResult r;
  r.model = detail::staged("mine", [&] { return stage_mine(cfg); });
  r.seeds = detail::staged("seeds", [&] { return stage_execute_seeds(cfg, stage_generate_seeds(cfg)); });
  run_fuzz(cfg, r);
  if (!cfg.out_dir.empty()) {
    detail::staged("write", [&] {
      std::filesystem::path dir(cfg.out_dir);
      detail::write_json(dir / "model.json", r.model.to_json());
      write_seed_artifacts(dir, r.seeds);
      write_fuzz_artifacts(dir, r);
    });
  }
  return r;
}

}  // namespace viewfuzz
