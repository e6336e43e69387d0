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

// viewfuzz command line: mine | seeds | fuzz | report | run.
// Exit status: 0 clean, 2 surfaced violations, 1 error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "viewfuzz/viewfuzz.hpp"

namespace fs = std::filesystem;
using namespace viewfuzz;

namespace {

constexpr int kClean = 0;
constexpr int kError = 1;
constexpr int kViolations = 2;

struct Options {
  RunConfig cfg;
  std::vector<std::string> faults;
  std::string out;
};

void add_fault_option(CLI::App* cmd, Options& o) {
  cmd->add_option("--fault", o.faults, "Toggle a scenario fault, NAME=on|off")->take_all();
}

void apply_faults(Options& o) {
  for (const auto& f : o.faults) {
    auto eq = f.find('=');
    std::string name = f.substr(0, eq), value = eq == std::string::npos ? "" : f.substr(eq + 1);
    if (name.empty() || (value != "on" && value != "off"))
      throw Error("config", "--fault expects NAME=on|off, got '" + f + "'");
    o.cfg.faults[name] = value == "on";
  }
}

int surfaced_in(const json& reports) {
  int n = 0;
  for (const auto& r : reports) n += r.value("surfaced", false);
  return n;
}

int do_mine(Options& o) {
  TransitionalModel m = detail::staged("mine", [&] { return stage_mine(o.cfg); });
  fs::path out = o.out.empty() ? fs::path("model.json") : fs::path(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  detail::staged("write", [&] { detail::write_json(out, m.to_json()); });
  std::cout << "states " << m.states().size() << ", transitions " << m.transitions().size() << "\n";
  return kClean;
}

int do_seeds(Options& o) {
  auto seeds = detail::staged("seeds", [&] { return stage_execute_seeds(o.cfg, stage_generate_seeds(o.cfg)); });
  detail::staged("write", [&] { write_seed_artifacts(o.out, seeds); });
  std::cout << "seeds " << seeds.size() << "\n";
  return kClean;
}

int do_fuzz(Options& o) {
  fs::path dir(o.out);
  PipelineResult r;
  r.model = detail::staged("load", [&] { return TransitionalModel::from_json(detail::read_json(dir / "model.json")); });
  auto tests = detail::staged("load", [&] { return seeds_from_json(detail::read_json(dir / "seeds.json")); });
  r.seeds = detail::staged("seeds", [&] { return stage_execute_seeds(o.cfg, tests); });
  run_fuzz(o.cfg, r);
  detail::staged("write", [&] { write_fuzz_artifacts(dir, r); });
  std::cout << r.summary.to_json().dump() << "\n";
  return r.summary.surfaced > 0 ? kViolations : kClean;
}

int do_report(Options& o) {
  fs::path dir(o.out);
  int pages = detail::staged("report", [&] { return write_html_report(dir); });
  json reports = detail::read_json(dir / "reports.json");
  std::cout << (dir / "html" / "index.html").string() << " (" << pages << " report pages)\n";
  return surfaced_in(reports) > 0 ? kViolations : kClean;
}

int do_run(Options& o) {
  PipelineResult r = run_pipeline(o.cfg);
  detail::staged("report", [&] { write_html_report(o.cfg.out_dir); });
  std::cout << r.summary.to_json().dump() << "\n";
  return r.summary.surfaced > 0 ? kViolations : kClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewfuzz: metamorphic GUI fuzzing over scripted apps"};
  app.require_subcommand(1);
  Options o;
  RunConfig& c = o.cfg;

  auto scenario = [&](CLI::App* cmd) { cmd->add_option("--scenario", c.scenario, "Scenario JSON")->required(); };
  auto rng = [&](CLI::App* cmd) { cmd->add_option("--rng-seed", c.rng_seed, "Random seed"); };
  auto budget = [&](CLI::App* cmd) { cmd->add_option("--budget", c.budget, "Mining events"); };
  auto seeding = [&](CLI::App* cmd) {
    cmd->add_option("--seeds", c.seeds, "Number of seed tests");
    cmd->add_option("--seed-len", c.seed_len, "Events per seed test");
  };
  auto fuzzing = [&](CLI::App* cmd) {
    cmd->add_option("--max-mutants", c.max_mutants, "Mutants per insertion position");
    cmd->add_option("--max-trace-len", c.max_trace_len, "Longest inserted trace");
    cmd->add_option("--workers", c.workers, "Parallel mutant executors");
  };
  auto out_dir = [&](CLI::App* cmd) { cmd->add_option("--out", o.out, "Output directory")->required(); };

  CLI::App* mine_cmd = app.add_subcommand("mine", "Explore the app and write its transitional model");
  scenario(mine_cmd);
  budget(mine_cmd);
  mine_cmd->add_option("--seed,--rng-seed", c.rng_seed, "Random seed");
  mine_cmd->add_option("--out", o.out, "Model file (default model.json)");
  add_fault_option(mine_cmd, o);

  CLI::App* seeds_cmd = app.add_subcommand("seeds", "Generate and execute seed tests");
  scenario(seeds_cmd);
  seeding(seeds_cmd);
  rng(seeds_cmd);
  out_dir(seeds_cmd);
  add_fault_option(seeds_cmd, o);

  CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "Mutate seeds from --out, execute and check them");
  scenario(fuzz_cmd);
  fuzzing(fuzz_cmd);
  rng(fuzz_cmd);
  out_dir(fuzz_cmd);
  add_fault_option(fuzz_cmd, o);

  CLI::App* report_cmd = app.add_subcommand("report", "Render HTML pages for the reports in --out");
  out_dir(report_cmd);

  CLI::App* run_cmd = app.add_subcommand("run", "Mine, seed, fuzz and report in one go");
  scenario(run_cmd);
  budget(run_cmd);
  seeding(run_cmd);
  fuzzing(run_cmd);
  rng(run_cmd);
  out_dir(run_cmd);
  add_fault_option(run_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kClean : kError;
  }

  try {
    apply_faults(o);
    c.out_dir = o.out;
    if (!report_cmd->parsed()) c.validate();
    if (mine_cmd->parsed()) return do_mine(o);
    if (seeds_cmd->parsed()) return do_seeds(o);
    if (fuzz_cmd->parsed()) return do_fuzz(o);
    if (report_cmd->parsed()) return do_report(o);
    return do_run(o);
  } catch (const StageError& e) {
    std::cerr << "viewfuzz: " << e.stage() << ": " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "viewfuzz: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "viewfuzz: internal: " << e.what() << "\n";
  }
  return kError;
}
