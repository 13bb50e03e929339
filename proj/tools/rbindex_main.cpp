// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end over the C interface. Reports go to stdout as JSON,
// human-readable lines to stderr.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbindex/rbindex.h"

using nlohmann::json;

namespace {

int exit_code(rbx_status s) {
  switch (s) {
    case RBX_OK:
      return 0;
    case RBX_ERR_ASSUMPTION:
    case RBX_ERR_DOMAIN:
      return 3;
    case RBX_ERR_CONSISTENCY:
    case RBX_ERR_NUMERIC:
    case RBX_ERR_DEGENERATE:
    case RBX_ERR_GENERIC:
      return 4;
    default:
      return 2;
  }
}

const char* status_name(rbx_status s) {
  switch (s) {
    case RBX_OK: return "ok";
    case RBX_ERR_INPUT: return "input_error";
    case RBX_ERR_ASSUMPTION: return "assumption_violation";
    case RBX_ERR_CONSISTENCY: return "consistency_failure";
    case RBX_ERR_ARGUMENT: return "argument_error";
    case RBX_ERR_NUMERIC: return "numeric_error";
    case RBX_ERR_UNSUPPORTED: return "unsupported_model";
    case RBX_ERR_MEMBERSHIP: return "membership_error";
    case RBX_ERR_STRUCTURAL: return "structural_error";
    case RBX_ERR_DOMAIN: return "domain_error";
    case RBX_ERR_SIZE: return "size_error";
    case RBX_ERR_DEGENERATE: return "degenerate";
    case RBX_ERR_BRANCH: return "branch_error";
    case RBX_ERR_INFEASIBLE: return "infeasible_target";
    default: return "error";
  }
}

struct Run {
  std::string command;
  std::vector<std::string> args;
  json digest = nullptr;
};

// Takes ownership of report and log.
int emit(const Run& run, rbx_status s, char* report, char* log, bool quiet) {
  json env;
  env["tool"] = "rbindex";
  env["version"] = rbx_version();
  env["command"] = {{"name", run.command}, {"args", run.args}};
  env["input_digest"] = run.digest;
  env["status"] = status_name(s);
  env["exit_code"] = exit_code(s);
  if (report) {
    env["results"] = json::parse(report);
  }
  if (s != RBX_OK) {
    env["error"] = {{"code", static_cast<int>(s)}, {"message", rbx_last_error()}};
  }
  if (log && !quiet) std::fputs(log, stderr);
  if (s != RBX_OK && !quiet) std::fprintf(stderr, "error: %s\n", rbx_last_error());
  rbx_string_free(report);
  rbx_string_free(log);
  std::cout << env.dump(2) << '\n';
  return exit_code(s);
}

// Loads the model; on failure emits the error envelope and returns false.
bool load(Run& run, const std::string& path, rbx_model** m, bool quiet, int* code) {
  const rbx_status s = rbx_model_from_file(path.c_str(), m);
  if (s != RBX_OK) {
    *code = emit(run, s, nullptr, nullptr, quiet);
    return false;
  }
  char* d = nullptr;
  if (rbx_model_digest(*m, &d) == RBX_OK) {
    run.digest = d;
    rbx_string_free(d);
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restless bandit index computation and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rbx_version()));
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress the human-readable log on stderr");

  std::string file;
  std::string family = "auto";
  auto* index = app.add_subcommand("index", "Compute indices and PCL flags");
  index->add_option("file", file, "Model file (rb or admission)")->required();
  index->add_option("--family", family, "Set family")
      ->check(CLI::IsMember({"auto", "threshold", "powerset", "explicit"}));

  std::size_t grid = 0;
  double eps = 1e-8;
  auto* dp = app.add_subcommand("dp-verify", "Cross-check indices against dynamic programming");
  dp->add_option("file", file, "Model file (rb or admission)")->required();
  dp->add_option("--grid", grid, "Extra uniform sweep points over the index range");
  dp->add_option("--eps", eps, "Indifference tolerance on the action gap")
      ->check(CLI::PositiveNumber);

  rbx_sim_options so;
  rbx_sim_options_init(&so);
  std::vector<std::string> policies;
  std::uint64_t events = 0;
  auto* sim = app.add_subcommand("simulate", "Simulate index policies and baselines");
  sim->add_option("file", file, "Model file (routing or mts)")->required();
  sim->add_option("--policy", policies,
                  "Policies: index, shortest-queue, naive (routing); index, least-stock (mts)")
      ->delimiter(',');
  sim->add_option("--reps", so.replications, "Replications")->check(CLI::PositiveNumber);
  sim->add_option("--seed", so.seed, "Base seed; replication r uses seed + r");
  sim->add_option("--horizon", so.horizon, "Time horizon per replication");
  sim->add_option("--events", events, "Event budget per replication (overrides --horizon)");
  sim->add_option("--warmup", so.warmup_fraction, "Warm-up fraction for the average criterion")
      ->check(CLI::Range(0.0, 0.99));
  sim->add_option("--threads", so.threads, "Worker threads (default RBINDEX_THREADS)");

  app.add_subcommand("counterexample", "Run the canned non-threshold counterexample");

  std::size_t bound = 200, from = 50;
  auto* sw = app.add_subcommand("switching-curve", "Two-queue routing switching curve");
  sw->add_option("file", file, "Routing model with two queues")->required();
  sw->add_option("--bound", bound, "Largest j1");
  sw->add_option("--from", from, "Start of the slope window");

  auto* canon = app.add_subcommand("canonical", "Print the canonical form of a model file");
  canon->add_option("file", file, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  for (int i = 1; i < argc; ++i) run.args.emplace_back(argv[i]);

  char* report = nullptr;
  char* log = nullptr;
  if (run.command == "counterexample") {
    const rbx_status s = rbx_counterexample(&report, &log);
    return emit(run, s, report, log, quiet);
  }

  rbx_model* m = nullptr;
  int code = 0;
  if (!load(run, file, &m, quiet, &code)) return code;
  rbx_status s = RBX_OK;
  if (run.command == "index") {
    s = rbx_index(m, family.c_str(), &report, &log);
  } else if (run.command == "dp-verify") {
    s = rbx_dp_verify(m, grid, eps, &report, &log);
  } else if (run.command == "simulate") {
    std::string joined;
    for (const auto& p : policies) joined += (joined.empty() ? "" : ",") + p;
    so.policies = joined.c_str();
    so.events = events;
    s = rbx_simulate(m, &so, &report, &log);
  } else if (run.command == "switching-curve") {
    s = rbx_switching_curve(m, bound, from, &report, &log);
  } else if (run.command == "canonical") {
    s = rbx_model_to_json(m, &report);
  }
  rbx_model_free(m);
  return emit(run, s, report, log, quiet);
}
