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

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rbindex/model_io.hpp"
#include "rbindex/policy_sim.hpp"

namespace rbindex {

// Verdict of a command run. Hard failures throw rbindex::Error instead.
enum class Verdict { kOk = 0, kAssumption = 3, kConsistency = 4 };

struct CommandResult {
  nlohmann::json results;
  Verdict verdict = Verdict::kOk;
  std::vector<std::string> log;  // human-readable lines
};

// family: auto, threshold, powerset or explicit.
CommandResult cmd_index(const Model& model, const std::string& family = "auto");

struct DPVerifyOptions {
  std::size_t grid = 0;  // extra uniform sweep points; 0 disables the sweep
  double eps = 1e-8;
};
CommandResult cmd_dp_verify(const Model& model, const DPVerifyOptions& opts = {});

struct SimulateOptions {
  std::vector<std::string> policies;  // empty: every policy for the model kind
  SimConfig config;
};
CommandResult cmd_simulate(const Model& model, const SimulateOptions& opts);

CommandResult cmd_counterexample();

CommandResult cmd_switching_curve(const Model& model, std::size_t bound = 200,
                                  std::size_t slope_from = 50);

}  // namespace rbindex
