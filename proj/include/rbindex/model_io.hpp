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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbindex/admission_control.hpp"
#include "rbindex/policy_sim.hpp"
#include "rbindex/restless_bandit.hpp"

namespace rbindex {

enum class ModelKind { kRB, kAdmission, kRouting, kMTS };

const char* kind_name(ModelKind k);

struct Model {
  ModelKind kind = ModelKind::kRB;
  std::optional<RBModel> rb;
  std::vector<Subset> family;  // explicit rb family as state sets, may be empty
  std::optional<ACModel> admission;
  ActivityMeasure measure = ActivityMeasure::kRejections;
  std::optional<RoutingSystem> routing;
  std::optional<MTSSystem> mts;
};

// All parse failures throw InputError naming the offending field.
Model parse_model(const nlohmann::json& doc);
Model parse_model_text(const std::string& text);
Model load_model(const std::string& path);

// Canonical form: sorted keys, expanded arrays, defaults written out.
nlohmann::json to_json(const Model& m);
std::string canonical_dump(const Model& m);

// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string digest(const Model& m);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace rbindex
