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

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rbindex/restless_bandit.hpp"
#include "rbindex/set_system.hpp"

namespace rbindex {

enum class DPMethod { kPolicyIteration, kValueIteration };

struct DPResult {
  Eigen::VectorXd v;
  Subset active_opt = 0;   // active strictly better by more than eps
  Subset indifferent = 0;  // |gap| <= eps
  // Active minus passive action value at controllable states, NaN elsewhere.
  Eigen::VectorXd gap;
  int iterations = 0;
  double bellman_residual = 0.0;
  // S(nu) under the closed convention.
  Subset active_set() const { return active_opt | indifferent; }
};

DPResult solve(const RBModel& m, double nu,
               DPMethod method = DPMethod::kPolicyIteration,
               double eps = 1e-8);

struct SweepResult {
  std::vector<double> grid;
  std::vector<Subset> sets;   // S(nu) per grid point (states)
  bool nested = true;         // S(nu) nonincreasing along the grid
  // Per grid point, whether S(nu) is a member of the supplied family.
  std::vector<bool> in_family;
  bool all_in_family = true;
};

// family, when given, is over controllable positions.
SweepResult nu_sweep(const RBModel& m, const std::vector<double>& grid,
                     double eps = 1e-8,
                     const SetSystem* family = nullptr);

struct FairCharge {
  double nu = 0.0;
  int iterations = 0;
  bool multiple_roots = false;
  // Sign changes of the action gap found by the coarse scan.
  std::vector<std::pair<double, double>> root_brackets;
  std::string warning;
};

// Critical charge at which the optimal action at state j switches.
FairCharge fair_charge(const RBModel& m, std::size_t j, double tol = 1e-12);

struct GridCheck {
  double nu = 0.0;
  bool strict = true;   // false at an index value (compared leniently)
  Subset expected = 0;  // {j : nu <= nu_j}
  Subset got = 0;
  bool ok = true;
};

struct CrosscheckReport {
  std::vector<GridCheck> points;
  bool agree = true;
  std::size_t mismatches = 0;
  std::string diff;
};

// Compares DP-optimal S(nu) with the index rule on a grid built from the
// distinct indices: one point below, midpoints, one point above, and the
// indices themselves.
CrosscheckReport crosscheck_indices(const RBModel& m, const PCLReport& pcl,
                                    double eps = 1e-8);

}  // namespace rbindex
