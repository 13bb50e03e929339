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
#include <string>
#include <vector>

#include "rbindex/restless_bandit.hpp"

namespace rbindex {

// Birth-death admission control on states 0..n. Rates are per unit time.
// mu[0] is fixed at 0; mu[i] is the service rate in state i >= 1.
struct ACModel {
  std::size_t n = 0;
  std::vector<double> lambda;  // n + 1 entries
  std::vector<double> mu;      // n + 1 entries, mu[0] == 0
  std::vector<double> h;       // n + 1 entries
  double alpha = 0.0;
  double Lambda = 0.0;         // 0 selects max_i (lambda_i + mu_i)

  // mu_1..mu_n given without the leading zero.
  static ACModel make(std::vector<double> lambda, std::vector<double> mu_1n,
                      std::vector<double> h, double alpha, double Lambda = 0.0);
  double uniformization_rate() const;
  void check() const;  // shapes and signs; throws InputError
};

struct AssumptionReport {
  bool ok = true;
  std::vector<std::string> violations;
};
// Concave nondecreasing d_i = mu_i - lambda_i with delta d_1 > 0, and convex
// nondecreasing h.
AssumptionReport validate_assumptions(const ACModel& m);

enum class ActivityMeasure {
  kRejections,  // theta_j = lambda_j / (alpha + Lambda)
  kShutTime,    // theta_j = 1 / (alpha + Lambda); every state controllable
};

RBModel uniformize(const ACModel& m,
                   ActivityMeasure measure = ActivityMeasure::kRejections);

std::vector<double> ak_coefficients(const ACModel& m);  // a_1..a_n at [0..n-1]

// Table w[k-1][i] = (alpha + Lambda) w^{S_k}_i, k = 1..n+1, i = 0..n-1, for
// the threshold chain S_k = {k-1, ..., n-1}.
std::vector<std::vector<double>> workload_table(const ACModel& m);

// c[k] = (alpha + Lambda) c^{S_{k+2}}_k, k = 0..n-1.
std::vector<double> marginal_cost_pivots(const ACModel& m);

struct IndexOptions {
  bool check_assumptions = true;
};
std::vector<double> indices(const ACModel& m, const IndexOptions& opts = {});
// Same recursions with alpha = 0.
std::vector<double> average_indices(const ACModel& m,
                                    const IndexOptions& opts = {});

enum class ClosedFormKind { kLinear, kQuadratic, kGeneralSum };
enum class RhoBranch { kAuto, kRhoNotOne, kRhoOne };

struct ClosedFormParams {
  double lambda = 1.0, mu = 1.0;
  double h = 1.0;  // cost scale for linear h_j = h j and quadratic h_j = h j^2
  std::vector<double> delta_h;  // general-sum: delta_h[i-1] = h_i - h_{i-1}
  RhoBranch branch = RhoBranch::kAuto;
};
// Constant-rate, undiscounted index of state j.
double closed_form_index(ClosedFormKind kind, const ClosedFormParams& p,
                         std::size_t j);

struct Counterexample {
  ACModel model;
  std::vector<double> expected;  // fair charges of states 0, 1, 2
};
Counterexample whittle_counterexample();

}  // namespace rbindex
