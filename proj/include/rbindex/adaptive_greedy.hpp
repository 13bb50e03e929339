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
#include <functional>
#include <optional>
#include <vector>

#include "rbindex/set_system.hpp"

namespace rbindex {

// Coefficients w^S_j (and optionally right-hand sides b^S) of an
// F-extended polymatroid. Workloads are validated when queried.
struct WorkloadOracle {
  std::function<double(Subset, std::size_t)> w;
  std::function<double(Subset)> b;  // may be empty
  bool monotone = false;            // w^S_j <= w^T_j for S subset of T

  double workload(Subset s, std::size_t j) const;
  double rhs(Subset s) const;
  bool has_rhs() const { return static_cast<bool>(b); }
};

enum class TieBreak { kLowestIndex, kHighestIndex };

struct AGOptions {
  TieBreak tie_break = TieBreak::kLowestIndex;
  bool early_exit = false;  // stop at the first decrease in nu
  double tie_tol = 1e-12;   // relative
  double admissibility_tol = 1e-9;
};

// Output of an adaptive-greedy run. Row k of the per-step tables refers to
// S_{k+1} (0-based); entries for j outside that set are NaN.
struct AGOutput {
  std::size_t n = 0;
  bool admissible = false;
  bool completed = true;  // false if early exit stopped the run
  std::vector<std::size_t> pi;
  std::vector<double> nu;       // by ground element
  std::vector<Subset> chain;    // S_1 ... S_n
  std::vector<double> dual;     // y^{S_k}, aligned with chain
  std::vector<std::vector<double>> rate_table;     // nu^{S_k}_j
  std::vector<std::vector<double>> reduced_costs;  // c^{S_k}_j
  std::vector<std::vector<double>> workloads;      // w^{S_k}_j

  // nu_{pi_k}, k = 1..n.
  std::vector<double> nu_along_pi() const;
};

AGOutput ag1(const std::vector<double>& c, const WorkloadOracle& oracle,
             const SetSystem& sys, const AGOptions& opts = {});
AGOutput ag2(const std::vector<double>& c, const WorkloadOracle& oracle,
             const SetSystem& sys, const AGOptions& opts = {});

bool is_nondecreasing(const std::vector<double>& v, double tol);

struct PrimalVertex {
  std::vector<double> x;
  double max_rel_residual = 0.0;
};

// Solves the triangular system sum_{j in S_k} w^{S_k}_j x_j = b^{S_k}.
PrimalVertex primal_vertex(const std::vector<std::size_t>& pi,
                           const WorkloadOracle& oracle);

struct DualSolution {
  std::vector<Subset> sets;     // chain sets carrying y
  std::vector<double> y;
  double max_reconstruction_error = 0.0;  // over c_{pi_k}
};

// y^{S_1} = nu_{pi_1}, y^{S_k} = nu_{pi_k} - nu_{pi_{k-1}}. The reconstruction
// error compares each c_{pi_k} with sum_{l <= k} y^{S_l} w^{S_l}_{pi_k}.
DualSolution dual_solution(const AGOutput& out);

double lp_value(const AGOutput& out, const WorkloadOracle& oracle);

double dual_objective(const DualSolution& dual, const WorkloadOracle& oracle);

// Checks sum_{S in F, S contains j} w^S_j y^S <= c_j for all j and y^S >= 0
// for S != J, enumerating the whole family. Returns the largest violation,
// relative to max(1, |c_j|).
double dual_feasibility_violation(const DualSolution& dual,
                                  const std::vector<double>& c,
                                  const WorkloadOracle& oracle,
                                  const SetSystem& sys);

struct Residual {
  double residual = 0.0;
  double scale = 1.0;
  bool within(double tol) const { return residual <= tol * scale; }
};

Residual objective_representation_check(const std::vector<double>& c,
                                        const AGOutput& out,
                                        const WorkloadOracle& oracle,
                                        const std::vector<double>& x);

// Minimum of c.x over every full F-string of sys (exhaustive).
struct BruteForceLP {
  double value = 0.0;
  std::vector<std::size_t> argmin;
  std::size_t strings = 0;
};
BruteForceLP brute_force_lp(const std::vector<double>& c,
                            const WorkloadOracle& oracle,
                            const SetSystem& sys, std::size_t cap = 10);

// Reduced-objective identity along the chain: for each m = 1..n-1 returns the
// absolute difference between v^LP and its partial representation.
std::vector<double> reduced_cost_identity_residuals(
    const AGOutput& out, const WorkloadOracle& oracle);

struct MinMaxReport {
  bool min_ok = true;            // nu_{pi_m} = min_{j in S_m} nu^{S_m}_j
  bool max_checked = false;
  bool max_ok = true;            // nu_j = max over chain sets containing j
  bool rate_chain_ok = true;     // nu^{S_k}_{pi_l} nondecreasing in k <= l
  double worst_min_gap = 0.0;
  double worst_max_gap = 0.0;
};
MinMaxReport local_minmax_check(const AGOutput& out, bool monotone,
                                double tol = 1e-9);

// w^{S \ {i1,i2}}_j from the three first-order neighbours.
double second_order_workload_recursion(const SetSystem& sys,
                                       const WorkloadOracle& oracle, Subset s,
                                       std::size_t i1, std::size_t i2,
                                       std::size_t j);

}  // namespace rbindex
