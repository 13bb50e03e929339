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
#include <vector>

#include <Eigen/Dense>

#include "rbindex/adaptive_greedy.hpp"
#include "rbindex/set_system.hpp"

namespace rbindex {

// Finite two-action restless bandit. States not listed as controllable must
// have identical passive/active rows and costs; they are always active.
// beta = 1 is accepted for average-criterion use only.
class RBModel {
 public:
  RBModel(Eigen::MatrixXd p0, Eigen::MatrixXd p1, Eigen::VectorXd h0,
          Eigen::VectorXd h1, Eigen::VectorXd theta1, double beta,
          std::vector<std::size_t> controllable);

  std::size_t n_states() const { return static_cast<std::size_t>(p0_.rows()); }
  const std::vector<std::size_t>& controllable() const { return ctrl_; }
  std::size_t n_controllable() const { return ctrl_.size(); }
  bool is_controllable(std::size_t i) const { return position_[i] >= 0; }
  // Position of state i among the controllable states, or -1.
  int position(std::size_t i) const { return position_[i]; }

  const Eigen::MatrixXd& p0() const { return p0_; }
  const Eigen::MatrixXd& p1() const { return p1_; }
  const Eigen::VectorXd& h0() const { return h0_; }
  const Eigen::VectorXd& h1() const { return h1_; }
  const Eigen::VectorXd& theta1() const { return theta1_; }
  double beta() const { return beta_; }

  // Maps a subset of controllable positions to a subset of states and back.
  // Both need n_states <= 63.
  Subset to_states(Subset positions) const;
  Subset to_positions(Subset states) const;
  Subset controllable_states() const;

  void require_discounted() const;

 private:
  Eigen::MatrixXd p0_, p1_;
  Eigen::VectorXd h0_, h1_, theta1_;
  double beta_;
  std::vector<std::size_t> ctrl_;
  std::vector<int> position_;
};

// Stationary policy: probability of the active action in each state.
using Policy = std::vector<double>;

// Active on S (a set of controllable states) and on every uncontrollable state.
Policy s_active_policy(const RBModel& m, Subset s);

Eigen::VectorXd activity_measure(const RBModel& m, const Policy& u);
Eigen::VectorXd activity_measure(const RBModel& m, Subset s);
Eigen::VectorXd cost_measure(const RBModel& m, const Policy& u);
Eigen::VectorXd cost_measure(const RBModel& m, Subset s);

struct Occupation {
  Eigen::VectorXd x0, x1;
  double residual = 0.0;
};
Occupation occupation_measures(const RBModel& m, const Policy& u,
                               std::size_t i);

Eigen::VectorXd marginal_workload(const RBModel& m, Subset s);
Eigen::VectorXd marginal_cost(const RBModel& m, Subset s);
Eigen::VectorXd normalized_passive_cost(const RBModel& m);

struct MeasureTables {
  Subset set = 0;
  Eigen::VectorXd b, v, w, c;
};
MeasureTables measure_tables(const RBModel& m, Subset s);

enum class Criterion { kDiscounted, kAverage };

struct PCLReport {
  Criterion criterion = Criterion::kDiscounted;
  bool workloads_positive = false;
  // First violation found when workloads_positive is false.
  Subset bad_set = 0;
  std::size_t bad_state = 0;
  double bad_workload = 0.0;
  std::optional<AGOutput> ag;  // run on the normalized passive cost
  bool admissible = false;
  bool pcl_indexable = false;
  std::vector<double> nu_by_state;  // NaN at uncontrollable states
  std::vector<double> cost;         // AG input over controllable positions
  std::string message;

  // Chain of active state sets S_1, ..., S_n, S_{n+1} = {}.
  std::vector<Subset> state_chain(const RBModel& m) const;
};

// sys is a family over controllable positions 0..n_controllable-1.
PCLReport pcl_index(const RBModel& m, const SetSystem& sys,
                    Criterion criterion = Criterion::kDiscounted);

struct ValueSegment {
  double nu_lo, nu_hi;  // infinite at the ends
  Subset active;        // states
  double intercept;     // v_i^{S_k}
  double slope;         // b_i^{S_k}
};
std::vector<ValueSegment> value_breakpoints(const RBModel& m,
                                            const SetSystem& sys,
                                            std::size_t i);
double evaluate_value(const std::vector<ValueSegment>& segs, double nu);

Residual verify_workload_decomposition(const RBModel& m, const Policy& u,
                                       Subset s, std::size_t i);
Residual verify_cost_decomposition(const RBModel& m, const Policy& u,
                                   Subset s, std::size_t i);

struct DMRReport {
  bool strict_activity = true;     // part (a)
  bool ratio_identity = true;      // part (b) first identity
  bool min_identity = true;        // part (b) min over removals
  bool max_identity = true;        // part (b) max over additions
  bool diminishing = true;         // part (c)
  std::vector<double> activity;    // b^{S_1} ... b^{S_{n+1}}
  std::vector<double> cost;        // v^{S_1} ... v^{S_{n+1}}
  std::vector<double> rates;       // (v^{S_{k+1}} - v^{S_k}) / (b^{S_k} - b^{S_{k+1}})
  double worst_error = 0.0;
  bool all() const {
    return strict_activity && ratio_identity && min_identity &&
           max_identity && diminishing;
  }
};
// p defaults to uniform when empty.
DMRReport dmr_report(const RBModel& m, const SetSystem& sys,
                     std::vector<double> p = {}, double tol = 1e-9);

struct AverageLimits {
  double b_bar = 0.0, v_bar = 0.0;
  Eigen::VectorXd a, f;          // bias vectors, zero at ref_state
  Eigen::VectorXd w_bar, c_bar;  // zero at uncontrollable states
  std::size_t ref_state = 0;
};
AverageLimits average_limits(const RBModel& m, const Policy& u);
AverageLimits average_limits(const RBModel& m, Subset s);

bool is_communicating(const RBModel& m);
// Number of closed recurrent classes of the chain induced by u.
std::size_t recurrent_classes(const RBModel& m, const Policy& u);

struct ConstrainedSolution {
  std::size_t k = 0;         // 1-based segment: b^{S_{k+1}} <= t <= b^{S_k}
  Subset upper = 0;          // S_k (states)
  Subset lower = 0;          // S_{k+1} (states)
  std::size_t pivot = 0;     // state pi_k
  double mix = 0.0;          // weight p on the S_k policy
  bool deterministic = false;
  double value = 0.0;        // (1-p) v^{S_{k+1}} + p v^{S_k}
  // nu_{pi_k}; the value decreases in t at this rate on the segment.
  double marginal_rate = 0.0;
  // Probability of activity at pi_k for the single-state randomized policy
  // whose average activity equals t, and its average cost.
  double state_probability = 0.0;
  double randomized_value = 0.0;
};
ConstrainedSolution constrained_policy(const RBModel& m, const SetSystem& sys,
                                       double t);

}  // namespace rbindex
