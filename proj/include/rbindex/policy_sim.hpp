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
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rbindex/admission_control.hpp"

namespace rbindex {

// One queue of a routing system. mu[0] = 0 and mu[j] is the service rate
// with j customers present; h[j] is the holding-cost rate. Infinite buffers
// are truncated at n and boundary visits are counted.
struct QueueSpec {
  std::size_t n = 0;
  std::vector<double> mu;  // n + 1 entries
  std::vector<double> h;   // n + 1 entries
  bool infinite = false;
};

enum class CostShape { kLinear, kQuadratic };
QueueSpec constant_queue(std::size_t n, double mu, double h, CostShape shape,
                         bool infinite = false);

struct RoutingSystem {
  double lambda = 1.0;
  std::vector<QueueSpec> queues;
  double alpha = 0.0;
  double nu = std::numeric_limits<double>::infinity();  // rejection charge
  void check() const;
};

// Queue k seen as an admission-control project fed at the global rate.
ACModel queue_admission_model(const RoutingSystem& sys, std::size_t k);
AssumptionReport validate_queue(const RoutingSystem& sys, std::size_t k);

// Products of a make-to-stock system. lambda[j], mu[j], c[j], r[j] are the
// order rate, production rate, stock cost rate and price at stock level j.
struct ProductSpec {
  std::size_t n = 0;
  std::vector<double> lambda;  // n + 1 entries
  std::vector<double> mu;      // n + 1 entries (mu[n] unused)
  std::vector<double> c;       // n + 1 entries
  double s = 0.0;              // stockout cost per lost order
  std::vector<double> r;       // n + 1 entries (r[0] unused)
  bool infinite = false;
  double net_cost(std::size_t j) const;
};

ProductSpec constant_product(std::size_t n, double lambda, double mu,
                             double c, double s, double r, CostShape shape,
                             bool infinite = false);

struct MTSSystem {
  std::vector<ProductSpec> products;
  double alpha = 0.0;
  double nu = 0.0;  // production subsidy per completed item
  void check() const;
};

// Product k as an admission project with production and order rates swapped.
ACModel product_admission_model(const MTSSystem& sys, std::size_t k);
AssumptionReport validate_product(const MTSSystem& sys, std::size_t k);

double routing_index(const RoutingSystem& sys, std::size_t k, std::size_t j);
std::vector<std::vector<double>> routing_index_table(const RoutingSystem& sys);
double mts_index(const MTSSystem& sys, std::size_t k, std::size_t j);
std::vector<std::vector<double>> mts_index_table(const MTSSystem& sys);

// Decision for a state vector: a queue/product index, or -1 to reject/idle.
using Decider = std::function<int(const std::vector<std::size_t>&)>;

// Smallest index below nu among nonfull components; ties to the lowest k.
int index_decide(const std::vector<std::vector<double>>& table,
                 const std::vector<std::size_t>& sizes,
                 const std::vector<std::size_t>& state, double nu);
int routing_decide(const RoutingSystem& sys,
                   const std::vector<std::size_t>& state, double nu);
int mts_decide(const MTSSystem& sys, const std::vector<std::size_t>& state,
               double nu);

Decider index_routing_policy(const RoutingSystem& sys);
Decider shortest_queue_policy(const RoutingSystem& sys);
// Heuristic index h_k(j+1) / mu_k(j+1) with the same threshold rule.
Decider naive_routing_policy(const RoutingSystem& sys);
// Admit to queue k iff its state is outside the reject set (single queue).
Decider threshold_policy(const RoutingSystem& sys, std::uint64_t reject_states);
Decider index_mts_policy(const MTSSystem& sys);
Decider least_stock_policy(const MTSSystem& sys);

struct SimConfig {
  double horizon = 0.0;       // time budget; used when events == 0
  std::uint64_t events = 0;   // event budget per replication
  std::size_t replications = 20;
  std::uint64_t seed = 1;
  double warmup_fraction = 0.1;  // average criterion only
  std::size_t threads = 0;       // 0: RBINDEX_THREADS or hardware
};

struct PolicyEstimate {
  std::string policy;
  double mean = 0.0;
  double se = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  double half_width = 0.0;
  std::uint64_t events = 0;
  std::size_t replications = 0;
  double boundary_fraction = 0.0;
  bool boundary_flag = false;
  std::vector<double> samples;
};

struct SimReport {
  std::string criterion;  // "discounted" or "average"
  std::uint64_t seed = 0;
  std::vector<PolicyEstimate> policies;
};

PolicyEstimate simulate(const RoutingSystem& sys, const Decider& policy,
                        const SimConfig& cfg, const std::string& name = "");
PolicyEstimate simulate(const MTSSystem& sys, const Decider& policy,
                        const SimConfig& cfg, const std::string& name = "");

// Long-run average cost per unit time of a reject-set policy on one queue,
// from the uniformized model.
double analytic_average_cost(const RoutingSystem& sys,
                             std::uint64_t reject_states);

struct SwitchingCurve {
  std::vector<std::size_t> j1;
  std::vector<std::size_t> j2;  // smallest j2 with nu_1(j1) <= nu_2(j2)
  bool heavy_traffic = false;
  double empirical_slope = 0.0;
  double limit_slope = 0.0;  // ln rho_1 / ln rho_2
  std::size_t slope_from = 50;
  // Set when j2 outgrew the search cap and the scan stopped early.
  bool truncated = false;
};

SwitchingCurve switching_curve(const RoutingSystem& sys, std::size_t bound,
                               std::size_t slope_from = 50);

std::size_t default_threads();

}  // namespace rbindex
