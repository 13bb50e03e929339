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

// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbindex/adaptive_greedy.hpp"
#include "rbindex/admission_control.hpp"
#include "rbindex/commands.hpp"
#include "rbindex/dp_oracle.hpp"
#include "rbindex/error.hpp"
#include "rbindex/policy_sim.hpp"
#include "rbindex/restless_bandit.hpp"
#include "rbindex/set_system.hpp"
#include "support.hpp"

using namespace rbindex;
using testsupport::pick;
using testsupport::rel;
using testsupport::uniform;

namespace {

constexpr double kFairChargeTol = 1e-8;
constexpr double kClosedFormTol = 1e-9;  // relative to max(1, |nu|)
constexpr double kAgTol = 1e-10;
constexpr double kLpTol = 1e-9;
constexpr double kDecompTol = 1e-9;
constexpr double kDmrTol = 1e-9;
constexpr double kTauberTol = 1e-4;
constexpr double kTauberBeta = 1.0 - 1e-6;
constexpr double kSlopeTol = 1e-8;
constexpr double kSimSe = 3.0;
constexpr double kSwitchRel = 0.10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

RBModel with_beta(const RBModel& m, double beta) {
  return RBModel(m.p0(), m.p1(), m.h0(), m.h1(), m.theta1(), beta, m.controllable());
}

Eigen::VectorXd stationary(const RBModel& m, const Policy& u) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.n_states());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = u[static_cast<std::size_t>(i)];
    p.row(i) = (1.0 - a) * m.p0().row(i) + a * m.p1().row(i);
  }
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int k = 0; k < 20000; ++k) x = x * p;
  return x.transpose();
}

// Long-run activity and cost rates of u from the stationary law.
std::pair<double, double> average_rates(const RBModel& m, const Policy& u) {
  const Eigen::VectorXd pi = stationary(m, u);
  double b = 0.0, v = 0.0;
  for (std::size_t i = 0; i < m.n_states(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    b += pi[ii] * u[i] * m.theta1()[ii];
    v += pi[ii] * ((1.0 - u[i]) * m.h0()[ii] + u[i] * m.h1()[ii]);
  }
  return {b, v};
}

std::size_t single_element(Subset s) {
  std::size_t j = 0;
  while (!contains(s, j)) ++j;
  return j;
}

// 1. Fair charges of the canned counterexample with unit activity.
Outcome criterion_counterexample() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto ce = whittle_counterexample();
  const RBModel m = uniformize(ce.model, ActivityMeasure::kShutTime);
  std::vector<double> nu;
  for (std::size_t j = 0; j < 3; ++j) nu.push_back(fair_charge(m, j).nu);
  const auto report = cmd_counterexample();
  const double elapsed = seconds_since(t0);

  const double expected[3] = {11022.0 / 19111.0, 3300.0 / 6767.0, 0.0};
  double worst = 0.0;
  for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(nu[j] - expected[j]));
  o.require(std::abs(m.beta() - 0.99) <= 1e-15, "beta is not 99/100");
  o.require(std::abs(ce.model.uniformization_rate() - 3.0) <= 1e-15, "Lambda is not 3");
  o.require(worst <= kFairChargeTol, "fair charge off by " + std::to_string(worst));
  // Value-iteration critical charges as a second opinion.
  for (std::size_t j = 0; j < 3; ++j) {
    o.require(std::abs(testsupport::vi_index(m, j, 5000) - expected[j]) <= 1e-7,
              "value iteration disagrees at state " + std::to_string(j));
  }
  o.require(report.results.value("threshold_consistent", true) == false,
            "ordering not reported as inconsistent with threshold policies");
  o.require(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "nu = (%.12f, %.12f, %.1g), worst error %.2e, ordering inconsistent, %.3f s",
                nu[0], nu[1], nu[2], worst, elapsed);
  if (o.pass) o.detail = buf;
  return o;
}

// 2. Closed-form indices against the recursion and a direct double sum.
Outcome criterion_closed_forms() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::size_t n = 32;
  double worst = 0.0;
  std::size_t checked = 0;
  for (double rho : {0.5, 0.9, 1.1, 2.0, 1.0}) {
    for (int power : {1, 2}) {
      ClosedFormParams p;
      p.mu = 1.5;
      p.lambda = rho * p.mu;
      p.h = 0.8;
      std::vector<double> h(n + 1), dh(n);
      for (std::size_t i = 0; i <= n; ++i) h[i] = p.h * std::pow(static_cast<double>(i), power);
      for (std::size_t i = 1; i <= n; ++i) dh[i - 1] = h[i] - h[i - 1];
      ClosedFormParams g = p;
      g.delta_h = dh;
      const auto m = ACModel::make(std::vector<double>(n + 1, p.lambda),
                                   std::vector<double>(n, p.mu), h, 0.0);
      const auto rec = average_indices(m);
      const auto kind = power == 1 ? ClosedFormKind::kLinear : ClosedFormKind::kQuadratic;
      for (std::size_t j = 0; j <= 30; ++j) {
        // nu_j = (1/mu) sum_{i=1}^{j+1} dh_i (1 + rho + ... + rho^{i-1}).
        double direct = 0.0, geo = 0.0, pw = 1.0;
        for (std::size_t i = 1; i <= j + 1; ++i) {
          geo += pw;
          pw *= rho;
          direct += dh[i - 1] * geo;
        }
        direct /= p.mu;
        const double scale = std::max(1.0, std::abs(direct));
        for (double v : {closed_form_index(kind, p, j),
                         closed_form_index(ClosedFormKind::kGeneralSum, g, j), rec[j]}) {
          const double e = std::abs(v - direct) / scale;
          worst = std::max(worst, e);
          ++checked;
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= kClosedFormTol, "relative error " + std::to_string(worst));
  o.require(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu values, worst relative error %.2e, %.3f s", checked, worst,
                elapsed);
  if (o.pass) o.detail = buf;
  return o;
}

// 3. The two adaptive-greedy variants agree.
Outcome criterion_ag_equivalence() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::size_t instances = 0, admissible = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 150; ++rep) {
    const std::size_t n = pick(rng, 1, 6);
    const auto sys = testsupport::random_family(rng, n, pick(rng, 1, 4));
    const auto table = testsupport::random_workloads(rng, sys);
    const auto c = testsupport::random_costs(rng, n);
    const auto a = ag1(c, table.oracle(), sys);
    const auto b = ag2(c, table.oracle(), sys);
    ++instances;
    admissible += a.admissible ? 1 : 0;
    o.require(a.admissible == b.admissible, "admissibility differs");
    o.require(a.pi == b.pi, "pi differs");
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, rel(a.nu[j], b.nu[j]));
  }
  o.require(worst <= kAgTol, "nu differs by " + std::to_string(worst));
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu instances (%zu admissible), identical pi, worst nu gap %.2e",
                instances, admissible, worst);
  if (o.pass) o.detail = buf;
  return o;
}

// Minimum of c.x over all full F-strings, by depth-first removal from the
// ground set; x solves the triangular vertex system.
double enumerate_lp(const std::vector<double>& c, const testsupport::TableOracle& t,
                    const SetSystem& sys, std::size_t* strings) {
  const std::size_t n = sys.ground_size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pi;
  std::function<void(Subset)> dfs = [&](Subset s) {
    if (s == 0) {
      ++*strings;
      std::vector<double> x(n, 0.0);
      Subset tail = 0;
      for (std::size_t k = n; k-- > 0;) {
        const Subset sk = with(tail, pi[k]);
        double r = t.b.at(sk);
        for (std::size_t j : elements(tail)) r -= t.w.at({sk, j}) * x[j];
        x[pi[k]] = r / t.w.at({sk, pi[k]});
        tail = sk;
      }
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c[j] * x[j];
      best = std::min(best, v);
      return;
    }
    for (std::size_t j : elements(s)) {
      const Subset next = without(s, j);
      if (next != 0 && !sys.contains_set(next)) continue;
      pi.push_back(j);
      dfs(next);
      pi.pop_back();
    }
  };
  dfs(sys.ground());
  return best;
}

// 4. Adaptive greedy attains the LP minimum, with strong duality.
Outcome criterion_lp() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::size_t seen = 0, strings = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 2000 && seen < 60; ++rep) {
    const std::size_t n = pick(rng, 2, 7);
    const auto sys = rep % 4 == 0 ? powerset_family(n)
                                  : testsupport::random_family(rng, n, pick(rng, 2, 12));
    const auto table = testsupport::random_polymatroid(rng, sys);
    const auto oracle = table.oracle();
    const auto c = testsupport::random_costs(rng, n);
    const auto out = ag2(c, oracle, sys);
    if (!out.admissible) continue;
    ++seen;
    const double primal = lp_value(out, oracle);
    const double best = enumerate_lp(c, table, sys, &strings);
    const double lib_best = brute_force_lp(c, oracle, sys).value;
    // Dual y^{S_k} = nu_{pi_k} - nu_{pi_{k-1}} on the AG chain.
    const auto along = out.nu_along_pi();
    double dual = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double y = along[k] - (k == 0 ? 0.0 : along[k - 1]);
      dual += y * table.b.at(out.chain[k]);
    }
    const auto ds = dual_solution(out);
    worst = std::max({worst, rel(primal, best), rel(primal, lib_best), rel(primal, dual),
                      rel(primal, dual_objective(ds, oracle)),
                      dual_feasibility_violation(ds, c, oracle, sys)});
  }
  o.require(seen >= 50, "only " + std::to_string(seen) + " admissible instances");
  o.require(worst <= kLpTol, "gap " + std::to_string(worst));
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zu admissible instances, %zu F-strings enumerated, worst primal/dual gap %.2e",
                seen, strings, worst);
  if (o.pass) o.detail = buf;
  return o;
}

// Action gaps Q1 - Q0 at every state for charge nu, by value iteration.
Eigen::VectorXd vi_gaps(const RBModel& m, double nu, int iters) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.n_states());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n), q0(n), q1(n);
  for (int it = 0; it < iters; ++it) {
    q0 = m.h0() + m.beta() * m.p0() * v;
    q1 = m.h1() + nu * m.theta1() + m.beta() * m.p1() * v;
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = m.is_controllable(static_cast<std::size_t>(i)) ? std::min(q0[i], q1[i]) : q1[i];
    }
  }
  return q1 - q0;
}

// 5. PCL indices and DP-optimal active sets agree on admission instances.
Outcome criterion_crosscheck() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::size_t instances = 0, points = 0, vi_points = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = pick(rng, 1, 8);
    const double alpha = rep % 2 ? 0.5 : 0.01;
    const auto ac = testsupport::random_compliant_admission(rng, n, alpha);
    const RBModel m = uniformize(ac);
    const auto pcl = pcl_index(m, threshold_family(n));
    o.require(pcl.pcl_indexable, "instance not PCL-indexable");
    if (!pcl.pcl_indexable) continue;
    const auto rep_ = crosscheck_indices(m, pcl);
    ++instances;
    o.require(rep_.agree, "crosscheck mismatch: " + rep_.diff);
    for (const auto& g : rep_.points) {
      if (!g.strict) continue;
      ++points;
      o.require(g.got == g.expected, "strict grid point differs");
      if (alpha < 0.1) continue;
      // Value iteration as a second opinion off the breakpoints.
      const Eigen::VectorXd gap = vi_gaps(m, g.nu, 3000);
      Subset active = 0;
      for (std::size_t j : m.controllable()) {
        if (gap[static_cast<Eigen::Index>(j)] < 0.0) active = with(active, j);
      }
      ++vi_points;
      o.require(active == (g.expected & m.controllable_states()),
                "value iteration active set differs");
    }
  }
  o.require(instances >= 25, "only " + std::to_string(instances) + " instances");
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zu instances, %zu off-breakpoint grid points agree (%zu also by value iteration)",
                instances, points, vi_points);
  if (o.pass) o.detail = buf;
  return o;
}

// 6. Workload and cost decomposition laws.
Outcome criterion_decomposition() {
  Outcome o;
  std::mt19937_64 rng(6);
  double worst = 0.0, worst_oracle = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = pick(rng, 1, 8);
    const auto m = testsupport::random_rb(rng, n, uniform(rng, 0.3, 0.95), pick(rng, 0, n - 1));
    const Policy u = testsupport::random_policy(rng, m);
    const Subset s = testsupport::random_subset(rng, m.controllable_states());
    const std::size_t i = pick(rng, 0, n - 1);
    const auto rw = verify_workload_decomposition(m, u, s, i);
    const auto rc = verify_cost_decomposition(m, u, s, i);
    worst = std::max({worst, rw.residual / rw.scale, rc.residual / rc.scale});

    // Same identities from fixed-point iterates and one-step differences.
    const auto nn = static_cast<Eigen::Index>(n);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(nn);
    const Policy us = s_active_policy(m, s);
    const auto bu = testsupport::iterate_policy(m, u, zero, m.theta1(), 3000);
    const auto vu = testsupport::iterate_policy(m, u, m.h0(), m.h1(), 3000);
    const auto bs = testsupport::iterate_policy(m, us, zero, m.theta1(), 3000);
    const auto vs = testsupport::iterate_policy(m, us, m.h0(), m.h1(), 3000);
    Eigen::MatrixXd pu(nn, nn);
    for (Eigen::Index k = 0; k < nn; ++k) {
      const double a = u[static_cast<std::size_t>(k)];
      pu.row(k) = (1.0 - a) * m.p0().row(k) + a * m.p1().row(k);
    }
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(nn), e = x;
    e[static_cast<Eigen::Index>(i)] = 1.0;
    for (int k = 0; k < 3000; ++k) x = e + m.beta() * x * pu;
    const auto ii = static_cast<Eigen::Index>(i);
    double wl = bu[ii], wr = bs[ii], cl = vs[ii], cr = vu[ii], scale = 1.0;
    for (std::size_t j : m.controllable()) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double w = m.theta1()[jj] + m.beta() * (m.p1().row(jj) - m.p0().row(jj)).dot(bs);
      const double c = m.h0()[jj] - m.h1()[jj] + m.beta() * (m.p0().row(jj) - m.p1().row(jj)).dot(vs);
      const double x1 = x[jj] * u[j], x0 = x[jj] * (1.0 - u[j]);
      if (contains(s, j)) {
        wl += w * x0;
        cl += c * x0;
      } else {
        wr += w * x1;
        cr += c * x1;
      }
      scale += std::abs(w) * x[jj] + std::abs(c) * x[jj];
    }
    scale += std::abs(bu[ii]) + std::abs(vu[ii]);
    worst_oracle = std::max({worst_oracle, std::abs(wl - wr) / scale, std::abs(cl - cr) / scale});
  }
  o.require(worst <= kDecompTol, "library residual " + std::to_string(worst));
  o.require(worst_oracle <= kDecompTol, "iterated residual " + std::to_string(worst_oracle));
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 triples with randomized policies, worst residual %.2e (iterated %.2e)", worst,
                worst_oracle);
  if (o.pass) o.detail = buf;
  return o;
}

// 7. Workload lattice and positive nondecreasing workloads on the threshold chain.
Outcome criterion_lattice() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::size_t inequalities = 0, zero_alpha = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = pick(rng, 2, 8);
    const double alpha = rep % 2 ? 0.0 : uniform(rng, 0.01, 1.0);
    zero_alpha += alpha == 0.0 ? 1 : 0;
    const auto ac = testsupport::random_compliant_admission(rng, n, alpha);
    const auto w = workload_table(ac);
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        o.require(w[k][i] > 0.0, "nonpositive workload");
        ++inequalities;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        // Rows k, k+1 are S_{k+1} = {k..n-1} and its successor.
        o.require(i >= k ? w[k][i] > w[k + 1][i] : w[k + 1][i] > w[k][i],
                  "lattice inequality fails");
        ++inequalities;
      }
    }
    const auto a = ak_coefficients(ac);
    o.require(a[0] == 1.0, "a_1 != 1");
    for (std::size_t k = 2; k <= n; ++k) {
      o.require(a[k - 1] > (alpha + ac.mu[k]) / (alpha + ac.lambda[k - 1] + ac.mu[k]) &&
                    a[k - 1] <= 1.0,
                "a_k out of range");
      ++inequalities;
    }
    if (alpha > 0.0) {
      // Nondecreasing workloads make the max characterization hold.
      const auto pcl = pcl_index(uniformize(ac), threshold_family(n));
      o.require(pcl.pcl_indexable && pcl.ag.has_value(), "not PCL-indexable");
      if (pcl.ag) {
        const auto mm = local_minmax_check(*pcl.ag, true);
        o.require(mm.min_ok && mm.max_ok && mm.rate_chain_ok, "min/max characterization fails");
      }
    }
  }
  o.require(zero_alpha > 0, "no zero-discount instance");
  char buf[160];
  std::snprintf(buf, sizeof buf, "40 instances (%zu at alpha = 0), %zu strict inequalities hold",
                zero_alpha, inequalities);
  if (o.pass) o.detail = buf;
  return o;
}

// 8. Diminishing marginal returns with a uniform initial distribution.
Outcome criterion_dmr() {
  Outcome o;
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = pick(rng, 1, 7);
    const auto ac = testsupport::random_compliant_admission(rng, n, uniform(rng, 0.2, 1.0));
    const RBModel m = uniformize(ac);
    const auto sys = threshold_family(n);
    const auto r = dmr_report(m, sys, {}, kDmrTol);
    const auto pcl = pcl_index(m, sys);
    o.require(r.all(), "dmr report fails");
    worst = std::max(worst, r.worst_error);
    for (std::size_t k = 1; k < r.rates.size(); ++k) {
      o.require(r.rates[k] >= r.rates[k - 1] - kDmrTol, "marginal rates decrease");
    }
    // Rates from iterated measures equal the indices along the chain.
    const auto chain = pcl.state_chain(m);
    const auto ns = static_cast<Eigen::Index>(m.n_states());
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ns);
    std::vector<double> b, v;
    for (Subset s : chain) {
      const Policy u = s_active_policy(m, s);
      b.push_back(testsupport::iterate_policy(m, u, zero, m.theta1(), 4000).mean());
      v.push_back(testsupport::iterate_policy(m, u, m.h0(), m.h1(), 4000).mean());
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      o.require(b[k] > b[k + 1], "activity not strictly decreasing along the chain");
      const double rate = (v[k + 1] - v[k]) / (b[k] - b[k + 1]);
      const double nu = pcl.nu_by_state[single_element(chain[k] & ~chain[k + 1])];
      worst = std::max(worst, rel(rate, nu));
    }
  }
  o.require(worst <= kDmrTol, "error " + std::to_string(worst));
  char buf[160];
  std::snprintf(buf, sizeof buf, "20 compliant instances, rates equal indices, worst error %.2e",
                worst);
  if (o.pass) o.detail = buf;
  return o;
}

// 9. Discounted measures approach the average-criterion ones.
Outcome criterion_tauberian() {
  Outcome o;
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = pick(rng, 2, 7);
    const auto avg = testsupport::random_rb(rng, n, 1.0, pick(rng, 0, n - 1));
    const auto disc = with_beta(avg, kTauberBeta);
    const Subset s = testsupport::random_subset(rng, avg.controllable_states());
    const auto lim = average_limits(avg, s);
    const auto t = measure_tables(disc, s);
    const auto [b_bar, v_bar] = average_rates(avg, s_active_policy(avg, s));
    worst = std::max({worst, std::abs(lim.b_bar - b_bar), std::abs(lim.v_bar - v_bar)});
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      worst = std::max({worst, std::abs((1.0 - kTauberBeta) * t.b[ii] - lim.b_bar),
                        std::abs((1.0 - kTauberBeta) * t.v[ii] - lim.v_bar),
                        std::abs(t.w[ii] - lim.w_bar[ii]), std::abs(t.c[ii] - lim.c_bar[ii])});
    }
  }
  o.require(worst <= kTauberTol, "gap " + std::to_string(worst));
  char buf[160];
  std::snprintf(buf, sizeof buf, "20 models at beta = 1 - 1e-6, worst gap %.2e", worst);
  if (o.pass) o.detail = buf;
  return o;
}

// 10. Constrained average cost is piecewise linear in the activity target.
Outcome criterion_constrained() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::size_t seen = 0, segments = 0;
  double worst = 0.0, worst_chord = 0.0;
  for (int rep = 0; rep < 80 && seen < 10; ++rep) {
    const std::size_t n = pick(rng, 2, 6);
    const auto m = testsupport::random_rb(rng, n, 1.0);
    const auto sys = powerset_family(n);
    const auto pcl = pcl_index(m, sys, Criterion::kAverage);
    if (!pcl.pcl_indexable) continue;
    ++seen;
    const auto chain = pcl.state_chain(m);
    std::vector<double> bk, vk;
    for (Subset s : chain) {
      const auto r = average_rates(m, s_active_policy(m, s));
      bk.push_back(r.first);
      vk.push_back(r.second);
    }
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      const double nu = pcl.nu_by_state[single_element(chain[k] & ~chain[k + 1])];
      const double width = bk[k] - bk[k + 1];
      if (width < 1e-3) continue;
      ++segments;
      const double ta = bk[k + 1] + 0.25 * width, tb = bk[k + 1] + 0.75 * width;
      const double va = constrained_policy(m, sys, ta).value;
      const double vb = constrained_policy(m, sys, tb).value;
      const double scale = std::max(1.0, std::abs(nu));
      worst = std::max(worst, std::abs((vb - va) / (tb - ta) + nu) / scale);
      worst_chord = std::max(worst_chord, std::abs((vk[k] - vk[k + 1]) / width + nu) / scale);
    }
    // Convexity on a uniform grid.
    const double lo = bk.back(), hi = bk.front();
    std::vector<double> vs;
    for (int g = 0; g <= 60; ++g) vs.push_back(constrained_policy(m, sys, lo + (hi - lo) * g / 60.0).value);
    for (std::size_t g = 1; g + 1 < vs.size(); ++g) {
      o.require(vs[g] <= 0.5 * (vs[g - 1] + vs[g + 1]) + 1e-9, "value not convex in t");
    }
  }
  o.require(seen >= 5, "only " + std::to_string(seen) + " indexable models");
  o.require(worst <= kSlopeTol, "slope error " + std::to_string(worst));
  o.require(worst_chord <= 1e-7, "chord slope error " + std::to_string(worst_chord));
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu models, %zu segments: convex in t, slope = -nu to %.2e (stationary chords %.2e)",
                seen, segments, worst, worst_chord);
  if (o.pass) o.detail = buf;
  return o;
}

// Birth-death long-run cost of a reject-set policy on one queue.
double birth_death_cost(const RoutingSystem& sys, Subset reject) {
  const auto& q = sys.queues[0];
  std::vector<double> pi(q.n + 1, 0.0);
  pi[0] = 1.0;
  for (std::size_t j = 1; j <= q.n; ++j) {
    pi[j] = contains(reject, j - 1) ? 0.0 : pi[j - 1] * sys.lambda / q.mu[j];
  }
  double z = 0.0, cost = 0.0;
  for (double p : pi) z += p;
  for (std::size_t j = 0; j <= q.n; ++j) {
    const bool rejects = j == q.n || contains(reject, j);
    cost += pi[j] / z * (q.h[j] + (rejects ? sys.nu * sys.lambda : 0.0));
  }
  return cost;
}

// 11. Simulation of the index threshold and the routing switching curve.
Outcome criterion_simulation() {
  Outcome o;
  const auto t0 = Clock::now();
  RoutingSystem one;
  one.lambda = 0.9;
  one.nu = 10.0;
  one.queues.push_back(constant_queue(20, 1.0, 1.0, CostShape::kLinear));
  const auto idx = routing_index_table(one)[0];
  Subset reject = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (!(idx[j] < one.nu)) reject = with(reject, j);
  }
  const double exact = analytic_average_cost(one, reject);
  o.require(rel(exact, birth_death_cost(one, reject)) <= 1e-9, "analytic cost disagrees");
  SimConfig cfg;
  cfg.events = 100000;
  cfg.replications = 20;
  cfg.seed = 11;
  const auto est = simulate(one, index_routing_policy(one), cfg, "index");
  const double z = std::abs(est.mean - exact) / est.se;
  o.require(z <= kSimSe, "simulation off by " + std::to_string(z) + " SE");

  RoutingSystem two;
  two.lambda = 4.0;
  two.queues.push_back(constant_queue(400, 1.0, 1.0, CostShape::kLinear, true));
  two.queues.push_back(constant_queue(400, 2.0, 1.0, CostShape::kLinear, true));
  const auto sc = switching_curve(two, 200, 50);
  const double target = std::log(4.0) / std::log(2.0);
  const double err = std::abs(sc.empirical_slope - target) / target;
  o.require(!sc.truncated && sc.heavy_traffic, "switching curve incomplete");
  o.require(err <= kSwitchRel, "slope error " + std::to_string(err));
  // Boundary from the linear closed form nu_j = (rho^{j+2} - 1)/(rho - 1)^2 - (j+2)/(rho - 1), over mu.
  auto linear_index = [](double rho, double mu, std::size_t j) {
    const double jj = static_cast<double>(j);
    return ((std::pow(rho, jj + 2.0) - 1.0) / ((rho - 1.0) * (rho - 1.0)) - (jj + 2.0) / (rho - 1.0)) / mu;
  };
  std::size_t off = 0;
  for (std::size_t k = 0; k < sc.j1.size(); ++k) {
    const double v1 = linear_index(4.0, 1.0, sc.j1[k]);
    std::size_t j2 = 0;
    while (linear_index(2.0, 2.0, j2) < v1) ++j2;
    if (j2 != sc.j2[k] && rel(linear_index(2.0, 2.0, j2), v1) > 1e-12) ++off;
  }
  o.require(off == 0, std::to_string(off) + " boundary points differ");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "queue: %.5f vs analytic %.5f (%.2f SE, %llu events x %zu reps); "
                "switching slope %.4f vs %.4f (%.1f%%); %.2f s",
                est.mean, exact, z, static_cast<unsigned long long>(cfg.events),
                cfg.replications, sc.empirical_slope, target, 100.0 * err, elapsed);
  if (o.pass) o.detail = buf;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"counterexample fair charges", criterion_counterexample},
      {"closed forms vs recursion", criterion_closed_forms},
      {"AG1 and AG2 agree", criterion_ag_equivalence},
      {"LP optimality and duality", criterion_lp},
      {"PCL indices vs DP", criterion_crosscheck},
      {"decomposition laws", criterion_decomposition},
      {"workload lattice", criterion_lattice},
      {"diminishing marginal returns", criterion_dmr},
      {"Tauberian limits", criterion_tauberian},
      {"constrained control", criterion_constrained},
      {"simulation sanity", criterion_simulation},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
