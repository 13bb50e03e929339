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

#include "rbindex/adaptive_greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "rbindex/error.hpp"

namespace rbindex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_costs(const std::vector<double>& c, const SetSystem& sys) {
  if (c.size() != sys.ground_size()) {
    throw ArgumentError("cost vector length differs from ground size");
  }
  for (double v : c) {
    if (!std::isfinite(v)) throw ArgumentError("cost entries must be finite");
  }
}

Subset checked_boundary(const SetSystem& sys, Subset s) {
  Subset bd;
  try {
    bd = sys.inner_boundary(s);
  } catch (const MembershipError&) {
    throw StructuralError("chain set " + to_string(s) + " not in family");
  }
  if (bd == 0) {
    throw StructuralError("empty inner boundary at " + to_string(s));
  }
  return bd;
}

std::size_t pick(Subset boundary, const std::vector<double>& rate,
                 const AGOptions& opts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j : elements(boundary)) best = std::min(best, rate[j]);
  const double band = opts.tie_tol * std::max(1.0, std::abs(best));
  std::size_t chosen = 0;
  bool found = false;
  for (std::size_t j : elements(boundary)) {
    if (rate[j] <= best + band) {
      if (!found || opts.tie_break == TieBreak::kHighestIndex) chosen = j;
      found = true;
      if (opts.tie_break == TieBreak::kLowestIndex) break;
    }
  }
  return chosen;
}

void finish(AGOutput& out, const AGOptions& opts) {
  out.admissible =
      out.completed && is_nondecreasing(out.nu_along_pi(), opts.admissibility_tol);
}

}  // namespace

double WorkloadOracle::workload(Subset s, std::size_t j) const {
  if (!w) throw ArgumentError("workload oracle has no evaluator");
  const double v = w(s, j);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError("nonpositive workload w^" + to_string(s) + "_" +
                      std::to_string(j));
  }
  return v;
}

double WorkloadOracle::rhs(Subset s) const {
  if (!b) throw ArgumentError("workload oracle has no right-hand side");
  return b(s);
}

std::vector<double> AGOutput::nu_along_pi() const {
  std::vector<double> v;
  v.reserve(pi.size());
  for (std::size_t j : pi) v.push_back(nu[j]);
  return v;
}

bool is_nondecreasing(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[k - 1] - tol * std::max(1.0, std::abs(v[k]))) return false;
  }
  return true;
}

AGOutput ag1(const std::vector<double>& c, const WorkloadOracle& oracle,
             const SetSystem& sys, const AGOptions& opts) {
  check_costs(c, sys);
  const std::size_t n = sys.ground_size();
  AGOutput out;
  out.n = n;
  out.nu.assign(n, kNaN);
  Subset s = sys.ground();
  double nu_prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Subset bd = checked_boundary(sys, s);
    std::vector<double> wk(n, kNaN), rate(n, kNaN), red(n, kNaN);
    for (std::size_t j : elements(s)) {
      wk[j] = oracle.workload(s, j);
      double resid = c[j];
      for (std::size_t l = 0; l < k; ++l) {
        resid -= out.dual[l] * out.workloads[l][j];
      }
      rate[j] = (k == 0 ? 0.0 : nu_prev) + resid / wk[j];
      red[j] = rate[j] * wk[j];
    }
    const std::size_t p = pick(bd, rate, opts);
    const double y = rate[p] - (k == 0 ? 0.0 : nu_prev);
    out.chain.push_back(s);
    out.pi.push_back(p);
    out.dual.push_back(y);
    out.workloads.push_back(std::move(wk));
    out.rate_table.push_back(std::move(rate));
    out.reduced_costs.push_back(std::move(red));
    const double nu_k = (k == 0 ? y : nu_prev + y);
    out.nu[p] = nu_k;
    if (opts.early_exit && k > 0 &&
        nu_k < nu_prev - opts.admissibility_tol * std::max(1.0, std::abs(nu_k))) {
      out.completed = false;
      break;
    }
    nu_prev = nu_k;
    s = without(s, p);
  }
  finish(out, opts);
  return out;
}

AGOutput ag2(const std::vector<double>& c, const WorkloadOracle& oracle,
             const SetSystem& sys, const AGOptions& opts) {
  check_costs(c, sys);
  const std::size_t n = sys.ground_size();
  AGOutput out;
  out.n = n;
  out.nu.assign(n, kNaN);
  Subset s = sys.ground();
  std::vector<double> rate(n, kNaN), red(n, kNaN), wk(n, kNaN);
  for (std::size_t j : elements(s)) {
    wk[j] = oracle.workload(s, j);
    rate[j] = c[j] / wk[j];
    red[j] = c[j];
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const std::size_t prev = out.pi.back();
      const double nu_prev = out.rate_table.back()[prev];
      const double ratio = red[prev] / wk[prev];
      s = without(s, prev);
      std::vector<double> wn(n, kNaN), rn(n, kNaN), cn(n, kNaN);
      for (std::size_t j : elements(s)) {
        wn[j] = oracle.workload(s, j);
        rn[j] = rate[j] + (wk[j] / wn[j] - 1.0) * (rate[j] - nu_prev);
        cn[j] = red[j] - ratio * (wk[j] - wn[j]);
      }
      wk = std::move(wn);
      rate = std::move(rn);
      red = std::move(cn);
    }
    const Subset bd = checked_boundary(sys, s);
    const std::size_t p = pick(bd, rate, opts);
    out.chain.push_back(s);
    out.pi.push_back(p);
    out.nu[p] = rate[p];
    out.workloads.push_back(wk);
    out.rate_table.push_back(rate);
    out.reduced_costs.push_back(red);
    if (k > 0) {
      const double before = out.nu[out.pi[k - 1]];
      out.dual.push_back(rate[p] - before);
      if (opts.early_exit &&
          rate[p] < before - opts.admissibility_tol *
                                 std::max(1.0, std::abs(rate[p]))) {
        out.completed = false;
        break;
      }
    } else {
      out.dual.push_back(rate[p]);
    }
  }
  finish(out, opts);
  return out;
}

PrimalVertex primal_vertex(const std::vector<std::size_t>& pi,
                           const WorkloadOracle& oracle) {
  const std::size_t n = pi.size();
  const auto chain = SetSystem::chain_of(pi);
  std::size_t dim = 0;
  for (std::size_t j : pi) dim = std::max(dim, j + 1);
  PrimalVertex pv;
  pv.x.assign(dim, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const Subset s = chain[k];
    double acc = 0.0;
    for (std::size_t l = k + 1; l < n; ++l) {
      acc += oracle.workload(s, pi[l]) * pv.x[pi[l]];
    }
    pv.x[pi[k]] = (oracle.rhs(s) - acc) / oracle.workload(s, pi[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Subset s = chain[k];
    double lhs = 0.0, mag = 0.0;
    for (std::size_t l = k; l < n; ++l) {
      const double t = oracle.workload(s, pi[l]) * pv.x[pi[l]];
      lhs += t;
      mag += std::abs(t);
    }
    const double b = oracle.rhs(s);
    const double rel =
        std::abs(lhs - b) / std::max({1.0, std::abs(b), mag});
    pv.max_rel_residual = std::max(pv.max_rel_residual, rel);
  }
  return pv;
}

DualSolution dual_solution(const AGOutput& out) {
  DualSolution d;
  d.sets = out.chain;
  const auto nus = out.nu_along_pi();
  for (std::size_t k = 0; k < nus.size(); ++k) {
    d.y.push_back(k == 0 ? nus[0] : nus[k] - nus[k - 1]);
  }
  const auto& c = out.reduced_costs.front();
  for (std::size_t m = 0; m < nus.size(); ++m) {
    const std::size_t j = out.pi[m];
    double acc = 0.0;
    for (std::size_t l = 0; l <= m; ++l) acc += d.y[l] * out.workloads[l][j];
    d.max_reconstruction_error =
        std::max(d.max_reconstruction_error,
                 std::abs(acc - c[j]) / std::max(1.0, std::abs(c[j])));
  }
  return d;
}

double lp_value(const AGOutput& out, const WorkloadOracle& oracle) {
  const auto nus = out.nu_along_pi();
  double v = 0.0;
  for (std::size_t k = 0; k < nus.size(); ++k) {
    const double y = (k == 0 ? nus[0] : nus[k] - nus[k - 1]);
    v += y * oracle.rhs(out.chain[k]);
  }
  return v;
}

double dual_objective(const DualSolution& dual, const WorkloadOracle& oracle) {
  double v = 0.0;
  for (std::size_t k = 0; k < dual.y.size(); ++k) {
    v += dual.y[k] * oracle.rhs(dual.sets[k]);
  }
  return v;
}

double dual_feasibility_violation(const DualSolution& dual,
                                  const std::vector<double>& c,
                                  const WorkloadOracle& oracle,
                                  const SetSystem& sys) {
  std::unordered_map<Subset, double> y;
  for (std::size_t k = 0; k < dual.y.size(); ++k) y[dual.sets[k]] = dual.y[k];
  double worst = 0.0;
  for (Subset s : sys.members()) {
    auto it = y.find(s);
    if (it != y.end() && s != sys.ground()) {
      worst = std::max(worst, -it->second / std::max(1.0, std::abs(it->second)));
    }
  }
  for (std::size_t j = 0; j < sys.ground_size(); ++j) {
    double lhs = 0.0;
    for (Subset s : sys.members()) {
      if (!contains(s, j)) continue;
      auto it = y.find(s);
      if (it == y.end() || it->second == 0.0) continue;
      lhs += oracle.workload(s, j) * it->second;
    }
    worst = std::max(worst, (lhs - c[j]) / std::max(1.0, std::abs(c[j])));
  }
  return worst;
}

Residual objective_representation_check(const std::vector<double>& c,
                                        const AGOutput& out,
                                        const WorkloadOracle& oracle,
                                        const std::vector<double>& x) {
  if (x.size() != c.size()) throw ArgumentError("x length differs from c");
  double lhs = 0.0, scale = 1.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    lhs += c[j] * x[j];
    scale += std::abs(c[j] * x[j]);
  }
  const auto nus = out.nu_along_pi();
  double rhs = 0.0;
  for (std::size_t k = 0; k < nus.size(); ++k) {
    const double y = (k == 0 ? nus[0] : nus[k] - nus[k - 1]);
    double inner = 0.0;
    for (std::size_t j : elements(out.chain[k])) {
      inner += oracle.workload(out.chain[k], j) * x[j];
    }
    rhs += y * inner;
    scale += std::abs(y * inner);
  }
  return {std::abs(lhs - rhs), scale};
}

BruteForceLP brute_force_lp(const std::vector<double>& c,
                            const WorkloadOracle& oracle,
                            const SetSystem& sys, std::size_t cap) {
  BruteForceLP r;
  r.value = std::numeric_limits<double>::infinity();
  for (const auto& pi : sys.enumerate_full_strings(cap)) {
    const auto pv = primal_vertex(pi, oracle);
    double v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * pv.x[j];
    ++r.strings;
    if (v < r.value) {
      r.value = v;
      r.argmin = pi;
    }
  }
  return r;
}

std::vector<double> reduced_cost_identity_residuals(
    const AGOutput& out, const WorkloadOracle& oracle) {
  const std::size_t n = out.pi.size();
  const auto pv = primal_vertex(out.pi, oracle);
  const auto& c = out.reduced_costs.front();
  double v_lp = 0.0;
  for (std::size_t j : out.pi) v_lp += c[j] * pv.x[j];
  const auto nus = out.nu_along_pi();
  std::vector<double> res;
  double head = 0.0;
  for (std::size_t m = 1; m < n; ++m) {
    head += nus[m - 1] *
            (oracle.rhs(out.chain[m - 1]) - oracle.rhs(out.chain[m]));
    double tail = 0.0;
    for (std::size_t j : elements(out.chain[m])) {
      tail += out.reduced_costs[m][j] * pv.x[j];
    }
    res.push_back(std::abs(v_lp - head - tail));
  }
  return res;
}

MinMaxReport local_minmax_check(const AGOutput& out, bool monotone,
                                double tol) {
  MinMaxReport r;
  const std::size_t n = out.pi.size();
  for (std::size_t m = 0; m < n; ++m) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j : elements(out.chain[m])) {
      lo = std::min(lo, out.rate_table[m][j]);
    }
    const double nu_m = out.nu[out.pi[m]];
    const double gap = std::abs(nu_m - lo) / std::max(1.0, std::abs(nu_m));
    r.worst_min_gap = std::max(r.worst_min_gap, gap);
    if (gap > tol) r.min_ok = false;
  }
  if (monotone) {
    r.max_checked = true;
    for (std::size_t j : out.pi) {
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        if (contains(out.chain[k], j)) hi = std::max(hi, out.rate_table[k][j]);
      }
      const double gap =
          std::abs(out.nu[j] - hi) / std::max(1.0, std::abs(out.nu[j]));
      r.worst_max_gap = std::max(r.worst_max_gap, gap);
      if (gap > tol) r.max_ok = false;
    }
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t j = out.pi[l];
      for (std::size_t k = 1; k <= l; ++k) {
        const double a = out.rate_table[k - 1][j], b = out.rate_table[k][j];
        if (b < a - tol * std::max(1.0, std::abs(b))) r.rate_chain_ok = false;
      }
    }
  }
  return r;
}

double second_order_workload_recursion(const SetSystem& sys,
                                       const WorkloadOracle& oracle, Subset s,
                                       std::size_t i1, std::size_t i2,
                                       std::size_t j) {
  if (i1 == i2 || !contains(s, i1) || !contains(s, i2)) {
    throw ArgumentError("i1, i2 must be distinct members of S");
  }
  if (!contains(s, j) || j == i1 || j == i2) {
    throw ArgumentError("j must lie in S minus {i1, i2}");
  }
  const Subset s1 = without(s, i1), s2 = without(s, i2);
  const Subset bd = sys.inner_boundary(s);
  if (!contains(bd, i1) || !contains(bd, i2) ||
      !sys.contains_set(s1) || !sys.contains_set(s2) ||
      !contains(sys.inner_boundary(s2), i1) ||
      !contains(sys.inner_boundary(s1), i2)) {
    throw ArgumentError("i1, i2 not in the double inner-boundary configuration");
  }
  const double a = oracle.workload(s, i1) / oracle.workload(s2, i1);
  const double b = oracle.workload(s, i2) / oracle.workload(s1, i2);
  const double den = a + b - 1.0;
  if (!(den > 0.0)) {
    throw DegeneracyError("second-order recursion denominator is " +
                          std::to_string(den));
  }
  return (a * oracle.workload(s2, j) + b * oracle.workload(s1, j) -
          oracle.workload(s, j)) /
         den;
}

}  // namespace rbindex
