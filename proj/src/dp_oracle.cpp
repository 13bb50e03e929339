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

#include "rbindex/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rbindex/error.hpp"
#include "rbindex/linalg.hpp"

namespace rbindex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct QValues {
  Eigen::VectorXd q0, q1;
};

QValues q_values(const RBModel& m, double nu, const Eigen::VectorXd& v) {
  QValues q;
  q.q0 = m.h0() + m.beta() * m.p0() * v;
  q.q1 = m.h1() + nu * m.theta1() + m.beta() * m.p1() * v;
  return q;
}

Eigen::VectorXd bellman(const RBModel& m, const QValues& q) {
  Eigen::VectorXd tv(m.n_states());
  for (std::size_t i = 0; i < m.n_states(); ++i) {
    tv[i] = m.is_controllable(i) ? std::min(q.q0[i], q.q1[i]) : q.q1[i];
  }
  return tv;
}

Eigen::VectorXd evaluate(const RBModel& m, double nu,
                         const std::vector<char>& active) {
  const std::size_t n = m.n_states();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) {
      a.row(i) -= m.beta() * m.p1().row(i);
      r[i] = m.h1()[i] + nu * m.theta1()[i];
    } else {
      a.row(i) -= m.beta() * m.p0().row(i);
      r[i] = m.h0()[i];
    }
  }
  return lu_solve(a, r);
}

DPResult classify(const RBModel& m, double nu, Eigen::VectorXd v, int iters,
                  double eps) {
  DPResult res;
  const QValues q = q_values(m, nu, v);
  res.bellman_residual = (bellman(m, q) - v).cwiseAbs().maxCoeff();
  res.gap = Eigen::VectorXd::Constant(m.n_states(), kNaN);
  for (std::size_t i : m.controllable()) {
    const double g = q.q1[i] - q.q0[i];
    res.gap[i] = g;
    if (std::abs(g) <= eps) {
      res.indifferent = with(res.indifferent, i);
    } else if (g < 0.0) {
      res.active_opt = with(res.active_opt, i);
    }
  }
  res.v = std::move(v);
  res.iterations = iters;
  return res;
}

}  // namespace

DPResult solve(const RBModel& m, double nu, DPMethod method, double eps) {
  m.require_discounted();
  if (m.n_states() > kMaxGround) throw SizeError("DP oracle needs <= 63 states");
  const std::size_t n = m.n_states();
  if (method == DPMethod::kValueIteration) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    int it = 0;
    for (; it < 10000000; ++it) {
      Eigen::VectorXd nv = bellman(m, q_values(m, nu, v));
      const double delta = (nv - v).cwiseAbs().maxCoeff();
      v = std::move(nv);
      if (delta <= 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff())) break;
    }
    return classify(m, nu, std::move(v), it + 1, eps);
  }
  std::vector<char> active(n, 0);
  for (std::size_t i = 0; i < n; ++i) active[i] = !m.is_controllable(i);
  Eigen::VectorXd v = evaluate(m, nu, active);
  int it = 1;
  const int cap = 10000;
  for (; it < cap; ++it) {
    const QValues q = q_values(m, nu, v);
    const double tol = 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
    bool changed = false;
    for (std::size_t i : m.controllable()) {
      // Switch only on strict improvement to guarantee termination.
      if (active[i] && q.q0[i] < q.q1[i] - tol) {
        active[i] = 0;
        changed = true;
      } else if (!active[i] && q.q1[i] < q.q0[i] - tol) {
        active[i] = 1;
        changed = true;
      }
    }
    if (!changed) break;
    v = evaluate(m, nu, active);
  }
  if (it >= cap) throw NumericError("policy iteration did not terminate");
  return classify(m, nu, std::move(v), it, eps);
}

SweepResult nu_sweep(const RBModel& m, const std::vector<double>& grid,
                     double eps, const SetSystem* family) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw ArgumentError("grid must be sorted ascending");
  }
  SweepResult r;
  r.grid = grid;
  for (double nu : grid) {
    const Subset s = solve(m, nu, DPMethod::kPolicyIteration, eps).active_set();
    if (!r.sets.empty() && (s & ~r.sets.back())) r.nested = false;
    r.sets.push_back(s);
    if (family) {
      const bool in = family->contains_set(m.to_positions(s));
      r.in_family.push_back(in);
      r.all_in_family = r.all_in_family && in;
    }
  }
  return r;
}

FairCharge fair_charge(const RBModel& m, std::size_t j, double tol) {
  if (j >= m.n_states() || !m.is_controllable(j)) {
    throw ArgumentError("fair charge needs a controllable state");
  }
  auto gap = [&](double nu) {
    return solve(m, nu, DPMethod::kPolicyIteration, 0.0).gap[j];
  };
  const double min_theta = m.theta1().minCoeff();
  double width = 10.0 * normalized_passive_cost(m).cwiseAbs().maxCoeff() / min_theta;
  width = std::max(width, 1.0);
  double lo = -width, hi = width;
  FairCharge fc;
  // Gap is negative (active preferred) for small charges.
  for (int k = 0; k < 60 && !(gap(lo) < 0.0); ++k) lo *= 2.0;
  for (int k = 0; k < 60 && !(gap(hi) > 0.0); ++k) hi *= 2.0;
  if (!(gap(lo) <= 0.0) || !(gap(hi) >= 0.0)) {
    throw NumericError("could not bracket the critical charge of state " +
                       std::to_string(j));
  }
  const int scan = 64;
  double prev_nu = lo, prev_g = gap(lo);
  for (int k = 1; k <= scan; ++k) {
    const double nu = lo + (hi - lo) * k / scan;
    const double g = gap(nu);
    if ((prev_g < 0.0) != (g < 0.0)) fc.root_brackets.emplace_back(prev_nu, nu);
    prev_nu = nu;
    prev_g = g;
  }
  if (fc.root_brackets.size() > 1) {
    fc.multiple_roots = true;
    std::ostringstream os;
    os << "action gap at state " << j << " changes sign "
       << fc.root_brackets.size() << " times:";
    for (auto [a, b] : fc.root_brackets) os << " [" << a << ", " << b << "]";
    fc.warning = os.str();
  }
  if (!fc.root_brackets.empty()) {
    lo = fc.root_brackets.front().first;
    hi = fc.root_brackets.front().second;
  }
  while (hi - lo > tol * std::max(1.0, std::abs(lo)) && fc.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) < 0.0) lo = mid; else hi = mid;
    ++fc.iterations;
  }
  fc.nu = 0.5 * (lo + hi);
  return fc;
}

CrosscheckReport crosscheck_indices(const RBModel& m, const PCLReport& pcl,
                                    double eps) {
  if (!pcl.pcl_indexable || !pcl.ag) {
    throw UnsupportedModelError("crosscheck needs a PCL-indexable report");
  }
  std::vector<double> idx;
  for (std::size_t k : m.controllable()) idx.push_back(pcl.nu_by_state[k]);
  std::sort(idx.begin(), idx.end());
  std::vector<double> distinct;
  for (double x : idx) {
    if (distinct.empty() ||
        x - distinct.back() > 1e-9 * std::max(1.0, std::abs(x))) {
      distinct.push_back(x);
    }
  }
  const double spread = std::max(1.0, distinct.back() - distinct.front());
  std::vector<std::pair<double, bool>> grid;
  grid.emplace_back(distinct.front() - spread, true);
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    if (k > 0) grid.emplace_back(0.5 * (distinct[k - 1] + distinct[k]), true);
    grid.emplace_back(distinct[k], false);
  }
  grid.emplace_back(distinct.back() + spread, true);

  CrosscheckReport rep;
  std::ostringstream diff;
  for (auto [nu, strict] : grid) {
    GridCheck g;
    g.nu = nu;
    g.strict = strict;
    Subset closed = 0, open = 0;
    for (std::size_t k : m.controllable()) {
      const double nk = pcl.nu_by_state[k];
      const double band = 1e-9 * std::max(1.0, std::abs(nk));
      if (nu <= nk + band) closed = with(closed, k);
      if (nu < nk - band) open = with(open, k);
    }
    g.expected = closed;
    const DPResult dp = solve(m, nu, DPMethod::kPolicyIteration, eps);
    g.got = dp.active_set();
    if (strict) {
      g.ok = g.got == closed;
    } else {
      // At a breakpoint either action may be optimal at the tied states.
      g.ok = (open & ~g.got) == 0 && (g.got & ~closed) == 0;
    }
    if (!g.ok) {
      ++rep.mismatches;
      diff << "nu=" << nu << (strict ? "" : " (breakpoint)") << " expected "
           << to_string(closed) << " got " << to_string(g.got) << "\n";
    }
    rep.points.push_back(g);
  }
  rep.agree = rep.mismatches == 0;
  rep.diff = diff.str();
  return rep;
}

}  // namespace rbindex
