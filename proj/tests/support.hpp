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

// Shared generators and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rbindex/adaptive_greedy.hpp"
#include "rbindex/admission_control.hpp"
#include "rbindex/restless_bandit.hpp"
#include "rbindex/set_system.hpp"

namespace testsupport {

using rbindex::Subset;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Union of `chains` random maximal chains from {} to the ground set; every
// such union is accessible and augmentable.
inline rbindex::SetSystem random_family(std::mt19937_64& rng, std::size_t n,
                                        std::size_t chains) {
  std::vector<Subset> fam{0};
  for (std::size_t c = 0; c < chains; ++c) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Subset s = 0;
    for (std::size_t j : perm) {
      s = rbindex::with(s, j);
      if (std::find(fam.begin(), fam.end(), s) == fam.end()) fam.push_back(s);
    }
  }
  return rbindex::SetSystem(n, fam);
}

// Fixed random workloads on every (S, j) with S in the family, and b^S.
struct TableOracle {
  std::map<std::pair<Subset, std::size_t>, double> w;
  std::map<Subset, double> b;

  rbindex::WorkloadOracle oracle() const {
    rbindex::WorkloadOracle o;
    auto self = std::make_shared<TableOracle>(*this);
    o.w = [self](Subset s, std::size_t j) { return self->w.at({s, j}); };
    o.b = [self](Subset s) { return self->b.at(s); };
    return o;
  }
};

inline TableOracle random_workloads(std::mt19937_64& rng, const rbindex::SetSystem& sys,
                                    double lo = 0.1, double hi = 10.0) {
  TableOracle t;
  for (Subset s : sys.members()) {
    for (std::size_t j : rbindex::elements(s)) t.w[{s, j}] = uniform(rng, lo, hi);
    t.b[s] = uniform(rng, 0.0, 10.0);
  }
  return t;
}

// A valid F-extended polymatroid: w^S_j = k_S w_j and b^S = k_S g(a(S)) with
// g convex increasing, so b is supermodular and every greedy vertex of the
// full powerset polytope, a superset of P(F), is feasible.
inline TableOracle random_polymatroid(std::mt19937_64& rng, const rbindex::SetSystem& sys) {
  const std::size_t n = sys.ground_size();
  std::vector<double> w(n), a(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = uniform(rng, 0.2, 5.0);
    a[j] = uniform(rng, 0.1, 3.0);
  }
  const double gamma = uniform(rng, 0.05, 1.0);
  TableOracle t;
  for (Subset s : sys.members()) {
    const double k = uniform(rng, 0.2, 5.0);
    double as = 0.0;
    for (std::size_t j : rbindex::elements(s)) {
      t.w[{s, j}] = k * w[j];
      as += a[j];
    }
    t.b[s] = k * (as + gamma * as * as);
  }
  return t;
}

inline std::vector<double> random_costs(std::mt19937_64& rng, std::size_t n,
                                        double lo = -10.0, double hi = 10.0) {
  std::vector<double> c(n);
  for (auto& x : c) x = uniform(rng, lo, hi);
  return c;
}

inline Eigen::MatrixXd random_stochastic(std::mt19937_64& rng, std::size_t n,
                                         double sparsity = 0.0) {
  Eigen::MatrixXd p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = uniform(rng, 0.0, 1.0) < sparsity ? 0.0 : uniform(rng, 0.01, 1.0);
      p(i, j) = x;
      sum += x;
    }
    if (sum == 0.0) {
      p(i, i) = 1.0;
      sum = 1.0;
    }
    p.row(i) /= sum;
  }
  return p;
}

// Random finite restless bandit. Uncontrollable states copy the active row.
inline rbindex::RBModel random_rb(std::mt19937_64& rng, std::size_t n, double beta,
                                  std::size_t n_uncontrollable = 0,
                                  bool unit_theta = false) {
  Eigen::MatrixXd p0 = random_stochastic(rng, n);
  Eigen::MatrixXd p1 = random_stochastic(rng, n);
  Eigen::VectorXd h0(n), h1(n), th(n);
  for (std::size_t i = 0; i < n; ++i) {
    h0[i] = uniform(rng, 0.0, 5.0);
    h1[i] = uniform(rng, 0.0, 5.0);
    th[i] = unit_theta ? 1.0 : uniform(rng, 0.5, 2.0);
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::size_t> ctrl(all.begin() + static_cast<long>(n_uncontrollable), all.end());
  std::sort(ctrl.begin(), ctrl.end());
  for (std::size_t k = 0; k < n_uncontrollable; ++k) {
    const std::size_t i = all[k];
    p0.row(i) = p1.row(i);
    h0[i] = h1[i];
  }
  return rbindex::RBModel(p0, p1, h0, h1, th, beta, ctrl);
}

// Random admission model satisfying the concave-d / convex-h assumptions.
inline rbindex::ACModel random_compliant_admission(std::mt19937_64& rng, std::size_t n,
                                                   double alpha) {
  for (;;) {
    std::vector<double> lambda(n + 1);
    lambda[0] = uniform(rng, 0.2, 2.0);
    for (std::size_t i = 1; i <= n; ++i) lambda[i] = lambda[i - 1] * uniform(rng, 0.7, 1.0);
    std::vector<double> dd(n + 1, 0.0);
    dd[1] = lambda[0] + uniform(rng, 0.2, 2.0);
    for (std::size_t i = 2; i <= n; ++i) dd[i] = dd[i - 1] * uniform(rng, 0.0, 1.0);
    std::vector<double> mu(n);
    double d = -lambda[0];
    bool ok = true;
    for (std::size_t i = 1; i <= n; ++i) {
      d += dd[i];
      mu[i - 1] = d + lambda[i];
      if (!(mu[i - 1] > 0.05)) ok = false;
    }
    if (!ok) continue;
    std::vector<double> h(n + 1);
    h[0] = uniform(rng, 0.0, 1.0);
    double dh = uniform(rng, 0.0, 2.0);
    for (std::size_t i = 1; i <= n; ++i) {
      h[i] = h[i - 1] + dh;
      dh += uniform(rng, 0.0, 1.0);
    }
    auto m = rbindex::ACModel::make(lambda, mu, h, alpha);
    if (rbindex::validate_assumptions(m).ok) return m;
  }
}

// Fixed-point iteration for x = r + beta P_u x, an oracle independent of LU.
inline Eigen::VectorXd iterate_policy(const rbindex::RBModel& m, const rbindex::Policy& u,
                                      const Eigen::VectorXd& r0, const Eigen::VectorXd& r1,
                                      int iters) {
  const std::size_t n = m.n_states();
  Eigen::MatrixXd p(n, n);
  Eigen::VectorXd r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    p.row(ii) = (1.0 - u[i]) * m.p0().row(ii) + u[i] * m.p1().row(ii);
    r[ii] = (1.0 - u[i]) * r0[ii] + u[i] * r1[ii];
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (int k = 0; k < iters; ++k) x = r + m.beta() * p * x;
  return x;
}

inline rbindex::Policy random_policy(std::mt19937_64& rng, const rbindex::RBModel& m) {
  rbindex::Policy u(m.n_states(), 1.0);
  for (std::size_t i : m.controllable()) u[i] = uniform(rng, 0.0, 1.0);
  return u;
}

inline Subset random_subset(std::mt19937_64& rng, Subset universe) {
  Subset s = 0;
  for (std::size_t j : rbindex::elements(universe)) {
    if (uniform(rng, 0.0, 1.0) < 0.5) s = rbindex::with(s, j);
  }
  return s;
}

// Action gap Q1 - Q0 at state j for charge nu, by plain value iteration.
inline double vi_gap(const rbindex::RBModel& m, double nu, std::size_t j, int iters) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.n_states());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q0(n), q1(n);
  for (int it = 0; it < iters; ++it) {
    q0 = m.h0() + m.beta() * m.p0() * v;
    q1 = m.h1() + nu * m.theta1() + m.beta() * m.p1() * v;
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = m.is_controllable(static_cast<std::size_t>(i)) ? std::min(q0[i], q1[i]) : q1[i];
    }
  }
  const auto jj = static_cast<Eigen::Index>(j);
  return q1[jj] - q0[jj];
}

// Critical charge at state j by bisection; NaN when the gap has no sign change.
inline double vi_index(const rbindex::RBModel& m, std::size_t j, int iters = 400) {
  double lo = -200.0, hi = 200.0;
  if (!(vi_gap(m, lo, j, iters) < 0.0 && vi_gap(m, hi, j, iters) > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (vi_gap(m, mid, j, iters) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testsupport
