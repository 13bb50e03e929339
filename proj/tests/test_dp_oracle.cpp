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

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "rbindex/admission_control.hpp"
#include "rbindex/dp_oracle.hpp"
#include "rbindex/error.hpp"
#include "rbindex/restless_bandit.hpp"
#include "support.hpp"

using namespace rbindex;
using testsupport::pick;
using testsupport::rel;
using testsupport::uniform;

namespace {

Eigen::VectorXd vi_value(const RBModel& m, double nu, int iters) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.n_states());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd q0 = m.h0() + m.beta() * m.p0() * v;
    const Eigen::VectorXd q1 = m.h1() + nu * m.theta1() + m.beta() * m.p1() * v;
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = m.is_controllable(static_cast<std::size_t>(i)) ? std::min(q0[i], q1[i]) : q1[i];
    }
  }
  return v;
}

}  // namespace

TEST_CASE("policy and value iteration reach the same optimum") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = pick(rng, 2, 7);
    const auto m = testsupport::random_rb(rng, n, uniform(rng, 0.3, 0.9), pick(rng, 0, n - 1));
    const double nu = uniform(rng, -3.0, 3.0);
    const auto pi = solve(m, nu, DPMethod::kPolicyIteration);
    const auto vi = solve(m, nu, DPMethod::kValueIteration);
    const auto ref = vi_value(m, nu, 600);
    CHECK((pi.v - ref).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ref.norm()));
    CHECK((vi.v - ref).cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + ref.norm()));
    CHECK(pi.bellman_residual <= 1e-9);
    CHECK((pi.active_opt & pi.indifferent) == 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = pi.gap[static_cast<Eigen::Index>(i)];
      if (!m.is_controllable(i)) {
        CHECK(std::isnan(g));
        CHECK_FALSE(contains(pi.active_set(), i));
        continue;
      }
      CHECK(contains(pi.active_opt, i) == (g < -1e-8));
      CHECK(contains(pi.indifferent, i) == (std::abs(g) <= 1e-8));
    }
  }
}

TEST_CASE("fair charges equal PCL indices and bisection on value iteration") {
  std::mt19937_64 rng(32);
  int seen = 0;
  for (int rep = 0; rep < 40 && seen < 15; ++rep) {
    const std::size_t n = pick(rng, 2, 5);
    const auto m = testsupport::random_rb(rng, n, uniform(rng, 0.5, 0.9), pick(rng, 0, 1));
    const auto pcl = pcl_index(m, powerset_family(m.n_controllable()));
    if (!pcl.pcl_indexable) continue;
    ++seen;
    for (std::size_t j : m.controllable()) {
      const auto fc = fair_charge(m, j);
      CHECK_FALSE(fc.multiple_roots);
      CHECK(fc.warning.empty());
      CHECK(rel(fc.nu, pcl.nu_by_state[j]) <= 1e-9);
      CHECK(rel(fc.nu, testsupport::vi_index(m, j)) <= 1e-8);
    }
  }
  CHECK(seen >= 10);
  const auto m = testsupport::random_rb(rng, 3, 0.9, 1);
  std::size_t unc = 0;
  while (m.is_controllable(unc)) ++unc;
  CHECK_THROWS_AS(fair_charge(m, unc), ArgumentError);
  CHECK_THROWS_AS(fair_charge(m, 3), ArgumentError);
}

TEST_CASE("fair charges of the shut-time counterexample") {
  const auto ce = whittle_counterexample();
  const auto m = uniformize(ce.model, ActivityMeasure::kShutTime);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::abs(fair_charge(m, j).nu - ce.expected[j]) <= 1e-8);
    CHECK(std::abs(testsupport::vi_index(m, j, 5000) - ce.expected[j]) <= 1e-8);
  }
  // The charges decrease along the threshold order, so no threshold
  // family can index this model monotonically.
  CHECK(ce.expected[0] > ce.expected[1]);
  CHECK(ce.expected[1] > ce.expected[2]);
}

TEST_CASE("optimal active sets shrink along a charge sweep") {
  std::mt19937_64 rng(33);
  int seen = 0;
  for (int rep = 0; rep < 40 && seen < 10; ++rep) {
    const std::size_t n = pick(rng, 2, 5);
    const auto m = testsupport::random_rb(rng, n, 0.85);
    const auto sys = powerset_family(n);
    const auto pcl = pcl_index(m, sys);
    if (!pcl.pcl_indexable) continue;
    ++seen;
    std::vector<double> grid;
    for (int k = 0; k <= 50; ++k) grid.push_back(-20.0 + 0.8 * k);
    const auto sw = nu_sweep(m, grid, 1e-8, &sys);
    CHECK(sw.nested);
    CHECK(sw.all_in_family);
    CHECK(sw.sets.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      Subset expect = 0;
      for (std::size_t j : m.controllable()) {
        if (grid[k] <= pcl.nu_by_state[j]) expect = with(expect, j);
      }
      // Grid points sitting on an index are not expected here.
      CHECK(sw.sets[k] == expect);
    }
  }
  CHECK(seen >= 5);
  const auto m = testsupport::random_rb(rng, 3, 0.85);
  CHECK_THROWS_AS(nu_sweep(m, {1.0, 0.0}), ArgumentError);
}

TEST_CASE("sweep membership uses the supplied family") {
  // Charges fall with the state, so optimal sets grow from state 0 upward.
  const auto ce = whittle_counterexample();
  const auto m = uniformize(ce.model, ActivityMeasure::kShutTime);
  const SetSystem up(3, {0b000, 0b100, 0b110, 0b111});
  const SetSystem down(3, {0b000, 0b001, 0b011, 0b111});
  std::vector<double> grid{-1.0, 0.25, 0.53, 0.7};
  const auto a = nu_sweep(m, grid, 1e-8, &up);
  const auto b = nu_sweep(m, grid, 1e-8, &down);
  CHECK(a.nested);
  CHECK_FALSE(a.all_in_family);
  CHECK(b.all_in_family);
  CHECK(b.sets == std::vector<Subset>{0b111, 0b011, 0b001, 0b000});
}

TEST_CASE("crosscheck flags a tampered index table") {
  std::mt19937_64 rng(34);
  for (int rep = 0; rep < 40; ++rep) {
    const auto m = testsupport::random_rb(rng, 4, 0.8);
    auto pcl = pcl_index(m, powerset_family(4));
    if (!pcl.pcl_indexable) continue;
    const auto good = crosscheck_indices(m, pcl);
    CHECK(good.agree);
    CHECK(good.mismatches == 0);
    CHECK(good.diff.empty());
    CHECK(good.points.size() >= 6);
    pcl.nu_by_state[0] += 1.0;
    const auto bad = crosscheck_indices(m, pcl);
    CHECK_FALSE(bad.agree);
    CHECK(bad.mismatches > 0);
    CHECK_FALSE(bad.diff.empty());
    pcl.pcl_indexable = false;
    CHECK_THROWS_AS(crosscheck_indices(m, pcl), UnsupportedModelError);
    break;
  }
}
