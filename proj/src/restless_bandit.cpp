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

#include "rbindex/restless_bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "rbindex/error.hpp"
#include "rbindex/linalg.hpp"

namespace rbindex {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_stochastic(const Eigen::MatrixXd& p, const char* name) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError(std::string(name) + " has a negative or non-finite entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowTol) {
      throw InputError(std::string(name) + " row " + std::to_string(i) +
                       " sums to " + std::to_string(sum));
    }
  }
}

Policy normalized(const RBModel& m, const Policy& u) {
  if (u.size() != m.n_states()) throw ArgumentError("policy length differs from state count");
  Policy out(u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
      throw ArgumentError("policy probabilities must lie in [0, 1]");
    }
    if (!m.is_controllable(i)) out[i] = 1.0;
  }
  return out;
}

Eigen::MatrixXd mixed_transitions(const RBModel& m, const Policy& u) {
  const std::size_t n = m.n_states();
  Eigen::MatrixXd p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    p.row(i) = (1.0 - u[i]) * m.p0().row(i) + u[i] * m.p1().row(i);
  }
  return p;
}

Eigen::VectorXd discounted_solve(const RBModel& m, const Policy& u,
                                 const Eigen::VectorXd& r) {
  m.require_discounted();
  const std::size_t n = m.n_states();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - m.beta() * mixed_transitions(m, u);
  return lu_solve(a, r);
}

Eigen::VectorXd activity_rhs(const RBModel& m, const Policy& u) {
  Eigen::VectorXd r(m.n_states());
  for (std::size_t i = 0; i < m.n_states(); ++i) r[i] = m.theta1()[i] * u[i];
  return r;
}

Eigen::VectorXd cost_rhs(const RBModel& m, const Policy& u) {
  Eigen::VectorXd r(m.n_states());
  for (std::size_t i = 0; i < m.n_states(); ++i) {
    r[i] = (1.0 - u[i]) * m.h0()[i] + u[i] * m.h1()[i];
  }
  return r;
}

void zero_uncontrollable(const RBModel& m, Eigen::VectorXd& v) {
  for (std::size_t i = 0; i < m.n_states(); ++i) {
    if (!m.is_controllable(i)) v[i] = 0.0;
  }
}

// Workload from an activity-like vector: theta on controllable states plus
// factor * (P1 - P0) b.
Eigen::VectorXd workload_from(const RBModel& m, const Eigen::VectorXd& b,
                              double factor) {
  Eigen::VectorXd w = factor * (m.p1() - m.p0()) * b;
  for (std::size_t i = 0; i < m.n_states(); ++i) {
    if (m.is_controllable(i)) w[i] += m.theta1()[i];
  }
  zero_uncontrollable(m, w);
  return w;
}

Eigen::VectorXd cost_from(const RBModel& m, const Eigen::VectorXd& v,
                          double factor) {
  Eigen::VectorXd c = m.h0() - m.h1() + factor * (m.p0() - m.p1()) * v;
  zero_uncontrollable(m, c);
  return c;
}

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

RBModel::RBModel(Eigen::MatrixXd p0, Eigen::MatrixXd p1, Eigen::VectorXd h0,
                 Eigen::VectorXd h1, Eigen::VectorXd theta1, double beta,
                 std::vector<std::size_t> controllable)
    : p0_(std::move(p0)),
      p1_(std::move(p1)),
      h0_(std::move(h0)),
      h1_(std::move(h1)),
      theta1_(std::move(theta1)),
      beta_(beta),
      ctrl_(std::move(controllable)) {
  const Eigen::Index n = p0_.rows();
  if (n == 0) throw InputError("model needs at least one state");
  if (n > 2000) throw SizeError("model larger than 2000 states");
  if (p0_.cols() != n || p1_.rows() != n || p1_.cols() != n ||
      h0_.size() != n || h1_.size() != n || theta1_.size() != n) {
    throw InputError("inconsistent model dimensions");
  }
  if (!(beta_ >= 0.0 && beta_ <= 1.0)) {
    throw InputError("discount factor must lie in [0, 1]");
  }
  check_stochastic(p0_, "P0");
  check_stochastic(p1_, "P1");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(h0_[i]) || !std::isfinite(h1_[i])) {
      throw InputError("costs must be finite");
    }
    if (!(theta1_[i] > 0.0) || !std::isfinite(theta1_[i])) {
      throw InputError("activity weights must be positive");
    }
  }
  std::sort(ctrl_.begin(), ctrl_.end());
  if (std::adjacent_find(ctrl_.begin(), ctrl_.end()) != ctrl_.end()) {
    throw InputError("duplicate controllable state");
  }
  position_.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < ctrl_.size(); ++k) {
    if (ctrl_[k] >= static_cast<std::size_t>(n)) {
      throw InputError("controllable state out of range");
    }
    position_[ctrl_[k]] = static_cast<int>(k);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (position_[i] >= 0) continue;
    if ((p0_.row(i) - p1_.row(i)).cwiseAbs().maxCoeff() > kRowTol ||
        std::abs(h0_[i] - h1_[i]) > kRowTol) {
      throw InputError("state " + std::to_string(i) +
                       " is uncontrollable but its actions differ");
    }
  }
}

Subset RBModel::to_states(Subset positions) const {
  if (n_states() > kMaxGround) throw SizeError("set operations need <= 63 states");
  Subset s = 0;
  for (std::size_t k : elements(positions)) {
    if (k >= ctrl_.size()) throw ArgumentError("position out of range");
    s = with(s, ctrl_[k]);
  }
  return s;
}

Subset RBModel::to_positions(Subset states) const {
  if (n_states() > kMaxGround) throw SizeError("set operations need <= 63 states");
  Subset s = 0;
  for (std::size_t i : elements(states)) {
    if (i >= n_states() || position_[i] < 0) {
      throw ArgumentError("state " + std::to_string(i) + " is not controllable");
    }
    s = with(s, static_cast<std::size_t>(position_[i]));
  }
  return s;
}

Subset RBModel::controllable_states() const {
  return to_states(full_set(ctrl_.size()));
}

void RBModel::require_discounted() const {
  if (!(beta_ < 1.0)) {
    throw UnsupportedModelError("discounted measures need beta < 1");
  }
}

Policy s_active_policy(const RBModel& m, Subset s) {
  if (m.n_states() > kMaxGround) throw SizeError("set operations need <= 63 states");
  Policy u(m.n_states(), 0.0);
  for (std::size_t i = 0; i < m.n_states(); ++i) {
    if (!m.is_controllable(i)) {
      u[i] = 1.0;
    } else if (contains(s, i)) {
      u[i] = 1.0;
    }
  }
  if (s & ~m.controllable_states()) {
    throw ArgumentError("active set must contain only controllable states");
  }
  return u;
}

Eigen::VectorXd activity_measure(const RBModel& m, const Policy& u) {
  const Policy v = normalized(m, u);
  return discounted_solve(m, v, activity_rhs(m, v));
}

Eigen::VectorXd activity_measure(const RBModel& m, Subset s) {
  return activity_measure(m, s_active_policy(m, s));
}

Eigen::VectorXd cost_measure(const RBModel& m, const Policy& u) {
  const Policy v = normalized(m, u);
  return discounted_solve(m, v, cost_rhs(m, v));
}

Eigen::VectorXd cost_measure(const RBModel& m, Subset s) {
  return cost_measure(m, s_active_policy(m, s));
}

Occupation occupation_measures(const RBModel& m, const Policy& u,
                               std::size_t i) {
  m.require_discounted();
  if (i >= m.n_states()) throw ArgumentError("initial state out of range");
  const Policy v = normalized(m, u);
  const std::size_t n = m.n_states();
  const Eigen::MatrixXd pu = mixed_transitions(m, v);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - m.beta() * pu;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[i] = 1.0;
  const Eigen::VectorXd o = lu_solve(a.transpose(), e);
  Occupation occ;
  occ.x0.resize(n);
  occ.x1.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    occ.x1[j] = o[j] * v[j];
    occ.x0[j] = o[j] * (1.0 - v[j]);
  }
  // Balance: x^0_j + x^1_j = delta_ij + beta sum_k (x^0_k p0_kj + x^1_k p1_kj).
  const Eigen::VectorXd lhs = occ.x0 + occ.x1;
  const Eigen::VectorXd rhs =
      e + m.beta() * (m.p0().transpose() * occ.x0 + m.p1().transpose() * occ.x1);
  occ.residual = (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, lhs.cwiseAbs().maxCoeff());
  return occ;
}

Eigen::VectorXd marginal_workload(const RBModel& m, Subset s) {
  return workload_from(m, activity_measure(m, s), m.beta());
}

Eigen::VectorXd marginal_cost(const RBModel& m, Subset s) {
  return cost_from(m, cost_measure(m, s), m.beta());
}

Eigen::VectorXd normalized_passive_cost(const RBModel& m) {
  m.require_discounted();
  const std::size_t n = m.n_states();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd y = lu_solve(id - m.beta() * m.p1(), m.h1());
  return m.h0() - (id - m.beta() * m.p0()) * y;
}

MeasureTables measure_tables(const RBModel& m, Subset s) {
  MeasureTables t;
  t.set = s;
  t.b = activity_measure(m, s);
  t.v = cost_measure(m, s);
  t.w = workload_from(m, t.b, m.beta());
  t.c = cost_from(m, t.v, m.beta());
  return t;
}

std::vector<Subset> PCLReport::state_chain(const RBModel& m) const {
  std::vector<Subset> out;
  if (!ag) return out;
  for (Subset s : ag->chain) out.push_back(m.to_states(s));
  out.push_back(0);
  return out;
}

PCLReport pcl_index(const RBModel& m, const SetSystem& sys,
                    Criterion criterion) {
  if (sys.ground_size() != m.n_controllable()) {
    throw ArgumentError("family ground size differs from controllable count");
  }
  PCLReport rep;
  rep.criterion = criterion;
  const auto val = sys.validate();
  if (!val.valid()) {
    rep.message = "family is not accessible and augmentable: " + val.message;
    return rep;
  }
  auto cache = std::make_shared<std::unordered_map<Subset, Eigen::VectorXd>>();
  auto workloads = [&m, criterion, cache](Subset pos) -> const Eigen::VectorXd& {
    auto it = cache->find(pos);
    if (it != cache->end()) return it->second;
    const Subset st = m.to_states(pos);
    Eigen::VectorXd w = criterion == Criterion::kDiscounted
                            ? marginal_workload(m, st)
                            : average_limits(m, st).w_bar;
    return cache->emplace(pos, std::move(w)).first->second;
  };
  rep.workloads_positive = true;
  for (Subset s : sys.members()) {
    const Eigen::VectorXd& w = workloads(s);
    for (std::size_t k = 0; k < m.n_controllable(); ++k) {
      const double wk = w[m.controllable()[k]];
      if (!(wk > 0.0)) {
        rep.workloads_positive = false;
        rep.bad_set = m.to_states(s);
        rep.bad_state = m.controllable()[k];
        rep.bad_workload = wk;
        break;
      }
    }
    if (!rep.workloads_positive) break;
  }
  Eigen::VectorXd hhat = criterion == Criterion::kDiscounted
                             ? normalized_passive_cost(m)
                             : average_limits(m, m.controllable_states()).c_bar;
  for (std::size_t k = 0; k < m.n_controllable(); ++k) {
    rep.cost.push_back(hhat[m.controllable()[k]]);
  }
  WorkloadOracle oracle;
  oracle.w = [&m, workloads](Subset pos, std::size_t j) {
    return workloads(pos)[m.controllable()[j]];
  };
  try {
    rep.ag = ag2(rep.cost, oracle, sys);
  } catch (const DomainError& e) {
    rep.message = std::string("index algorithm stopped: ") + e.what();
  }
  rep.nu_by_state.assign(m.n_states(), kNaN);
  if (rep.ag) {
    rep.admissible = rep.ag->admissible;
    for (std::size_t k = 0; k < m.n_controllable(); ++k) {
      rep.nu_by_state[m.controllable()[k]] = rep.ag->nu[k];
    }
  }
  rep.pcl_indexable = rep.workloads_positive && rep.admissible;
  if (rep.message.empty()) {
    if (!rep.workloads_positive) {
      rep.message = "nonpositive marginal workload w^" + to_string(rep.bad_set) +
                    "_" + std::to_string(rep.bad_state);
    } else if (!rep.admissible) {
      rep.message = "indices are not monotone along the chain";
    } else {
      rep.message = "PCL-indexable";
    }
  }
  return rep;
}

std::vector<ValueSegment> value_breakpoints(const RBModel& m,
                                            const SetSystem& sys,
                                            std::size_t i) {
  if (i >= m.n_states()) throw ArgumentError("state out of range");
  const PCLReport rep = pcl_index(m, sys);
  if (!rep.pcl_indexable) {
    throw UnsupportedModelError("model is not PCL-indexable: " + rep.message);
  }
  const auto chain = rep.state_chain(m);
  const auto nus = rep.ag->nu_along_pi();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<ValueSegment> segs;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    ValueSegment seg;
    seg.nu_lo = k == 0 ? -inf : nus[k - 1];
    seg.nu_hi = k < nus.size() ? nus[k] : inf;
    seg.active = chain[k];
    seg.intercept = cost_measure(m, chain[k])[i];
    seg.slope = activity_measure(m, chain[k])[i];
    segs.push_back(seg);
  }
  return segs;
}

double evaluate_value(const std::vector<ValueSegment>& segs, double nu) {
  for (const auto& s : segs) {
    if (nu <= s.nu_hi) return s.intercept + nu * s.slope;
  }
  return segs.back().intercept + nu * segs.back().slope;
}

Residual verify_workload_decomposition(const RBModel& m, const Policy& u,
                                       Subset s, std::size_t i) {
  const Policy v = normalized(m, u);
  const Eigen::VectorXd bu = activity_measure(m, v);
  const MeasureTables t = measure_tables(m, s);
  const Occupation occ = occupation_measures(m, v, i);
  double lhs = bu[i], rhs = t.b[i];
  double scale = std::abs(bu[i]) + std::abs(t.b[i]);
  for (std::size_t j : m.controllable()) {
    if (contains(s, j)) {
      lhs += t.w[j] * occ.x0[j];
      scale += std::abs(t.w[j] * occ.x0[j]);
    } else {
      rhs += t.w[j] * occ.x1[j];
      scale += std::abs(t.w[j] * occ.x1[j]);
    }
  }
  return {std::abs(lhs - rhs), std::max(1.0, scale)};
}

Residual verify_cost_decomposition(const RBModel& m, const Policy& u, Subset s,
                                   std::size_t i) {
  const Policy v = normalized(m, u);
  const Eigen::VectorXd vu = cost_measure(m, v);
  const MeasureTables t = measure_tables(m, s);
  const Occupation occ = occupation_measures(m, v, i);
  double lhs = t.v[i], rhs = vu[i];
  double scale = std::abs(vu[i]) + std::abs(t.v[i]);
  for (std::size_t j : m.controllable()) {
    if (contains(s, j)) {
      lhs += t.c[j] * occ.x0[j];
      scale += std::abs(t.c[j] * occ.x0[j]);
    } else {
      rhs += t.c[j] * occ.x1[j];
      scale += std::abs(t.c[j] * occ.x1[j]);
    }
  }
  return {std::abs(lhs - rhs), std::max(1.0, scale)};
}

DMRReport dmr_report(const RBModel& m, const SetSystem& sys,
                     std::vector<double> p, double tol) {
  const std::size_t n = m.n_states();
  if (p.empty()) p.assign(n, 1.0 / static_cast<double>(n));
  if (p.size() != n) throw ArgumentError("initial distribution length differs from state count");
  for (double x : p) {
    if (!(x > 0.0)) throw ArgumentError("initial distribution must be positive");
  }
  const PCLReport rep = pcl_index(m, sys);
  if (!rep.pcl_indexable) {
    throw UnsupportedModelError("model is not PCL-indexable: " + rep.message);
  }
  const Eigen::Map<const Eigen::VectorXd> pv(p.data(), static_cast<Eigen::Index>(n));
  auto agg = [&](Subset s) {
    return std::make_pair(pv.dot(activity_measure(m, s)), pv.dot(cost_measure(m, s)));
  };
  const auto chain = rep.state_chain(m);
  const auto nus = rep.ag->nu_along_pi();
  DMRReport r;
  for (Subset s : chain) {
    auto [b, v] = agg(s);
    r.activity.push_back(b);
    r.cost.push_back(v);
  }
  const std::size_t kn = nus.size();
  for (std::size_t k = 0; k < kn; ++k) {
    const double db = r.activity[k] - r.activity[k + 1];
    if (!(db > 1e-12 * std::max(1.0, std::abs(r.activity[k])))) {
      r.strict_activity = false;
    }
    const double rate = (r.cost[k + 1] - r.cost[k]) / db;
    r.rates.push_back(rate);
    double e = rel_gap(rate, nus[k]);
    r.worst_error = std::max(r.worst_error, e);
    if (e > tol) r.ratio_identity = false;

    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j : elements(chain[k])) {
      auto [b2, v2] = agg(without(chain[k], j));
      lo = std::min(lo, (v2 - r.cost[k]) / (r.activity[k] - b2));
    }
    e = rel_gap(lo, nus[k]);
    r.worst_error = std::max(r.worst_error, e);
    if (e > tol) r.min_identity = false;

    // Additions to S_{k+1}: the best one restores S_k.
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j : elements(m.controllable_states() & ~chain[k + 1])) {
      auto [b2, v2] = agg(with(chain[k + 1], j));
      hi = std::max(hi, (r.cost[k + 1] - v2) / (b2 - r.activity[k + 1]));
    }
    e = rel_gap(hi, nus[k]);
    r.worst_error = std::max(r.worst_error, e);
    if (e > tol) r.max_identity = false;
  }
  r.diminishing = is_nondecreasing(r.rates, tol);
  return r;
}

namespace {

std::vector<std::vector<std::size_t>> adjacency(const Eigen::MatrixXd& p) {
  std::vector<std::vector<std::size_t>> adj(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) > 0.0) adj[i].push_back(static_cast<std::size_t>(j));
    }
  }
  return adj;
}

std::vector<char> reach_from(const std::vector<std::vector<std::size_t>>& adj,
                             std::size_t s) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j : adj[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

// Closed classes as lists of states, each sorted, ordered by smallest member.
std::vector<std::vector<std::size_t>> closed_classes(const Eigen::MatrixXd& p) {
  const auto adj = adjacency(p);
  const std::size_t n = adj.size();
  std::vector<std::vector<char>> reach(n);
  for (std::size_t i = 0; i < n; ++i) reach[i] = reach_from(adj, i);
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> used(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    // i is recurrent iff every state it reaches reaches it back.
    bool recurrent = true;
    for (std::size_t j = 0; j < n && recurrent; ++j) {
      if (reach[i][j] && !reach[j][i]) recurrent = false;
    }
    if (!recurrent) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) {
        cls.push_back(j);
        used[j] = 1;
      }
    }
    out.push_back(std::move(cls));
  }
  return out;
}

}  // namespace

bool is_communicating(const RBModel& m) {
  Eigen::MatrixXd u = m.p0() + m.p1();
  const auto adj = adjacency(u);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    const auto r = reach_from(adj, i);
    if (std::find(r.begin(), r.end(), 0) != r.end()) return false;
  }
  return true;
}

std::size_t recurrent_classes(const RBModel& m, const Policy& u) {
  return closed_classes(mixed_transitions(m, normalized(m, u))).size();
}

AverageLimits average_limits(const RBModel& m, const Policy& u) {
  const Policy v = normalized(m, u);
  if (!is_communicating(m)) {
    throw UnsupportedModelError("model is not communicating");
  }
  const Eigen::MatrixXd pu = mixed_transitions(m, v);
  const auto classes = closed_classes(pu);
  if (classes.size() != 1) {
    throw UnsupportedModelError("policy is multichain (" +
                                std::to_string(classes.size()) + " closed classes)");
  }
  const std::size_t n = m.n_states();
  const std::size_t ref = classes.front().front();
  // Unknowns: bias in every state except ref, and the gain in slot ref.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - pu;
  a.col(static_cast<Eigen::Index>(ref)).setOnes();
  Eigen::MatrixXd rhs(n, 2);
  rhs.col(0) = activity_rhs(m, v);
  rhs.col(1) = cost_rhs(m, v);
  const Eigen::MatrixXd z = lu_solve(a, rhs);
  AverageLimits r;
  r.ref_state = ref;
  r.b_bar = z(ref, 0);
  r.v_bar = z(ref, 1);
  r.a = z.col(0);
  r.f = z.col(1);
  r.a[ref] = 0.0;
  r.f[ref] = 0.0;
  r.w_bar = workload_from(m, r.a, 1.0);
  r.c_bar = cost_from(m, r.f, 1.0);
  return r;
}

AverageLimits average_limits(const RBModel& m, Subset s) {
  return average_limits(m, s_active_policy(m, s));
}

ConstrainedSolution constrained_policy(const RBModel& m, const SetSystem& sys,
                                       double t) {
  const PCLReport rep = pcl_index(m, sys, Criterion::kAverage);
  if (!rep.pcl_indexable) {
    throw UnsupportedModelError("model is not PCL-indexable under the average criterion: " +
                                rep.message);
  }
  const auto chain = rep.state_chain(m);
  const auto nus = rep.ag->nu_along_pi();
  std::vector<AverageLimits> lim;
  for (Subset s : chain) lim.push_back(average_limits(m, s));
  const double hi = lim.front().b_bar, lo = lim.back().b_bar;
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (!(t >= lo - slack && t <= hi + slack)) {
    throw InfeasibleTargetError("target activity outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
  }
  ConstrainedSolution sol;
  const std::size_t n = nus.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double bk = lim[k].b_bar, bk1 = lim[k + 1].b_bar;
    const bool at_upper = std::abs(t - bk) <= slack;
    const bool at_lower = k + 1 == n && std::abs(t - bk1) <= slack;
    if (!(at_upper || at_lower || (t < bk && t > bk1))) continue;
    sol.k = k + 1;
    sol.upper = chain[k];
    sol.lower = chain[k + 1];
    sol.pivot = m.controllable()[rep.ag->pi[k]];
    sol.marginal_rate = nus[k];
    if (at_upper || at_lower) {
      sol.deterministic = true;
      sol.mix = at_upper ? 1.0 : 0.0;
    } else {
      sol.mix = (t - bk1) / (bk - bk1);
    }
    sol.value = (1.0 - sol.mix) * lim[k + 1].v_bar + sol.mix * lim[k].v_bar;
    // Single-state randomization: average activity is monotone in q.
    Policy u = s_active_policy(m, sol.lower);
    double qlo = 0.0, qhi = 1.0;
    if (sol.deterministic) {
      qlo = qhi = sol.mix;
    } else {
      for (int it = 0; it < 200 && qhi - qlo > 1e-15; ++it) {
        const double q = 0.5 * (qlo + qhi);
        u[sol.pivot] = q;
        if (average_limits(m, u).b_bar < t) qlo = q; else qhi = q;
      }
    }
    sol.state_probability = 0.5 * (qlo + qhi);
    u[sol.pivot] = sol.state_probability;
    sol.randomized_value = average_limits(m, u).v_bar;
    return sol;
  }
  throw InfeasibleTargetError("target activity not bracketed by the index chain");
}

}  // namespace rbindex
