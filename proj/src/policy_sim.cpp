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

#include "rbindex/policy_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "rbindex/error.hpp"

namespace rbindex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_equal(const std::vector<double>& v, std::size_t from, std::size_t to,
               double ref) {
  for (std::size_t i = from; i < to; ++i) {
    if (std::abs(v[i] - ref) > 1e-12 * std::max(1.0, std::abs(ref))) return false;
  }
  return true;
}

// Returns 1 if v[j] = a j, 2 if v[j] = a j^2 (a = v[1]), 0 otherwise.
int cost_shape(const std::vector<double>& v) {
  if (v.size() < 2 || v[0] != 0.0) return 0;
  const double a = v[1];
  bool lin = true, quad = true;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double jj = static_cast<double>(j);
    const double tol = 1e-12 * std::max(1.0, std::abs(v[j]));
    if (std::abs(v[j] - a * jj) > tol) lin = false;
    if (std::abs(v[j] - a * jj * jj) > tol) quad = false;
  }
  return lin ? 1 : (quad ? 2 : 0);
}

std::vector<double> cost_vector(std::size_t n, double h, CostShape shape) {
  std::vector<double> v(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double jj = static_cast<double>(j);
    v[j] = shape == CostShape::kLinear ? h * jj : h * jj * jj;
  }
  return v;
}

struct RepResult {
  double value = 0.0;
  std::uint64_t events = 0;
  std::uint64_t boundary = 0;
};

template <typename Fn>
PolicyEstimate run_replications(const SimConfig& cfg, const std::string& name,
                                Fn&& one) {
  if (cfg.replications == 0) throw ArgumentError("need at least one replication");
  if (cfg.events == 0 && !(cfg.horizon > 0.0)) {
    throw ArgumentError("horizon must be positive");
  }
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
    throw ArgumentError("warm-up fraction must lie in [0, 1)");
  }
  std::vector<RepResult> res(cfg.replications);
  const std::size_t nt =
      std::min(cfg.threads ? cfg.threads : default_threads(), cfg.replications);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t r = next++; r < cfg.replications; r = next++) {
      std::mt19937_64 rng(cfg.seed + r);
      res[r] = one(rng);
    }
  };
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  PolicyEstimate est;
  est.policy = name;
  est.replications = cfg.replications;
  double sum = 0.0;
  std::uint64_t boundary = 0;
  for (const auto& r : res) {
    sum += r.value;
    est.events += r.events;
    boundary += r.boundary;
    est.samples.push_back(r.value);
  }
  const double n = static_cast<double>(cfg.replications);
  est.mean = sum / n;
  if (cfg.replications > 1) {
    double ss = 0.0;
    for (const auto& r : res) ss += (r.value - est.mean) * (r.value - est.mean);
    est.se = std::sqrt(ss / (n - 1.0) / n);
  }
  est.half_width = 1.96 * est.se;
  est.ci_low = est.mean - est.half_width;
  est.ci_high = est.mean + est.half_width;
  est.boundary_fraction =
      est.events ? static_cast<double>(boundary) / static_cast<double>(est.events) : 0.0;
  est.boundary_flag = est.boundary_fraction > 1e-3;
  return est;
}

// Accumulates a piecewise-constant cost rate plus lump costs under either
// criterion.
class CostClock {
 public:
  CostClock(double alpha, const SimConfig& cfg) : alpha_(alpha), cfg_(cfg) {
    if (cfg.events == 0) warm_time_ = alpha > 0.0 ? 0.0 : cfg.warmup_fraction * cfg.horizon;
    warm_events_ = alpha > 0.0 ? 0
                               : static_cast<std::uint64_t>(cfg.warmup_fraction *
                                                            static_cast<double>(cfg.events));
  }

  // Cost rate `rate` held on [t0, t1].
  void flow(double t0, double t1, double rate, std::uint64_t events_done) {
    if (alpha_ > 0.0) {
      total_ += rate * (std::exp(-alpha_ * t0) - std::exp(-alpha_ * t1)) / alpha_;
      return;
    }
    if (!measuring(events_done)) return;
    const double a = std::max(t0, start_), b = t1;
    if (b > a) total_ += rate * (b - a);
  }

  void lump(double t, double amount, std::uint64_t events_done) {
    if (amount == 0.0) return;
    if (alpha_ > 0.0) {
      total_ += amount * std::exp(-alpha_ * t);
    } else if (measuring(events_done) && t >= start_) {
      total_ += amount;
    }
  }

  // Called after every event; fixes the start of the averaging window.
  void tick(double t, std::uint64_t events_done) {
    if (alpha_ > 0.0 || started_) return;
    if (cfg_.events > 0 ? events_done >= warm_events_ : t >= warm_time_) {
      started_ = true;
      start_ = cfg_.events > 0 ? t : warm_time_;
    }
  }

  double result(double t_end) const {
    if (alpha_ > 0.0) return total_;
    const double span = t_end - start_;
    return span > 0.0 ? total_ / span : 0.0;
  }

 private:
  bool measuring(std::uint64_t) const { return started_ || cfg_.events == 0; }

  double alpha_;
  const SimConfig& cfg_;
  double total_ = 0.0;
  double warm_time_ = 0.0;
  std::uint64_t warm_events_ = 0;
  bool started_ = false;
  double start_ = 0.0;
};

bool finished(const SimConfig& cfg, double t, std::uint64_t events) {
  return cfg.events > 0 ? events >= cfg.events : t >= cfg.horizon;
}

}  // namespace

std::size_t default_threads() {
  if (const char* env = std::getenv("RBINDEX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

QueueSpec constant_queue(std::size_t n, double mu, double h, CostShape shape,
                         bool infinite) {
  QueueSpec q;
  q.n = n;
  q.mu.assign(n + 1, mu);
  q.mu[0] = 0.0;
  q.h = cost_vector(n, h, shape);
  q.infinite = infinite;
  return q;
}

void RoutingSystem::check() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("arrival rate must be positive");
  if (queues.empty()) throw InputError("routing system needs at least one queue");
  if (!(alpha >= 0.0)) throw InputError("discount rate must be nonnegative");
  if (std::isnan(nu)) throw InputError("rejection charge must be a number");
  for (const auto& q : queues) {
    if (q.n == 0 || q.mu.size() != q.n + 1 || q.h.size() != q.n + 1) {
      throw InputError("queue needs n >= 1 and n + 1 entries in mu and h");
    }
    if (q.mu[0] != 0.0) throw InputError("queue mu[0] must be zero");
    for (std::size_t j = 1; j <= q.n; ++j) {
      if (!(q.mu[j] > 0.0)) throw InputError("service rates must be positive");
    }
  }
}

ACModel queue_admission_model(const RoutingSystem& sys, std::size_t k) {
  sys.check();
  if (k >= sys.queues.size()) throw ArgumentError("queue index out of range");
  const auto& q = sys.queues[k];
  ACModel m;
  m.n = q.n;
  m.lambda.assign(q.n + 1, sys.lambda);
  m.mu = q.mu;
  m.h = q.h;
  m.alpha = sys.alpha;
  m.check();
  return m;
}

AssumptionReport validate_queue(const RoutingSystem& sys, std::size_t k) {
  return validate_assumptions(queue_admission_model(sys, k));
}

double ProductSpec::net_cost(std::size_t j) const {
  return c[j] + (j == 0 ? s * lambda[0] : -r[j] * lambda[j]);
}

ProductSpec constant_product(std::size_t n, double lambda, double mu, double c,
                             double s, double r, CostShape shape,
                             bool infinite) {
  ProductSpec p;
  p.n = n;
  p.lambda.assign(n + 1, lambda);
  p.mu.assign(n + 1, mu);
  p.c = cost_vector(n, c, shape);
  p.s = s;
  p.r.assign(n + 1, r);
  p.infinite = infinite;
  return p;
}

void MTSSystem::check() const {
  if (products.empty()) throw InputError("make-to-stock system needs a product");
  if (!(alpha >= 0.0)) throw InputError("discount rate must be nonnegative");
  if (!std::isfinite(nu)) throw InputError("production subsidy must be finite");
  for (const auto& p : products) {
    if (p.n == 0 || p.lambda.size() != p.n + 1 || p.mu.size() != p.n + 1 ||
        p.c.size() != p.n + 1 || p.r.size() != p.n + 1) {
      throw InputError("product needs n >= 1 and n + 1 entries per rate vector");
    }
    for (std::size_t j = 0; j <= p.n; ++j) {
      if (!(p.lambda[j] > 0.0) || !(p.mu[j] > 0.0)) {
        throw InputError("order and production rates must be positive");
      }
    }
  }
}

ACModel product_admission_model(const MTSSystem& sys, std::size_t k) {
  sys.check();
  if (k >= sys.products.size()) throw ArgumentError("product index out of range");
  const auto& p = sys.products[k];
  ACModel m;
  m.n = p.n;
  m.lambda = p.mu;  // production plays the arrival role
  m.mu.assign(p.n + 1, 0.0);
  for (std::size_t j = 1; j <= p.n; ++j) m.mu[j] = p.lambda[j];
  m.h.resize(p.n + 1);
  for (std::size_t j = 0; j <= p.n; ++j) m.h[j] = p.net_cost(j);
  m.alpha = sys.alpha;
  m.check();
  return m;
}

AssumptionReport validate_product(const MTSSystem& sys, std::size_t k) {
  return validate_assumptions(product_admission_model(sys, k));
}

double routing_index(const RoutingSystem& sys, std::size_t k, std::size_t j) {
  sys.check();
  if (k >= sys.queues.size()) throw ArgumentError("queue index out of range");
  const auto& q = sys.queues[k];
  if (j >= q.n) throw ArgumentError("routing index needs j < n_k");
  if (sys.alpha == 0.0 && all_equal(q.mu, 1, q.n + 1, q.mu[1]) &&
      cost_shape(q.h) == 1) {
    ClosedFormParams p;
    p.lambda = sys.lambda;
    p.mu = q.mu[1];
    p.h = q.h[1];
    return closed_form_index(ClosedFormKind::kLinear, p, j);
  }
  return indices(queue_admission_model(sys, k), {.check_assumptions = false})[j];
}

std::vector<std::vector<double>> routing_index_table(const RoutingSystem& sys) {
  std::vector<std::vector<double>> t;
  for (std::size_t k = 0; k < sys.queues.size(); ++k) {
    const auto& q = sys.queues[k];
    std::vector<double> row(q.n);
    const bool closed = sys.alpha == 0.0 && all_equal(q.mu, 1, q.n + 1, q.mu[1]) &&
                        cost_shape(q.h) == 1;
    if (closed) {
      for (std::size_t j = 0; j < q.n; ++j) row[j] = routing_index(sys, k, j);
    } else {
      row = indices(queue_admission_model(sys, k), {.check_assumptions = false});
    }
    t.push_back(std::move(row));
  }
  return t;
}

double mts_index(const MTSSystem& sys, std::size_t k, std::size_t j) {
  sys.check();
  if (k >= sys.products.size()) throw ArgumentError("product index out of range");
  const auto& p = sys.products[k];
  if (j >= p.n) throw ArgumentError("production index needs j < n_k");
  const int shape = cost_shape(p.c);
  const double lam = p.lambda[0], mu = p.mu[0];
  const double rho = lam / mu;
  if (sys.alpha == 0.0 && shape != 0 && all_equal(p.lambda, 0, p.n + 1, lam) &&
      all_equal(p.mu, 0, p.n + 1, mu) && all_equal(p.r, 1, p.n + 1, p.r[1]) &&
      std::abs(rho - 1.0) > 1e-12) {
    const double c = p.c[1], d = 1.0 - rho, jj = static_cast<double>(j);
    const double back = std::pow(rho, -jj - 1.0);
    double bracket;
    if (shape == 1) {
      bracket = (back - 1.0) / (d * d) - (jj + 1.0) / d;
    } else {
      bracket = ((2.0 * jj + 3.0) / (d * d) - 2.0 / (d * d * d)) * back -
                (jj + 1.0) * (jj + 1.0) / d - 1.0 / (d * d) + 2.0 / (d * d * d);
    }
    return c / mu * bracket - p.r[1] - p.s;
  }
  return indices(product_admission_model(sys, k), {.check_assumptions = false})[j];
}

std::vector<std::vector<double>> mts_index_table(const MTSSystem& sys) {
  std::vector<std::vector<double>> t;
  for (std::size_t k = 0; k < sys.products.size(); ++k) {
    std::vector<double> row(sys.products[k].n);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = mts_index(sys, k, j);
    t.push_back(std::move(row));
  }
  return t;
}

int index_decide(const std::vector<std::vector<double>>& table,
                 const std::vector<std::size_t>& sizes,
                 const std::vector<std::size_t>& state, double nu) {
  if (state.size() != table.size() || sizes.size() != table.size()) {
    throw ArgumentError("state length differs from component count");
  }
  int best = -1;
  double best_val = kInf;
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (state[k] > sizes[k]) throw ArgumentError("state exceeds buffer size");
    if (state[k] == sizes[k]) continue;
    const double v = table[k][state[k]];
    if (v < nu && (best < 0 || v < best_val)) {
      best = static_cast<int>(k);
      best_val = v;
    }
  }
  return best;
}

namespace {

std::vector<std::size_t> queue_sizes(const RoutingSystem& sys) {
  std::vector<std::size_t> s;
  for (const auto& q : sys.queues) s.push_back(q.n);
  return s;
}

std::vector<std::size_t> product_sizes(const MTSSystem& sys) {
  std::vector<std::size_t> s;
  for (const auto& p : sys.products) s.push_back(p.n);
  return s;
}

}  // namespace

int routing_decide(const RoutingSystem& sys,
                   const std::vector<std::size_t>& state, double nu) {
  return index_decide(routing_index_table(sys), queue_sizes(sys), state, nu);
}

int mts_decide(const MTSSystem& sys, const std::vector<std::size_t>& state,
               double nu) {
  return index_decide(mts_index_table(sys), product_sizes(sys), state, nu);
}

Decider index_routing_policy(const RoutingSystem& sys) {
  auto table = routing_index_table(sys);
  auto sizes = queue_sizes(sys);
  const double nu = sys.nu;
  return [table, sizes, nu](const std::vector<std::size_t>& s) {
    return index_decide(table, sizes, s, nu);
  };
}

Decider shortest_queue_policy(const RoutingSystem& sys) {
  auto sizes = queue_sizes(sys);
  return [sizes](const std::vector<std::size_t>& s) {
    int best = -1;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (s[k] >= sizes[k]) continue;
      if (best < 0 || s[k] < s[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    return best;
  };
}

Decider naive_routing_policy(const RoutingSystem& sys) {
  sys.check();
  std::vector<std::vector<double>> table;
  for (const auto& q : sys.queues) {
    std::vector<double> row(q.n);
    for (std::size_t j = 0; j < q.n; ++j) row[j] = q.h[j + 1] / q.mu[j + 1];
    table.push_back(std::move(row));
  }
  auto sizes = queue_sizes(sys);
  const double nu = sys.nu;
  return [table, sizes, nu](const std::vector<std::size_t>& s) {
    return index_decide(table, sizes, s, nu);
  };
}

Decider threshold_policy(const RoutingSystem& sys, std::uint64_t reject_states) {
  sys.check();
  if (sys.queues.size() != 1) throw ArgumentError("threshold policy needs one queue");
  const std::size_t n = sys.queues[0].n;
  return [n, reject_states](const std::vector<std::size_t>& s) {
    return (s[0] < n && !contains(reject_states, s[0])) ? 0 : -1;
  };
}

Decider index_mts_policy(const MTSSystem& sys) {
  auto table = mts_index_table(sys);
  auto sizes = product_sizes(sys);
  const double nu = sys.nu;
  return [table, sizes, nu](const std::vector<std::size_t>& s) {
    return index_decide(table, sizes, s, nu);
  };
}

Decider least_stock_policy(const MTSSystem& sys) {
  auto sizes = product_sizes(sys);
  return [sizes](const std::vector<std::size_t>& s) {
    int best = -1;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (s[k] >= sizes[k]) continue;
      if (best < 0 || s[k] < s[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    return best;
  };
}

PolicyEstimate simulate(const RoutingSystem& sys, const Decider& policy,
                        const SimConfig& cfg, const std::string& name) {
  sys.check();
  const std::size_t m = sys.queues.size();
  auto one = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::size_t> st(m, 0);
    CostClock clock(sys.alpha, cfg);
    RepResult rr;
    double t = 0.0;
    while (!finished(cfg, t, rr.events)) {
      double total = sys.lambda, cost = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        total += sys.queues[k].mu[st[k]];
        cost += sys.queues[k].h[st[k]];
      }
      double dt = std::exponential_distribution<double>(total)(rng);
      if (cfg.events == 0 && t + dt >= cfg.horizon) {
        clock.flow(t, cfg.horizon, cost, rr.events);
        t = cfg.horizon;
        break;
      }
      clock.flow(t, t + dt, cost, rr.events);
      t += dt;
      double u = unif(rng) * total;
      if (u < sys.lambda) {
        for (std::size_t k = 0; k < m; ++k) {
          if (sys.queues[k].infinite && st[k] == sys.queues[k].n) ++rr.boundary;
        }
        const int k = policy(st);
        if (k >= 0 && st[static_cast<std::size_t>(k)] < sys.queues[static_cast<std::size_t>(k)].n) {
          ++st[static_cast<std::size_t>(k)];
        } else if (std::isfinite(sys.nu)) {
          clock.lump(t, sys.nu, rr.events);
        }
      } else {
        u -= sys.lambda;
        for (std::size_t k = 0; k < m; ++k) {
          const double r = sys.queues[k].mu[st[k]];
          if (u < r || k + 1 == m) {
            if (st[k] > 0) --st[k];
            break;
          }
          u -= r;
        }
      }
      ++rr.events;
      clock.tick(t, rr.events);
    }
    rr.value = clock.result(t);
    return rr;
  };
  return run_replications(cfg, name, one);
}

PolicyEstimate simulate(const MTSSystem& sys, const Decider& policy,
                        const SimConfig& cfg, const std::string& name) {
  sys.check();
  const std::size_t m = sys.products.size();
  auto one = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::size_t> st(m, 0);
    CostClock clock(sys.alpha, cfg);
    RepResult rr;
    double t = 0.0;
    while (!finished(cfg, t, rr.events)) {
      const int a = policy(st);
      double prod = 0.0;
      if (a >= 0 && st[static_cast<std::size_t>(a)] < sys.products[static_cast<std::size_t>(a)].n) {
        prod = sys.products[static_cast<std::size_t>(a)].mu[st[static_cast<std::size_t>(a)]];
      }
      double total = prod, cost = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        total += sys.products[k].lambda[st[k]];
        cost += sys.products[k].net_cost(st[k]);
      }
      double dt = std::exponential_distribution<double>(total)(rng);
      if (cfg.events == 0 && t + dt >= cfg.horizon) {
        clock.flow(t, cfg.horizon, cost, rr.events);
        t = cfg.horizon;
        break;
      }
      clock.flow(t, t + dt, cost, rr.events);
      t += dt;
      double u = unif(rng) * total;
      if (u < prod) {
        const auto k = static_cast<std::size_t>(a);
        ++st[k];
        if (sys.products[k].infinite && st[k] == sys.products[k].n) ++rr.boundary;
        clock.lump(t, -sys.nu, rr.events);
      } else {
        u -= prod;
        for (std::size_t k = 0; k < m; ++k) {
          const double r = sys.products[k].lambda[st[k]];
          if (u < r || k + 1 == m) {
            if (st[k] > 0) --st[k];
            break;
          }
          u -= r;
        }
      }
      ++rr.events;
      clock.tick(t, rr.events);
    }
    rr.value = clock.result(t);
    return rr;
  };
  return run_replications(cfg, name, one);
}

double analytic_average_cost(const RoutingSystem& sys,
                             std::uint64_t reject_states) {
  if (sys.queues.size() != 1) throw ArgumentError("analytic cost needs one queue");
  if (!std::isfinite(sys.nu)) throw ArgumentError("analytic cost needs a finite charge");
  ACModel am = queue_admission_model(sys, 0);
  am.alpha = 0.0;
  const RBModel rb = uniformize(am);
  const double L = am.uniformization_rate();
  const Subset s = reject_states & full_set(am.n);
  const AverageLimits lim = average_limits(rb, s);
  return L * (lim.v_bar + sys.nu * lim.b_bar);
}

SwitchingCurve switching_curve(const RoutingSystem& sys, std::size_t bound,
                               std::size_t slope_from) {
  sys.check();
  if (sys.queues.size() != 2) throw ArgumentError("switching curve needs two queues");
  ClosedFormParams p[2];
  double rho[2];
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& q = sys.queues[k];
    if (!all_equal(q.mu, 1, q.n + 1, q.mu[1]) || cost_shape(q.h) != 1) {
      throw ArgumentError("switching curve needs constant rates and linear costs");
    }
    p[k].lambda = sys.lambda;
    p[k].mu = q.mu[1];
    p[k].h = q.h[1];
    rho[k] = sys.lambda / q.mu[1];
  }
  SwitchingCurve sc;
  sc.heavy_traffic = rho[0] > 1.0 && rho[1] > 1.0;
  sc.limit_slope = std::log(rho[0]) / std::log(rho[1]);
  sc.slope_from = std::min(slope_from, bound > 0 ? bound - 1 : 0);
  const std::size_t cap = 100 * (bound + 10);
  std::size_t j2 = 0;
  for (std::size_t j1 = 0; j1 <= bound && !sc.truncated; ++j1) {
    const double v1 = closed_form_index(ClosedFormKind::kLinear, p[0], j1);
    // The boundary is nondecreasing in j1, so the scan resumes from the last j2.
    j2 = j1 == 0 ? 0 : sc.j2.back();
    if (j2 > 0) --j2;
    while (closed_form_index(ClosedFormKind::kLinear, p[1], j2) < v1) {
      // With rho_1 > rho_2 <= 1 the boundary grows exponentially.
      if (++j2 > cap) {
        sc.truncated = true;
        break;
      }
    }
    if (sc.truncated) break;
    sc.j1.push_back(j1);
    sc.j2.push_back(j2);
  }
  const std::size_t last = sc.j1.empty() ? 0 : sc.j1.back();
  if (last > sc.slope_from) {
    sc.empirical_slope = (static_cast<double>(sc.j2[last]) -
                          static_cast<double>(sc.j2[sc.slope_from])) /
                         static_cast<double>(last - sc.slope_from);
  }
  return sc;
}

}  // namespace rbindex
