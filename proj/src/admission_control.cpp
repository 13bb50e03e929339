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

#include "rbindex/admission_control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbindex/error.hpp"

namespace rbindex {

namespace {

// d_i = mu_i - lambda_i with d_0 = -lambda_0; returns delta d_i, i = 1..n, at [i].
std::vector<double> delta_d(const ACModel& m) {
  std::vector<double> dd(m.n + 1, 0.0);
  for (std::size_t i = 1; i <= m.n; ++i) {
    const double di = m.mu[i] - m.lambda[i];
    const double dprev = i == 1 ? -m.lambda[0] : m.mu[i - 1] - m.lambda[i - 1];
    dd[i] = di - dprev;
  }
  return dd;
}

std::vector<double> delta_h(const ACModel& m) {
  std::vector<double> dh(m.n + 1, 0.0);
  for (std::size_t i = 1; i <= m.n; ++i) dh[i] = m.h[i] - m.h[i - 1];
  return dh;
}

// rho_i = lambda_i / mu_{i+1}, i = 0..n-1.
double rho(const ACModel& m, std::size_t i) {
  const double r = m.lambda[i] / m.mu[i + 1];
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DegeneracyError("rho_" + std::to_string(i) +
                          " must be positive (needs lambda_i > 0, mu_{i+1} > 0)");
  }
  return r;
}

double positive_denominator(double d, const char* what) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DegeneracyError(std::string("nonpositive denominator in ") + what);
  }
  return d;
}

}  // namespace

ACModel ACModel::make(std::vector<double> lambda, std::vector<double> mu_1n,
                      std::vector<double> h, double alpha, double Lambda) {
  ACModel m;
  m.n = mu_1n.size();
  m.lambda = std::move(lambda);
  m.mu.assign(1, 0.0);
  m.mu.insert(m.mu.end(), mu_1n.begin(), mu_1n.end());
  m.h = std::move(h);
  m.alpha = alpha;
  m.Lambda = Lambda;
  m.check();
  return m;
}

void ACModel::check() const {
  if (n == 0) throw InputError("admission model needs n >= 1");
  if (lambda.size() != n + 1 || mu.size() != n + 1 || h.size() != n + 1) {
    throw InputError("lambda and h need n + 1 entries, mu needs n");
  }
  if (mu[0] != 0.0) throw InputError("mu_0 must be zero");
  for (std::size_t i = 0; i <= n; ++i) {
    if (!(lambda[i] >= 0.0) || !(mu[i] >= 0.0) || !std::isfinite(lambda[i]) ||
        !std::isfinite(mu[i]) || !std::isfinite(h[i])) {
      throw InputError("rates must be finite and nonnegative");
    }
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InputError("discount rate must be finite and nonnegative");
  }
  if (!(Lambda >= 0.0) || !std::isfinite(Lambda)) {
    throw InputError("uniformization rate must be finite and nonnegative");
  }
}

double ACModel::uniformization_rate() const {
  double top = 0.0;
  for (std::size_t i = 0; i <= n; ++i) top = std::max(top, lambda[i] + mu[i]);
  if (Lambda == 0.0) return top;
  if (Lambda < top * (1.0 - 1e-12)) {
    throw ArgumentError("uniformization rate below max(lambda_i + mu_i)");
  }
  return Lambda;
}

AssumptionReport validate_assumptions(const ACModel& m) {
  m.check();
  AssumptionReport r;
  const auto dd = delta_d(m);
  const auto dh = delta_h(m);
  auto fail = [&](const std::string& s) {
    r.ok = false;
    r.violations.push_back(s);
  };
  // x < y beyond rounding in the differences.
  auto below = [](double x, double y) {
    return x < y - 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  };
  if (!(dd[1] > 0.0)) fail("delta d_1 = " + std::to_string(dd[1]) + " is not positive");
  for (std::size_t i = 1; i + 1 <= m.n; ++i) {
    if (below(dd[i + 1], 0.0)) fail("delta d_" + std::to_string(i + 1) + " is negative");
    if (below(dd[i], dd[i + 1])) {
      fail("delta d_" + std::to_string(i + 1) + " exceeds delta d_" + std::to_string(i));
    }
  }
  if (below(dh[1], 0.0)) fail("delta h_1 is negative");
  for (std::size_t i = 1; i + 1 <= m.n; ++i) {
    if (below(dh[i + 1], dh[i])) {
      fail("delta h_" + std::to_string(i + 1) + " is below delta h_" + std::to_string(i));
    }
  }
  return r;
}

RBModel uniformize(const ACModel& m, ActivityMeasure measure) {
  m.check();
  const double L = m.uniformization_rate();
  if (!(L > 0.0)) throw ArgumentError("uniformization rate must be positive");
  const std::size_t n = m.n, ns = n + 1;
  Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::MatrixXd p1 = Eigen::MatrixXd::Zero(ns, ns);
  for (std::size_t i = 0; i <= n; ++i) {
    const double down = m.mu[i] / L;
    const double up = i < n ? m.lambda[i] / L : 0.0;
    if (i > 0) {
      p0(i, i - 1) = down;
      p1(i, i - 1) = down;
    }
    if (i < n) p0(i, i + 1) = up;
    // Round-off when Lambda equals lambda_i + mu_i.
    p0(i, i) = std::max(0.0, 1.0 - down - up);
    p1(i, i) = std::max(0.0, 1.0 - down);
  }
  const double scale = m.alpha + L;
  Eigen::VectorXd h(ns), theta(ns);
  for (std::size_t i = 0; i <= n; ++i) {
    h[i] = m.h[i] / scale;
    theta[i] = measure == ActivityMeasure::kRejections ? m.lambda[i] / scale
                                                       : 1.0 / scale;
  }
  std::vector<std::size_t> ctrl;
  const std::size_t top = measure == ActivityMeasure::kShutTime ? ns : n;
  for (std::size_t i = 0; i < top; ++i) ctrl.push_back(i);
  return RBModel(p0, p1, h, h, theta, L / scale, ctrl);
}

std::vector<double> ak_coefficients(const ACModel& m) {
  m.check();
  std::vector<double> a(m.n, 1.0);
  for (std::size_t k = 2; k <= m.n; ++k) {
    const double den = (m.alpha + m.lambda[k - 2] + m.mu[k - 1]) *
                       (m.alpha + m.lambda[k - 1] + m.mu[k]) * a[k - 2];
    a[k - 1] = 1.0 - m.lambda[k - 1] * m.mu[k - 1] /
                         positive_denominator(den, "a_k recursion");
    if (!(a[k - 1] > 0.0)) {
      throw AssumptionError("a_" + std::to_string(k) + " = " +
                            std::to_string(a[k - 1]) + " is not positive");
    }
  }
  return a;
}

std::vector<std::vector<double>> workload_table(const ACModel& m) {
  m.check();
  const std::size_t n = m.n;
  const double al = m.alpha;
  const auto dd = delta_d(m);
  const auto a = ak_coefficients(m);
  const auto& lam = m.lambda;
  const auto& mu = m.mu;
  std::vector<std::vector<double>> t(n + 1, std::vector<double>(n, 0.0));
  auto upward = [&](std::vector<double>& w, std::size_t from) {
    for (std::size_t i = std::max<std::size_t>(from, 1); i < n; ++i) {
      w[i] = lam[i] * (al + dd[i + 1] + w[i - 1] / rho(m, i - 1)) /
             positive_denominator(al + mu[i + 1], "workload recursion");
    }
  };
  t[0][0] = lam[0] * (al + dd[1]) / positive_denominator(al + mu[1], "workload recursion");
  upward(t[0], 1);
  t[1][0] = lam[0] * (al + dd[1]) /
            positive_denominator(al + lam[0] + mu[1], "workload recursion");
  upward(t[1], 1);
  for (std::size_t k = 2; k <= n; ++k) {
    auto& w = t[k];
    const double den = positive_denominator(al + lam[k - 1] + mu[k], "pivot step");
    w[k - 1] = lam[k - 1] / a[k - 1] *
               (al + dd[k] + t[k - 1][k - 2] / rho(m, k - 2)) / den;
    w[k - 2] = rho(m, k - 2) * (-(al + dd[k]) + den / lam[k - 1] * w[k - 1]);
    upward(w, k);
    for (std::size_t i = k - 2; i-- > 0;) {
      w[i] = rho(m, i) * (-(al + dd[i + 2]) +
                          (al + lam[i + 1] + mu[i + 2]) / lam[i + 1] * w[i + 1] -
                          w[i + 2]);
    }
  }
  return t;
}

std::vector<double> marginal_cost_pivots(const ACModel& m) {
  m.check();
  const std::size_t n = m.n;
  const double al = m.alpha;
  const auto dh = delta_h(m);
  const auto a = ak_coefficients(m);
  std::vector<double> c(n, 0.0);
  c[0] = m.lambda[0] * dh[1] /
         positive_denominator(al + m.lambda[0] + m.mu[1], "marginal cost recursion");
  for (std::size_t k = 1; k < n; ++k) {
    c[k] = m.lambda[k] / a[k] * (dh[k + 1] + c[k - 1] / rho(m, k - 1)) /
           positive_denominator(al + m.lambda[k] + m.mu[k + 1], "marginal cost recursion");
  }
  return c;
}

std::vector<double> indices(const ACModel& m, const IndexOptions& opts) {
  m.check();
  if (opts.check_assumptions) {
    const auto rep = validate_assumptions(m);
    if (!rep.ok) {
      std::ostringstream os;
      os << "assumptions violated:";
      for (const auto& v : rep.violations) os << ' ' << v << ';';
      throw AssumptionError(os.str());
    }
  }
  const std::size_t n = m.n;
  const double al = m.alpha;
  const auto dd = delta_d(m);
  const auto dh = delta_h(m);
  const auto w = workload_table(m);
  std::vector<double> nu(n, 0.0);
  nu[0] = dh[1] / positive_denominator(al + dd[1], "index recursion");
  for (std::size_t j = 1; j < n; ++j) {
    const double den = al + dd[j + 1] + w[j][j - 1] / rho(m, j - 1);
    nu[j] = nu[j - 1] +
            (dh[j + 1] - nu[j - 1] * (al + dd[j + 1])) /
                positive_denominator(den, "index recursion");
  }
  if (opts.check_assumptions) {
    for (std::size_t j = 1; j < n; ++j) {
      if (nu[j] < nu[j - 1] - 1e-9 * std::max(1.0, std::abs(nu[j]))) {
        throw ConsistencyError("index recursion produced a decrease at state " +
                               std::to_string(j));
      }
    }
  }
  return nu;
}

std::vector<double> average_indices(const ACModel& m, const IndexOptions& opts) {
  ACModel z = m;
  z.alpha = 0.0;
  return indices(z, opts);
}

double closed_form_index(ClosedFormKind kind, const ClosedFormParams& p,
                         std::size_t j) {
  if (!(p.lambda > 0.0) || !(p.mu > 0.0)) {
    throw ArgumentError("closed forms need positive lambda and mu");
  }
  const double r = p.lambda / p.mu;
  const bool one = std::abs(r - 1.0) <= 1e-12;
  if (p.branch == RhoBranch::kRhoOne && !one) {
    throw BranchError("rho = 1 branch requested with rho != 1");
  }
  if (p.branch == RhoBranch::kRhoNotOne && one) {
    throw BranchError("rho != 1 branch requested with rho = 1");
  }
  const double jj = static_cast<double>(j);
  switch (kind) {
    case ClosedFormKind::kLinear:
      if (one) return p.h / p.mu * (jj + 1) * (jj + 2) / 2.0;
      return p.h / p.mu *
             ((std::pow(r, jj + 2) - 1.0) / ((r - 1) * (r - 1)) - (jj + 2) / (r - 1));
    case ClosedFormKind::kQuadratic: {
      if (one) return p.h / p.mu * (jj + 1) * (jj + 2) * (4 * jj + 3) / 6.0;
      const double d = r - 1.0;
      return p.h / p.mu *
             (((2 * jj + 1) / (d * d) - 2.0 / (d * d * d)) * std::pow(r, jj + 2) -
              jj * (jj + 2) / d + 3.0 / (d * d) + 2.0 / (d * d * d));
    }
    case ClosedFormKind::kGeneralSum: {
      if (p.delta_h.size() < j + 1) {
        throw ArgumentError("general sum needs delta_h_1 .. delta_h_{j+1}");
      }
      double total = 0.0, geo = 0.0, pw = 1.0;
      for (std::size_t i = 1; i <= j + 1; ++i) {
        geo += pw;  // 1 + rho + ... + rho^{i-1}
        pw *= r;
        total += p.delta_h[i - 1] * geo;
      }
      return total / p.mu;
    }
  }
  throw ArgumentError("unknown closed-form kind");
}

Counterexample whittle_counterexample() {
  Counterexample ce;
  ce.model = ACModel::make({1.0, 0.5, 0.25}, {1.5, 1.5}, {0.0, 1.0, 2.0},
                           1.0 / 33.0, 3.0);
  ce.expected = {11022.0 / 19111.0, 3300.0 / 6767.0, 0.0};
  return ce;
}

}  // namespace rbindex
