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

#include "rbindex/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rbindex/dp_oracle.hpp"
#include "rbindex/error.hpp"

namespace rbindex {

using nlohmann::json;

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

json state_list(Subset s) { return elements(s); }

json chain_json(const std::vector<Subset>& chain) {
  json out = json::array();
  for (Subset s : chain) out.push_back(state_list(s));
  return out;
}

SetSystem rb_family(const Model& model, const RBModel& m, const std::string& family) {
  const std::size_t nc = m.n_controllable();
  if (nc == 0) throw InputError("model has no controllable states");
  if (family == "threshold") return threshold_family(nc);
  if (family == "powerset" || family == "auto") return powerset_family(nc);
  if (family == "explicit") {
    if (model.family.empty()) throw InputError("field 'family': missing for explicit family");
    std::vector<Subset> fam;
    for (Subset s : model.family) fam.push_back(m.to_positions(s));
    return SetSystem(nc, fam);
  }
  throw ArgumentError("unknown family '" + family + "'");
}

json pcl_json(const RBModel& m, const PCLReport& p) {
  json r;
  r["criterion"] = p.criterion == Criterion::kDiscounted ? "discounted" : "average";
  r["workloads_positive"] = p.workloads_positive;
  if (!p.workloads_positive && p.bad_set != 0) {
    r["bad_workload"] = {{"set", state_list(p.bad_set)},
                         {"state", p.bad_state},
                         {"value", p.bad_workload}};
  }
  r["admissible"] = p.admissible;
  r["pcl_indexable"] = p.pcl_indexable;
  r["message"] = p.message;
  if (p.ag) {
    std::vector<std::size_t> pi;
    for (std::size_t k : p.ag->pi) pi.push_back(m.controllable()[k]);
    const auto along = p.ag->nu_along_pi();
    r["indices"] = p.nu_by_state;
    r["pi"] = pi;
    r["nu_along_pi"] = along;
    r["monotone"] = is_nondecreasing(along, 1e-9);
    r["chain"] = chain_json(p.state_chain(m));
  }
  return r;
}

std::vector<std::string> index_table(const std::vector<double>& nu) {
  std::vector<std::string> out{"state  index"};
  for (std::size_t j = 0; j < nu.size(); ++j) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%5zu  %.17g", j, nu[j]);
    out.emplace_back(buf);
  }
  return out;
}

RBModel as_rb(const Model& model) {
  if (model.kind == ModelKind::kRB) return *model.rb;
  if (model.kind == ModelKind::kAdmission) return uniformize(*model.admission, model.measure);
  throw InputError(std::string("command needs an rb or admission model, got ") +
                   kind_name(model.kind));
}

}  // namespace

CommandResult cmd_index(const Model& model, const std::string& family) {
  if (family != "auto" && family != "threshold" && family != "powerset" &&
      family != "explicit") {
    throw ArgumentError("unknown family '" + family + "'");
  }
  CommandResult out;
  json& r = out.results;
  r["kind"] = kind_name(model.kind);
  if (model.kind == ModelKind::kRB) {
    const RBModel& m = *model.rb;
    const std::string fam = family == "auto" ? "powerset" : family;
    const SetSystem sys = rb_family(model, m, fam);
    const Criterion crit = m.beta() < 1.0 ? Criterion::kDiscounted : Criterion::kAverage;
    const PCLReport p = pcl_index(m, sys, crit);
    r["family"] = fam;
    r["family_size"] = sys.size();
    r["pcl"] = pcl_json(m, p);
    out.log.push_back("pcl: " + p.message);
    if (p.ag) {
      for (auto& line : index_table(p.nu_by_state)) out.log.push_back(line);
    }
    if (!p.workloads_positive) out.verdict = Verdict::kAssumption;
    return out;
  }
  if (model.kind != ModelKind::kAdmission) {
    throw InputError(std::string("index needs an rb or admission model, got ") +
                     kind_name(model.kind));
  }
  const ACModel& a = *model.admission;
  const AssumptionReport rep = validate_assumptions(a);
  r["alpha"] = a.alpha;
  r["assumptions"] = {{"ok", rep.ok}, {"violations", rep.violations}};
  const auto nu = indices(a, {.check_assumptions = false});
  const bool monotone = is_nondecreasing(nu, 1e-9);
  r["indices"] = nu;
  r["monotone"] = monotone;
  std::vector<Subset> chain;
  for (std::size_t k = 0; k < a.n; ++k) chain.push_back(full_set(a.n) & ~full_set(k));
  chain.push_back(0);
  r["chain"] = chain_json(chain);
  for (auto& line : index_table(nu)) out.log.push_back(line);
  if (!rep.ok) {
    out.verdict = Verdict::kAssumption;
    for (const auto& v : rep.violations) out.log.push_back("assumption violated: " + v);
  } else if (!monotone) {
    out.verdict = Verdict::kConsistency;
    out.log.push_back("index recursion is not monotone on a compliant model");
  }
  if (family == "powerset" || family == "explicit") {
    const RBModel m = uniformize(a, model.measure);
    const SetSystem sys = rb_family(model, m, family);
    const Criterion crit = m.beta() < 1.0 ? Criterion::kDiscounted : Criterion::kAverage;
    const PCLReport p = pcl_index(m, sys, crit);
    json pj = pcl_json(m, p);
    if (p.pcl_indexable && model.measure == ActivityMeasure::kRejections) {
      double worst = 0.0;
      for (std::size_t j = 0; j < a.n; ++j) {
        worst = std::max(worst, std::abs(p.nu_by_state[j] - nu[j]) /
                                    std::max(1.0, std::abs(nu[j])));
      }
      pj["max_rel_diff_vs_recursion"] = worst;
      if (worst > 1e-8) {
        out.verdict = Verdict::kConsistency;
        out.log.push_back(fmt("family indices differ from recursion by %.3g", worst));
      }
    }
    r["pcl"] = pj;
  }
  return out;
}

CommandResult cmd_dp_verify(const Model& model, const DPVerifyOptions& opts) {
  CommandResult out;
  json& r = out.results;
  const RBModel m = as_rb(model);
  m.require_discounted();
  const std::string fam = model.kind == ModelKind::kAdmission
                              ? "threshold"
                              : (model.family.empty() ? "powerset" : "explicit");
  const SetSystem sys = rb_family(model, m, fam);
  const PCLReport p = pcl_index(m, sys);
  r["kind"] = kind_name(model.kind);
  r["family"] = fam;
  r["eps"] = opts.eps;
  r["pcl"] = pcl_json(m, p);

  std::vector<double> fc(m.n_states(), std::numeric_limits<double>::quiet_NaN());
  json fcj = json::array();
  bool warned = false;
  for (std::size_t s : m.controllable()) {
    const FairCharge f = fair_charge(m, s);
    fc[s] = f.nu;
    json e = {{"state", s}, {"nu", f.nu}, {"multiple_roots", f.multiple_roots}};
    if (f.multiple_roots) {
      e["warning"] = f.warning;
      warned = true;
    }
    fcj.push_back(e);
  }
  r["fair_charges"] = fcj;

  bool agree = true;
  if (p.pcl_indexable) {
    const CrosscheckReport cc = crosscheck_indices(m, p, opts.eps);
    json pts = json::array();
    for (const auto& g : cc.points) {
      pts.push_back({{"nu", g.nu}, {"strict", g.strict}, {"expected", state_list(g.expected)},
                     {"got", state_list(g.got)}, {"ok", g.ok}});
    }
    double worst = 0.0;
    for (std::size_t s : m.controllable()) {
      worst = std::max(worst, std::abs(fc[s] - p.nu_by_state[s]) /
                                  std::max(1.0, std::abs(p.nu_by_state[s])));
    }
    r["crosscheck"] = {{"reference", "pcl"}, {"points", pts},
                       {"mismatches", cc.mismatches}, {"diff", cc.diff}};
    r["fair_charge_max_rel_diff"] = worst;
    agree = cc.agree && worst <= 1e-7;
    out.log.push_back(fmt("crosscheck against PCL indices: %.0f grid points, %.0f mismatches",
                          static_cast<double>(cc.points.size()),
                          static_cast<double>(cc.mismatches)));
  } else {
    // No PCL index: check DP active sets against the fair charges instead.
    std::vector<double> vals;
    for (std::size_t s : m.controllable()) vals.push_back(fc[s]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double x, double y) {
                             return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x));
                           }),
               vals.end());
    const double spread = std::max(1.0, vals.back() - vals.front());
    std::vector<double> grid{vals.front() - spread};
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) grid.push_back(0.5 * (vals[k] + vals[k + 1]));
    grid.push_back(vals.back() + spread);
    json pts = json::array();
    std::size_t mism = 0;
    for (double nu : grid) {
      Subset expected = 0;
      for (std::size_t s : m.controllable()) {
        if (nu <= fc[s]) expected = with(expected, s);
      }
      const Subset got = solve(m, nu, DPMethod::kPolicyIteration, opts.eps).active_set();
      const bool ok = got == expected;
      if (!ok) ++mism;
      pts.push_back({{"nu", nu}, {"expected", state_list(expected)},
                     {"got", state_list(got)}, {"ok", ok}});
    }
    r["crosscheck"] = {{"reference", "fair_charge"}, {"points", pts}, {"mismatches", mism}};
    agree = mism == 0 && !warned;
    out.log.push_back("model is not PCL-indexable (" + p.message +
                      "); checked DP against fair charges");
    bool threshold = true;
    for (std::size_t k = 1; k < m.controllable().size(); ++k) {
      if (fc[m.controllable()[k]] < fc[m.controllable()[k - 1]] - 1e-9) threshold = false;
    }
    r["threshold_consistent"] = threshold;
  }

  if (opts.grid > 0) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t s : m.controllable()) {
      lo = std::min(lo, fc[s]);
      hi = std::max(hi, fc[s]);
    }
    const double spread = std::max(1.0, hi - lo);
    lo -= spread;
    hi += spread;
    std::vector<double> grid;
    for (std::size_t k = 0; k < opts.grid; ++k) {
      grid.push_back(opts.grid == 1 ? lo
                                    : lo + (hi - lo) * static_cast<double>(k) /
                                               static_cast<double>(opts.grid - 1));
    }
    const SweepResult sw = nu_sweep(m, grid, opts.eps, &sys);
    json sets = json::array();
    for (Subset s : sw.sets) sets.push_back(state_list(s));
    r["sweep"] = {{"grid", sw.grid}, {"sets", sets}, {"nested", sw.nested},
                  {"all_in_family", sw.all_in_family}};
    if (!sw.nested) agree = false;
  }
  r["agree"] = agree;
  if (!agree) out.verdict = Verdict::kConsistency;
  out.log.push_back(agree ? "dp-verify: full agreement" : "dp-verify: DISAGREEMENT");
  return out;
}

namespace {

json estimate_json(const PolicyEstimate& e) {
  return {{"policy", e.policy},
          {"mean", e.mean},
          {"se", e.se},
          {"ci95", {e.ci_low, e.ci_high}},
          {"half_width", e.half_width},
          {"events", e.events},
          {"replications", e.replications},
          {"boundary_fraction", e.boundary_fraction},
          {"boundary_flag", e.boundary_flag}};
}

std::string estimate_line(const PolicyEstimate& e) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-16s %14.6g %12.4g %12.4g %s", e.policy.c_str(),
                e.mean, e.se, e.half_width, e.boundary_flag ? "boundary!" : "");
  return buf;
}

}  // namespace

CommandResult cmd_simulate(const Model& model, const SimulateOptions& opts) {
  CommandResult out;
  json& r = out.results;
  SimConfig cfg = opts.config;
  if (cfg.events == 0 && cfg.horizon == 0.0) cfg.events = 100000;
  std::vector<std::string> names = opts.policies;
  std::vector<PolicyEstimate> ests;
  double alpha = 0.0;
  if (model.kind == ModelKind::kRouting) {
    const RoutingSystem& sys = *model.routing;
    alpha = sys.alpha;
    if (names.empty()) names = {"index", "shortest-queue", "naive"};
    for (const auto& n : names) {
      Decider d;
      if (n == "index") {
        d = index_routing_policy(sys);
      } else if (n == "shortest-queue") {
        d = shortest_queue_policy(sys);
      } else if (n == "naive") {
        d = naive_routing_policy(sys);
      } else {
        throw ArgumentError("unknown routing policy '" + n + "'");
      }
      ests.push_back(simulate(sys, d, cfg, n));
    }
    if (sys.queues.size() == 1 && std::isfinite(sys.nu) && sys.alpha == 0.0) {
      const auto nu = routing_index_table(sys)[0];
      Subset reject = 0;
      for (std::size_t j = 0; j < nu.size(); ++j) {
        if (sys.nu <= nu[j]) reject = with(reject, j);
      }
      const double exact = analytic_average_cost(sys, reject);
      r["analytic_index_policy"] = {{"reject_states", state_list(reject)}, {"cost", exact}};
      out.log.push_back(fmt("analytic cost of the index threshold policy: %.10g", exact));
    }
  } else if (model.kind == ModelKind::kMTS) {
    const MTSSystem& sys = *model.mts;
    alpha = sys.alpha;
    if (names.empty()) names = {"index", "least-stock"};
    for (const auto& n : names) {
      Decider d;
      if (n == "index") {
        d = index_mts_policy(sys);
      } else if (n == "least-stock") {
        d = least_stock_policy(sys);
      } else {
        throw ArgumentError("unknown make-to-stock policy '" + n + "'");
      }
      ests.push_back(simulate(sys, d, cfg, n));
    }
  } else {
    throw InputError(std::string("simulate needs a routing or mts model, got ") +
                     kind_name(model.kind));
  }
  r["kind"] = kind_name(model.kind);
  r["criterion"] = alpha > 0.0 ? "discounted" : "average";
  r["seed"] = cfg.seed;
  r["config"] = {{"horizon", cfg.horizon}, {"events", cfg.events},
                 {"replications", cfg.replications}, {"warmup_fraction", cfg.warmup_fraction}};
  json pol = json::array();
  out.log.push_back("policy                     mean           se    ci95 half");
  for (const auto& e : ests) {
    pol.push_back(estimate_json(e));
    out.log.push_back(estimate_line(e));
  }
  r["policies"] = pol;
  return out;
}

CommandResult cmd_counterexample() {
  CommandResult out;
  json& r = out.results;
  const Counterexample cx = whittle_counterexample();
  const RBModel m = uniformize(cx.model, ActivityMeasure::kShutTime);
  const char* labels[] = {"11022/19111", "3300/6767", "0"};
  json rows = json::array();
  bool match = true;
  std::vector<double> got;
  for (std::size_t s = 0; s < 3; ++s) {
    const FairCharge f = fair_charge(m, s);
    const double err = std::abs(f.nu - cx.expected[s]);
    const bool ok = err <= 1e-8;
    match = match && ok;
    got.push_back(f.nu);
    rows.push_back({{"state", s}, {"fair_charge", f.nu}, {"expected", cx.expected[s]},
                    {"expected_fraction", labels[s]}, {"abs_error", err}, {"ok", ok}});
    out.log.push_back(fmt("state %.0f: fair charge %.12f expected %.12f", static_cast<double>(s),
                          f.nu, cx.expected[s]));
  }
  r["fair_charges"] = rows;
  // Threshold policies need the index nondecreasing in the queue length.
  const bool threshold = is_nondecreasing(got, 1e-9);
  r["threshold_consistent"] = threshold;
  r["match"] = match;

  // The same queue indexed by the rejection measure through the recursion.
  const auto ext = indices(cx.model, {.check_assumptions = false});
  r["extended"] = {{"measure", "rejections"}, {"indices", ext},
                   {"monotone", is_nondecreasing(ext, 1e-9)}};
  out.log.push_back(std::string("ordering ") +
                    (threshold ? "consistent" : "inconsistent") + " with threshold policies");
  out.log.push_back(match ? "PASS" : "FAIL");
  if (!match) out.verdict = Verdict::kConsistency;
  return out;
}

CommandResult cmd_switching_curve(const Model& model, std::size_t bound,
                                  std::size_t slope_from) {
  if (model.kind != ModelKind::kRouting) {
    throw InputError(std::string("switching-curve needs a routing model, got ") +
                     kind_name(model.kind));
  }
  CommandResult out;
  const SwitchingCurve sc = switching_curve(*model.routing, bound, slope_from);
  json pts = json::array();
  for (std::size_t k = 0; k < sc.j1.size(); ++k) pts.push_back({sc.j1[k], sc.j2[k]});
  out.results = {{"heavy_traffic", sc.heavy_traffic},
                 {"limit_slope", sc.limit_slope},
                 {"slope_from", sc.slope_from},
                 {"bound", bound},
                 {"truncated", sc.truncated},
                 {"boundary", pts}};
  if (sc.truncated) {
    out.log.push_back(fmt("boundary left the search range after j1 = %zu", sc.j1.back()));
  }
  if (sc.heavy_traffic) {
    out.results["empirical_slope"] = sc.empirical_slope;
    out.results["relative_error"] =
        std::abs(sc.empirical_slope - sc.limit_slope) / std::abs(sc.limit_slope);
    out.log.push_back(fmt("empirical slope %.6f, limit ln(rho1)/ln(rho2) = %.6f",
                          sc.empirical_slope, sc.limit_slope));
  } else {
    out.log.push_back("not in heavy traffic; boundary reported without a slope claim");
  }
  return out;
}

}  // namespace rbindex
