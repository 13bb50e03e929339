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

#include "rbindex/model_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rbindex/error.hpp"

namespace rbindex {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw InputError("field '" + field + "': " + what);
}

const json& need(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) fail(ctx + key, "missing");
  return j.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

std::size_t count(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(field, "expected a nonnegative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

std::vector<double> vec(const json& v, const std::string& field, std::size_t len) {
  if (!v.is_array()) fail(field, "expected an array");
  if (v.size() != len) {
    fail(field, "expected " + std::to_string(len) + " entries, got " +
                    std::to_string(v.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// A number (constant vector) or an array of length len.
std::vector<double> vec_or_const(const json& v, const std::string& field,
                                 std::size_t len) {
  if (v.is_number()) return std::vector<double>(len, number(v, field));
  return vec(v, field, len);
}

// An array of length n + 1 or {"rate": a, "shape": "linear"|"quadratic"}.
std::vector<double> cost_curve(const json& v, const std::string& field,
                               std::size_t n) {
  if (v.is_object()) {
    const double a = number(need(v, "rate", field + "."), field + ".rate");
    const std::string shape = v.value("shape", std::string("linear"));
    if (shape != "linear" && shape != "quadratic") {
      fail(field + ".shape", "expected linear or quadratic");
    }
    std::vector<double> out(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double jj = static_cast<double>(j);
      out[j] = shape == "linear" ? a * jj : a * jj * jj;
    }
    return out;
  }
  return vec(v, field, n + 1);
}

Eigen::MatrixXd matrix(const json& v, const std::string& field, std::size_t n) {
  if (!v.is_array() || v.size() != n) {
    fail(field, "expected " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = vec(v[i], field + "[" + std::to_string(i) + "]", n);
    for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
  }
  return m;
}

Eigen::VectorXd evec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> svec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json rows(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    out.push_back(r);
  }
  return out;
}

Model parse_rb(const json& doc) {
  const std::size_t n = count(need(doc, "states", ""), "states");
  if (n == 0) fail("states", "must be positive");
  std::vector<std::size_t> ctrl;
  if (doc.contains("controllable")) {
    const auto& c = doc.at("controllable");
    if (!c.is_array()) fail("controllable", "expected an array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t s = count(c[i], "controllable[" + std::to_string(i) + "]");
      if (s >= n) fail("controllable", "state out of range");
      ctrl.push_back(s);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) ctrl.push_back(i);
  }
  const Eigen::MatrixXd p0 = matrix(need(doc, "P0", ""), "P0", n);
  const Eigen::MatrixXd p1 = matrix(need(doc, "P1", ""), "P1", n);
  const auto h0 = vec(need(doc, "h0", ""), "h0", n);
  const auto h1 = vec(need(doc, "h1", ""), "h1", n);
  const auto th = doc.contains("theta1") ? vec_or_const(doc.at("theta1"), "theta1", n)
                                         : std::vector<double>(n, 1.0);
  const double beta = number(need(doc, "beta", ""), "beta");
  Model m;
  m.kind = ModelKind::kRB;
  m.rb.emplace(p0, p1, evec(h0), evec(h1), evec(th), beta, ctrl);
  if (doc.contains("family")) {
    const auto& f = doc.at("family");
    if (!f.is_array()) fail("family", "expected an array of state lists");
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::string field = "family[" + std::to_string(k) + "]";
      if (!f[k].is_array()) fail(field, "expected an array");
      Subset s = 0;
      for (const auto& e : f[k]) {
        const std::size_t st = count(e, field);
        if (st >= n || !m.rb->is_controllable(st)) {
          fail(field, "entries must be controllable states");
        }
        s = with(s, st);
      }
      m.family.push_back(s);
    }
  }
  return m;
}

Model parse_admission(const json& doc) {
  const std::size_t n = count(need(doc, "n", ""), "n");
  if (n == 0) fail("n", "must be positive");
  const auto lambda = vec_or_const(need(doc, "lambda", ""), "lambda", n + 1);
  const auto& mu_j = need(doc, "mu", "");
  std::vector<double> mu;
  if (mu_j.is_array() && mu_j.size() == n + 1) {
    mu = vec(mu_j, "mu", n + 1);
    if (mu[0] != 0.0) fail("mu", "with n + 1 entries, mu[0] must be 0");
    mu.erase(mu.begin());
  } else {
    mu = vec_or_const(mu_j, "mu", n);
  }
  const auto h = cost_curve(need(doc, "h", ""), "h", n);
  const double alpha = doc.contains("alpha") ? number(doc.at("alpha"), "alpha") : 0.0;
  const double Lambda = doc.contains("Lambda") ? number(doc.at("Lambda"), "Lambda") : 0.0;
  Model m;
  m.kind = ModelKind::kAdmission;
  m.admission = ACModel::make(lambda, mu, h, alpha, Lambda);
  if (doc.contains("measure")) {
    const auto& s = doc.at("measure");
    if (s == "rejections") {
      m.measure = ActivityMeasure::kRejections;
    } else if (s == "shut_time") {
      m.measure = ActivityMeasure::kShutTime;
    } else {
      fail("measure", "expected rejections or shut_time");
    }
  }
  return m;
}

bool flag(const json& j, const std::string& key, const std::string& field) {
  if (!j.contains(key)) return false;
  if (!j.at(key).is_boolean()) fail(field + key, "expected a boolean");
  return j.at(key).get<bool>();
}

Model parse_routing(const json& doc) {
  RoutingSystem sys;
  sys.lambda = number(need(doc, "lambda", ""), "lambda");
  sys.alpha = doc.contains("alpha") ? number(doc.at("alpha"), "alpha") : 0.0;
  if (doc.contains("nu") && !doc.at("nu").is_null()) sys.nu = number(doc.at("nu"), "nu");
  const auto& qs = need(doc, "queues", "");
  if (!qs.is_array() || qs.empty()) fail("queues", "expected a nonempty array");
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const std::string ctx = "queues[" + std::to_string(k) + "].";
    QueueSpec q;
    q.n = count(need(qs[k], "n", ctx), ctx + "n");
    if (q.n == 0) fail(ctx + "n", "must be positive");
    q.mu = vec_or_const(need(qs[k], "mu", ctx), ctx + "mu", q.n);
    q.mu.insert(q.mu.begin(), 0.0);
    q.h = cost_curve(need(qs[k], "h", ctx), ctx + "h", q.n);
    q.infinite = flag(qs[k], "infinite", ctx);
    sys.queues.push_back(std::move(q));
  }
  sys.check();
  Model m;
  m.kind = ModelKind::kRouting;
  m.routing = std::move(sys);
  return m;
}

Model parse_mts(const json& doc) {
  MTSSystem sys;
  sys.alpha = doc.contains("alpha") ? number(doc.at("alpha"), "alpha") : 0.0;
  sys.nu = doc.contains("nu") ? number(doc.at("nu"), "nu") : 0.0;
  const auto& ps = need(doc, "products", "");
  if (!ps.is_array() || ps.empty()) fail("products", "expected a nonempty array");
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const std::string ctx = "products[" + std::to_string(k) + "].";
    ProductSpec p;
    p.n = count(need(ps[k], "n", ctx), ctx + "n");
    if (p.n == 0) fail(ctx + "n", "must be positive");
    p.lambda = vec_or_const(need(ps[k], "lambda", ctx), ctx + "lambda", p.n + 1);
    p.mu = vec_or_const(need(ps[k], "mu", ctx), ctx + "mu", p.n + 1);
    p.c = cost_curve(need(ps[k], "c", ctx), ctx + "c", p.n);
    p.s = ps[k].contains("s") ? number(ps[k].at("s"), ctx + "s") : 0.0;
    p.r = ps[k].contains("r") ? vec_or_const(ps[k].at("r"), ctx + "r", p.n + 1)
                              : std::vector<double>(p.n + 1, 0.0);
    p.infinite = flag(ps[k], "infinite", ctx);
    sys.products.push_back(std::move(p));
  }
  sys.check();
  Model m;
  m.kind = ModelKind::kMTS;
  m.mts = std::move(sys);
  return m;
}

}  // namespace

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kRB: return "rb";
    case ModelKind::kAdmission: return "admission";
    case ModelKind::kRouting: return "routing";
    case ModelKind::kMTS: return "mts";
  }
  return "unknown";
}

Model parse_model(const json& doc) {
  if (!doc.is_object()) throw InputError("model file must be a JSON object");
  try {
    const auto& kind = need(doc, "kind", "");
    if (!kind.is_string()) fail("kind", "expected a string");
    const std::string k = kind.get<std::string>();
    if (k == "rb") return parse_rb(doc);
    if (k == "admission") return parse_admission(doc);
    if (k == "routing") return parse_routing(doc);
    if (k == "mts") return parse_mts(doc);
    fail("kind", "unknown model kind '" + k + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  }
}

Model parse_model_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  return parse_model(doc);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

json to_json(const Model& m) {
  json out;
  out["kind"] = kind_name(m.kind);
  switch (m.kind) {
    case ModelKind::kRB: {
      const RBModel& rb = *m.rb;
      out["states"] = rb.n_states();
      out["controllable"] = rb.controllable();
      out["P0"] = rows(rb.p0());
      out["P1"] = rows(rb.p1());
      out["h0"] = svec(rb.h0());
      out["h1"] = svec(rb.h1());
      out["theta1"] = svec(rb.theta1());
      out["beta"] = rb.beta();
      if (!m.family.empty()) {
        json fam = json::array();
        for (Subset s : m.family) fam.push_back(elements(s));
        out["family"] = fam;
      }
      break;
    }
    case ModelKind::kAdmission: {
      const ACModel& a = *m.admission;
      out["n"] = a.n;
      out["lambda"] = a.lambda;
      out["mu"] = std::vector<double>(a.mu.begin() + 1, a.mu.end());
      out["h"] = a.h;
      out["alpha"] = a.alpha;
      if (a.Lambda > 0.0) out["Lambda"] = a.Lambda;
      out["measure"] = m.measure == ActivityMeasure::kRejections ? "rejections" : "shut_time";
      break;
    }
    case ModelKind::kRouting: {
      const RoutingSystem& s = *m.routing;
      out["lambda"] = s.lambda;
      out["alpha"] = s.alpha;
      if (std::isfinite(s.nu)) out["nu"] = s.nu;
      json qs = json::array();
      for (const auto& q : s.queues) {
        qs.push_back({{"n", q.n},
                      {"mu", std::vector<double>(q.mu.begin() + 1, q.mu.end())},
                      {"h", q.h},
                      {"infinite", q.infinite}});
      }
      out["queues"] = qs;
      break;
    }
    case ModelKind::kMTS: {
      const MTSSystem& s = *m.mts;
      out["alpha"] = s.alpha;
      out["nu"] = s.nu;
      json ps = json::array();
      for (const auto& p : s.products) {
        ps.push_back({{"n", p.n}, {"lambda", p.lambda}, {"mu", p.mu}, {"c", p.c},
                      {"s", p.s}, {"r", p.r}, {"infinite", p.infinite}});
      }
      out["products"] = ps;
      break;
    }
  }
  return out;
}

std::string canonical_dump(const Model& m) { return to_json(m).dump(); }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const Model& m) { return fnv1a_hex(canonical_dump(m)); }

}  // namespace rbindex
