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

#include "rbindex/rbindex.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "rbindex/adaptive_greedy.hpp"
#include "rbindex/commands.hpp"
#include "rbindex/error.hpp"
#include "rbindex/model_io.hpp"

#ifndef RBINDEX_VERSION
#define RBINDEX_VERSION "0.0.0"
#endif

struct rbx_model {
  rbindex::Model model;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

template <typename Fn>
rbx_status guard(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const rbindex::Error& e) {
    g_last_error = e.what();
    return static_cast<rbx_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RBX_ERR_GENERIC;
  } catch (...) {
    g_last_error = "unknown error";
    return RBX_ERR_GENERIC;
  }
}

rbx_status need(const void* p, const char* what) {
  if (p) return RBX_OK;
  g_last_error = std::string(what) + " must not be NULL";
  return RBX_ERR_ARGUMENT;
}

rbx_status finish(const rbindex::CommandResult& res, char** report, char** log) {
  *report = dup(res.results.dump());
  if (log) {
    std::string joined;
    for (const auto& line : res.log) joined += line + "\n";
    *log = dup(joined);
  }
  switch (res.verdict) {
    case rbindex::Verdict::kAssumption:
      g_last_error = "assumption violated";
      return RBX_ERR_ASSUMPTION;
    case rbindex::Verdict::kConsistency:
      g_last_error = "consistency check failed";
      return RBX_ERR_CONSISTENCY;
    default:
      return RBX_OK;
  }
}

}  // namespace

extern "C" {

const char* rbx_version(void) { return RBINDEX_VERSION; }

const char* rbx_last_error(void) { return g_last_error.c_str(); }

void rbx_string_free(char* s) { std::free(s); }

rbx_status rbx_model_from_json(const char* text, rbx_model** out) {
  if (need(text, "text") || need(out, "out")) return RBX_ERR_ARGUMENT;
  *out = nullptr;
  return guard([&] {
    *out = new rbx_model{rbindex::parse_model_text(text)};
    return RBX_OK;
  });
}

rbx_status rbx_model_from_file(const char* path, rbx_model** out) {
  if (need(path, "path") || need(out, "out")) return RBX_ERR_ARGUMENT;
  *out = nullptr;
  return guard([&] {
    *out = new rbx_model{rbindex::load_model(path)};
    return RBX_OK;
  });
}

void rbx_model_free(rbx_model* m) { delete m; }

const char* rbx_model_kind(const rbx_model* m) {
  return m ? rbindex::kind_name(m->model.kind) : "";
}

rbx_status rbx_model_to_json(const rbx_model* m, char** out) {
  if (need(m, "model") || need(out, "out")) return RBX_ERR_ARGUMENT;
  return guard([&] {
    *out = dup(rbindex::canonical_dump(m->model));
    return RBX_OK;
  });
}

rbx_status rbx_model_digest(const rbx_model* m, char** out) {
  if (need(m, "model") || need(out, "out")) return RBX_ERR_ARGUMENT;
  return guard([&] {
    *out = dup(rbindex::digest(m->model));
    return RBX_OK;
  });
}

rbx_status rbx_index(const rbx_model* m, const char* family, char** report, char** log) {
  if (need(m, "model") || need(report, "report")) return RBX_ERR_ARGUMENT;
  *report = nullptr;
  return guard([&] {
    return finish(rbindex::cmd_index(m->model, family ? family : "auto"), report, log);
  });
}

rbx_status rbx_dp_verify(const rbx_model* m, size_t grid, double eps, char** report,
                         char** log) {
  if (need(m, "model") || need(report, "report")) return RBX_ERR_ARGUMENT;
  *report = nullptr;
  return guard([&] {
    rbindex::DPVerifyOptions o;
    o.grid = grid;
    o.eps = eps;
    return finish(rbindex::cmd_dp_verify(m->model, o), report, log);
  });
}

void rbx_sim_options_init(rbx_sim_options* o) {
  if (!o) return;
  const rbindex::SimConfig d;
  o->policies = nullptr;
  o->horizon = d.horizon;
  o->events = d.events;
  o->replications = d.replications;
  o->seed = d.seed;
  o->warmup_fraction = d.warmup_fraction;
  o->threads = d.threads;
}

rbx_status rbx_simulate(const rbx_model* m, const rbx_sim_options* o, char** report,
                        char** log) {
  if (need(m, "model") || need(o, "options") || need(report, "report")) {
    return RBX_ERR_ARGUMENT;
  }
  *report = nullptr;
  return guard([&] {
    rbindex::SimulateOptions so;
    if (o->policies && *o->policies) {
      std::stringstream ss(o->policies);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) so.policies.push_back(item);
      }
    }
    so.config.horizon = o->horizon;
    so.config.events = o->events;
    so.config.replications = o->replications;
    so.config.seed = o->seed;
    so.config.warmup_fraction = o->warmup_fraction;
    so.config.threads = o->threads;
    return finish(rbindex::cmd_simulate(m->model, so), report, log);
  });
}

rbx_status rbx_counterexample(char** report, char** log) {
  if (need(report, "report")) return RBX_ERR_ARGUMENT;
  *report = nullptr;
  return guard([&] { return finish(rbindex::cmd_counterexample(), report, log); });
}

rbx_status rbx_switching_curve(const rbx_model* m, size_t bound, size_t slope_from,
                               char** report, char** log) {
  if (need(m, "model") || need(report, "report")) return RBX_ERR_ARGUMENT;
  *report = nullptr;
  return guard([&] {
    return finish(rbindex::cmd_switching_curve(m->model, bound, slope_from), report, log);
  });
}

rbx_status rbx_admission_indices(size_t n, const double* lambda, const double* mu,
                                 const double* h, double alpha, int check_assumptions,
                                 double* out) {
  if (need(lambda, "lambda") || need(mu, "mu") || need(h, "h") || need(out, "out")) {
    return RBX_ERR_ARGUMENT;
  }
  return guard([&] {
    const auto m = rbindex::ACModel::make(std::vector<double>(lambda, lambda + n + 1),
                                          std::vector<double>(mu, mu + n),
                                          std::vector<double>(h, h + n + 1), alpha);
    const auto nu = rbindex::indices(m, {.check_assumptions = check_assumptions != 0});
    std::copy(nu.begin(), nu.end(), out);
    return RBX_OK;
  });
}

rbx_status rbx_adaptive_greedy(size_t n, const uint64_t* family, size_t family_size,
                               const double* cost, rbx_workload_fn workload, void* user,
                               int* admissible, size_t* pi, double* nu) {
  if (need(family, "family") || need(cost, "cost") || need(admissible, "admissible") ||
      need(pi, "pi") || need(nu, "nu")) {
    return RBX_ERR_ARGUMENT;
  }
  if (!workload) {
    g_last_error = "workload must not be NULL";
    return RBX_ERR_ARGUMENT;
  }
  return guard([&] {
    const rbindex::SetSystem sys(n, std::vector<rbindex::Subset>(family, family + family_size));
    rbindex::WorkloadOracle oracle;
    oracle.w = [&](rbindex::Subset s, std::size_t j) {
      double v = 0.0;
      if (workload(s, j, user, &v) != 0) {
        throw rbindex::ArgumentError("workload callback aborted the run");
      }
      return v;
    };
    const auto out = rbindex::ag2(std::vector<double>(cost, cost + n), oracle, sys);
    *admissible = out.admissible ? 1 : 0;
    std::copy(out.pi.begin(), out.pi.end(), pi);
    std::copy(out.nu.begin(), out.nu.end(), nu);
    return RBX_OK;
  });
}

}  // extern "C"
