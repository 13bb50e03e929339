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

#include "rbindex/set_system.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

#include "rbindex/error.hpp"

namespace rbindex {

int cardinality(Subset s) { return std::popcount(s); }

std::vector<std::size_t> elements(Subset s) {
  std::vector<std::size_t> out;
  while (s) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

Subset from_elements(const std::vector<std::size_t>& elems) {
  Subset s = 0;
  for (std::size_t j : elems) {
    if (j >= kMaxGround) throw ArgumentError("element out of range");
    s = with(s, j);
  }
  return s;
}

std::string to_string(Subset s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t j : elements(s)) {
    if (!first) os << ',';
    os << j;
    first = false;
  }
  os << '}';
  return os.str();
}

namespace {

bool canonical_less(Subset a, Subset b) {
  int ca = cardinality(a), cb = cardinality(b);
  if (ca != cb) return ca < cb;
  auto ea = elements(a), eb = elements(b);
  return ea < eb;
}

}  // namespace

SetSystem::SetSystem(std::size_t n, std::vector<Subset> family)
    : n_(n), family_(std::move(family)) {
  if (n_ == 0) throw ArgumentError("ground set must be nonempty");
  if (n_ > kMaxGround) throw SizeError("ground set larger than 63 elements");
  if (family_.empty()) throw ArgumentError("family must be nonempty");
  const Subset g = full_set(n_);
  for (Subset s : family_) {
    if (s & ~g) {
      throw ArgumentError("member " + to_string(s) + " not within ground set");
    }
    if (!lookup_.insert(s).second) {
      throw ArgumentError("duplicate member " + to_string(s));
    }
  }
  std::sort(family_.begin(), family_.end(), canonical_less);
}

ValidationReport SetSystem::validate() const {
  ValidationReport r;
  r.has_empty = contains_set(0);
  r.accessible = true;
  r.augmentable = true;
  for (Subset s : family_) {
    if (s != 0 && inner_boundary(s) == 0 && r.accessible) {
      r.accessible = false;
      if (!r.violating) r.violating = s;
    }
    if (s != ground() && outer_boundary(s) == 0 && r.augmentable) {
      r.augmentable = false;
      if (!r.violating) r.violating = s;
    }
  }
  if (!r.has_empty) {
    r.message = "empty set not in family";
  } else if (!r.accessible) {
    r.message = "set " + to_string(*r.violating) + " has empty inner boundary";
  } else if (!r.augmentable) {
    r.message = "set " + to_string(*r.violating) + " has empty outer boundary";
  }
  return r;
}

Subset SetSystem::inner_boundary(Subset s) const {
  if (!contains_set(s)) {
    throw MembershipError("set " + to_string(s) + " not in family");
  }
  Subset out = 0;
  for (std::size_t j : elements(s)) {
    if (contains_set(without(s, j))) out = with(out, j);
  }
  return out;
}

Subset SetSystem::outer_boundary(Subset s) const {
  if (!contains_set(s)) {
    throw MembershipError("set " + to_string(s) + " not in family");
  }
  Subset out = 0;
  for (std::size_t j : elements(ground() & ~s)) {
    if (contains_set(with(s, j))) out = with(out, j);
  }
  return out;
}

std::vector<Subset> SetSystem::chain_of(const std::vector<std::size_t>& pi) {
  std::vector<Subset> chain(pi.size() + 1, 0);
  for (std::size_t k = pi.size(); k-- > 0;) {
    chain[k] = with(chain[k + 1], pi[k]);
  }
  return chain;
}

bool SetSystem::is_full_string(const std::vector<std::size_t>& pi) const {
  if (pi.size() != n_) throw ArgumentError("string length differs from n");
  Subset seen = 0;
  for (std::size_t j : pi) {
    if (j >= n_ || contains(seen, j)) {
      throw ArgumentError("string is not a permutation of the ground set");
    }
    seen = with(seen, j);
  }
  for (Subset s : chain_of(pi)) {
    if (!contains_set(s)) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> SetSystem::enumerate_full_strings(
    std::size_t cap) const {
  if (n_ > cap) {
    throw SizeError("enumeration capped at n = " + std::to_string(cap));
  }
  // Build strings from the back: pi_n is a singleton in F, then extend upward.
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> rev;
  auto dfs = [&](auto&& self, Subset s) -> void {
    if (s == ground()) {
      out.emplace_back(rev.rbegin(), rev.rend());
      return;
    }
    for (std::size_t j : elements(ground() & ~s)) {
      Subset t = with(s, j);
      if (!contains_set(t)) continue;
      rev.push_back(j);
      self(self, t);
      rev.pop_back();
    }
  };
  if (contains_set(0)) dfs(dfs, 0);
  std::sort(out.begin(), out.end());
  return out;
}

SetSystem threshold_family(std::size_t n) {
  if (n == 0) throw ArgumentError("threshold family needs n >= 1");
  std::vector<Subset> fam{0};
  Subset s = 0;
  for (std::size_t k = n; k-- > 0;) {
    s = with(s, k);
    fam.push_back(s);
  }
  return SetSystem(n, std::move(fam));
}

SetSystem powerset_family(std::size_t n) {
  if (n == 0) throw ArgumentError("powerset family needs n >= 1");
  if (n > 20) throw SizeError("powerset family capped at n = 20");
  std::vector<Subset> fam(std::size_t{1} << n);
  std::iota(fam.begin(), fam.end(), Subset{0});
  return SetSystem(n, std::move(fam));
}

SetSystem product(const std::vector<SetSystem>& systems) {
  std::vector<std::vector<std::size_t>> labels;
  std::size_t offset = 0;
  for (const auto& sys : systems) {
    std::vector<std::size_t> l(sys.ground_size());
    std::iota(l.begin(), l.end(), offset);
    offset += sys.ground_size();
    labels.push_back(std::move(l));
  }
  return product(systems, labels);
}

SetSystem product(const std::vector<SetSystem>& systems,
                  const std::vector<std::vector<std::size_t>>& labels) {
  if (systems.empty()) throw ArgumentError("product of no systems");
  if (labels.size() != systems.size()) {
    throw ArgumentError("one label list per component required");
  }
  Subset used = 0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < systems.size(); ++k) {
    if (labels[k].size() != systems[k].ground_size()) {
      throw ArgumentError("label list size differs from component ground");
    }
    for (std::size_t l : labels[k]) {
      if (l >= kMaxGround) throw SizeError("product ground too large");
      if (contains(used, l)) throw ArgumentError("overlapping ground sets");
      used = with(used, l);
    }
    total += labels[k].size();
  }
  if (used != full_set(total)) {
    throw ArgumentError("component labels must cover 0..N-1");
  }
  std::vector<Subset> fam{0};
  for (std::size_t k = 0; k < systems.size(); ++k) {
    std::vector<Subset> next;
    next.reserve(fam.size() * systems[k].size());
    for (Subset base : fam) {
      for (Subset s : systems[k].members()) {
        Subset t = base;
        for (std::size_t j : elements(s)) t = with(t, labels[k][j]);
        next.push_back(t);
      }
    }
    fam = std::move(next);
  }
  return SetSystem(total, std::move(fam));
}

}  // namespace rbindex
