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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace rbindex {

// Subsets of the ground set {0, ..., n-1} are bitmasks; n is capped at 63.
using Subset = std::uint64_t;
inline constexpr std::size_t kMaxGround = 63;

inline bool contains(Subset s, std::size_t j) { return (s >> j) & 1u; }
inline Subset with(Subset s, std::size_t j) { return s | (Subset{1} << j); }
inline Subset without(Subset s, std::size_t j) {
  return s & ~(Subset{1} << j);
}
inline Subset singleton(std::size_t j) { return Subset{1} << j; }
inline Subset full_set(std::size_t n) {
  return n >= 64 ? ~Subset{0} : (Subset{1} << n) - 1;
}
int cardinality(Subset s);
std::vector<std::size_t> elements(Subset s);
Subset from_elements(const std::vector<std::size_t>& elems);
std::string to_string(Subset s);

struct ValidationReport {
  bool has_empty = false;
  bool accessible = false;   // nonempty members have nonempty inner boundary
  bool augmentable = false;  // members other than J have nonempty outer boundary
  std::optional<Subset> violating;
  std::string message;
  bool valid() const { return has_empty && accessible && augmentable; }
};

// Explicit family F of subsets of a ground set of size n. Members are kept in
// canonical order: by cardinality, then lexicographically by sorted elements.
class SetSystem {
 public:
  SetSystem(std::size_t n, std::vector<Subset> family);

  std::size_t ground_size() const { return n_; }
  Subset ground() const { return full_set(n_); }
  const std::vector<Subset>& members() const { return family_; }
  std::size_t size() const { return family_.size(); }
  bool contains_set(Subset s) const { return lookup_.count(s) > 0; }

  ValidationReport validate() const;
  Subset inner_boundary(Subset s) const;
  Subset outer_boundary(Subset s) const;
  bool is_full_string(const std::vector<std::size_t>& pi) const;
  std::vector<std::vector<std::size_t>> enumerate_full_strings(
      std::size_t cap = 10) const;

  // Suffix sets S_k = {pi_k, ..., pi_n} for k = 1..n, followed by the empty set.
  static std::vector<Subset> chain_of(const std::vector<std::size_t>& pi);

 private:
  std::size_t n_;
  std::vector<Subset> family_;
  std::unordered_set<Subset> lookup_;
};

SetSystem threshold_family(std::size_t n);
SetSystem powerset_family(std::size_t n);

// Product of systems over consecutive relabelled grounds: component k occupies
// positions offset_k .. offset_k + n_k - 1.
SetSystem product(const std::vector<SetSystem>& systems);

// Product with explicit ground labels per component. Labels must be disjoint
// and the union must be {0, ..., N-1}.
SetSystem product(const std::vector<SetSystem>& systems,
                  const std::vector<std::vector<std::size_t>>& labels);

}  // namespace rbindex
