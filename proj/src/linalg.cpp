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

#include "rbindex/linalg.hpp"

#include <string>

#include "rbindex/error.hpp"

namespace rbindex {

namespace {

constexpr double kMinRcond = 1e-14;

Eigen::PartialPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ArgumentError("lu_solve needs a square matrix");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rc = lu.rcond();
  if (!(rc > kMinRcond)) {
    throw NumericError("singular linear system (rcond " + std::to_string(rc) +
                       ")");
  }
  return lu;
}

}  // namespace

Eigen::VectorXd lu_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return factor(a).solve(b);
}

Eigen::MatrixXd lu_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return factor(a).solve(b);
}

}  // namespace rbindex
