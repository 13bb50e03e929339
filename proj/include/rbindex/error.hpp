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

#include <stdexcept>
#include <string>

namespace rbindex {

// Error categories. The numeric values are shared with the C API status
// codes in rbindex.h.
enum class ErrorCode : int {
  kInput = 2,          // malformed model file / schema violation
  kAssumption = 3,     // model violates a structural assumption
  kConsistency = 4,    // internal cross-check failed
  kArgument = 5,       // bad argument to a library call
  kNumeric = 6,        // singular system, non-convergence
  kUnsupported = 7,    // operation not defined for this model
  kMembership = 8,     // set not in the family
  kStructural = 9,     // set system breaks accessibility/augmentability
  kDomain = 10,        // nonpositive workload or similar domain violation
  kSize = 11,          // instance above an enumeration cap
  kDegenerate = 12,    // zero/negative denominator in a recursion
  kBranch = 13,        // closed-form branch does not match parameters
  kInfeasible = 14,    // constrained target outside the achievable range
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define RBINDEX_DEFINE_ERROR(Name, Code)                            \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(Code, what) {}   \
  }

RBINDEX_DEFINE_ERROR(InputError, ErrorCode::kInput);
RBINDEX_DEFINE_ERROR(AssumptionError, ErrorCode::kAssumption);
RBINDEX_DEFINE_ERROR(ConsistencyError, ErrorCode::kConsistency);
RBINDEX_DEFINE_ERROR(ArgumentError, ErrorCode::kArgument);
RBINDEX_DEFINE_ERROR(NumericError, ErrorCode::kNumeric);
RBINDEX_DEFINE_ERROR(UnsupportedModelError, ErrorCode::kUnsupported);
RBINDEX_DEFINE_ERROR(MembershipError, ErrorCode::kMembership);
RBINDEX_DEFINE_ERROR(StructuralError, ErrorCode::kStructural);
RBINDEX_DEFINE_ERROR(DomainError, ErrorCode::kDomain);
RBINDEX_DEFINE_ERROR(SizeError, ErrorCode::kSize);
RBINDEX_DEFINE_ERROR(DegeneracyError, ErrorCode::kDegenerate);
RBINDEX_DEFINE_ERROR(BranchError, ErrorCode::kBranch);
RBINDEX_DEFINE_ERROR(InfeasibleTargetError, ErrorCode::kInfeasible);

#undef RBINDEX_DEFINE_ERROR

}  // namespace rbindex
