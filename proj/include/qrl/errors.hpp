// Copyright 2026 The qrl-lake Authors
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

namespace qrl {

/// Malformed gate, wire, or parameter layout.
class InvalidCircuit : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (e.g. stepping a finished episode).
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Numerical procedure failed (non-convergence, non-finite loss, ...).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qrl
