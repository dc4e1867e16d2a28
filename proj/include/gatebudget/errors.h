// Copyright 2026 The gatebudget Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GATEBUDGET_ERRORS_H
#define GATEBUDGET_ERRORS_H

#include <stdexcept>
#include <string>

namespace gatebudget {

/// Bad user-supplied input: shapes, ranges, missing fields.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Arguments outside the region where a model is defined.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Non-finite values or a numerical procedure that cannot proceed.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root search interval without a sign change.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A fit that cannot produce a meaningful estimate from the supplied data.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gatebudget

#endif
