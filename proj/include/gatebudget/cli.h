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

#ifndef GATEBUDGET_CLI_H
#define GATEBUDGET_CLI_H

#include <iosfwd>
#include <string>
#include <vector>

#include "gatebudget/config.h"
#include "gatebudget/error_budget.h"
#include "gatebudget/fitting.h"

namespace gatebudget {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitInputError = 2,
    kExitFitFailed = 3,
};

/// Entry point of the `gatebudget` tool. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Round-trippable decimal form used in every CSV file ("%.17g").
std::string format_number(double x);

/// Rows: one per channel, then incoherent, coherent and total.
std::string budget_csv(const ErrorBudget &b);
std::string budget_json(const ErrorBudget &b, const GateConfig &gate, double leakage);

struct SweepRow {
    GateTiming timing;
    ErrorBudget budget;
};
std::string sweep_csv(const std::vector<SweepRow> &rows);

/// Columns x, y and optionally sigma. A first line that does not parse as numbers is a
/// header; blank lines and lines starting with '#' are skipped. Throws InputError with
/// "source:line: reason".
XYDataset parse_xy_csv(const std::string &text, const std::string &source);
/// Long format flux, time, population covering a full rectangular grid.
ChevronGrid parse_chevron_csv(const std::string &text, const std::string &source);

std::string xy_csv(const XYDataset &d, const std::string &x_name, const std::string &y_name);
std::string chevron_csv(const ChevronGrid &g);

}  // namespace gatebudget

#endif
