// Copyright 2026 The chainlogic Authors
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

#ifndef CHAINLOGIC_TOOLS_COMMANDS_H
#define CHAINLOGIC_TOOLS_COMMANDS_H

#include <iosfwd>
#include <string>
#include <vector>

#include "config.h"

namespace chainlogic::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_inconsistent = 2,
    exit_not_hardy = 3,
    exit_usage = 64,
    exit_io = 66,
    exit_internal = 70,
};

/// Single-qubit x/z/x family with rho = |z0><z0| and identity evolutions: all
/// eight histories over times t1 (x basis), t2 (z basis), t3 (x basis).
HistoryFamily xzx_demo_family();

/// `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace chainlogic::cli

#endif
