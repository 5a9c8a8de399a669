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

#ifndef CHAINLOGIC_TOOLS_CONFIG_H
#define CHAINLOGIC_TOOLS_CONFIG_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainlogic/hardy_sweep.h"

namespace chainlogic::cli {

/// Malformed or invalid configuration. `field` is a JSON-pointer-like path.
class ConfigError : public Error {
   public:
    ConfigError(std::string field, const std::string &message)
        : Error("config field '" + field + "': " + message), field_(std::move(field)) {
    }
    const std::string &field() const {
        return field_;
    }

   private:
    std::string field_;
};

/// Unreadable input or unwritable output.
class IoError : public Error {
   public:
    using Error::Error;
};

struct SweepSpec {
    std::optional<SweepFamily> family;
    std::vector<double> b_values;
    std::vector<HardyAmplitudes> triples;
};

struct ScenarioConfig {
    /// Normalized, not necessarily strict.
    HardyAmplitudes amplitudes = HardyAmplitudes::equal();
    ChoiceAmplitudes left;
    ChoiceAmplitudes right;
    ScenarioMode mode = ScenarioMode::apparatus;
    Tolerances tol;
    std::optional<SweepSpec> sweep;
    std::vector<std::string> warnings;

    ScenarioOptions options(bool prune = true) const;
};

inline constexpr double kNormalizeSlack = 1e-6;

/// Reads CHAINLOGIC_TOL if set. Throws ConfigError on an unparsable value.
std::optional<double> tolerance_from_env();

/// Equal amplitudes, 1/2 choice weights, apparatus mode, default tolerances
/// with the environment override applied.
ScenarioConfig default_config();

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string &path);

}  // namespace chainlogic::cli

#endif
