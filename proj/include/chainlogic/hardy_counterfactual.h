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

#ifndef CHAINLOGIC_HARDY_COUNTERFACTUAL_H
#define CHAINLOGIC_HARDY_COUNTERFACTUAL_H

#include "chainlogic/counterfactual.h"
#include "chainlogic/hardy_scenario.h"

namespace chainlogic {

enum class LeftSetting { ml1, ml2 };

const char *to_string(LeftSetting setting);

/// SR: "MR1 performed with outcome MR1+; had MR2 been performed instead, MR2+
/// would appear", evaluated inside the chosen left branch.
CounterfactualQuery sr_query(const HardyScenario &scenario, LeftSetting setting);
CounterfactualVerdict evaluate_sr(const HardyScenario &scenario, LeftSetting setting);

struct LocalityReport {
    CounterfactualVerdict under_ml1;
    CounterfactualVerdict under_ml2;
    /// SR necessary under exactly one of the two left settings.
    bool nonlocality_demonstrated;
    NoSignalingReport no_signaling;
};

/// Throws NotHardyStateError for Hardy-amplitude scenarios that are not strict.
LocalityReport locality_report(const HardyScenario &scenario);

}  // namespace chainlogic

#endif
