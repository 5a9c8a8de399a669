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

#include "chainlogic/hardy_counterfactual.h"

using namespace chainlogic;

const char *chainlogic::to_string(LeftSetting setting) {
    return setting == LeftSetting::ml1 ? "ML1" : "ML2";
}

CounterfactualQuery chainlogic::sr_query(const HardyScenario &scenario, LeftSetting setting) {
    const StageTimes &t = scenario.times;
    if (t.right_setting < t.left_outcome) {
        throw InvalidValueError("sr_query: the left side must be recorded before the right-side choice");
    }
    return CounterfactualQuery{
        {{t.left_setting, to_string(setting)}, {t.right_setting, "MR1"}, {t.right_outcome, "MR1+"}},
        t.right_setting,
        "MR2",
        {"MR2+", "MR2-"},
    };
}

CounterfactualVerdict chainlogic::evaluate_sr(const HardyScenario &scenario, LeftSetting setting) {
    return evaluate_counterfactual(scenario.tree, sr_query(scenario, setting), scenario.options.tol.consistency);
}

LocalityReport chainlogic::locality_report(const HardyScenario &scenario) {
    if (scenario.amplitudes.has_value() && !scenario.amplitudes->is_strict()) {
        throw NotHardyStateError("locality_report: amplitudes a, b, c must all be nonzero");
    }
    LocalityReport r{
        evaluate_sr(scenario, LeftSetting::ml1),
        evaluate_sr(scenario, LeftSetting::ml2),
        false,
        no_signaling_report(scenario, scenario.options.tol.consistency),
    };
    auto sr_holds = [](const CounterfactualVerdict &v) {
        return v.kind == VerdictKind::necessary && v.outcome == "MR2+";
    };
    r.nonlocality_demonstrated = sr_holds(r.under_ml1) != sr_holds(r.under_ml2);
    return r;
}
