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

#ifndef CHAINLOGIC_HARDY_SWEEP_H
#define CHAINLOGIC_HARDY_SWEEP_H

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "chainlogic/hardy_counterfactual.h"

namespace chainlogic {

/// One-parameter amplitude families, parameterized by b (real).
enum class SweepFamily {
    /// a = c = sqrt((1 - b²) / 2), b in (0, 1).
    symmetric_ac,
    /// b = c, a = sqrt(1 - 2b²), b in (0, 1/sqrt(2)).
    equal_bc,
};

const char *to_string(SweepFamily family);
std::optional<SweepFamily> parse_sweep_family(std::string_view name);

HardyAmplitudes family_member(SweepFamily family, double b);
/// Open interval of b on which every member is strict Hardy.
std::pair<double, double> family_range(SweepFamily family);

struct SweepRow {
    HardyAmplitudes amplitudes;
    double s4;
    /// P(MR2+) on the ML2+ pivot path of SR under ML2.
    double mr2_plus_given_ml2_plus;
    CounterfactualVerdict sr_ml1;
    CounterfactualVerdict sr_ml2;
    double no_signaling_discrepancy;
};

/// One row per triple, in input order. Throws NotHardyStateError on a
/// non-strict triple.
std::vector<SweepRow> parameter_sweep(std::span<const HardyAmplitudes> family, const ScenarioOptions &options);

struct S4Maximum {
    double parameter;
    HardyAmplitudes amplitudes;
    double s4;
};

/// Maximizes the S4 probability over a family: a uniform grid of
/// `grid_points` followed by golden-section refinement around the best point.
S4Maximum maximize_s4(SweepFamily family, const ScenarioOptions &options, std::size_t grid_points = 200);

/// The row with the largest S4 probability.
const SweepRow &max_s4_row(std::span<const SweepRow> rows);

}  // namespace chainlogic

#endif
