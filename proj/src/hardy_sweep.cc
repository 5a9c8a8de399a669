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

#include "chainlogic/hardy_sweep.h"

#include <cmath>

using namespace chainlogic;

const char *chainlogic::to_string(SweepFamily family) {
    return family == SweepFamily::symmetric_ac ? "symmetric_ac" : "equal_bc";
}

std::optional<SweepFamily> chainlogic::parse_sweep_family(std::string_view name) {
    if (name == "symmetric_ac") {
        return SweepFamily::symmetric_ac;
    }
    if (name == "equal_bc") {
        return SweepFamily::equal_bc;
    }
    return std::nullopt;
}

HardyAmplitudes chainlogic::family_member(SweepFamily family, double b) {
    auto [lo, hi] = family_range(family);
    if (!(b > lo && b < hi)) {
        throw NotHardyStateError(
            std::string("family_member: b = ") + std::to_string(b) + " is outside the strict range of " +
            to_string(family));
    }
    if (family == SweepFamily::symmetric_ac) {
        double ac = std::sqrt((1.0 - b * b) / 2.0);
        return HardyAmplitudes::make(ac, b, ac);
    }
    return HardyAmplitudes::make(std::sqrt(1.0 - 2.0 * b * b), b, b);
}

std::pair<double, double> chainlogic::family_range(SweepFamily family) {
    if (family == SweepFamily::symmetric_ac) {
        return {0.0, 1.0};
    }
    return {0.0, 1.0 / std::sqrt(2.0)};
}

std::vector<SweepRow> chainlogic::parameter_sweep(std::span<const HardyAmplitudes> family, const ScenarioOptions &options) {
    std::vector<SweepRow> rows;
    rows.reserve(family.size());
    for (const auto &amps : family) {
        if (!amps.is_strict()) {
            throw NotHardyStateError("parameter_sweep: every triple must have a, b, c nonzero");
        }
        HardyScenario scenario = build_measurement_scenario(amps, options);
        HardyReport report = verify_hardy_predictions(scenario, options.tol.consistency);
        LocalityReport locality = locality_report(scenario);
        const PivotOutcomes *ml2_plus = locality.under_ml2.pivot_through("ML2+");
        rows.push_back(SweepRow{
            amps,
            report.statements[3].probability,
            ml2_plus == nullptr ? std::nan("") : ml2_plus->probability_of("MR2+"),
            std::move(locality.under_ml1),
            std::move(locality.under_ml2),
            locality.no_signaling.max_discrepancy,
        });
    }
    return rows;
}

namespace {

double s4_at(SweepFamily family, double b, const ScenarioOptions &options) {
    HardyScenario scenario = build_measurement_scenario(family_member(family, b), options);
    return verify_hardy_predictions(scenario, options.tol.consistency).statements[3].probability;
}

}  // namespace

S4Maximum chainlogic::maximize_s4(SweepFamily family, const ScenarioOptions &options, std::size_t grid_points) {
    if (grid_points < 3) {
        throw InvalidValueError("maximize_s4: need at least three grid points");
    }
    auto [lo, hi] = family_range(family);
    double h = (hi - lo) / static_cast<double>(grid_points + 1);
    std::size_t best = 1;
    double best_value = -1.0;
    for (std::size_t i = 1; i <= grid_points; i++) {
        double v = s4_at(family, lo + h * static_cast<double>(i), options);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }

    // Golden-section search on the bracket around the best grid point.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double left = lo + h * static_cast<double>(best - 1);
    double right = lo + h * static_cast<double>(best + 1);
    if (best == 1) {
        left = lo + h * 0.5;
    }
    if (best == grid_points) {
        right = hi - h * 0.5;
    }
    double x1 = right - inv_phi * (right - left);
    double x2 = left + inv_phi * (right - left);
    double f1 = s4_at(family, x1, options);
    double f2 = s4_at(family, x2, options);
    while (right - left > 1e-10) {
        if (f1 < f2) {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + inv_phi * (right - left);
            f2 = s4_at(family, x2, options);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - inv_phi * (right - left);
            f1 = s4_at(family, x1, options);
        }
    }
    double b = 0.5 * (left + right);
    double value = s4_at(family, b, options);
    if (best_value > value) {
        b = lo + h * static_cast<double>(best);
        value = best_value;
    }
    return S4Maximum{b, family_member(family, b), value};
}

const SweepRow &chainlogic::max_s4_row(std::span<const SweepRow> rows) {
    if (rows.empty()) {
        throw InvalidValueError("max_s4_row: no rows");
    }
    const SweepRow *best = &rows.front();
    for (const auto &r : rows) {
        if (r.s4 > best->s4) {
            best = &r;
        }
    }
    return *best;
}
