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

#ifndef CHAINLOGIC_COUNTERFACTUAL_H
#define CHAINLOGIC_COUNTERFACTUAL_H

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chainlogic/framework_tree.h"

namespace chainlogic {

/// "The branch carries `label` at `time_index`."
struct LabelConstraint {
    std::size_t time_index;
    std::string label;
};

/// "Given the premise, had `alternative_label` been chosen at `pivot_time`
/// instead, which of its outcomes would appear?"
///
/// The pivot node sits at pivot_time - 1; the alternative is one of its
/// children at pivot_time and the outcomes are the alternative's children at
/// pivot_time + 1. `target_outcomes` may be empty (all outcomes); when it names
/// exactly one outcome the verdict can also be `impossible`.
struct CounterfactualQuery {
    std::vector<LabelConstraint> premise;
    std::size_t pivot_time = 0;
    std::string alternative_label;
    std::vector<std::string> target_outcomes;
};

struct PivotPath {
    BranchPath path;
    /// Probability of passing through this node given the premise.
    double probability;
};

struct OutcomeProbability {
    std::string outcome;
    double probability;
};

struct PivotOutcomes {
    PivotPath pivot;
    /// Outcome distribution conditioned on the pivot path and the alternative.
    std::vector<OutcomeProbability> outcomes;

    double probability_of(const std::string &outcome) const;
};

enum class VerdictKind { necessary, possible, impossible };

const char *to_string(VerdictKind kind);

struct CounterfactualVerdict {
    VerdictKind kind;
    /// The necessary (or impossible) outcome; empty for `possible`.
    std::string outcome;
    std::vector<PivotOutcomes> pivot_paths;

    const PivotOutcomes *pivot_through(const std::string &label) const;
};

/// Ancestors at pivot_time - 1 of the surviving leaves matching the premise,
/// with their probabilities given the premise. Paths whose conditional
/// probability is below tol are dropped. Throws VacuousPremiseError when the
/// premise has (numerically) zero probability.
std::vector<PivotPath> find_pivot(
    const FrameworkTree &tree, std::span<const LabelConstraint> premise, std::size_t pivot_time, double tol = kSpectralTol);

/// Re-propagates the normalized state at each pivot path down the alternative
/// branch. necessary(o) iff P(o) > 1 - tol on every pivot path; impossible(o)
/// (single target only) iff P(o) < tol on every pivot path; possible otherwise.
/// Throws FrameworkViolationError when the query names labels outside the
/// tree and VacuousPremiseError when the premise or the alternative is unreachable.
CounterfactualVerdict evaluate_counterfactual(
    const FrameworkTree &tree, const CounterfactualQuery &query, double tol = kSpectralTol);

}  // namespace chainlogic

#endif
