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

#include "chainlogic/counterfactual.h"

#include <algorithm>
#include <map>
#include <set>

using namespace chainlogic;

double PivotOutcomes::probability_of(const std::string &outcome) const {
    for (const auto &o : outcomes) {
        if (o.outcome == outcome) {
            return o.probability;
        }
    }
    return 0.0;
}

const char *chainlogic::to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::necessary:
            return "necessary";
        case VerdictKind::possible:
            return "possible";
        case VerdictKind::impossible:
            return "impossible";
    }
    return "?";
}

const PivotOutcomes *CounterfactualVerdict::pivot_through(const std::string &label) const {
    for (const auto &p : pivot_paths) {
        if (std::find(p.pivot.path.begin(), p.pivot.path.end(), label) != p.pivot.path.end()) {
            return &p;
        }
    }
    return nullptr;
}

namespace {

bool matches(const BranchPath &path, std::span<const LabelConstraint> premise) {
    for (const auto &c : premise) {
        if (c.time_index == 0 || c.time_index > path.size() || path[c.time_index - 1] != c.label) {
            return false;
        }
    }
    return true;
}

void labels_by_time(const BranchNode &node, std::map<std::size_t, std::set<std::string>> &out) {
    for (const auto &c : node.children) {
        out[c.time_index].insert(c.label);
        labels_by_time(c, out);
    }
}

const BranchNode *child_labeled(const BranchNode &node, const std::string &label) {
    for (const auto &c : node.children) {
        if (c.label == label) {
            return &c;
        }
    }
    return nullptr;
}

// One propagation step into `node` (at its time index), ignoring classical weights.
std::vector<CVector> step(const TimeGrid &grid, const BranchNode &node, std::vector<CVector> vectors) {
    if (!grid.evolution_is_identity(node.time_index)) {
        for (auto &v : vectors) {
            v = grid.evolution_into(node.time_index).matrix() * v;
        }
    }
    if (!node.choice_weight.has_value()) {
        for (auto &v : vectors) {
            v = node.projector->matrix() * v;
        }
    }
    return vectors;
}

double weight(const std::vector<EnsembleComponent> &comps, const std::vector<CVector> &vectors) {
    double s = 0.0;
    for (std::size_t i = 0; i < comps.size(); i++) {
        s += comps[i].weight * vectors[i].squaredNorm();
    }
    return s;
}

}  // namespace

std::vector<PivotPath> chainlogic::find_pivot(
    const FrameworkTree &tree, std::span<const LabelConstraint> premise, std::size_t pivot_time, double tol) {
    if (pivot_time == 0 || pivot_time > tree.grid().final_index()) {
        throw InvalidValueError("find_pivot: pivot time out of range");
    }
    std::size_t depth = pivot_time - 1;
    std::map<BranchPath, double> groups;
    std::vector<BranchPath> order;
    double total = 0.0;
    for (const auto &[path, node] : tree.leaves()) {
        if (!matches(path, premise)) {
            continue;
        }
        BranchPath prefix(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(depth));
        if (groups.find(prefix) == groups.end()) {
            order.push_back(prefix);
        }
        groups[prefix] += node->probability;
        total += node->probability;
    }
    if (total < tol) {
        throw VacuousPremiseError("find_pivot: the premise has zero probability in this framework");
    }
    std::vector<PivotPath> out;
    for (const auto &prefix : order) {
        double p = groups[prefix] / total;
        if (p >= tol) {
            out.push_back({prefix, p});
        }
    }
    return out;
}

CounterfactualVerdict chainlogic::evaluate_counterfactual(
    const FrameworkTree &tree, const CounterfactualQuery &query, double tol) {
    const TimeGrid &grid = tree.grid();
    if (query.pivot_time == 0 || query.pivot_time >= grid.final_index()) {
        throw InvalidValueError("evaluate_counterfactual: the alternative needs an outcome time after the pivot");
    }
    if (!query.premise.empty()) {
        auto [lo, hi] = std::minmax_element(
            query.premise.begin(), query.premise.end(),
            [](const LabelConstraint &a, const LabelConstraint &b) { return a.time_index < b.time_index; });
        if (query.pivot_time < lo->time_index || query.pivot_time > hi->time_index) {
            throw InvalidValueError("evaluate_counterfactual: pivot time must lie within the premise's time span");
        }
    }

    std::map<std::size_t, std::set<std::string>> known;
    labels_by_time(tree.root(), known);
    auto require = [&](std::size_t t, const std::string &label) {
        if (known[t].count(label) == 0) {
            throw FrameworkViolationError(
                "evaluate_counterfactual: '" + label + "' at time " + std::to_string(t) +
                " is not a proposition of this framework");
        }
    };
    for (const auto &c : query.premise) {
        require(c.time_index, c.label);
    }
    require(query.pivot_time, query.alternative_label);
    for (const auto &o : query.target_outcomes) {
        require(query.pivot_time + 1, o);
    }

    CounterfactualVerdict verdict{VerdictKind::possible, "", {}};
    for (const auto &pivot : find_pivot(tree, query.premise, query.pivot_time, tol)) {
        const BranchNode *pivot_node = tree.find(pivot.path);
        const BranchNode *alt = pivot_node == nullptr ? nullptr : child_labeled(*pivot_node, query.alternative_label);
        if (alt == nullptr) {
            BranchPath p = pivot.path;
            p.push_back(query.alternative_label);
            throw FrameworkViolationError(
                "evaluate_counterfactual: path " + format_path(p) + " is not in the framework tree");
        }

        // Normalized conditional state at the pivot.
        std::vector<CVector> vectors;
        const auto &comps = tree.rho().components();
        for (const auto &c : comps) {
            vectors.push_back(c.vector);
        }
        if (!pivot.path.empty()) {
            History h = tree.history_along(pivot.path);
            for (auto &v : vectors) {
                v = h.apply_chain(v);
            }
        }
        double pivot_weight = weight(comps, vectors);
        std::vector<EnsembleComponent> conditional;
        for (std::size_t i = 0; i < comps.size(); i++) {
            conditional.push_back({comps[i].weight / pivot_weight, vectors[i]});
        }
        DensityOperator pivot_state = DensityOperator::from_ensemble(std::move(conditional), kSpectralTol);

        std::vector<CVector> at_alt;
        for (const auto &c : pivot_state.components()) {
            at_alt.push_back(c.vector);
        }
        at_alt = step(grid, *alt, std::move(at_alt));
        double alt_weight = weight(pivot_state.components(), at_alt);
        if (alt_weight < tol) {
            throw VacuousPremiseError(
                "evaluate_counterfactual: alternative '" + query.alternative_label + "' is unreachable from " +
                format_path(pivot.path));
        }

        PivotOutcomes po{pivot, {}};
        for (const auto &outcome : alt->children) {
            auto at_outcome = step(grid, outcome, at_alt);
            double p = weight(pivot_state.components(), at_outcome) / alt_weight;
            if (outcome.choice_weight.has_value()) {
                p *= *outcome.choice_weight;
            }
            po.outcomes.push_back({outcome.label, p});
        }
        verdict.pivot_paths.push_back(std::move(po));
    }

    std::vector<std::string> candidates = query.target_outcomes;
    if (candidates.empty()) {
        for (const auto &o : verdict.pivot_paths.front().outcomes) {
            candidates.push_back(o.outcome);
        }
    }
    auto on_every_path = [&](const std::string &o, auto pred) {
        return std::all_of(verdict.pivot_paths.begin(), verdict.pivot_paths.end(), [&](const PivotOutcomes &p) {
            return pred(p.probability_of(o));
        });
    };
    for (const auto &o : candidates) {
        if (on_every_path(o, [&](double p) { return 1.0 - p < tol; })) {
            verdict.kind = VerdictKind::necessary;
            verdict.outcome = o;
            return verdict;
        }
    }
    if (candidates.size() == 1 && on_every_path(candidates.front(), [&](double p) { return p < tol; })) {
        verdict.kind = VerdictKind::impossible;
        verdict.outcome = candidates.front();
    }
    return verdict;
}
