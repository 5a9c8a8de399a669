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

#ifndef CHAINLOGIC_FRAMEWORK_TREE_H
#define CHAINLOGIC_FRAMEWORK_TREE_H

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chainlogic/histories.h"

namespace chainlogic {

/// Labels from the root (exclusive) down to some node.
using BranchPath = std::vector<std::string>;

std::string format_path(const BranchPath &path);

struct ChoiceOption {
    std::string label;
    double weight;
};

/// Alternatives selected classically (not by a projector), e.g. a free
/// setting choice modeled without an apparatus register.
class ClassicalChoice {
   public:
    /// Weights must be nonnegative, sum to one within tol, and labels unique.
    explicit ClassicalChoice(std::vector<ChoiceOption> options, double tol = kAlgebraTol);
    const std::vector<ChoiceOption> &options() const {
        return options_;
    }

   private:
    std::vector<ChoiceOption> options_;
};

using StageDecomposition = std::variant<ProjectiveDecomposition, ClassicalChoice>;

/// "The node's path carries `label` at `time_index`."
struct BranchCondition {
    std::size_t time_index;
    std::string label;
};

/// Which decomposition each node at t_{i-1} branches into at t_i. Conditional
/// entries take precedence over the per-time default, in insertion order.
class Schedule {
   public:
    explicit Schedule(std::size_t num_event_times) : num_event_times_(num_event_times) {
    }
    Schedule &set(std::size_t time_index, StageDecomposition decomposition);
    Schedule &set_when(std::size_t time_index, BranchCondition condition, StageDecomposition decomposition);

    std::size_t num_event_times() const {
        return num_event_times_;
    }
    /// Throws ScheduleError when no entry covers the branch.
    const StageDecomposition &lookup(std::size_t time_index, const BranchPath &path_so_far) const;

   private:
    struct Entry {
        std::size_t time_index;
        std::optional<BranchCondition> condition;
        StageDecomposition decomposition;
    };
    std::size_t num_event_times_;
    std::vector<Entry> entries_;
};

struct BranchNode {
    std::size_t time_index = 0;
    std::string label;
    /// Absent only at the root.
    std::optional<Projector> projector;
    /// Set for classical choice nodes.
    std::optional<double> choice_weight;
    /// Tr(F rho F†) times the classical choice weights along the path.
    double probability = 1.0;
    /// Set on the top-most node of a removed branch; the subtree is kept for reference.
    bool pruned = false;
    std::vector<BranchNode> children;
};

struct PrunedBranch {
    BranchPath path;
    double probability;
};

class FrameworkTree {
   public:
    FrameworkTree(BranchNode root, TimeGrid grid, DensityOperator rho)
        : root_(std::move(root)), grid_(std::move(grid)), rho_(std::move(rho)) {
    }

    const BranchNode &root() const {
        return root_;
    }
    const TimeGrid &grid() const {
        return grid_;
    }
    const DensityOperator &rho() const {
        return rho_;
    }

    /// Top-most pruned nodes, in depth-first schedule order.
    std::vector<PrunedBranch> pruned() const;
    /// Surviving nodes at the final time, in depth-first schedule order.
    std::vector<std::pair<BranchPath, const BranchNode *>> leaves() const;
    std::size_t leaf_count() const;

    /// Resolves through surviving nodes only, unless include_pruned.
    const BranchNode *find(const BranchPath &path, bool include_pruned = false) const;
    /// The (possibly partial) history along a path, on the grid truncated at its last node.
    History history_along(const BranchPath &path) const;
    /// All surviving leaves as one exhaustive family.
    HistoryFamily family() const;

    /// Root-to-leaf structural equality including probabilities within tol.
    bool same_structure(const FrameworkTree &other, double tol = 0.0) const;

   private:
    BranchNode root_;
    TimeGrid grid_;
    DensityOperator rho_;
};

/// Builds every branch of the schedule, in schedule order.
FrameworkTree build_tree(const TimeGrid &grid, const Schedule &schedule, const DensityOperator &rho);

/// Marks every node whose weight is below tol (and every node left without
/// surviving children) as pruned.
FrameworkTree prune_zero_branches(const FrameworkTree &tree, double tol = 1e-12);

struct CompatibilityWitness {
    std::size_t time_index;
    std::string label_a;
    std::string label_b;
};

struct CompatibilityResult {
    bool compatible;
    std::optional<CompatibilityWitness> witness;
};

/// Compatible iff at every time every projector of one family commutes with
/// every projector of the other.
CompatibilityResult check_compatibility(const HistoryFamily &a, const HistoryFamily &b, double tol = kAlgebraTol);

struct FrameworkCheck {
    bool ok;
    std::optional<BranchPath> offending;
    std::string reason;
};

/// ok iff every path resolves to a node of this tree (pruned branches included:
/// they belong to the framework with zero weight).
FrameworkCheck enforce_single_framework(std::span<const BranchPath> paths, const FrameworkTree &tree);

enum class ExportFormat { dot, json };

std::string export_tree(const FrameworkTree &tree, ExportFormat format);

/// Structure recovered from a JSON export.
struct SkeletonNode {
    std::string label;
    std::size_t time_index = 0;
    double probability = 0.0;
    bool pruned = false;
    std::optional<double> choice_weight;
    std::vector<SkeletonNode> children;
    bool operator==(const SkeletonNode &) const = default;
};

struct TreeSkeleton {
    std::size_t dim = 0;
    std::vector<double> times;
    SkeletonNode root;
    bool operator==(const TreeSkeleton &) const = default;
};

TreeSkeleton skeleton_of(const FrameworkTree &tree);
/// Parses a schema-1 JSON export. Throws InvalidValueError naming the offending field.
TreeSkeleton import_tree_json(std::string_view text);

}  // namespace chainlogic

#endif
