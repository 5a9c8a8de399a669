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

#include "chainlogic/framework_tree.h"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

using namespace chainlogic;
using ordered_json = nlohmann::ordered_json;

std::string chainlogic::format_path(const BranchPath &path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); i++) {
        if (i > 0) {
            out += " -> ";
        }
        out += path[i];
    }
    return out.empty() ? "(root)" : out;
}

ClassicalChoice::ClassicalChoice(std::vector<ChoiceOption> options, double tol) : options_(std::move(options)) {
    if (options_.empty()) {
        throw InvalidValueError("ClassicalChoice: no options");
    }
    std::set<std::string> seen;
    double total = 0.0;
    for (const auto &o : options_) {
        if (!seen.insert(o.label).second) {
            throw DuplicateLabelError("ClassicalChoice: duplicate label '" + o.label + "'");
        }
        if (!(o.weight >= 0.0) || !std::isfinite(o.weight)) {
            throw InvalidValueError("ClassicalChoice: weight of '" + o.label + "' must be finite and nonnegative");
        }
        total += o.weight;
    }
    if (std::abs(total - 1.0) >= tol) {
        throw CompletenessError("ClassicalChoice: weights do not sum to one");
    }
}

Schedule &Schedule::set(std::size_t time_index, StageDecomposition decomposition) {
    if (time_index == 0 || time_index > num_event_times_) {
        throw ScheduleError("Schedule::set: time index out of range");
    }
    entries_.push_back({time_index, std::nullopt, std::move(decomposition)});
    return *this;
}

Schedule &Schedule::set_when(std::size_t time_index, BranchCondition condition, StageDecomposition decomposition) {
    if (time_index == 0 || time_index > num_event_times_) {
        throw ScheduleError("Schedule::set_when: time index out of range");
    }
    if (condition.time_index == 0 || condition.time_index >= time_index) {
        throw ScheduleError("Schedule::set_when: condition must refer to an earlier event time");
    }
    entries_.push_back({time_index, std::move(condition), std::move(decomposition)});
    return *this;
}

const StageDecomposition &Schedule::lookup(std::size_t time_index, const BranchPath &path_so_far) const {
    for (const auto &e : entries_) {
        if (e.time_index != time_index || !e.condition.has_value()) {
            continue;
        }
        std::size_t at = e.condition->time_index;
        if (at <= path_so_far.size() && path_so_far[at - 1] == e.condition->label) {
            return e.decomposition;
        }
    }
    for (const auto &e : entries_) {
        if (e.time_index == time_index && !e.condition.has_value()) {
            return e.decomposition;
        }
    }
    throw ScheduleError(
        "Schedule: no decomposition for time " + std::to_string(time_index) + " after branch " +
        format_path(path_so_far));
}

namespace {

struct Propagation {
    std::vector<CVector> vectors;
    double classical_weight;
};

double weight_of(const DensityOperator &rho, const Propagation &p) {
    double s = 0.0;
    const auto &comps = rho.components();
    for (std::size_t i = 0; i < comps.size(); i++) {
        s += comps[i].weight * p.vectors[i].squaredNorm();
    }
    return p.classical_weight * s;
}

void grow(
    BranchNode &node,
    BranchPath &path,
    const Propagation &state,
    const TimeGrid &grid,
    const Schedule &schedule,
    const DensityOperator &rho) {
    std::size_t next = node.time_index + 1;
    if (next > grid.final_index()) {
        return;
    }
    const StageDecomposition &stage = schedule.lookup(next, path);

    Propagation evolved = state;
    if (!grid.evolution_is_identity(next)) {
        for (auto &v : evolved.vectors) {
            v = grid.evolution_into(next).apply_to(v);
        }
    }

    auto descend = [&](BranchNode child, Propagation child_state) {
        child.probability = weight_of(rho, child_state);
        path.push_back(child.label);
        grow(child, path, child_state, grid, schedule, rho);
        path.pop_back();
        node.children.push_back(std::move(child));
    };

    if (const auto *pvm = std::get_if<ProjectiveDecomposition>(&stage)) {
        if (pvm->dim() != grid.dim()) {
            throw DimensionMismatchError(
                "build_tree: decomposition at time " + std::to_string(next) + " has dimension " +
                std::to_string(pvm->dim()) + ", expected " + std::to_string(grid.dim()));
        }
        for (const auto &m : pvm->members()) {
            Propagation child_state = evolved;
            for (auto &v : child_state.vectors) {
                v = m.projector.op().apply_to(v);
            }
            BranchNode child;
            child.time_index = next;
            child.label = m.label;
            child.projector = m.projector;
            descend(std::move(child), std::move(child_state));
        }
    } else {
        const auto &choice = std::get<ClassicalChoice>(stage);
        for (const auto &o : choice.options()) {
            Propagation child_state = evolved;
            child_state.classical_weight *= o.weight;
            BranchNode child;
            child.time_index = next;
            child.label = o.label;
            child.projector = Projector::identity(grid.dim());
            child.choice_weight = o.weight;
            descend(std::move(child), std::move(child_state));
        }
    }
}

// Returns true when the node survives.
bool prune_node(BranchNode &node, std::size_t final_index, double tol) {
    if (node.pruned) {
        return false;
    }
    if (node.time_index > 0 && node.probability < tol) {
        node.pruned = true;
        return false;
    }
    if (node.time_index == final_index) {
        return true;
    }
    bool any = false;
    for (auto &c : node.children) {
        any = prune_node(c, final_index, tol) || any;
    }
    if (!any && node.time_index > 0) {
        node.pruned = true;
        return false;
    }
    return true;
}

void collect_pruned(const BranchNode &node, BranchPath &path, std::vector<PrunedBranch> &out) {
    for (const auto &c : node.children) {
        path.push_back(c.label);
        if (c.pruned) {
            out.push_back({path, c.probability});
        } else {
            collect_pruned(c, path, out);
        }
        path.pop_back();
    }
}

void collect_leaves(
    const BranchNode &node,
    std::size_t final_index,
    BranchPath &path,
    std::vector<std::pair<BranchPath, const BranchNode *>> &out) {
    if (node.time_index == final_index) {
        out.emplace_back(path, &node);
        return;
    }
    for (const auto &c : node.children) {
        if (c.pruned) {
            continue;
        }
        path.push_back(c.label);
        collect_leaves(c, final_index, path, out);
        path.pop_back();
    }
}

bool same_node(const BranchNode &a, const BranchNode &b, double tol) {
    if (a.label != b.label || a.time_index != b.time_index || a.pruned != b.pruned ||
        a.choice_weight != b.choice_weight || std::abs(a.probability - b.probability) > tol ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); i++) {
        if (!same_node(a.children[i], b.children[i], tol)) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<PrunedBranch> FrameworkTree::pruned() const {
    std::vector<PrunedBranch> out;
    BranchPath path;
    collect_pruned(root_, path, out);
    return out;
}

std::vector<std::pair<BranchPath, const BranchNode *>> FrameworkTree::leaves() const {
    std::vector<std::pair<BranchPath, const BranchNode *>> out;
    BranchPath path;
    collect_leaves(root_, grid_.final_index(), path, out);
    return out;
}

std::size_t FrameworkTree::leaf_count() const {
    return leaves().size();
}

const BranchNode *FrameworkTree::find(const BranchPath &path, bool include_pruned) const {
    const BranchNode *cur = &root_;
    for (const auto &label : path) {
        const BranchNode *next = nullptr;
        for (const auto &c : cur->children) {
            if (c.label == label && (include_pruned || !c.pruned)) {
                next = &c;
                break;
            }
        }
        if (next == nullptr) {
            return nullptr;
        }
        cur = next;
    }
    return cur;
}

History FrameworkTree::history_along(const BranchPath &path) const {
    if (path.empty()) {
        throw InvalidValueError("FrameworkTree::history_along: empty path");
    }
    std::vector<HistoryEvent> events;
    const BranchNode *cur = &root_;
    for (const auto &label : path) {
        const BranchNode *next = nullptr;
        for (const auto &c : cur->children) {
            if (c.label == label) {
                next = &c;
                break;
            }
        }
        if (next == nullptr) {
            throw InvalidValueError("FrameworkTree::history_along: path " + format_path(path) + " not in tree");
        }
        events.push_back({next->time_index, next->label, *next->projector, next->choice_weight});
        cur = next;
    }
    return History(grid_.prefix(path.size()), std::move(events));
}

HistoryFamily FrameworkTree::family() const {
    std::vector<History> histories;
    for (const auto &leaf : leaves()) {
        histories.push_back(history_along(leaf.first));
    }
    return HistoryFamily(grid_, rho_, std::move(histories), true);
}

bool FrameworkTree::same_structure(const FrameworkTree &other, double tol) const {
    return grid_ == other.grid_ && same_node(root_, other.root_, tol);
}

FrameworkTree chainlogic::build_tree(const TimeGrid &grid, const Schedule &schedule, const DensityOperator &rho) {
    if (rho.dim() != grid.dim()) {
        throw DimensionMismatchError("build_tree: rho dimension differs from the grid");
    }
    if (schedule.num_event_times() != grid.final_index()) {
        throw ScheduleError("build_tree: schedule and grid cover different numbers of times");
    }
    BranchNode root;
    root.time_index = 0;
    root.label = "root";
    root.probability = 1.0;
    Propagation start{{}, 1.0};
    for (const auto &c : rho.components()) {
        start.vectors.push_back(c.vector);
    }
    BranchPath path;
    grow(root, path, start, grid, schedule, rho);
    return FrameworkTree(std::move(root), grid, rho);
}

FrameworkTree chainlogic::prune_zero_branches(const FrameworkTree &tree, double tol) {
    BranchNode root = tree.root();
    prune_node(root, tree.grid().final_index(), tol);
    return FrameworkTree(std::move(root), tree.grid(), tree.rho());
}

CompatibilityResult chainlogic::check_compatibility(const HistoryFamily &a, const HistoryFamily &b, double tol) {
    if (a.grid().dim() != b.grid().dim() || a.grid().final_index() != b.grid().final_index()) {
        throw DimensionMismatchError("check_compatibility: families live on different spaces or grids");
    }
    for (std::size_t t = 1; t <= a.grid().final_index(); t++) {
        for (const auto &ha : a.histories()) {
            const auto &ea = ha.events()[t - 1];
            for (const auto &hb : b.histories()) {
                const auto &eb = hb.events()[t - 1];
                if (!ea.projector.commutes_with(eb.projector, tol)) {
                    return {false, CompatibilityWitness{t, ea.label, eb.label}};
                }
            }
        }
    }
    return {true, std::nullopt};
}

FrameworkCheck chainlogic::enforce_single_framework(std::span<const BranchPath> paths, const FrameworkTree &tree) {
    for (const auto &p : paths) {
        if (tree.find(p, true) == nullptr) {
            return {false, p, "path " + format_path(p) + " refers to a projector outside this framework"};
        }
    }
    return {true, std::nullopt, ""};
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string dot_escape(const std::string &s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch;
    }
    return out;
}

void emit_dot(const BranchNode &node, std::size_t id, std::size_t &next_id, std::ostringstream &out) {
    out << "  n" << id << " [label=\"" << dot_escape(node.label) << "\\nt" << node.time_index << "\\np=" << fixed6(node.probability)
        << "\"";
    if (node.pruned) {
        out << ", style=dashed";
    }
    out << "];\n";
    if (node.pruned) {
        return;
    }
    for (const auto &c : node.children) {
        std::size_t child_id = next_id++;
        emit_dot(c, child_id, next_id, out);
        out << "  n" << id << " -> n" << child_id;
        if (c.pruned) {
            out << " [style=dashed]";
        }
        out << ";\n";
    }
}

ordered_json node_json(const BranchNode &node) {
    ordered_json j;
    j["label"] = node.label;
    j["time"] = node.time_index;
    j["probability"] = node.probability;
    j["pruned"] = node.pruned;
    if (node.choice_weight.has_value()) {
        j["choice_weight"] = *node.choice_weight;
    }
    ordered_json children = ordered_json::array();
    if (!node.pruned) {
        for (const auto &c : node.children) {
            children.push_back(node_json(c));
        }
    }
    j["children"] = std::move(children);
    return j;
}

SkeletonNode skeleton_node(const BranchNode &node) {
    SkeletonNode s{node.label, node.time_index, node.probability, node.pruned, node.choice_weight, {}};
    if (!node.pruned) {
        for (const auto &c : node.children) {
            s.children.push_back(skeleton_node(c));
        }
    }
    return s;
}

template <typename T>
T field(const nlohmann::json &j, const char *name, const std::string &where) {
    if (!j.is_object() || !j.contains(name)) {
        throw InvalidValueError("tree JSON: missing field '" + where + name + "'");
    }
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw InvalidValueError("tree JSON: field '" + where + name + "' has the wrong type");
    }
}

SkeletonNode parse_node(const nlohmann::json &j, const std::string &where) {
    SkeletonNode s;
    s.label = field<std::string>(j, "label", where);
    s.time_index = field<std::size_t>(j, "time", where);
    s.probability = field<double>(j, "probability", where);
    s.pruned = field<bool>(j, "pruned", where);
    if (j.contains("choice_weight")) {
        s.choice_weight = field<double>(j, "choice_weight", where);
    }
    if (!j.contains("children") || !j.at("children").is_array()) {
        throw InvalidValueError("tree JSON: field '" + where + "children' must be an array");
    }
    const auto &children = j.at("children");
    for (std::size_t i = 0; i < children.size(); i++) {
        s.children.push_back(parse_node(children[i], where + "children[" + std::to_string(i) + "]."));
    }
    return s;
}

}  // namespace

std::string chainlogic::export_tree(const FrameworkTree &tree, ExportFormat format) {
    if (format == ExportFormat::dot) {
        std::ostringstream out;
        out << "digraph framework {\n";
        out << "  rankdir=LR;\n";
        out << "  node [shape=box];\n";
        std::size_t next_id = 1;
        emit_dot(tree.root(), 0, next_id, out);
        out << "}\n";
        return out.str();
    }
    ordered_json j;
    j["schema"] = 1;
    j["dim"] = tree.grid().dim();
    j["times"] = tree.grid().times();
    j["root"] = node_json(tree.root());
    return j.dump(2) + "\n";
}

TreeSkeleton chainlogic::skeleton_of(const FrameworkTree &tree) {
    return TreeSkeleton{tree.grid().dim(), tree.grid().times(), skeleton_node(tree.root())};
}

TreeSkeleton chainlogic::import_tree_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw InvalidValueError(std::string("tree JSON: parse error: ") + e.what());
    }
    if (field<int>(j, "schema", "") != 1) {
        throw InvalidValueError("tree JSON: field 'schema' must be 1");
    }
    TreeSkeleton t;
    t.dim = field<std::size_t>(j, "dim", "");
    t.times = field<std::vector<double>>(j, "times", "");
    if (!j.contains("root")) {
        throw InvalidValueError("tree JSON: missing field 'root'");
    }
    t.root = parse_node(j.at("root"), "root.");
    return t;
}
