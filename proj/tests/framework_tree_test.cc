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

#include <algorithm>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"

using namespace chainlogic;
using namespace chainlogic::testing;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

ProjectiveDecomposition z_basis() {
    return validate_pvm(
        {{"z0", projector_from_span({StateVector::basis(2, 0)})}, {"z1", projector_from_span({StateVector::basis(2, 1)})}});
}

ProjectiveDecomposition x_basis() {
    return validate_pvm(
        {{"x+", projector_from_span({StateVector{kH, kH}})}, {"x-", projector_from_span({StateVector{kH, -kH}})}});
}

ProjectiveDecomposition trivial(std::size_t dim) {
    return validate_pvm({{"I", Projector::identity(dim)}});
}

FrameworkTree one_time_tree(const ProjectiveDecomposition &pvm, const StateVector &psi) {
    Schedule s(1);
    s.set(1, pvm);
    return build_tree(TimeGrid::identity(1, psi.dim()), s, DensityOperator::from_state(psi));
}

double leaf_sum(const FrameworkTree &tree) {
    double total = 0;
    for (const auto &[path, node] : tree.leaves()) {
        total += node->probability;
    }
    return total;
}

bool has_pruned(const FrameworkTree &tree, const BranchPath &prefix) {
    for (const auto &p : tree.pruned()) {
        if (p.path.size() <= prefix.size() && std::equal(p.path.begin(), p.path.end(), prefix.begin())) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST(framework_tree, single_time_z_basis) {
    auto tree = one_time_tree(z_basis(), StateVector{kH, kH});
    EXPECT_EQ(tree.leaf_count(), 2u);
    EXPECT_EQ(tree.root().label, "root");
    EXPECT_EQ(tree.root().children[0].label, "z0");
    EXPECT_NEAR(tree.root().children[0].probability, 0.5, 1e-15);
}

TEST(framework_tree, identity_schedule_is_single_chain) {
    Schedule s(2);
    s.set(1, trivial(2)).set(2, trivial(2));
    auto tree = build_tree(TimeGrid::identity(2, 2), s, DensityOperator::from_state(StateVector::basis(2, 0)));
    EXPECT_EQ(tree.leaf_count(), 1u);
    EXPECT_NEAR(tree.leaves()[0].second->probability, 1.0, 1e-15);
}

TEST(framework_tree, schedule_errors) {
    Schedule missing(2);
    missing.set(1, z_basis());
    EXPECT_THROW(
        build_tree(TimeGrid::identity(2, 2), missing, DensityOperator::from_state(StateVector::basis(2, 0))),
        ScheduleError);

    Schedule wrong_dim(1);
    wrong_dim.set(1, trivial(3));
    EXPECT_THROW(
        build_tree(TimeGrid::identity(1, 2), wrong_dim, DensityOperator::from_state(StateVector::basis(2, 0))),
        DimensionMismatchError);

    Schedule s(2);
    EXPECT_THROW(s.set(3, z_basis()), ScheduleError);
    EXPECT_THROW(s.set_when(1, {1, "z0"}, z_basis()), ScheduleError);
}

TEST(framework_tree, conditional_schedule) {
    Schedule s(2);
    s.set(1, z_basis());
    s.set_when(2, {1, "z0"}, x_basis());
    s.set_when(2, {1, "z1"}, z_basis());
    auto tree = build_tree(TimeGrid::identity(2, 2), s, DensityOperator::from_state(StateVector{kH, kH}));
    EXPECT_NE(tree.find({"z0", "x+"}), nullptr);
    EXPECT_NE(tree.find({"z1", "z1"}), nullptr);
    EXPECT_EQ(tree.find({"z0", "z0"}), nullptr);
    EXPECT_NEAR(tree.find({"z0", "x-"})->probability, 0.25, 1e-15);
}

TEST(framework_tree, classical_choice_validation) {
    EXPECT_THROW(ClassicalChoice({}), InvalidValueError);
    EXPECT_THROW(ClassicalChoice({{"a", 0.5}, {"a", 0.5}}), DuplicateLabelError);
    EXPECT_THROW(ClassicalChoice({{"a", 0.5}, {"b", 0.4}}), CompletenessError);
    EXPECT_THROW(ClassicalChoice({{"a", -0.5}, {"b", 1.5}}), InvalidValueError);
}

TEST(framework_tree, hardy_tree_has_sixteen_leaves_unpruned) {
    ScenarioOptions o;
    o.prune = false;
    auto s = build_measurement_scenario(HardyAmplitudes::equal(), o);
    EXPECT_EQ(s.tree.leaf_count(), 16u);
    EXPECT_TRUE(s.tree.pruned().empty());
}

TEST(framework_tree, hardy_prunes_s1_branch) {
    auto s = build_measurement_scenario(HardyAmplitudes::equal(), ScenarioOptions{});
    EXPECT_TRUE(has_pruned(s.tree, {"ML1", "ML1-", "MR1", "MR1+"}));
    EXPECT_EQ(s.tree.find({"ML1", "ML1-", "MR1", "MR1+"}), nullptr);
    EXPECT_NE(s.tree.find({"ML1", "ML1-", "MR1", "MR1+"}, true), nullptr);
    EXPECT_NEAR(leaf_sum(s.tree), 1.0, 1e-10);
}

TEST(framework_tree, product_state_prunes_nothing) {
    Schedule s(2);
    std::array<std::size_t, 2> dims{2, 2};
    std::array<std::size_t, 1> left{0};
    std::array<std::size_t, 1> right{1};
    auto lift = [&](const ProjectiveDecomposition &pvm, std::span<const std::size_t> target, const char *side) {
        std::vector<LabeledProjector> out;
        for (const auto &m : pvm.members()) {
            out.push_back({std::string(side) + m.label, embed_projector(m.projector, dims, target)});
        }
        return validate_pvm(out);
    };
    s.set(1, lift(z_basis(), left, "L")).set(2, lift(x_basis(), right, "R"));
    auto psi = tensor_product(StateVector{0.6, 0.8}, StateVector{0.8, Complex(0, 0.6)});
    auto tree = prune_zero_branches(build_tree(TimeGrid::identity(2, 4), s, DensityOperator::from_state(psi)));
    EXPECT_TRUE(tree.pruned().empty());
    EXPECT_EQ(tree.leaf_count(), 4u);
}

TEST(framework_tree, hardy_b_zero_prunes_s4_branch) {
    auto amps = HardyAmplitudes::make(0.6, 0.0, 0.8);
    auto s = build_measurement_scenario(amps, ScenarioOptions{});
    EXPECT_TRUE(has_pruned(s.tree, {"ML2", "ML2+", "MR2", "MR2-"}));
    EXPECT_NEAR(oracle::s4_closed_form(0.6, 0.0, 0.8), 0.0, 1e-15);
    EXPECT_NEAR(oracle::hardy_conditional(0.6, 0.0, 0.8, 1, 1, 0, 1), 0.0, 1e-15);
}

TEST(framework_tree, pruning_idempotent_and_preserves_survivors_property) {
    auto gen = rng(31);
    for (int trial = 0; trial < 20; trial++) {
        ScenarioOptions o = particle_options();
        o.prune = false;
        auto amps = random_hardy(gen);
        auto s = build_measurement_scenario(amps, o);
        auto once = prune_zero_branches(s.tree);
        auto twice = prune_zero_branches(once);
        ASSERT_TRUE(once.same_structure(twice));
        ASSERT_EQ(skeleton_of(once), skeleton_of(twice));
        ASSERT_NEAR(leaf_sum(once), 1.0, 1e-10);
        for (const auto &[path, node] : once.leaves()) {
            const BranchNode *orig = s.tree.find(path);
            ASSERT_NE(orig, nullptr);
            ASSERT_NEAR(orig->probability, node->probability, 1e-12);
        }
    }
}

TEST(framework_tree, commuting_decompositions_give_consistent_family_property) {
    auto gen = rng(32);
    for (int trial = 0; trial < 20; trial++) {
        auto u = random_unitary(4, gen);
        auto col = [&](Eigen::Index c) { return StateVector(CVector(u.matrix().col(c))); };
        auto fine = validate_pvm(
            {{"e0", projector_from_span({col(0)})},
             {"e1", projector_from_span({col(1)})},
             {"e2", projector_from_span({col(2)})},
             {"e3", projector_from_span({col(3)})}});
        auto coarse = validate_pvm(
            {{"e01", projector_from_span({col(0), col(1)})}, {"e23", projector_from_span({col(2), col(3)})}});
        auto mixed = validate_pvm(
            {{"e02", projector_from_span({col(0), col(2)})}, {"e13", projector_from_span({col(1), col(3)})}});
        Schedule s(3);
        s.set(1, coarse).set(2, mixed).set(3, fine);
        auto rho = DensityOperator::from_ensemble({{0.6, random_vector(4, gen)}, {0.4, random_vector(4, gen)}});
        auto tree = build_tree(TimeGrid::identity(3, 4), s, rho);
        auto report = consistency_matrix(tree.family());
        ASSERT_TRUE(report.consistent);
        ASSERT_LT(report.worst_offdiag->magnitude, 1e-10);
    }
}

TEST(framework_tree, compatibility_z_versus_x) {
    auto psi = StateVector::basis(2, 0);
    auto z = one_time_tree(z_basis(), psi).family();
    auto x = one_time_tree(x_basis(), psi).family();
    auto r = check_compatibility(z, x);
    EXPECT_FALSE(r.compatible);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(r.witness->time_index, 1u);
    EXPECT_EQ(r.witness->label_a, "z0");
    EXPECT_EQ(r.witness->label_b, "x+");

    EXPECT_TRUE(check_compatibility(z, z).compatible);
}

TEST(framework_tree, compatibility_refinement) {
    auto e = [](std::size_t i) { return StateVector::basis(4, i); };
    auto fine = validate_pvm(
        {{"0", projector_from_span({e(0)})},
         {"1", projector_from_span({e(1)})},
         {"2", projector_from_span({e(2)})},
         {"3", projector_from_span({e(3)})}});
    auto coarse = validate_pvm({{"01", projector_from_span({e(0), e(1)})}, {"23", projector_from_span({e(2), e(3)})}});
    auto psi = StateVector{0.5, 0.5, 0.5, 0.5};
    auto a = one_time_tree(fine, psi).family();
    auto b = one_time_tree(coarse, psi).family();
    auto r = check_compatibility(b, a);
    EXPECT_TRUE(r.compatible);
    EXPECT_FALSE(r.witness.has_value());
}

TEST(framework_tree, single_framework_rule) {
    auto s = build_measurement_scenario(HardyAmplitudes::equal(), ScenarioOptions{});
    std::vector<BranchPath> sr_paths{
        {"ML1", "ML1+", "MR1", "MR1+"},
        {"ML1", "ML1+", "MR2", "MR2+"},
        {"ML2", "ML2+", "MR1", "MR1+"},
        {"ML2", "ML2+", "MR2", "MR2-"},
        {"ML1", "ML1-", "MR1", "MR1+"},
    };
    EXPECT_TRUE(enforce_single_framework(sr_paths, s.tree).ok);

    auto z_tree = one_time_tree(z_basis(), StateVector::basis(2, 0));
    std::vector<BranchPath> foreign{{"z0"}, {"x+"}};
    auto check = enforce_single_framework(foreign, z_tree);
    EXPECT_FALSE(check.ok);
    ASSERT_TRUE(check.offending.has_value());
    EXPECT_EQ(*check.offending, BranchPath{"x+"});

    EXPECT_TRUE(enforce_single_framework(std::span<const BranchPath>{}, z_tree).ok);
}

TEST(framework_tree, dot_export_one_leaf) {
    auto tree = one_time_tree(trivial(2), StateVector::basis(2, 0));
    std::string dot = export_tree(tree, ExportFormat::dot);
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::istringstream lines(dot);
    for (std::string line; std::getline(lines, line);) {
        if (line.find("->") != std::string::npos) {
            edges++;
        } else if (line.find("[label=") != std::string::npos) {
            nodes++;
        }
    }
    EXPECT_EQ(nodes, 2u);
    EXPECT_EQ(edges, 1u);
}

TEST(framework_tree, dot_export_hardy_marks_pruned) {
    auto s = build_measurement_scenario(HardyAmplitudes::equal(), ScenarioOptions{});
    std::string dot = export_tree(s.tree, ExportFormat::dot);
    EXPECT_NE(dot.find("style=dashed"), std::string::npos);
    std::size_t leaves = 0;
    std::size_t dashed_leaves = 0;
    std::istringstream lines(dot);
    for (std::string line; std::getline(lines, line);) {
        if (line.find("\\nt4\\n") != std::string::npos) {
            leaves++;
            if (line.find("dashed") != std::string::npos) {
                dashed_leaves++;
            }
        }
    }
    EXPECT_LE(leaves - dashed_leaves, 16u);
    EXPECT_EQ(leaves - dashed_leaves, s.tree.leaf_count());
    EXPECT_EQ(dashed_leaves, s.tree.pruned().size());
}

TEST(framework_tree, json_round_trip) {
    auto s = build_measurement_scenario(HardyAmplitudes::equal(), ScenarioOptions{});
    std::string text = export_tree(s.tree, ExportFormat::json);
    EXPECT_EQ(import_tree_json(text), skeleton_of(s.tree));
    EXPECT_EQ(export_tree(s.tree, ExportFormat::json), text);
    EXPECT_THROW(import_tree_json("{\"schema\": 1}"), InvalidValueError);
    EXPECT_THROW(import_tree_json("{\"schema\": 2, \"root\": {}}"), InvalidValueError);
    EXPECT_THROW(import_tree_json("not json"), InvalidValueError);
}
