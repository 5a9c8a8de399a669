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

#include "chainlogic/hardy_scenario.h"

#include <limits>
#include <random>

using namespace chainlogic;

namespace {

constexpr double kDegenerateEps = 1e-9;

const char *const kSettingNames[4] = {"ML1", "ML2", "MR1", "MR2"};

// Normalized v with its first nonzero component made real positive.
StateVector with_phase_convention(CVector v) {
    v.normalize();
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if (std::abs(v(i)) > 1e-15) {
            Complex phase = v(i) / std::abs(v(i));
            v /= phase;
            v(i) = std::abs(v(i));
            break;
        }
    }
    return StateVector(std::move(v));
}

// plus is orthogonal to (v0, v1) when orthogonal_is_plus, otherwise minus is.
TwoOutcomeBasis basis_around(Complex v0, Complex v1, bool orthogonal_is_plus) {
    if (std::abs(v0) < kDegenerateEps && std::abs(v1) < kDegenerateEps) {
        throw DegenerateBasisError("derive_hardy_bases: both amplitudes constraining this basis vanish");
    }
    CVector along(2);
    along << v0, v1;
    CVector across(2);
    across << std::conj(v1), -std::conj(v0);
    StateVector a = with_phase_convention(along);
    StateVector o = with_phase_convention(across);
    if (orthogonal_is_plus) {
        return {o, a};
    }
    return {a, o};
}

DerivedBases derive_bases_unchecked(const HardyAmplitudes &amps) {
    return DerivedBases{
        basis_around(amps.a, amps.c, true),
        basis_around(amps.a, amps.b, false),
    };
}

Projector ket_projector(const StateVector &v) {
    return projector_from_span({v});
}

ProjectiveDecomposition two_member(const std::string &name, const Projector &plus) {
    return validate_pvm({{name + "+", plus}, {name + "-", plus.complement()}});
}

struct ApparatusStages {
    ProjectiveDecomposition left_setting;
    ProjectiveDecomposition left_first_outcome;
    ProjectiveDecomposition left_second_outcome;
    ProjectiveDecomposition right_setting;
    ProjectiveDecomposition right_first_outcome;
    ProjectiveDecomposition right_second_outcome;
};

const std::array<std::size_t, 4> kApparatusDims = {2, 2, ApparatusModel::kRegisterDim, ApparatusModel::kRegisterDim};

// Register projectors are independent of the amplitudes, so they are built once.
const ApparatusStages &apparatus_stages() {
    static const ApparatusStages stages = [] {
        auto reg = [](std::size_t register_factor, std::size_t state) {
            Projector p = ket_projector(StateVector::basis(ApparatusModel::kRegisterDim, state));
            std::array<std::size_t, 1> target = {register_factor};
            return embed_projector(p, kApparatusDims, target);
        };
        auto setting = [&](std::size_t factor, const char *first, const char *second) {
            Projector p = reg(factor, ApparatusModel::ready1);
            return validate_pvm({{first, p}, {second, p.complement()}});
        };
        return ApparatusStages{
            setting(2, "ML1", "ML2"),
            two_member("ML1", reg(2, ApparatusModel::p1_plus)),
            two_member("ML2", reg(2, ApparatusModel::p2_plus)),
            setting(3, "MR1", "MR2"),
            two_member("MR1", reg(3, ApparatusModel::p1_plus)),
            two_member("MR2", reg(3, ApparatusModel::p2_plus)),
        };
    }();
    return stages;
}

void validate_choice(const ChoiceAmplitudes &c, const char *side) {
    if (std::abs(c.first_weight() + c.second_weight() - 1.0) >= kAlgebraTol) {
        throw InvalidValueError(std::string("invalid choice amplitudes on side ") + side + ": weights must sum to one");
    }
}

StageTimes stage_times(SideOrder order) {
    if (order == SideOrder::left_first) {
        return {1, 2, 3, 4};
    }
    return {3, 4, 1, 2};
}

void validate_settings(const SettingQuad &settings, double tol) {
    for (std::size_t i = 0; i < 4; i++) {
        const auto &s = settings[i];
        if (s.name != kSettingNames[i]) {
            throw InvalidValueError(std::string("settings must be ordered ML1, ML2, MR1, MR2; got ") + s.name);
        }
        if (s.side != (i < 2 ? Side::left : Side::right)) {
            throw InvalidValueError("setting " + s.name + " is on the wrong side");
        }
        const auto &b = s.basis;
        if (b.plus.dim() != 2 || b.minus.dim() != 2 || !b.plus.is_normalized(tol) || !b.minus.is_normalized(tol) ||
            std::abs(b.plus.inner(b.minus)) >= tol) {
            throw InvalidValueError("setting " + s.name + " basis is not orthonormal on a qubit");
        }
    }
}

}  // namespace

HardyAmplitudes HardyAmplitudes::make(Complex a, Complex b, Complex c, double tol) {
    HardyAmplitudes amps{a, b, c};
    double n = std::norm(a) + std::norm(b) + std::norm(c);
    if (!std::isfinite(n) || std::abs(n - 1.0) >= tol) {
        throw InvalidValueError("HardyAmplitudes: |a|^2 + |b|^2 + |c|^2 must be 1");
    }
    return amps;
}

HardyAmplitudes HardyAmplitudes::equal() {
    double v = 1.0 / std::sqrt(3.0);
    return make(v, v, v);
}

bool HardyAmplitudes::is_strict(double eps) const {
    return std::abs(a) > eps && std::abs(b) > eps && std::abs(c) > eps;
}

StateVector chainlogic::build_hardy_state(const HardyAmplitudes &amps) {
    HardyAmplitudes checked = HardyAmplitudes::make(amps.a, amps.b, amps.c);
    return StateVector({checked.a, checked.b, checked.c, 0.0});
}

DerivedBases chainlogic::derive_hardy_bases(const HardyAmplitudes &amps) {
    if (!amps.is_strict()) {
        throw NotHardyStateError("derive_hardy_bases: amplitudes a, b, c must all be nonzero");
    }
    return derive_bases_unchecked(amps);
}

SettingQuad chainlogic::hardy_settings(const HardyAmplitudes &amps) {
    DerivedBases d = derive_bases_unchecked(amps);
    StateVector z_plus = StateVector::basis(2, 0);
    StateVector z_minus = StateVector::basis(2, 1);
    return SettingQuad{
        MeasurementSetting{Side::left, "ML1", {z_plus, z_minus}},
        MeasurementSetting{Side::left, "ML2", d.left},
        MeasurementSetting{Side::right, "MR1", {z_minus, z_plus}},
        MeasurementSetting{Side::right, "MR2", d.right},
    };
}

ChoiceAmplitudes ChoiceAmplitudes::from_weights(double first_weight, double second_weight) {
    if (!(first_weight >= 0.0) || !(second_weight >= 0.0)) {
        throw InvalidValueError("ChoiceAmplitudes: weights must be nonnegative");
    }
    return ChoiceAmplitudes{std::sqrt(first_weight), std::sqrt(second_weight)};
}

LinearOperator ApparatusModel::measurement_unitary(
    const TwoOutcomeBasis &first, const TwoOutcomeBasis &second, std::uint64_t completion_seed) {
    constexpr Eigen::Index n = 2 * kRegisterDim;
    auto reg = [](std::size_t s) { return StateVector::basis(kRegisterDim, s); };
    struct Map {
        const StateVector &qubit;
        std::size_t from;
        std::size_t to;
    };
    const Map maps[4] = {
        {first.plus, ready1, p1_plus},
        {first.minus, ready1, p1_minus},
        {second.plus, ready2, p2_plus},
        {second.minus, ready2, p2_minus},
    };

    CMatrix u = CMatrix::Zero(n, n);
    std::vector<CVector> range;
    for (const auto &m : maps) {
        CVector in = tensor_product(m.qubit, reg(m.from)).amplitudes();
        CVector out = tensor_product(m.qubit, reg(m.to)).amplitudes();
        u += out * in.adjoint();
        range.push_back(out);
    }

    // Orthonormal basis of the orthogonal complement of the image.
    std::vector<CVector> complement;
    for (Eigen::Index i = 0; i < n && complement.size() < 8; i++) {
        CVector w = CVector::Unit(n, i);
        for (int sweep = 0; sweep < 2; sweep++) {
            for (const auto &q : range) {
                w -= q.dot(w) * q;
            }
            for (const auto &q : complement) {
                w -= q.dot(w) * q;
            }
        }
        if (w.norm() > 1e-6) {
            complement.push_back(w / w.norm());
        }
    }
    if (complement.size() != 8) {
        throw InternalConsistencyError("measurement_unitary: could not complete the isometry");
    }

    if (completion_seed != 0) {
        std::mt19937_64 rng(completion_seed);
        std::normal_distribution<double> normal;
        CMatrix g(8, 8);
        for (Eigen::Index r = 0; r < 8; r++) {
            for (Eigen::Index c = 0; c < 8; c++) {
                g(r, c) = Complex(normal(rng), normal(rng));
            }
        }
        CMatrix w = Eigen::HouseholderQR<CMatrix>(g).householderQ() * CMatrix::Identity(8, 8);
        std::vector<CVector> rotated(8, CVector::Zero(n));
        for (std::size_t j = 0; j < 8; j++) {
            for (std::size_t i = 0; i < 8; i++) {
                rotated[j] += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * complement[i];
            }
        }
        complement = std::move(rotated);
    }

    // Domain complement: qubit ⊗ {pointer states}.
    std::size_t j = 0;
    for (std::size_t q = 0; q < 2; q++) {
        for (std::size_t r = p1_plus; r <= p2_minus; r++) {
            CVector in = CVector::Unit(n, static_cast<Eigen::Index>(q * kRegisterDim + r));
            u += complement[j++] * in.adjoint();
        }
    }
    LinearOperator op(std::move(u));
    if (!op.is_unitary(kAlgebraTol)) {
        throw InternalConsistencyError("measurement_unitary: completion is not unitary");
    }
    return op;
}

StateVector ApparatusModel::ready_state(const ChoiceAmplitudes &choice) {
    CVector v = CVector::Zero(kRegisterDim);
    v(ready1) = choice.first;
    v(ready2) = choice.second;
    StateVector s(std::move(v));
    if (!s.is_normalized()) {
        throw InvalidValueError("ApparatusModel::ready_state: choice amplitudes are not normalized");
    }
    return s;
}

const char *chainlogic::to_string(ScenarioMode mode) {
    return mode == ScenarioMode::particle ? "particle" : "apparatus";
}

bool HardyScenario::strict_hardy() const {
    return amplitudes.has_value() && amplitudes->is_strict();
}

HardyScenario chainlogic::build_custom_scenario(
    const StateVector &two_qubit_state, const SettingQuad &settings, const ScenarioOptions &options) {
    const Tolerances &tol = options.tol;
    if (two_qubit_state.dim() != 4 || !two_qubit_state.is_normalized(tol.algebra)) {
        throw InvalidValueError("scenario: initial state must be a normalized two-qubit state");
    }
    validate_settings(settings, tol.algebra);
    validate_choice(options.left, "L");
    validate_choice(options.right, "R");

    StageTimes times = stage_times(options.order);
    Schedule schedule(4);
    std::optional<TimeGrid> grid;
    std::optional<DensityOperator> rho;
    std::size_t dim;

    if (options.mode == ScenarioMode::particle) {
        dim = 4;
        Projector id2 = Projector::identity(2);
        schedule.set(
            times.left_setting,
            ClassicalChoice({{"ML1", options.left.first_weight()}, {"ML2", options.left.second_weight()}}, tol.algebra));
        schedule.set(
            times.right_setting,
            ClassicalChoice({{"MR1", options.right.first_weight()}, {"MR2", options.right.second_weight()}}, tol.algebra));
        for (std::size_t i = 0; i < 4; i++) {
            const auto &s = settings[i];
            Projector on_qubit = ket_projector(s.basis.plus);
            Projector plus = s.side == Side::left ? tensor_product(on_qubit, id2) : tensor_product(id2, on_qubit);
            std::size_t setting_time = s.side == Side::left ? times.left_setting : times.right_setting;
            std::size_t outcome_time = s.side == Side::left ? times.left_outcome : times.right_outcome;
            schedule.set_when(outcome_time, {setting_time, s.name}, two_member(s.name, plus));
        }
        grid = TimeGrid::identity(4, dim);
        rho = DensityOperator::from_state(two_qubit_state, tol.algebra);
    } else {
        dim = 144;
        const ApparatusStages &stages = apparatus_stages();
        schedule.set(times.left_setting, stages.left_setting);
        schedule.set(times.right_setting, stages.right_setting);
        schedule.set_when(times.left_outcome, {times.left_setting, "ML1"}, stages.left_first_outcome);
        schedule.set_when(times.left_outcome, {times.left_setting, "ML2"}, stages.left_second_outcome);
        schedule.set_when(times.right_outcome, {times.right_setting, "MR1"}, stages.right_first_outcome);
        schedule.set_when(times.right_outcome, {times.right_setting, "MR2"}, stages.right_second_outcome);

        std::uint64_t seed = options.completion_seed;
        LinearOperator left_u = ApparatusModel::measurement_unitary(settings[0].basis, settings[1].basis, seed);
        LinearOperator right_u = ApparatusModel::measurement_unitary(
            settings[2].basis, settings[3].basis, seed == 0 ? 0 : seed + 0x9e3779b97f4a7c15ULL);
        std::array<std::size_t, 2> left_targets = {0, 2};
        std::array<std::size_t, 2> right_targets = {1, 3};
        std::vector<LinearOperator> evolutions(4, LinearOperator::identity(dim));
        evolutions[times.left_outcome - 1] = embed_operator(left_u, kApparatusDims, left_targets);
        evolutions[times.right_outcome - 1] = embed_operator(right_u, kApparatusDims, right_targets);
        grid = TimeGrid({0.0, 1.0, 2.0, 3.0, 4.0}, std::move(evolutions), tol.algebra);

        StateVector full = tensor_product(
            tensor_product(two_qubit_state, ApparatusModel::ready_state(options.left)),
            ApparatusModel::ready_state(options.right));
        rho = DensityOperator::from_state(full, tol.algebra);
    }

    FrameworkTree tree = build_tree(*grid, schedule, *rho);
    if (options.prune) {
        tree = prune_zero_branches(tree, tol.prune);
    }
    ConsistencyReport consistency = consistency_matrix(tree.family(), tol.consistency);
    if (!consistency.consistent) {
        throw FrameworkViolationError("scenario: the measurement framework is not consistent", consistency.worst_offdiag);
    }
    return HardyScenario{
        std::nullopt, two_qubit_state, settings, options, times, dim, std::move(tree), std::move(consistency)};
}

HardyScenario chainlogic::build_measurement_scenario(const HardyAmplitudes &amps, const ScenarioOptions &options) {
    HardyScenario s = build_custom_scenario(build_hardy_state(amps), hardy_settings(amps), options);
    s.amplitudes = amps;
    return s;
}

double JointTable::max_abs_diff(const JointTable &other) const {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); i++) {
        m = std::max(m, std::abs(p[i] - other.p[i]));
    }
    return m;
}

JointTable chainlogic::joint_probabilities(const HardyScenario &scenario) {
    JointTable t;
    const StageTimes &times = scenario.times;
    for (const auto &[path, node] : scenario.tree.leaves()) {
        int ls = path[times.left_setting - 1] == "ML1" ? 0 : 1;
        int rs = path[times.right_setting - 1] == "MR1" ? 0 : 1;
        int lo = path[times.left_outcome - 1].back() == '+' ? 0 : 1;
        int ro = path[times.right_outcome - 1].back() == '+' ? 0 : 1;
        t.at(ls, rs, lo, ro) = node->probability;
    }
    return t;
}

JointTable chainlogic::conditional_probabilities(const HardyScenario &scenario) {
    JointTable joint = joint_probabilities(scenario);
    const double lw[2] = {scenario.options.left.first_weight(), scenario.options.left.second_weight()};
    const double rw[2] = {scenario.options.right.first_weight(), scenario.options.right.second_weight()};
    JointTable out;
    for (int ls = 0; ls < 2; ls++) {
        for (int rs = 0; rs < 2; rs++) {
            double w = lw[ls] * rw[rs];
            for (int lo = 0; lo < 2; lo++) {
                for (int ro = 0; ro < 2; ro++) {
                    out.at(ls, rs, lo, ro) =
                        w > 0.0 ? joint.at(ls, rs, lo, ro) / w : std::numeric_limits<double>::quiet_NaN();
                }
            }
        }
    }
    return out;
}

HardyReport chainlogic::verify_hardy_predictions(const HardyScenario &scenario, double tol) {
    JointTable c = conditional_probabilities(scenario);
    HardyReport r{
        {
            StatementResult{"S1", "If ML1 and MR1+, then ML1+  [P(ML1- & MR1+) = 0]", c.at(0, 0, 1, 0), false},
            StatementResult{"S2", "If ML1+ and MR2, then MR2+  [P(ML1+ & MR2-) = 0]", c.at(0, 1, 0, 1), false},
            StatementResult{"S3", "If ML2+ and MR1, then MR1+  [P(ML2+ & MR1-) = 0]", c.at(1, 0, 0, 1), false},
            StatementResult{"S4", "If ML2+ and MR2, then sometimes MR2-  [P(ML2+ & MR2-) > 0]", c.at(1, 1, 0, 1), false},
        },
        scenario.strict_hardy(),
        false,
    };
    for (std::size_t i = 0; i < 3; i++) {
        r.statements[i].passed = r.statements[i].probability < tol;
    }
    r.statements[3].passed = r.statements[3].probability > tol;
    r.is_hardy = r.strict_hardy;
    for (const auto &s : r.statements) {
        r.is_hardy = r.is_hardy && s.passed;
    }
    return r;
}

NoSignalingReport chainlogic::no_signaling_report(const HardyScenario &scenario, double tol) {
    JointTable c = conditional_probabilities(scenario);
    double worst = 0.0;
    auto compare = [&](double x, double y) {
        // A setting that is never chosen carries no marginal to compare.
        if (std::isnan(x) || std::isnan(y)) {
            return;
        }
        worst = std::max(worst, std::abs(x - y));
    };
    for (int s = 0; s < 2; s++) {
        for (int o = 0; o < 2; o++) {
            // Right marginal for right setting s, across the two left settings.
            compare(c.at(0, s, 0, o) + c.at(0, s, 1, o), c.at(1, s, 0, o) + c.at(1, s, 1, o));
            // Left marginal for left setting s, across the two right settings.
            compare(c.at(s, 0, o, 0) + c.at(s, 0, o, 1), c.at(s, 1, o, 0) + c.at(s, 1, o, 1));
        }
    }
    return NoSignalingReport{worst, tol, worst < tol};
}
