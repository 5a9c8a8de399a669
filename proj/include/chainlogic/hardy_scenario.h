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

#ifndef CHAINLOGIC_HARDY_SCENARIO_H
#define CHAINLOGIC_HARDY_SCENARIO_H

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "chainlogic/framework_tree.h"

namespace chainlogic {

/// Amplitudes of a|z+ z+> + b|z+ z-> + c|z- z+>.
struct HardyAmplitudes {
    Complex a;
    Complex b;
    Complex c;

    /// Throws InvalidValueError unless |a|² + |b|² + |c|² = 1 within tol.
    static HardyAmplitudes make(Complex a, Complex b, Complex c, double tol = kAlgebraTol);
    static HardyAmplitudes equal();

    /// All three magnitudes above eps.
    bool is_strict(double eps = 1e-9) const;
};

/// a|z+ z+> + b|z+ z-> + c|z- z+>, left qubit as the slow index.
StateVector build_hardy_state(const HardyAmplitudes &amps);

struct TwoOutcomeBasis {
    StateVector plus;
    StateVector minus;
};

/// Second measurement bases fixed by the zero constraints. left.plus (ML2+) is
/// orthogonal to a|z+> + c|z->; right.minus (MR2-) is orthogonal to
/// a|z+> + b|z->. First nonzero component real positive.
struct DerivedBases {
    TwoOutcomeBasis left;
    TwoOutcomeBasis right;
};

/// Throws NotHardyStateError unless the amplitudes are strict Hardy.
DerivedBases derive_hardy_bases(const HardyAmplitudes &amps);

enum class Side { left, right };

struct MeasurementSetting {
    Side side;
    std::string name;
    TwoOutcomeBasis basis;
};

/// ML1, ML2, MR1, MR2 in that order.
using SettingQuad = std::array<MeasurementSetting, 4>;

/// ML1 = z basis (ML1+ = z+), MR1 = z basis with MR1+ = z-, ML2/MR2 derived.
SettingQuad hardy_settings(const HardyAmplitudes &amps);

/// Amplitudes (first, second) of the superposed ready state, or the classical
/// weights |first|², |second|² in particle mode.
struct ChoiceAmplitudes {
    Complex first = 1.0 / std::sqrt(2.0);
    Complex second = 1.0 / std::sqrt(2.0);

    static ChoiceAmplitudes from_weights(double first_weight, double second_weight);
    double first_weight() const {
        return std::norm(first);
    }
    double second_weight() const {
        return std::norm(second);
    }
};

/// Per-side measuring device: a six-level register {ready1, ready2, p1+, p1-,
/// p2+, p2-} coupled to that side's qubit.
class ApparatusModel {
   public:
    static constexpr std::size_t kRegisterDim = 6;
    enum RegisterState : std::size_t { ready1 = 0, ready2 = 1, p1_plus = 2, p1_minus = 3, p2_plus = 4, p2_minus = 5 };

    /// |s1±>|ready1> -> |s1±>|p1±>, |s2±>|ready2> -> |s2±>|p2±>, completed to a
    /// 12x12 unitary on qubit ⊗ register. completion_seed = 0 gives the
    /// Gram-Schmidt completion; other seeds rotate it by a seeded random unitary.
    static LinearOperator measurement_unitary(
        const TwoOutcomeBasis &first, const TwoOutcomeBasis &second, std::uint64_t completion_seed = 0);

    static StateVector ready_state(const ChoiceAmplitudes &choice);
};

enum class ScenarioMode { particle, apparatus };
enum class SideOrder { left_first, right_first };

const char *to_string(ScenarioMode mode);

struct ScenarioOptions {
    ScenarioMode mode = ScenarioMode::apparatus;
    ChoiceAmplitudes left;
    ChoiceAmplitudes right;
    SideOrder order = SideOrder::left_first;
    std::uint64_t completion_seed = 0;
    Tolerances tol;
    bool prune = true;
};

/// Event times of the four stages.
struct StageTimes {
    std::size_t left_setting;
    std::size_t left_outcome;
    std::size_t right_setting;
    std::size_t right_outcome;
};

struct HardyScenario {
    /// Absent for scenarios built from a custom two-qubit state.
    std::optional<HardyAmplitudes> amplitudes;
    StateVector initial_state;
    SettingQuad settings;
    ScenarioOptions options;
    StageTimes times;
    std::size_t dim;
    FrameworkTree tree;
    ConsistencyReport consistency;

    bool strict_hardy() const;
};

/// Particle mode: dimension 4, settings as classical choices. Apparatus mode:
/// dimension 144 (qubit L ⊗ qubit R ⊗ register L ⊗ register R) with ready
/// projectors for settings and pointer projectors for outcomes. Throws
/// FrameworkViolationError if the resulting family is not consistent.
HardyScenario build_measurement_scenario(const HardyAmplitudes &amps, const ScenarioOptions &options);
HardyScenario build_custom_scenario(
    const StateVector &two_qubit_state, const SettingQuad &settings, const ScenarioOptions &options);

/// Probabilities indexed by (left setting, right setting, left outcome,
/// right outcome), each 0 for the first/plus and 1 for the second/minus.
struct JointTable {
    std::array<double, 16> p{};

    double &at(int ls, int rs, int lo, int ro) {
        return p[static_cast<std::size_t>(((ls * 2 + rs) * 2 + lo) * 2 + ro)];
    }
    double at(int ls, int rs, int lo, int ro) const {
        return p[static_cast<std::size_t>(((ls * 2 + rs) * 2 + lo) * 2 + ro)];
    }
    double max_abs_diff(const JointTable &other) const;
};

/// Leaf probabilities, including the setting weights.
JointTable joint_probabilities(const HardyScenario &scenario);
/// Outcome probabilities given each setting pair (setting weights divided out).
/// Entries for a setting pair of zero weight are NaN.
JointTable conditional_probabilities(const HardyScenario &scenario);

struct StatementResult {
    std::string name;
    std::string description;
    double probability;
    bool passed;
};

struct HardyReport {
    std::array<StatementResult, 4> statements;
    bool strict_hardy;
    /// Strict amplitudes, S1-S3 zero and S4 positive.
    bool is_hardy;
};

HardyReport verify_hardy_predictions(const HardyScenario &scenario, double tol = kSpectralTol);

struct NoSignalingReport {
    double max_discrepancy;
    double tol;
    bool intact;
};

/// Marginals on each side compared across the other side's settings.
NoSignalingReport no_signaling_report(const HardyScenario &scenario, double tol = kSpectralTol);

}  // namespace chainlogic

#endif
