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

#ifndef CHAINLOGIC_HISTORIES_H
#define CHAINLOGIC_HISTORIES_H

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chainlogic/qm_core.h"

namespace chainlogic {

/// Ordered times t_0 < t_1 < ... < t_f with one unitary U(t_{i+1}, t_i) per interval.
/// The initial state lives at t_0; events happen at t_1 ... t_f.
class TimeGrid {
   public:
    TimeGrid(std::vector<double> times, std::vector<LinearOperator> evolutions, double tol = kAlgebraTol);
    /// Times 0, 1, ..., num_events with identity evolutions.
    static TimeGrid identity(std::size_t num_events, std::size_t dim);

    std::size_t dim() const {
        return data_->dim;
    }
    std::size_t num_times() const {
        return data_->times.size();
    }
    /// Index of the last time; histories carry one event per time 1..final_index().
    std::size_t final_index() const {
        return data_->times.size() - 1;
    }
    const std::vector<double> &times() const {
        return data_->times;
    }
    /// U(t_k, t_{k-1}) for k >= 1.
    const LinearOperator &evolution_into(std::size_t k) const;
    bool evolution_is_identity(std::size_t k) const;

    /// The grid restricted to t_0 ... t_last.
    TimeGrid prefix(std::size_t last) const;
    /// Every evolution replaced by W U W†.
    TimeGrid conjugated(const LinearOperator &w) const;

    bool operator==(const TimeGrid &other) const;

   private:
    struct Data {
        std::size_t dim;
        std::vector<double> times;
        std::vector<LinearOperator> evolutions;
        std::vector<bool> identity;
    };
    explicit TimeGrid(std::shared_ptr<const Data> data) : data_(std::move(data)) {
    }
    std::shared_ptr<const Data> data_;
};

/// One history event. A set `choice_weight` marks a classical choice: the
/// projector is the identity and the weight multiplies the history weight.
struct HistoryEvent {
    std::size_t time_index;
    std::string label;
    Projector projector;
    std::optional<double> choice_weight;
};

/// One projector (or classical choice) per time t_1 ... t_f.
class History {
   public:
    History(TimeGrid grid, std::vector<HistoryEvent> events);

    const TimeGrid &grid() const {
        return grid_;
    }
    const std::vector<HistoryEvent> &events() const {
        return events_;
    }
    std::vector<std::string> labels() const;
    /// Product of classical choice weights (1 when there are none).
    double choice_weight() const;
    /// True when both histories made the same classical choices.
    bool same_choices(const History &other) const;

    /// F|v>, propagating through the grid's evolutions.
    CVector apply_chain(const CVector &v) const;

   private:
    TimeGrid grid_;
    std::vector<HistoryEvent> events_;
};

/// Histories over one grid and initial state.
class HistoryFamily {
   public:
    /// `exhaustive` asserts that the histories cover every branch of nonzero weight.
    HistoryFamily(TimeGrid grid, DensityOperator rho, std::vector<History> histories, bool exhaustive = false);

    const TimeGrid &grid() const {
        return grid_;
    }
    const DensityOperator &rho() const {
        return rho_;
    }
    const std::vector<History> &histories() const {
        return histories_;
    }
    std::size_t size() const {
        return histories_.size();
    }
    bool exhaustive() const {
        return exhaustive_;
    }

   private:
    TimeGrid grid_;
    DensityOperator rho_;
    std::vector<History> histories_;
    bool exhaustive_;
};

struct ConsistencyReport {
    CMatrix matrix;
    double tol;
    bool consistent;
    std::optional<OffDiagonal> worst_offdiag;
};

struct HistoryWeight {
    std::size_t index;
    double probability;
};

/// F = P_f U(t_f, t_{f-1}) ... P_1 U(t_1, t_0).
LinearOperator chain_operator(const History &h);

/// Weight times Tr(F rho F†). Negative values above -tol are clamped to zero;
/// anything lower raises InternalConsistencyError.
double history_probability(const History &h, const DensityOperator &rho, double tol = kAlgebraTol);

/// M_gk = Tr(F_k rho F_g†), zero between histories with different classical
/// choices. Consistent iff every off-diagonal magnitude is below tol.
ConsistencyReport consistency_matrix(const HistoryFamily &family, double tol = kSpectralTol);

/// History probabilities of a consistent family. Throws FrameworkViolationError
/// (carrying the worst off-diagonal) when the family is inconsistent.
std::vector<HistoryWeight> family_distribution(const HistoryFamily &family, double tol = kSpectralTol);

}  // namespace chainlogic

#endif
