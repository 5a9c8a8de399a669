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

#include "chainlogic/histories.h"

#include <cmath>

using namespace chainlogic;

TimeGrid::TimeGrid(std::vector<double> times, std::vector<LinearOperator> evolutions, double tol) {
    if (times.size() < 2) {
        throw InvalidValueError("TimeGrid: need t_0 and at least one event time");
    }
    for (std::size_t i = 1; i < times.size(); i++) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidValueError("TimeGrid: times must be strictly increasing");
        }
    }
    if (evolutions.size() != times.size() - 1) {
        throw InvalidValueError("TimeGrid: need exactly one evolution per interval");
    }
    auto data = std::make_shared<Data>();
    data->dim = evolutions.front().dim();
    for (const auto &u : evolutions) {
        if (u.dim() != data->dim) {
            throw DimensionMismatchError("TimeGrid: evolutions have different dimensions");
        }
        if (!u.is_unitary(tol)) {
            throw InvalidValueError("TimeGrid: evolution is not unitary");
        }
        data->identity.push_back(u.is_exact_identity());
    }
    data->times = std::move(times);
    data->evolutions = std::move(evolutions);
    data_ = std::move(data);
}

TimeGrid TimeGrid::identity(std::size_t num_events, std::size_t dim) {
    std::vector<double> times;
    for (std::size_t i = 0; i <= num_events; i++) {
        times.push_back(static_cast<double>(i));
    }
    std::vector<LinearOperator> evolutions(num_events, LinearOperator::identity(dim));
    return TimeGrid(std::move(times), std::move(evolutions));
}

const LinearOperator &TimeGrid::evolution_into(std::size_t k) const {
    if (k == 0 || k > final_index()) {
        throw InvalidValueError("TimeGrid::evolution_into: time index out of range");
    }
    return data_->evolutions[k - 1];
}

bool TimeGrid::evolution_is_identity(std::size_t k) const {
    if (k == 0 || k > final_index()) {
        throw InvalidValueError("TimeGrid::evolution_is_identity: time index out of range");
    }
    return data_->identity[k - 1];
}

TimeGrid TimeGrid::prefix(std::size_t last) const {
    if (last == 0 || last > final_index()) {
        throw InvalidValueError("TimeGrid::prefix: time index out of range");
    }
    if (last == final_index()) {
        return *this;
    }
    auto data = std::make_shared<Data>();
    data->dim = data_->dim;
    data->times.assign(data_->times.begin(), data_->times.begin() + static_cast<std::ptrdiff_t>(last + 1));
    data->evolutions.assign(data_->evolutions.begin(), data_->evolutions.begin() + static_cast<std::ptrdiff_t>(last));
    data->identity.assign(data_->identity.begin(), data_->identity.begin() + static_cast<std::ptrdiff_t>(last));
    return TimeGrid(std::move(data));
}

TimeGrid TimeGrid::conjugated(const LinearOperator &w) const {
    std::vector<LinearOperator> evolutions;
    for (const auto &u : data_->evolutions) {
        evolutions.push_back(w * u * w.adjoint());
    }
    return TimeGrid(data_->times, std::move(evolutions));
}

bool TimeGrid::operator==(const TimeGrid &other) const {
    if (data_ == other.data_) {
        return true;
    }
    if (dim() != other.dim() || times() != other.times()) {
        return false;
    }
    for (std::size_t i = 0; i < data_->evolutions.size(); i++) {
        if (data_->evolutions[i].matrix() != other.data_->evolutions[i].matrix()) {
            return false;
        }
    }
    return true;
}

History::History(TimeGrid grid, std::vector<HistoryEvent> events) : grid_(std::move(grid)), events_(std::move(events)) {
    if (events_.size() != grid_.final_index()) {
        throw InvalidValueError(
            "History: expected " + std::to_string(grid_.final_index()) + " events, got " +
            std::to_string(events_.size()));
    }
    for (std::size_t i = 0; i < events_.size(); i++) {
        const auto &e = events_[i];
        if (e.time_index != i + 1) {
            throw InvalidValueError("History: events must cover t_1 ... t_f in order");
        }
        if (e.projector.dim() != grid_.dim()) {
            throw DimensionMismatchError("History: event '" + e.label + "' has the wrong dimension");
        }
        if (e.choice_weight.has_value()) {
            double w = *e.choice_weight;
            if (!(w >= 0.0 && w <= 1.0)) {
                throw InvalidValueError("History: choice weight of '" + e.label + "' outside [0, 1]");
            }
            if (!e.projector.op().is_exact_identity()) {
                throw InvalidValueError("History: classical choice '" + e.label + "' must carry the identity");
            }
        }
    }
}

std::vector<std::string> History::labels() const {
    std::vector<std::string> out;
    for (const auto &e : events_) {
        out.push_back(e.label);
    }
    return out;
}

double History::choice_weight() const {
    double w = 1.0;
    for (const auto &e : events_) {
        if (e.choice_weight.has_value()) {
            w *= *e.choice_weight;
        }
    }
    return w;
}

bool History::same_choices(const History &other) const {
    if (events_.size() != other.events_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < events_.size(); i++) {
        const auto &a = events_[i];
        const auto &b = other.events_[i];
        if (a.choice_weight.has_value() != b.choice_weight.has_value()) {
            return false;
        }
        if (a.choice_weight.has_value() && a.label != b.label) {
            return false;
        }
    }
    return true;
}

CVector History::apply_chain(const CVector &v) const {
    CVector cur = v;
    for (const auto &e : events_) {
        if (!grid_.evolution_is_identity(e.time_index)) {
            cur = grid_.evolution_into(e.time_index).apply_to(cur);
        }
        if (!e.choice_weight.has_value()) {
            cur = e.projector.op().apply_to(cur);
        }
    }
    return cur;
}

HistoryFamily::HistoryFamily(TimeGrid grid, DensityOperator rho, std::vector<History> histories, bool exhaustive)
    : grid_(std::move(grid)), rho_(std::move(rho)), histories_(std::move(histories)), exhaustive_(exhaustive) {
    if (rho_.dim() != grid_.dim()) {
        throw DimensionMismatchError("HistoryFamily: rho dimension differs from the grid");
    }
    for (const auto &h : histories_) {
        if (!(h.grid() == grid_)) {
            throw InvalidValueError("HistoryFamily: history defined on a different grid");
        }
    }
}

LinearOperator chainlogic::chain_operator(const History &h) {
    const TimeGrid &grid = h.grid();
    CMatrix f = CMatrix::Identity(static_cast<Eigen::Index>(grid.dim()), static_cast<Eigen::Index>(grid.dim()));
    for (const auto &e : h.events()) {
        if (!grid.evolution_is_identity(e.time_index)) {
            f = grid.evolution_into(e.time_index).matrix() * f;
        }
        if (!e.choice_weight.has_value()) {
            f = e.projector.matrix() * f;
        }
    }
    return LinearOperator(std::move(f));
}

namespace {

// Chain images F|u_i> of every ensemble component.
std::vector<CVector> chain_images(const History &h, const DensityOperator &rho) {
    std::vector<CVector> out;
    out.reserve(rho.components().size());
    for (const auto &c : rho.components()) {
        out.push_back(h.apply_chain(c.vector));
    }
    return out;
}

// sum_i w_i <a_i|b_i> = Tr(F_b rho F_a†).
Complex overlap(const DensityOperator &rho, const std::vector<CVector> &a, const std::vector<CVector> &b) {
    Complex s = 0.0;
    const auto &comps = rho.components();
    for (std::size_t i = 0; i < comps.size(); i++) {
        s += comps[i].weight * a[i].dot(b[i]);
    }
    return s;
}

}  // namespace

double chainlogic::history_probability(const History &h, const DensityOperator &rho, double tol) {
    if (rho.dim() != h.grid().dim()) {
        throw DimensionMismatchError("history_probability: rho dimension differs from the history");
    }
    auto images = chain_images(h, rho);
    double p = h.choice_weight() * overlap(rho, images, images).real();
    if (p < -tol) {
        throw InternalConsistencyError("history_probability: negative probability " + std::to_string(p));
    }
    return p < 0.0 ? 0.0 : p;
}

ConsistencyReport chainlogic::consistency_matrix(const HistoryFamily &family, double tol) {
    const auto &hs = family.histories();
    auto k_count = static_cast<Eigen::Index>(hs.size());
    std::vector<std::vector<CVector>> images;
    images.reserve(hs.size());
    for (const auto &h : hs) {
        images.push_back(chain_images(h, family.rho()));
    }

    ConsistencyReport report{CMatrix::Zero(k_count, k_count), tol, true, std::nullopt};
    for (std::size_t g = 0; g < hs.size(); g++) {
        for (std::size_t k = g; k < hs.size(); k++) {
            if (!hs[g].same_choices(hs[k])) {
                continue;
            }
            double w = hs[g].choice_weight();
            Complex m = w * overlap(family.rho(), images[g], images[k]);
            auto gi = static_cast<Eigen::Index>(g);
            auto ki = static_cast<Eigen::Index>(k);
            if (g == k) {
                report.matrix(gi, gi) = Complex(m.real(), 0.0);
                continue;
            }
            report.matrix(gi, ki) = m;
            report.matrix(ki, gi) = std::conj(m);
            double mag = std::abs(m);
            if (!report.worst_offdiag.has_value() || mag > report.worst_offdiag->magnitude) {
                report.worst_offdiag = OffDiagonal{g, k, mag};
            }
        }
    }
    if (hs.size() > 1 && !report.worst_offdiag.has_value()) {
        report.worst_offdiag = OffDiagonal{0, 1, 0.0};
    }
    report.consistent = !report.worst_offdiag.has_value() || report.worst_offdiag->magnitude < tol;
    return report;
}

std::vector<HistoryWeight> chainlogic::family_distribution(const HistoryFamily &family, double tol) {
    ConsistencyReport report = consistency_matrix(family, tol);
    if (!report.consistent) {
        const auto &w = *report.worst_offdiag;
        throw FrameworkViolationError(
            "family_distribution: family is not consistent (|M[" + std::to_string(w.g) + "][" + std::to_string(w.k) +
                "]| = " + std::to_string(w.magnitude) + ")",
            report.worst_offdiag);
    }
    std::vector<HistoryWeight> out;
    double total = 0.0;
    for (std::size_t k = 0; k < family.size(); k++) {
        double p = report.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
        if (p < -kAlgebraTol) {
            throw InternalConsistencyError("family_distribution: negative diagonal entry");
        }
        p = p < 0.0 ? 0.0 : p;
        total += p;
        out.push_back({k, p});
    }
    if (family.exhaustive() && std::abs(total - 1.0) >= tol) {
        throw InternalConsistencyError(
            "family_distribution: exhaustive family sums to " + std::to_string(total) + " instead of 1");
    }
    return out;
}
