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

#include "chainlogic/qm_core.h"

#include <cmath>
#include <set>

using namespace chainlogic;

namespace {

constexpr Eigen::Index kSparseMinDim = 32;

Eigen::Index as_index(std::size_t n) {
    return static_cast<Eigen::Index>(n);
}

bool all_finite(const CMatrix &m) {
    return m.allFinite();
}

}  // namespace

double chainlogic::max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatchError("max_abs_diff: shape mismatch");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

StateVector::StateVector(CVector amps) : amps_(std::move(amps)) {
    if (amps_.size() == 0) {
        throw InvalidValueError("StateVector: dimension must be positive");
    }
    if (!amps_.allFinite()) {
        throw InvalidValueError("StateVector: amplitudes must be finite");
    }
}

StateVector::StateVector(std::initializer_list<Complex> amps)
    : StateVector(CVector(Eigen::Map<const CVector>(amps.begin(), as_index(amps.size())))) {
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw InvalidValueError("StateVector::basis: index out of range");
    }
    CVector v = CVector::Zero(as_index(dim));
    v(as_index(index)) = 1.0;
    return StateVector(std::move(v));
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(norm_squared() - 1.0) < tol;
}

StateVector StateVector::normalized() const {
    double n = amps_.norm();
    if (n == 0.0) {
        throw InvalidValueError("StateVector::normalized: zero vector");
    }
    return StateVector(amps_ / n);
}

Complex StateVector::inner(const StateVector &other) const {
    if (dim() != other.dim()) {
        throw DimensionMismatchError("StateVector::inner: dimension mismatch");
    }
    return amps_.dot(other.amps_);
}

StateVector StateVector::scaled(Complex factor) const {
    return StateVector(amps_ * factor);
}

LinearOperator::LinearOperator(CMatrix entries) {
    if (entries.rows() == 0 || entries.rows() != entries.cols()) {
        throw InvalidValueError("LinearOperator: matrix must be square with positive dimension");
    }
    if (!all_finite(entries)) {
        throw InvalidValueError("LinearOperator: entries must be finite");
    }
    const Eigen::Index n = entries.rows();
    if (n >= kSparseMinDim && (entries.array() != Complex(0.0, 0.0)).count() * 8 < n * n) {
        sparse_ = std::make_shared<const Eigen::SparseMatrix<Complex>>(entries.sparseView());
    }
    m_ = std::make_shared<const CMatrix>(std::move(entries));
}

LinearOperator LinearOperator::identity(std::size_t dim) {
    return LinearOperator(CMatrix::Identity(as_index(dim), as_index(dim)));
}

LinearOperator LinearOperator::outer(const StateVector &ket, const StateVector &bra) {
    if (ket.dim() != bra.dim()) {
        throw DimensionMismatchError("LinearOperator::outer: dimension mismatch");
    }
    return LinearOperator(ket.amplitudes() * bra.amplitudes().adjoint());
}

LinearOperator LinearOperator::adjoint() const {
    return LinearOperator(m_->adjoint());
}

LinearOperator LinearOperator::operator*(const LinearOperator &rhs) const {
    if (dim() != rhs.dim()) {
        throw DimensionMismatchError("LinearOperator product: dimension mismatch");
    }
    return LinearOperator((*m_) * rhs.matrix());
}

LinearOperator LinearOperator::operator+(const LinearOperator &rhs) const {
    if (dim() != rhs.dim()) {
        throw DimensionMismatchError("LinearOperator sum: dimension mismatch");
    }
    return LinearOperator((*m_) + rhs.matrix());
}

LinearOperator LinearOperator::operator-(const LinearOperator &rhs) const {
    if (dim() != rhs.dim()) {
        throw DimensionMismatchError("LinearOperator difference: dimension mismatch");
    }
    return LinearOperator((*m_) - rhs.matrix());
}

StateVector LinearOperator::apply(const StateVector &v) const {
    if (dim() != v.dim()) {
        throw DimensionMismatchError("LinearOperator::apply: dimension mismatch");
    }
    return StateVector(apply_to(v.amplitudes()));
}

CVector LinearOperator::apply_to(const CVector &v) const {
    if (sparse_) {
        return (*sparse_) * v;
    }
    return (*m_) * v;
}

bool LinearOperator::is_hermitian(double tol) const {
    return max_abs_diff(*m_, m_->adjoint()) < tol;
}

bool LinearOperator::is_unitary(double tol) const {
    if (is_exact_identity()) {
        return true;
    }
    const Eigen::Index n = m_->rows();
    if (sparse_) {
        Eigen::SparseMatrix<Complex> prod = Eigen::SparseMatrix<Complex>(sparse_->adjoint()) * (*sparse_);
        return max_abs_diff(CMatrix(prod), CMatrix::Identity(n, n)) < tol;
    }
    CMatrix prod = m_->adjoint() * (*m_);
    return max_abs_diff(prod, CMatrix::Identity(n, n)) < tol;
}

bool LinearOperator::is_exact_identity() const {
    return m_->isIdentity(0.0);
}

Projector Projector::from_operator(const LinearOperator &op, double tol) {
    if (!op.is_hermitian(tol)) {
        throw InvalidValueError("Projector: operator is not Hermitian");
    }
    const CMatrix &m = op.matrix();
    if (max_abs_diff(m * m, m) >= tol) {
        throw InvalidValueError("Projector: operator is not idempotent");
    }
    return Projector(op);
}

Projector Projector::identity(std::size_t dim) {
    return Projector(LinearOperator::identity(dim));
}

std::size_t Projector::rank() const {
    return static_cast<std::size_t>(std::llround(op_.trace().real()));
}

Projector Projector::complement() const {
    return Projector(LinearOperator::identity(dim()) - op_);
}

bool Projector::commutes_with(const Projector &other, double tol) const {
    if (dim() != other.dim()) {
        throw DimensionMismatchError("Projector::commutes_with: dimension mismatch");
    }
    const CMatrix &a = matrix();
    const CMatrix &b = other.matrix();
    return max_abs_diff(a * b, b * a) < tol;
}

const Projector *ProjectiveDecomposition::find(std::string_view label) const {
    for (const auto &m : members_) {
        if (m.label == label) {
            return &m.projector;
        }
    }
    return nullptr;
}

ProjectiveDecomposition chainlogic::validate_pvm(std::vector<LabeledProjector> candidate, double tol) {
    if (candidate.empty()) {
        throw CompletenessError("validate_pvm: empty decomposition cannot sum to the identity");
    }
    std::set<std::string> seen;
    for (const auto &m : candidate) {
        if (!seen.insert(m.label).second) {
            throw DuplicateLabelError("validate_pvm: duplicate label '" + m.label + "'");
        }
    }
    std::size_t dim = candidate.front().projector.dim();
    for (const auto &m : candidate) {
        if (m.projector.dim() != dim) {
            throw DimensionMismatchError("validate_pvm: member '" + m.label + "' has a different dimension");
        }
    }
    CMatrix sum = CMatrix::Zero(as_index(dim), as_index(dim));
    for (std::size_t i = 0; i < candidate.size(); i++) {
        const CMatrix &pi = candidate[i].projector.matrix();
        for (std::size_t j = i + 1; j < candidate.size(); j++) {
            CMatrix prod = pi * candidate[j].projector.matrix();
            if (prod.cwiseAbs().maxCoeff() >= tol) {
                throw OrthogonalityError(
                    "validate_pvm: members '" + candidate[i].label + "' and '" + candidate[j].label +
                    "' are not orthogonal");
            }
        }
        sum += pi;
    }
    if (max_abs_diff(sum, CMatrix::Identity(as_index(dim), as_index(dim))) >= tol) {
        throw CompletenessError("validate_pvm: members do not sum to the identity");
    }
    return ProjectiveDecomposition(dim, std::move(candidate));
}

DensityOperator DensityOperator::from_state(const StateVector &psi, double tol) {
    if (!psi.is_normalized(tol)) {
        throw InvalidValueError("DensityOperator::from_state: state is not normalized");
    }
    auto comps = std::make_shared<std::vector<EnsembleComponent>>();
    comps->push_back({1.0, psi.amplitudes()});
    return DensityOperator(LinearOperator::outer(psi, psi), std::move(comps));
}

DensityOperator DensityOperator::from_operator(const LinearOperator &m, double algebra_tol, double spectral_tol) {
    if (!m.is_hermitian(algebra_tol)) {
        throw InvalidValueError("DensityOperator: operator is not Hermitian");
    }
    if (std::abs(m.trace() - Complex(1.0)) >= algebra_tol) {
        throw InvalidValueError("DensityOperator: trace is not one");
    }
    CMatrix herm = 0.5 * (m.matrix() + m.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw InternalConsistencyError("DensityOperator: eigendecomposition failed");
    }
    const auto &evals = solver.eigenvalues();
    if (evals.minCoeff() <= -spectral_tol) {
        throw InvalidValueError("DensityOperator: operator is not positive semidefinite");
    }
    auto comps = std::make_shared<std::vector<EnsembleComponent>>();
    for (Eigen::Index i = 0; i < evals.size(); i++) {
        if (evals(i) > 0.0) {
            comps->push_back({evals(i), solver.eigenvectors().col(i)});
        }
    }
    return DensityOperator(m, std::move(comps));
}

DensityOperator DensityOperator::from_ensemble(std::vector<EnsembleComponent> components, double algebra_tol) {
    if (components.empty()) {
        throw InvalidValueError("DensityOperator::from_ensemble: no components");
    }
    Eigen::Index dim = components.front().vector.size();
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto &c : components) {
        if (c.vector.size() != dim) {
            throw DimensionMismatchError("DensityOperator::from_ensemble: dimension mismatch");
        }
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
            throw InvalidValueError("DensityOperator::from_ensemble: weights must be finite and nonnegative");
        }
        m += c.weight * c.vector * c.vector.adjoint();
    }
    if (std::abs(m.trace() - Complex(1.0)) >= algebra_tol) {
        throw InvalidValueError("DensityOperator::from_ensemble: trace is not one");
    }
    return DensityOperator(
        LinearOperator(std::move(m)), std::make_shared<const std::vector<EnsembleComponent>>(std::move(components)));
}

StateVector chainlogic::tensor_product(const StateVector &a, const StateVector &b) {
    CVector out(as_index(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); i++) {
        out.segment(as_index(i * b.dim()), as_index(b.dim())) = a[i] * b.amplitudes();
    }
    return StateVector(std::move(out));
}

LinearOperator chainlogic::tensor_product(const LinearOperator &a, const LinearOperator &b) {
    const CMatrix &ma = a.matrix();
    const CMatrix &mb = b.matrix();
    CMatrix out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
    for (Eigen::Index r = 0; r < ma.rows(); r++) {
        for (Eigen::Index c = 0; c < ma.cols(); c++) {
            out.block(r * mb.rows(), c * mb.cols(), mb.rows(), mb.cols()) = ma(r, c) * mb;
        }
    }
    return LinearOperator(std::move(out));
}

Projector chainlogic::tensor_product(const Projector &a, const Projector &b) {
    return Projector(tensor_product(a.op(), b.op()));
}

Tensorable chainlogic::tensor_product(const Tensorable &a, const Tensorable &b) {
    if (a.index() != b.index()) {
        throw KindMismatchError("tensor_product: operands must both be states or both be operators");
    }
    if (const auto *sa = std::get_if<StateVector>(&a)) {
        return tensor_product(*sa, std::get<StateVector>(b));
    }
    return tensor_product(std::get<LinearOperator>(a), std::get<LinearOperator>(b));
}

Projector chainlogic::projector_from_span(std::span<const StateVector> vectors, double cutoff) {
    if (vectors.empty()) {
        throw DegenerateSpanError("projector_from_span: no vectors");
    }
    std::size_t dim = vectors.front().dim();
    std::vector<CVector> basis;
    for (std::size_t i = 0; i < vectors.size(); i++) {
        if (vectors[i].dim() != dim) {
            throw DimensionMismatchError("projector_from_span: dimension mismatch");
        }
        double n = vectors[i].amplitudes().norm();
        if (n < cutoff) {
            throw DegenerateSpanError("projector_from_span: vector " + std::to_string(i) + " is zero");
        }
        CVector w = vectors[i].amplitudes() / n;
        // Two sweeps of modified Gram-Schmidt keep orthogonality at machine precision.
        for (int sweep = 0; sweep < 2; sweep++) {
            for (const auto &q : basis) {
                w -= q.dot(w) * q;
            }
        }
        double residual = w.norm();
        if (residual < cutoff) {
            throw DegenerateSpanError(
                "projector_from_span: vector " + std::to_string(i) + " is linearly dependent on the preceding ones");
        }
        basis.push_back(w / residual);
    }
    CMatrix p = CMatrix::Zero(as_index(dim), as_index(dim));
    for (const auto &q : basis) {
        p += q * q.adjoint();
    }
    p = 0.5 * (p + p.adjoint()).eval();
    return Projector::from_operator(LinearOperator(std::move(p)));
}

Projector chainlogic::projector_from_span(std::initializer_list<StateVector> vectors, double cutoff) {
    return projector_from_span(std::span<const StateVector>(vectors.begin(), vectors.size()), cutoff);
}

LinearOperator chainlogic::embed_operator(
    const LinearOperator &op, std::span<const std::size_t> factor_dims, std::span<const std::size_t> targets) {
    std::size_t n = factor_dims.size();
    std::size_t total = 1;
    for (auto d : factor_dims) {
        total *= d;
    }
    std::size_t sub = 1;
    std::vector<bool> is_target(n, false);
    for (auto t : targets) {
        if (t >= n || is_target[t]) {
            throw InvalidValueError("embed_operator: invalid target list");
        }
        is_target[t] = true;
        sub *= factor_dims[t];
    }
    if (sub != op.dim()) {
        throw DimensionMismatchError("embed_operator: operator dimension does not match target factors");
    }

    // strides[i]: weight of factor i in the flat index (leftmost slowest).
    std::vector<std::size_t> strides(n);
    std::size_t s = 1;
    for (std::size_t i = n; i-- > 0;) {
        strides[i] = s;
        s *= factor_dims[i];
    }

    // For every full index: its sub-index on the targets and the flat index with target digits zeroed.
    std::vector<std::size_t> sub_of(total), rest_of(total);
    for (std::size_t idx = 0; idx < total; idx++) {
        std::size_t sub_idx = 0;
        std::size_t rest = idx;
        for (auto t : targets) {
            std::size_t digit = (idx / strides[t]) % factor_dims[t];
            sub_idx = sub_idx * factor_dims[t] + digit;
            rest -= digit * strides[t];
        }
        sub_of[idx] = sub_idx;
        rest_of[idx] = rest;
    }
    // Flat offset contributed by each target sub-index.
    std::vector<std::size_t> offset_of(sub);
    for (std::size_t sub_idx = 0; sub_idx < sub; sub_idx++) {
        std::size_t rem = sub_idx;
        std::size_t offset = 0;
        for (std::size_t j = targets.size(); j-- > 0;) {
            std::size_t t = targets[j];
            offset += (rem % factor_dims[t]) * strides[t];
            rem /= factor_dims[t];
        }
        offset_of[sub_idx] = offset;
    }

    CMatrix out = CMatrix::Zero(as_index(total), as_index(total));
    const CMatrix &m = op.matrix();
    for (std::size_t col = 0; col < total; col++) {
        std::size_t c_sub = sub_of[col];
        std::size_t rest = rest_of[col];
        for (std::size_t r_sub = 0; r_sub < sub; r_sub++) {
            Complex v = m(as_index(r_sub), as_index(c_sub));
            if (v != Complex(0.0)) {
                out(as_index(rest + offset_of[r_sub]), as_index(col)) = v;
            }
        }
    }
    return LinearOperator(std::move(out));
}

Projector chainlogic::embed_projector(
    const Projector &p, std::span<const std::size_t> factor_dims, std::span<const std::size_t> targets) {
    return Projector(embed_operator(p.op(), factor_dims, targets));
}
