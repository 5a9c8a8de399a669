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

#ifndef CHAINLOGIC_QM_CORE_H
#define CHAINLOGIC_QM_CORE_H

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chainlogic/errors.h"

namespace chainlogic {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Tolerance for algebraic identities (idempotence, hermiticity, completeness, unitarity).
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for spectra and consistency checks.
inline constexpr double kSpectralTol = 1e-10;
/// Cutoff below which a Gram-Schmidt residual counts as linearly dependent.
inline constexpr double kDependenceCutoff = 1e-10;

/// Per-run tolerances. Defaults match the constants above.
struct Tolerances {
    double algebra = kAlgebraTol;
    double consistency = kSpectralTol;
    double prune = 1e-12;
};

/// Largest absolute entrywise difference.
double max_abs_diff(const CMatrix &a, const CMatrix &b);

/// A ket with finite complex amplitudes.
class StateVector {
   public:
    explicit StateVector(CVector amps);
    StateVector(std::initializer_list<Complex> amps);

    static StateVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const {
        return static_cast<std::size_t>(amps_.size());
    }
    const CVector &amplitudes() const {
        return amps_;
    }
    Complex operator[](std::size_t i) const {
        return amps_(static_cast<Eigen::Index>(i));
    }
    double norm_squared() const {
        return amps_.squaredNorm();
    }
    bool is_normalized(double tol = kAlgebraTol) const;
    StateVector normalized() const;
    /// <this|other>.
    Complex inner(const StateVector &other) const;
    StateVector scaled(Complex factor) const;

   private:
    CVector amps_;
};

/// A square complex matrix. Immutable; copies share storage.
class LinearOperator {
   public:
    explicit LinearOperator(CMatrix entries);

    static LinearOperator identity(std::size_t dim);
    /// |ket><bra|.
    static LinearOperator outer(const StateVector &ket, const StateVector &bra);

    std::size_t dim() const {
        return static_cast<std::size_t>(m_->rows());
    }
    const CMatrix &matrix() const {
        return *m_;
    }
    Complex operator()(std::size_t r, std::size_t c) const {
        return (*m_)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    LinearOperator adjoint() const;
    LinearOperator operator*(const LinearOperator &rhs) const;
    LinearOperator operator+(const LinearOperator &rhs) const;
    LinearOperator operator-(const LinearOperator &rhs) const;
    StateVector apply(const StateVector &v) const;
    /// Unchecked matrix-vector product; uses a sparse copy for large sparse operators.
    CVector apply_to(const CVector &v) const;
    Complex trace() const {
        return m_->trace();
    }

    bool is_hermitian(double tol = kAlgebraTol) const;
    bool is_unitary(double tol = kAlgebraTol) const;
    bool is_exact_identity() const;

   private:
    std::shared_ptr<const CMatrix> m_;
    std::shared_ptr<const Eigen::SparseMatrix<Complex>> sparse_;
};

/// A Hermitian idempotent operator.
class Projector {
   public:
    /// Validates P = P† and P² = P within tol; throws InvalidValueError otherwise.
    static Projector from_operator(const LinearOperator &op, double tol = kAlgebraTol);
    static Projector identity(std::size_t dim);

    const LinearOperator &op() const {
        return op_;
    }
    const CMatrix &matrix() const {
        return op_.matrix();
    }
    std::size_t dim() const {
        return op_.dim();
    }
    std::size_t rank() const;
    /// I - P.
    Projector complement() const;
    bool commutes_with(const Projector &other, double tol = kAlgebraTol) const;

   private:
    explicit Projector(LinearOperator op) : op_(std::move(op)) {
    }
    LinearOperator op_;
    friend Projector tensor_product(const Projector &, const Projector &);
    friend Projector embed_projector(const Projector &, std::span<const std::size_t>, std::span<const std::size_t>);
};

struct LabeledProjector {
    std::string label;
    Projector projector;
};

/// Mutually orthogonal projectors summing to the identity, with unique labels.
/// Only obtainable through validate_pvm.
class ProjectiveDecomposition {
   public:
    std::size_t dim() const {
        return dim_;
    }
    std::size_t size() const {
        return members_.size();
    }
    const std::vector<LabeledProjector> &members() const {
        return members_;
    }
    const Projector *find(std::string_view label) const;

   private:
    ProjectiveDecomposition(std::size_t dim, std::vector<LabeledProjector> members)
        : dim_(dim), members_(std::move(members)) {
    }
    std::size_t dim_;
    std::vector<LabeledProjector> members_;
    friend ProjectiveDecomposition validate_pvm(std::vector<LabeledProjector>, double);
};

/// Checks labels, dimensions, orthogonality, then completeness, raising
/// DuplicateLabelError, DimensionMismatchError, OrthogonalityError or
/// CompletenessError respectively.
ProjectiveDecomposition validate_pvm(std::vector<LabeledProjector> candidate, double tol = kAlgebraTol);

/// One term w |u><u| of an ensemble representation of a density operator.
struct EnsembleComponent {
    double weight;
    CVector vector;
};

/// Hermitian, positive semidefinite, unit trace. Also carries an ensemble
/// decomposition rho = sum_i w_i |u_i><u_i| used to propagate chains as vectors.
class DensityOperator {
   public:
    static DensityOperator from_state(const StateVector &psi, double tol = kAlgebraTol);
    static DensityOperator from_operator(
        const LinearOperator &m, double algebra_tol = kAlgebraTol, double spectral_tol = kSpectralTol);
    /// Components need not be orthogonal. Trace must be one within algebra_tol.
    static DensityOperator from_ensemble(std::vector<EnsembleComponent> components, double algebra_tol = kAlgebraTol);

    const LinearOperator &op() const {
        return op_;
    }
    std::size_t dim() const {
        return op_.dim();
    }
    const std::vector<EnsembleComponent> &components() const {
        return *components_;
    }

   private:
    DensityOperator(LinearOperator op, std::shared_ptr<const std::vector<EnsembleComponent>> components)
        : op_(std::move(op)), components_(std::move(components)) {
    }
    LinearOperator op_;
    std::shared_ptr<const std::vector<EnsembleComponent>> components_;
};

/// Kronecker product with the left operand as the slow index.
StateVector tensor_product(const StateVector &a, const StateVector &b);
LinearOperator tensor_product(const LinearOperator &a, const LinearOperator &b);
Projector tensor_product(const Projector &a, const Projector &b);

using Tensorable = std::variant<StateVector, LinearOperator>;
/// Throws KindMismatchError when the operands are of different kinds.
Tensorable tensor_product(const Tensorable &a, const Tensorable &b);

/// Projector onto span(vectors), orthonormalized by modified Gram-Schmidt.
/// Throws DegenerateSpanError on zero or dependent vectors.
Projector projector_from_span(std::span<const StateVector> vectors, double cutoff = kDependenceCutoff);
Projector projector_from_span(std::initializer_list<StateVector> vectors, double cutoff = kDependenceCutoff);

/// Lifts `op`, acting on the tensor factors listed in `targets` (slow index
/// first, in the given order), to the full space with factor dimensions
/// `factor_dims`. Identity on the remaining factors.
LinearOperator embed_operator(
    const LinearOperator &op, std::span<const std::size_t> factor_dims, std::span<const std::size_t> targets);
Projector embed_projector(
    const Projector &p, std::span<const std::size_t> factor_dims, std::span<const std::size_t> targets);

}  // namespace chainlogic

#endif
