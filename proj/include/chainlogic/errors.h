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

#ifndef CHAINLOGIC_ERRORS_H
#define CHAINLOGIC_ERRORS_H

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace chainlogic {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

#define CHAINLOGIC_DEFINE_ERROR(Name)      \
    class Name : public Error {            \
       public:                             \
        using Error::Error;                \
    }

CHAINLOGIC_DEFINE_ERROR(KindMismatchError);
CHAINLOGIC_DEFINE_ERROR(DimensionMismatchError);
CHAINLOGIC_DEFINE_ERROR(InvalidValueError);
CHAINLOGIC_DEFINE_ERROR(DegenerateSpanError);
CHAINLOGIC_DEFINE_ERROR(CompletenessError);
CHAINLOGIC_DEFINE_ERROR(OrthogonalityError);
CHAINLOGIC_DEFINE_ERROR(DuplicateLabelError);
CHAINLOGIC_DEFINE_ERROR(InternalConsistencyError);
CHAINLOGIC_DEFINE_ERROR(ScheduleError);
CHAINLOGIC_DEFINE_ERROR(VacuousPremiseError);
CHAINLOGIC_DEFINE_ERROR(NotHardyStateError);
CHAINLOGIC_DEFINE_ERROR(DegenerateBasisError);

#undef CHAINLOGIC_DEFINE_ERROR

/// An off-diagonal entry of a consistency matrix.
struct OffDiagonal {
    std::size_t g;
    std::size_t k;
    double magnitude;
};

/// Raised when an argument mixes propositions from outside one consistent framework.
class FrameworkViolationError : public Error {
   public:
    explicit FrameworkViolationError(const std::string &what, std::optional<OffDiagonal> worst = std::nullopt)
        : Error(what), worst_(worst) {
    }
    const std::optional<OffDiagonal> &worst_offdiag() const noexcept {
        return worst_;
    }

   private:
    std::optional<OffDiagonal> worst_;
};

}  // namespace chainlogic

#endif
