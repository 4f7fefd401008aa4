#pragma once

#include <stdexcept>
#include <string>

namespace sicreg {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input: malformed data, files, or option values. CLI exit code 2.
struct InputError : Error {
    using Error::Error;
};

// Numerical breakdown while fitting. CLI exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

struct DimensionMismatch : InputError {
    using InputError::InputError;
};

struct ConstantColumn : InputError {
    int column;
    explicit ConstantColumn(int j)
        : InputError("constant column: predictor " + std::to_string(j) +
                     " has zero sample variance"),
          column(j) {}
};

struct NonFinite : InputError {
    long row;
    int column;
    NonFinite(long i, int j)
        : InputError("non-finite value at row " + std::to_string(i) + ", column " +
                     std::to_string(j)),
          row(i), column(j) {}
};

struct InvalidSchedule : InputError {
    using InputError::InputError;
};

struct ColumnMismatch : InputError {
    using InputError::InputError;
};

struct SingularDesign : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateFit : NumericalError {
    using NumericalError::NumericalError;
};

struct NonPositiveDefinite : NumericalError {
    using NumericalError::NumericalError;
};

struct NumericalOverflow : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularInformation : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace sicreg
