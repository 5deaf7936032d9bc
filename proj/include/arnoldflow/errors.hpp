#pragma once

#include <stdexcept>
#include <string>

namespace arnoldflow {

enum class ErrorKind {
    InsufficientPrecision,
    RationalInput,
    DepthExceeded,
    NotRepresentable,
    InvalidDigits,
    BudgetExceeded,
    SingularPoint,
    SingularOrbit,
    NonPositiveAfterNormalize,
    HypothesisFailed,
    InvalidTriple,
    DecompositionFailed,
    ScaleOutOfRange,
    SequenceTooShort,
    ConfigInvalid,
    InvalidArgument,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace arnoldflow
