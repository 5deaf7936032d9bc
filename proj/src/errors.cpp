#include "arnoldflow/errors.hpp"

namespace arnoldflow {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::RationalInput: return "RationalInput";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::NotRepresentable: return "NotRepresentable";
    case ErrorKind::InvalidDigits: return "InvalidDigits";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::SingularOrbit: return "SingularOrbit";
    case ErrorKind::NonPositiveAfterNormalize: return "NonPositiveAfterNormalize";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::DecompositionFailed: return "DecompositionFailed";
    case ErrorKind::ScaleOutOfRange: return "ScaleOutOfRange";
    case ErrorKind::SequenceTooShort: return "SequenceTooShort";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace arnoldflow
