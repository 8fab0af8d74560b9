#include "adskew/error.hpp"

namespace adskew {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::InvalidRecord: return "invalid_record";
    case ErrorCode::EmptyInferredGroup: return "empty_inferred_group";
    case ErrorCode::UndefinedProportion: return "undefined_proportion";
    case ErrorCode::DegenerateTest: return "degenerate_test";
    case ErrorCode::SingularSystem: return "singular_system";
    case ErrorCode::InconsistentInputs: return "inconsistent_inputs";
    case ErrorCode::UndefinedRate: return "undefined_rate";
    case ErrorCode::InvalidCorrection: return "invalid_correction";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::IoError: return "io_error";
    }
    return "unknown";
}

} // namespace adskew
