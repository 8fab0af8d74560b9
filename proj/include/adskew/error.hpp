#pragma once

#include <stdexcept>
#include <string>

namespace adskew {

/// Failure categories surfaced by the toolkit. Each maps to a distinct
/// process exit code in the CLI (see tools/).
enum class ErrorCode {
    InvalidArgument,
    InvalidRecord,
    EmptyInferredGroup,
    UndefinedProportion,
    DegenerateTest,
    SingularSystem,
    InconsistentInputs,
    UndefinedRate,
    InvalidCorrection,
    ParseError,
    IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message, std::string stage = {})
        : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

    ErrorCode code() const noexcept { return code_; }

    /// Pipeline stage that raised the error when chained (e.g. "solve_rs"),
    /// empty for direct calls.
    const std::string& stage() const noexcept { return stage_; }

  private:
    ErrorCode code_;
    std::string stage_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace adskew
