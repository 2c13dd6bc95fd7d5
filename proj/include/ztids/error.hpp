#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ztids {

enum class ErrorCode {
    MissingLabelColumn,
    EmptyFile,
    RaggedRow,
    Io,
    TooFewSamplesPerClass,
    DegenerateColumn,
    AlreadyBalanced,
    MinorityTooSmall,
    InvalidTargetCount,
    SingleClassTraining,
    BadHyperparameter,
    ShapeMismatch,
    NotDifferentiable,
    NotTreeBased,
    VersionMismatch,
    CorruptModel,
    EmptySpace,
    InvalidArgument,
    LengthMismatch,
    Empty,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace ztids
