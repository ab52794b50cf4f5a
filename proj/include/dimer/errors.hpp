#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dimer {

enum class ErrorCode {
    TailNotResolved,
    SampleFailure,
    TruncationTooShort,
    SingularSymbol,
    NonzeroWinding,
    ParameterOutOfRange,
    QuadratureUnconverged,
    DimensionMismatch,
    SingularDeterminant,
    NotBanded,
    TruncatedOperatorSingular,
    BranchFailure,
    DegenerateRoots,
    InvariantViolation,
    PoleInput,
    DecompositionMismatch,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that describe a rejected input rather than a numerical failure.
bool is_parameter_error(ErrorCode code) noexcept;

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

}  // namespace dimer
