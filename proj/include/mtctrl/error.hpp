#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtctrl {

enum class ErrorCode {
    DimensionMismatch,
    NonFiniteInput,
    NotHurwitz,
    SolveFailure,
    EigFailure,
    BracketFailure,
    NotSiso,
    DegenerateGramian,
    NotStabilizable,
    NotDetectable,
    DomainError,
    NonFinite,
    NoConvergence,
    NotScalar,
    SignError,
    GenerationFailure,
    InvalidProblem,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mtctrl
