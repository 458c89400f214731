#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlab {

enum class ErrorKind {
    MalformedRow,
    GapInYears,
    NonPositive,
    TooFewRows,
    WindowTooLarge,
    LengthMismatch,
    TooFewObservations,
    SampleSizeOutOfRange,
    InvalidArgument,
    Io,
    RankDeficient,
    DegenerateSeries,
    NoConvergence,
    NonPositiveTheta,
    GridUnstable,
    StepTooLarge,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Exit code the CLI reports for an error kind: 2 for bad input, 3 for numeric failure.
[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace vlab
