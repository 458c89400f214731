#include "valuation_lab/errors.hpp"

namespace vlab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::GapInYears: return "GapInYears";
        case ErrorKind::NonPositive: return "NonPositive";
        case ErrorKind::TooFewRows: return "TooFewRows";
        case ErrorKind::WindowTooLarge: return "WindowTooLarge";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::TooFewObservations: return "TooFewObservations";
        case ErrorKind::SampleSizeOutOfRange: return "SampleSizeOutOfRange";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::DegenerateSeries: return "DegenerateSeries";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NonPositiveTheta: return "NonPositiveTheta";
        case ErrorKind::GridUnstable: return "GridUnstable";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::RankDeficient:
        case ErrorKind::DegenerateSeries:
        case ErrorKind::NoConvergence:
        case ErrorKind::NonPositiveTheta:
        case ErrorKind::GridUnstable:
        case ErrorKind::StepTooLarge:
            return 3;
        default:
            return 2;
    }
}

}  // namespace vlab
