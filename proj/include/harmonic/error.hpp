#pragma once

#include <stdexcept>
#include <string>

namespace harmonic {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    EmptyCellSet,
    SeedNotInCells,
    EmptyInterior,
    TooLarge,
    NotConverged,
    StepLimitExceeded,
    NoInteriorCell,
    QueryOutsideRegion,
    PointOutside,
    CellNotInterior,
    MissingCell,
    OutOfRange,
    Parse,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace harmonic
