#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leontief {

enum class ErrorCode {
    ParamDomain,
    NonPositiveInput,
    DimensionMismatch,
    DegenerateTechnology,
    UnsupportedDimension,
    LevelNotBracketed,
    NonMonotoneRay,
    EmptyLevelSet,
    UnknownFigure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every library operation. The code identifies
/// which contract was violated; the message carries the detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace leontief
