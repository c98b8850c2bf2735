#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynpolar {

enum class ErrorCode {
    DimensionMismatch,
    NotSkew,
    NotRotation,
    NotSPD,
    NotUnit,
    NotOrthogonal,
    SingularPoint,
    SingularF,
    SingularInput,
    StretchSingular,
    Unsupported,
    GeneratorNotSkew,
    GridMismatch,
    NodeMismatch,
    InvalidArgument,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class KinematicsError : public std::runtime_error {
public:
    KinematicsError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw KinematicsError(code, what);
}

} // namespace dynpolar
