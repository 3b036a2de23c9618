#pragma once

#include <stdexcept>
#include <string>

namespace ssbl {

enum class ErrorCode {
    InvalidArgument,  // caller passed something outside the operation's domain
    Config,           // configuration failed validation
    Io,               // file could not be read/written or was malformed
    State,            // operation called in the wrong lifecycle state
    CheckFailed,      // a verification gate (gradient/property check) failed
    Corrupt,          // non-finite simulation state
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ssbl
