#pragma once

#include <stdexcept>
#include <string>

namespace deepsent {

// Error categories map 1:1 onto C-API status codes and CLI exit codes.
enum class ErrorCode {
    config = 2,   // bad configuration / usage / invalid request
    io = 3,       // filesystem or container format failure
    numeric = 4,  // non-finite values, divergence
    internal = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrorCode::config, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorCode::io, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorCode::numeric, msg); }
[[noreturn]] inline void throw_internal(const std::string& msg) { throw Error(ErrorCode::internal, msg); }

}  // namespace deepsent
