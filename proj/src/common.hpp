#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace ts {

// Error taxonomy mirrored by the C API status codes.
enum class ErrorKind {
    invalid_argument,  // caller violated a precondition
    runtime,           // numerical failure, divergence, non-finite values
    io,                // filesystem trouble
    format,            // unparseable or corrupt file content
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline std::string strformat(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[1024];
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return std::string(buf);
}

[[noreturn]] inline void fail_invalid(const std::string& msg) {
    throw Error(ErrorKind::invalid_argument, msg);
}
[[noreturn]] inline void fail_runtime(const std::string& msg) {
    throw Error(ErrorKind::runtime, msg);
}
[[noreturn]] inline void fail_io(const std::string& msg) {
    throw Error(ErrorKind::io, msg);
}
[[noreturn]] inline void fail_format(const std::string& msg) {
    throw Error(ErrorKind::format, msg);
}

inline void check_arg(bool ok, const std::string& msg) {
    if (!ok) fail_invalid(msg);
}

// Shortest float text that round-trips; used everywhere a file format wants
// deterministic numeric output.
inline std::string fmt_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace ts
