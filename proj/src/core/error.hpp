#pragma once

#include <stdexcept>
#include <string>

namespace odtqc {

enum class ErrorKind { invalid_argument, io, internal };

// Every failure raised by the core library carries one of three kinds so the
// C API and the CLI can map it to a status / exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::io, msg); }
[[noreturn]] inline void fail_internal(const std::string& msg) { throw Error(ErrorKind::internal, msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail_invalid(msg);
}

}  // namespace odtqc
