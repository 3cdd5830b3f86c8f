#pragma once

#include <iostream>
#include <sstream>
#include <string>

namespace anobench {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Level comes from the ANOBENCH_LOG environment variable (debug|info|warn|error|off),
// default info. Read once per process.
LogLevel log_level();

namespace detail {

class LogLine {
public:
    LogLine(LogLevel level, const char* tag) : enabled_(level >= log_level()) {
        if (enabled_) buf_ << "[" << tag << "] ";
    }
    ~LogLine() {
        if (enabled_) std::cerr << buf_.str() << std::endl;
    }
    template <typename T>
    LogLine& operator<<(const T& v) {
        if (enabled_) buf_ << v;
        return *this;
    }

private:
    bool enabled_;
    std::ostringstream buf_;
};

}  // namespace detail

inline detail::LogLine log_debug() { return {LogLevel::Debug, "debug"}; }
inline detail::LogLine log_info() { return {LogLevel::Info, "info"}; }
inline detail::LogLine log_warn() { return {LogLevel::Warn, "warn"}; }
inline detail::LogLine log_error() { return {LogLevel::Error, "error"}; }

}  // namespace anobench
