#include "anobench/logging.hpp"

#include <cstdlib>
#include <string_view>

namespace anobench {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ANOBENCH_LOG");
        if (!env) return LogLevel::Info;
        std::string_view v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        if (v == "warn" || v == "warning") return LogLevel::Warn;
        if (v == "error") return LogLevel::Error;
        if (v == "off" || v == "silent" || v == "none") return LogLevel::Off;
        return LogLevel::Info;
    }();
    return level;
}

}  // namespace anobench
