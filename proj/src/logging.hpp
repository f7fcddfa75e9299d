#pragma once

#include <cstddef>
#include <string>

namespace preffend {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Default level comes from the PREFFEND_LOG environment variable
// (error | info | debug); unset means info.
LogLevel log_level();
bool set_log_level(const std::string& name);
void set_log_level(LogLevel level);

void log_error(const std::string& msg);
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

// Number of warnings emitted since process start. Used by tests to assert
// that degenerate inputs are reported.
std::size_t warning_count();

}  // namespace preffend
