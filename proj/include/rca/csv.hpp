#pragma once

#include <string>

namespace rca {

// Fixed 12-significant-digit decimal formatting; every CSV this project
// writes goes through it so outputs diff bit-stably across runs.
std::string format_value(double v);

// Writes the string to path atomically enough for our purposes (single
// write); throws ConfigError on I/O failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace rca
