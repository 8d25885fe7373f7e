#include "rca/csv.hpp"

#include <cstdio>
#include <fstream>

#include "rca/errors.hpp"

namespace rca {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << contents;
  if (!out) throw ConfigError("failed writing output file: " + path);
}

}  // namespace rca
