#include "dronearray/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "dronearray/errors.hpp"

namespace dronearray::csv {

namespace {
template <typename T>
std::string to_chars_field(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}
}  // namespace

std::string field(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return to_chars_field(v);
}

std::string field(int v) { return to_chars_field(v); }
std::string field(long v) { return to_chars_field(v); }
std::string field(unsigned long v) { return to_chars_field(v); }
std::string field(unsigned long long v) { return to_chars_field(v); }

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file: " + path);
  out << body;
  if (!out) throw validation_error("failed writing output file: " + path);
}

}  // namespace dronearray::csv
