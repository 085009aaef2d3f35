#ifndef DRONEARRAY_CSV_HPP
#define DRONEARRAY_CSV_HPP

#include <string>

namespace dronearray::csv {

// Locale-independent field formatting ('.' decimal separator, shortest
// round-trip form for doubles) so repeated runs emit byte-identical files.
std::string field(double v);
std::string field(int v);
std::string field(long v);
std::string field(unsigned long v);
std::string field(unsigned long long v);
inline std::string field(const std::string& s) { return s; }

void write_file(const std::string& path, const std::string& body);

}  // namespace dronearray::csv

#endif
