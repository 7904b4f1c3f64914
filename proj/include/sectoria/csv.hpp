#ifndef SECTORIA_CSV_HPP
#define SECTORIA_CSV_HPP

#include <charconv>
#include <string>

namespace sectoria::csv {

/// Shortest round-trip decimal representation of a double.
inline std::string number(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace sectoria::csv

#endif
