#ifndef SECTORIA_VERSION_HPP
#define SECTORIA_VERSION_HPP

namespace sectoria {
inline constexpr const char* version_string = "0.1.0";
}

#endif
