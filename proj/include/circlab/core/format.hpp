#pragma once

#include <cstdio>
#include <string>

namespace circlab {

/// Shortest-safe text form of a double: 17 significant digits round-trip.
inline std::string fmt17(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace circlab
