#pragma once

#include <cstdio>
#include <string>

namespace enclosure {

// 17 significant digits round-trips every double.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace enclosure
