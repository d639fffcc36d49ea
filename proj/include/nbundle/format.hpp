// Locale-independent numeric formatting (12 significant digits).

#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace nbundle {

inline std::string format_double(double v, int precision = 12) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

}  // namespace nbundle
