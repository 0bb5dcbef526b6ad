#pragma once

#include <charconv>
#include <string>

namespace semfast::detail {

// Shortest representation that round-trips.
inline std::string fmt(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace semfast::detail
