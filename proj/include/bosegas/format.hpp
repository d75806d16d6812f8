#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace bosegas {

/// Shortest decimal representation that round-trips the exact double
/// (locale-independent; "nan"/"inf" spelled out).
inline std::string format_double(double value) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long value) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_uint(std::uint64_t value) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

} // namespace bosegas
