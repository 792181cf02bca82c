#ifndef RATL_SRC_TEXTIO_HPP
#define RATL_SRC_TEXTIO_HPP

#include <charconv>
#include <string>
#include <system_error>

#include "ratl/errors.hpp"

namespace ratl::detail {

// shortest representation that round-trips to the same double
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw parse_error("expected a number, got '" + tok + "'", line);
    }
    return v;
}

inline long parse_long(const std::string& tok, int line) {
    long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        throw parse_error("expected an integer, got '" + tok + "'", line);
    }
    return v;
}

inline std::size_t parse_size(const std::string& tok, int line) {
    long v = parse_long(tok, line);
    if (v < 0) throw parse_error("expected a non-negative integer, got '" + tok + "'", line);
    return static_cast<std::size_t>(v);
}

}  // namespace ratl::detail

#endif
