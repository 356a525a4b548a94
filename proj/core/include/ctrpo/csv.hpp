#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrpo {

/// Shortest decimal form that parses back to the same double, locale-free.
inline std::string csv_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc()) throw std::runtime_error("failed to format double");
    return std::string(buf, res.ptr);
}

inline double csv_parse_double(const std::string& tok) {
    double x = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw std::runtime_error("bad numeric field '" + tok + "'");
    return x;
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace ctrpo
