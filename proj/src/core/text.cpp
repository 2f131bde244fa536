#include "hvae/core/text.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace hvae {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw std::runtime_error("failed to format double");
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

long long parse_int(std::string_view text) {
    text = trim(text);
    long long v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view text, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view text) {
    const char* ws = " \t\r\n";
    auto b = text.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = text.find_last_not_of(ws);
    return text.substr(b, e - b + 1);
}

}  // namespace hvae
