#include "amn/value.hpp"

#include <charconv>

namespace amn {

std::string format_number(double n) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), n);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(const std::string& text) {
    double v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
    return v;
}

std::string quote_string(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string Value::to_text() const {
    if (is_bool()) return as_bool() ? "true" : "false";
    if (is_number()) return format_number(as_number());
    return quote_string(as_string());
}

} // namespace amn
