#pragma once

#include <optional>
#include <string>
#include <variant>

namespace amn {

/// Literal value carried by states, payload fields, and expression results.
/// Numbers are always doubles; integral values print without a fraction part.
class Value {
public:
    Value() : v_(false) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(double n) : v_(n) {}
    explicit Value(std::string s) : v_(std::move(s)) {}

    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_string() const { return std::holds_alternative<std::string>(v_); }

    bool as_bool() const { return std::get<bool>(v_); }
    double as_number() const { return std::get<double>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }

    bool operator==(const Value& o) const { return v_ == o.v_; }
    bool operator!=(const Value& o) const { return !(*this == o); }

    /// Canonical text form: true/false, shortest round-trip number, or a
    /// double-quoted string with \" and \\ escapes.
    std::string to_text() const;

private:
    std::variant<bool, double, std::string> v_;
};

/// Shortest decimal form of `n` that parses back to exactly `n`.
std::string format_number(double n);

/// Locale-independent strtod over a full string. Returns nullopt on any
/// trailing garbage or malformed input.
std::optional<double> parse_number(const std::string& text);

/// Quotes `s` for DSL or DOT output, escaping backslash and double quote.
std::string quote_string(const std::string& s);

} // namespace amn
