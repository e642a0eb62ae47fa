#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "tabqa/errors.hpp"
#include "tabqa/unicode.hpp"

namespace tabqa {

// One table cell: text, 64-bit integer, finite double, or null.
struct CellValue {
    struct Null {
        bool operator==(const Null&) const = default;
        auto operator<=>(const Null&) const = default;
    };
    std::variant<Null, std::string, int64_t, double> v;

    CellValue() : v(Null{}) {}
    CellValue(std::string s) : v(std::move(s)) {}
    CellValue(const char* s) : v(std::string(s)) {}
    CellValue(int64_t i) : v(i) {}
    CellValue(int i) : v(static_cast<int64_t>(i)) {}
    CellValue(double d) : v(d) {
        if (!std::isfinite(d)) throw TypeError("non-finite decimal cell");
    }

    bool is_null() const { return std::holds_alternative<Null>(v); }
    bool is_text() const { return std::holds_alternative<std::string>(v); }
    bool is_int() const { return std::holds_alternative<int64_t>(v); }
    bool is_decimal() const { return std::holds_alternative<double>(v); }
    bool is_number() const { return is_int() || is_decimal(); }

    const std::string& text() const { return std::get<std::string>(v); }
    int64_t as_int() const { return std::get<int64_t>(v); }
    double as_double() const {
        if (is_int()) return static_cast<double>(std::get<int64_t>(v));
        return std::get<double>(v);
    }

    bool operator==(const CellValue& o) const {
        if (is_number() && o.is_number()) return as_double() == o.as_double();
        return v == o.v;
    }
};

// Shortest round-trip decimal representation.
inline std::string format_double(double d) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, res.ptr);
}

// Canonical text form of a cell; Null renders empty.
inline std::string to_canonical_string(const CellValue& c) {
    if (c.is_null()) return "";
    if (c.is_text()) return c.text();
    if (c.is_int()) return std::to_string(c.as_int());
    return format_double(c.as_double());
}

inline std::optional<int64_t> parse_int(std::string_view s) {
    std::string t = uni::trim(s);
    if (t.empty()) return std::nullopt;
    int64_t out{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size()) return std::nullopt;
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    std::string t = uni::trim(s);
    if (t.empty()) return std::nullopt;
    double out{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || p != t.data() + t.size() || !std::isfinite(out)) return std::nullopt;
    return out;
}

}  // namespace tabqa
