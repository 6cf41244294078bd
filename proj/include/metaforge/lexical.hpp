#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>

// Lexical grammars shared by template checking and instance validation.
// Numbers are handled as exact decimal strings; nothing here goes through
// binary floating point.

namespace metaforge::lexical {

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!is_digit(c)) return false;
    return true;
}

inline int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace detail

/// Absolute IRI: `scheme:rest` with no whitespace or characters that are
/// illegal in IRIs; http(s) additionally needs a non-empty authority.
inline bool is_absolute_iri(std::string_view s) {
    auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= s.size()) return false;
    auto scheme = s.substr(0, colon);
    if (!((scheme[0] >= 'a' && scheme[0] <= 'z') || (scheme[0] >= 'A' && scheme[0] <= 'Z'))) return false;
    for (char c : scheme) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || detail::is_digit(c) || c == '+' ||
                  c == '-' || c == '.';
        if (!ok) return false;
    }
    for (unsigned char c : s.substr(colon + 1)) {
        if (c <= 0x20 || c == 0x7f) return false;
        switch (c) {
            case '<': case '>': case '"': case '{': case '}': case '|': case '\\': case '^': case '`':
                return false;
            default:
                break;
        }
    }
    std::string lower_scheme;
    for (char c : scheme) lower_scheme.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
    if (lower_scheme == "http" || lower_scheme == "https") {
        auto rest = s.substr(colon + 1);
        if (rest.substr(0, 2) != "//") return false;
        auto host = rest.substr(2);
        auto end = host.find_first_of("/?#");
        if (host.substr(0, end).empty()) return false;
    }
    return true;
}

/// `[+-]?\d+`
inline bool is_integer(std::string_view s) {
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
    return detail::all_digits(s);
}

/// `[+-]?\d+(\.\d+)?`
inline bool is_decimal(std::string_view s) {
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return detail::all_digits(s);
    return detail::all_digits(s.substr(0, dot)) && detail::all_digits(s.substr(dot + 1));
}

/// Three-way comparison of two decimal lexical forms (both must satisfy
/// `is_decimal`). Returns -1, 0 or 1.
inline int compare_decimal(std::string_view a, std::string_view b) {
    struct Parts {
        bool negative = false;
        std::string_view integral;
        std::string_view fraction;
    };
    auto split = [](std::string_view s) {
        Parts p;
        if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
            p.negative = s[0] == '-';
            s.remove_prefix(1);
        }
        auto dot = s.find('.');
        p.integral = s.substr(0, dot);
        p.fraction = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
        while (p.integral.size() > 1 && p.integral[0] == '0') p.integral.remove_prefix(1);
        while (!p.fraction.empty() && p.fraction.back() == '0') p.fraction.remove_suffix(1);
        if (p.integral == "0" && p.fraction.empty()) p.negative = false;
        return p;
    };
    auto magnitude = [](const Parts& x, const Parts& y) {
        if (x.integral.size() != y.integral.size()) return x.integral.size() < y.integral.size() ? -1 : 1;
        if (int c = x.integral.compare(y.integral); c != 0) return c < 0 ? -1 : 1;
        if (int c = x.fraction.compare(y.fraction); c != 0) return c < 0 ? -1 : 1;
        return 0;
    };
    Parts pa = split(a), pb = split(b);
    if (pa.negative != pb.negative) return pa.negative ? -1 : 1;
    int m = magnitude(pa, pb);
    return pa.negative ? -m : m;
}

inline bool is_boolean(std::string_view s) { return s == "true" || s == "false"; }

/// YYYY-MM-DD, calendar-valid.
inline bool is_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    auto y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
    if (!detail::all_digits(y) || !detail::all_digits(m) || !detail::all_digits(d)) return false;
    std::chrono::year_month_day ymd{std::chrono::year{detail::to_int(y)},
                                    std::chrono::month{static_cast<unsigned>(detail::to_int(m))},
                                    std::chrono::day{static_cast<unsigned>(detail::to_int(d))}};
    return ymd.ok();
}

namespace detail {

// HH:MM[:SS[.frac]]; seconds_required forces the :SS part.
inline bool parse_clock(std::string_view s, bool seconds_required, bool allow_fraction) {
    if (s.size() < 5 || s[2] != ':') return false;
    auto hh = s.substr(0, 2), mm = s.substr(3, 2);
    if (!all_digits(hh) || !all_digits(mm) || to_int(hh) > 23 || to_int(mm) > 59) return false;
    s.remove_prefix(5);
    if (s.empty()) return !seconds_required;
    if (s.size() < 3 || s[0] != ':') return false;
    auto ss = s.substr(1, 2);
    if (!all_digits(ss) || to_int(ss) > 60) return false;
    s.remove_prefix(3);
    if (s.empty()) return true;
    if (!allow_fraction || s[0] != '.') return false;
    return all_digits(s.substr(1));
}

}  // namespace detail

/// HH:MM or HH:MM:SS.
inline bool is_time(std::string_view s) { return detail::parse_clock(s, false, false); }

/// RFC 3339 date-time: `YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)`.
inline bool is_datetime(std::string_view s) {
    if (s.size() < 20) return false;
    if (!is_date(s.substr(0, 10))) return false;
    if (s[10] != 'T' && s[10] != 't') return false;
    auto rest = s.substr(11);
    std::string_view clock, offset;
    if (rest.back() == 'Z' || rest.back() == 'z') {
        clock = rest.substr(0, rest.size() - 1);
    } else {
        if (rest.size() < 6) return false;
        offset = rest.substr(rest.size() - 6);
        clock = rest.substr(0, rest.size() - 6);
        if (offset[0] != '+' && offset[0] != '-') return false;
        if (!detail::parse_clock(offset.substr(1), false, false) || offset.size() != 6) return false;
    }
    return detail::parse_clock(clock, true, true);
}

/// Semantic version core `MAJOR.MINOR.PATCH` with optional `-pre` / `+build`.
inline bool is_semver(std::string_view s) {
    auto cut = s.find_first_of("-+");
    auto core = s.substr(0, cut);
    int parts = 0;
    while (true) {
        auto dot = core.find('.');
        auto piece = core.substr(0, dot);
        if (!detail::all_digits(piece) || (piece.size() > 1 && piece[0] == '0')) return false;
        ++parts;
        if (dot == std::string_view::npos) break;
        core.remove_prefix(dot + 1);
    }
    if (parts != 3) return false;
    if (cut == std::string_view::npos) return true;
    auto tail = s.substr(cut + 1);
    if (tail.empty()) return false;
    for (char c : tail) {
        bool ok = detail::is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '.' ||
                  c == '-' || c == '+';
        if (!ok) return false;
    }
    return true;
}

/// Node keys: `[a-z][a-z0-9_]*`.
inline bool is_node_key(std::string_view s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    for (char c : s)
        if (!((c >= 'a' && c <= 'z') || detail::is_digit(c) || c == '_')) return false;
    return true;
}

}  // namespace metaforge::lexical
