#pragma once

#include <hcaudit/errors.hpp>

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hcaudit {

enum class RefStyle { A1, R1C1 };

inline std::string_view to_string(RefStyle style) {
    return style == RefStyle::A1 ? "A1" : "R1C1";
}

/// Row-major grid position. Ordering is row first, then column, which is the
/// order findings are reported in.
struct GridPos {
    std::uint32_t row = 1;
    std::uint32_t column = 1;

    friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

struct CellAddress {
    std::optional<std::string> sheet;
    std::uint32_t column = 1;
    std::uint32_t row = 1;
    bool col_absolute = false;
    bool row_absolute = false;
    RefStyle style = RefStyle::A1;

    GridPos pos() const { return {row, column}; }

    friend bool operator==(const CellAddress&, const CellAddress&) = default;
};

/// Inclusive rectangle; both corners are plain positions (no sheet).
struct Rectangle {
    CellAddress top_left;
    CellAddress bottom_right;

    bool contains(GridPos p) const {
        return p.row >= top_left.row && p.row <= bottom_right.row &&
               p.column >= top_left.column && p.column <= bottom_right.column;
    }

    friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

namespace detail {

inline bool is_ascii_alpha(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline char ascii_upper(char c) {
    return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](char x, char y) { return ascii_upper(x) == ascii_upper(y); });
}

// Parses an unsigned decimal run; nullopt on empty input or overflow past
// 2^32 - 1.
inline std::optional<std::uint32_t> parse_u32(std::string_view digits) {
    if (digits.empty() || digits.size() > 10) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : digits) {
        if (!is_digit(c)) return std::nullopt;
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (v > UINT32_MAX) return std::nullopt;
    return static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// 1 -> "A", 27 -> "AA".
inline std::string column_letters(std::uint32_t column) {
    std::string out;
    while (column > 0) {
        --column;
        out.push_back(static_cast<char>('A' + column % 26));
        column /= 26;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

/// "A" -> 1, case-insensitive. nullopt for non-letters or overflow.
inline std::optional<std::uint32_t> column_index(std::string_view letters) {
    if (letters.empty() || letters.size() > 6) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : letters) {
        if (!detail::is_ascii_alpha(c)) return std::nullopt;
        v = v * 26 + static_cast<std::uint64_t>(detail::ascii_upper(c) - 'A' + 1);
    }
    return static_cast<std::uint32_t>(v);
}

/// True when a sheet name can appear unquoted in front of "!".
inline bool sheet_name_is_bare(std::string_view name) {
    if (name.empty()) return false;
    if (!(detail::is_ascii_alpha(name[0]) || name[0] == '_')) return false;
    for (char c : name)
        if (!(detail::is_ascii_alpha(c) || detail::is_digit(c) || c == '_' || c == '.'))
            return false;
    // Names shaped like a cell reference ("A1", "R1C1") must be quoted.
    std::size_t i = 0;
    while (i < name.size() && detail::is_ascii_alpha(name[i])) ++i;
    if (i > 0 && i < name.size() && i <= 3 &&
        std::all_of(name.begin() + static_cast<std::ptrdiff_t>(i), name.end(), detail::is_digit))
        return false;
    if (detail::ascii_upper(name[0]) == 'R' || detail::ascii_upper(name[0]) == 'C') {
        bool rc = std::all_of(name.begin(), name.end(), [](char c) {
            return detail::is_digit(c) || detail::ascii_upper(c) == 'R' || detail::ascii_upper(c) == 'C';
        });
        if (rc) return false;
    }
    return true;
}

/// Renders `name!`, quoting with doubled apostrophes when required.
inline std::string sheet_prefix(std::string_view name) {
    if (sheet_name_is_bare(name)) return std::string(name) + "!";
    std::string out = "'";
    for (char c : name) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    out += "'!";
    return out;
}

namespace detail {

// Splits an optional sheet qualifier off `text`. Returns the remainder.
inline std::string_view split_sheet(std::string_view text, std::optional<std::string>& sheet) {
    if (!text.empty() && text.front() == '\'') {
        std::string name;
        std::size_t i = 1;
        for (;;) {
            if (i >= text.size()) throw AddressError("unterminated quoted sheet name");
            if (text[i] == '\'') {
                if (i + 1 < text.size() && text[i + 1] == '\'') {
                    name.push_back('\'');
                    i += 2;
                    continue;
                }
                break;
            }
            name.push_back(text[i++]);
        }
        if (i + 1 >= text.size() || text[i + 1] != '!')
            throw AddressError("quoted sheet name must be followed by '!'");
        sheet = std::move(name);
        return text.substr(i + 2);
    }
    auto bang = text.rfind('!');
    if (bang == std::string_view::npos) return text;
    if (bang == 0) throw AddressError("empty sheet name");
    sheet = std::string(text.substr(0, bang));
    return text.substr(bang + 1);
}

}  // namespace detail

/// Parses "$E$7", "Data!C5", "'Prod 2007'!$D$6" (A1) or "R7C5" (R1C1).
/// R1C1 addresses must be absolute; relative offsets need a base cell and
/// are not addresses. No upper grid bound is enforced.
inline CellAddress parse_address(std::string_view text, RefStyle style = RefStyle::A1) {
    CellAddress out;
    out.style = style;
    std::string_view rest = detail::split_sheet(text, out.sheet);
    auto fail = [&]() -> AddressError {
        return AddressError("invalid " + std::string(to_string(style)) + " cell address '" +
                            std::string(text) + "'");
    };
    std::size_t i = 0;
    if (style == RefStyle::A1) {
        if (i < rest.size() && rest[i] == '$') { out.col_absolute = true; ++i; }
        std::size_t c0 = i;
        while (i < rest.size() && detail::is_ascii_alpha(rest[i])) ++i;
        auto col = column_index(rest.substr(c0, i - c0));
        if (!col) throw fail();
        if (i < rest.size() && rest[i] == '$') { out.row_absolute = true; ++i; }
        auto row = detail::parse_u32(rest.substr(i));
        if (!row) throw fail();
        out.column = *col;
        out.row = *row;
    } else {
        if (rest.size() < 4 || detail::ascii_upper(rest[0]) != 'R') throw fail();
        auto cpos = rest.find_first_of("Cc", 1);
        if (cpos == std::string_view::npos) throw fail();
        auto row = detail::parse_u32(rest.substr(1, cpos - 1));
        auto col = detail::parse_u32(rest.substr(cpos + 1));
        if (!row || !col) throw fail();
        out.row = *row;
        out.column = *col;
        out.col_absolute = out.row_absolute = true;
    }
    if (out.row < 1 || out.column < 1) throw fail();
    return out;
}

inline std::optional<CellAddress> try_parse_address(std::string_view text,
                                                    RefStyle style = RefStyle::A1) {
    try {
        return parse_address(text, style);
    } catch (const AddressError&) {
        return std::nullopt;
    }
}

inline std::string to_string(const CellAddress& a) {
    std::string out = a.sheet ? sheet_prefix(*a.sheet) : std::string();
    if (a.style == RefStyle::R1C1) {
        out += "R" + std::to_string(a.row) + "C" + std::to_string(a.column);
        return out;
    }
    if (a.col_absolute) out.push_back('$');
    out += column_letters(a.column);
    if (a.row_absolute) out.push_back('$');
    out += std::to_string(a.row);
    return out;
}

/// "$E$7" form without sheet, used in reports.
inline std::string absolute_a1(GridPos p) {
    return "$" + column_letters(p.column) + "$" + std::to_string(p.row);
}

inline std::string plain_a1(GridPos p) {
    return column_letters(p.column) + std::to_string(p.row);
}

inline CellAddress make_address(GridPos p) {
    CellAddress a;
    a.row = p.row;
    a.column = p.column;
    return a;
}

/// Parses "B2:C3" or a single cell "A1" (treated as A1:A1). Corners are
/// normalized so that top-left <= bottom-right.
inline Rectangle parse_range(std::string_view text) {
    auto colon = text.find(':');
    Rectangle r;
    if (colon == std::string_view::npos) {
        r.top_left = r.bottom_right = parse_address(text);
    } else {
        r.top_left = parse_address(text.substr(0, colon));
        r.bottom_right = parse_address(text.substr(colon + 1));
    }
    if (r.top_left.sheet || r.bottom_right.sheet)
        throw AddressError("range '" + std::string(text) + "' must not carry a sheet name");
    auto strip = [](CellAddress& a) { a.col_absolute = a.row_absolute = false; };
    strip(r.top_left);
    strip(r.bottom_right);
    if (r.top_left.row > r.bottom_right.row) std::swap(r.top_left.row, r.bottom_right.row);
    if (r.top_left.column > r.bottom_right.column)
        std::swap(r.top_left.column, r.bottom_right.column);
    return r;
}

inline std::string to_string(const Rectangle& r) {
    return to_string(r.top_left) + ":" + to_string(r.bottom_right);
}

inline Rectangle make_rectangle(GridPos a, GridPos b) {
    return Rectangle{make_address(a), make_address(b)};
}

}  // namespace hcaudit
