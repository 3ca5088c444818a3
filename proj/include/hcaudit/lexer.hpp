#pragma once

// Span-preserving formula tokenizer and the two constant detectors built on
// top of it:
//   - extract_constants(): every numeric-literal token, in source order;
//   - heuristic_scan(): the legacy operator-then-digit character scan.
//
// Token texts concatenate back to the input exactly, so spans index straight
// into the original formula. Offsets are byte offsets into the UTF-8 text.

#include <hcaudit/cell_address.hpp>
#include <hcaudit/errors.hpp>
#include <hcaudit/number_format.hpp>

#include <algorithm>
#include <array>
#include <bitset>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hcaudit {

enum class TokenKind {
    NumericLiteral,
    StringLiteral,
    BooleanLiteral,
    ErrorLiteral,
    CellRef,
    RangeRef,
    SheetQualifier,
    FunctionName,
    Identifier,
    Operator,
    Separator,
    OpenParen,
    CloseParen,
    ArrayBrace,
    PercentSuffix,
    Whitespace,
};

inline std::string_view to_string(TokenKind k) {
    constexpr std::array<std::string_view, 16> names = {
        "NumericLiteral", "StringLiteral", "BooleanLiteral", "ErrorLiteral",
        "CellRef",        "RangeRef",      "SheetQualifier", "FunctionName",
        "Identifier",     "Operator",      "Separator",      "OpenParen",
        "CloseParen",     "ArrayBrace",    "PercentSuffix",  "Whitespace",
    };
    return names[static_cast<std::size_t>(k)];
}

/// Half-open byte range [begin, end).
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(std::size_t offset) const { return offset >= begin && offset < end; }

    friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
    TokenKind kind = TokenKind::Whitespace;
    std::string text;
    Span span;
    /// Set for NumericLiteral only. Already divided by 100 when the literal
    /// is immediately followed by a PercentSuffix.
    std::optional<double> numeric_value;

    friend bool operator==(const Token&, const Token&) = default;
};

/// One numeric literal occurrence inside a formula.
struct Constant {
    double value = 0;
    Span span;

    friend bool operator==(const Constant&, const Constant&) = default;
};

/// Set of single-byte operator characters for heuristic_scan().
class OperatorSet {
public:
    OperatorSet() = default;
    explicit OperatorSet(std::string_view chars) {
        for (char c : chars) bits_.set(static_cast<unsigned char>(c));
    }

    /// = + - * / ^ & < > ( , ;
    static OperatorSet defaults() { return OperatorSet("=+-*/^&<>(,;"); }
    /// Arithmetic and comparison only: = + - * /
    static OperatorSet strict() { return OperatorSet("=+-*/"); }

    bool contains(char c) const { return bits_.test(static_cast<unsigned char>(c)); }

    /// Members in ascending byte order.
    std::string chars() const {
        std::string out;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_.test(i)) out.push_back(static_cast<char>(i));
        return out;
    }

    bool is_subset_of(const OperatorSet& other) const { return (bits_ & ~other.bits_).none(); }

    friend bool operator==(const OperatorSet&, const OperatorSet&) = default;

private:
    std::bitset<256> bits_;
};

namespace detail {

// Grid limits of the formula language; an A1 word beyond them is a name.
inline constexpr std::uint32_t kMaxFormulaColumn = 16384;
inline constexpr std::uint32_t kMaxFormulaRow = 1048576;

inline constexpr std::array<std::string_view, 15> kErrorLiterals = {
    "#NULL!", "#DIV/0!",  "#VALUE!",   "#REF!",   "#NAME?",
    "#NUM!",  "#N/A",     "#GETTING_DATA", "#SPILL!", "#CALC!",
    "#FIELD!", "#BLOCKED!", "#CONNECT!", "#BUSY!", "#UNKNOWN!",
};

/// Length of the error literal starting at `pos`, or 0.
inline std::size_t match_error_literal(std::string_view src, std::size_t pos) {
    std::size_t best = 0;
    for (auto lit : kErrorLiterals) {
        if (lit.size() > best && src.size() - pos >= lit.size() &&
            iequals(src.substr(pos, lit.size()), lit))
            best = lit.size();
    }
    return best;
}

inline bool is_name_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return is_ascii_alpha(c) || is_digit(c) || c == '_' || c == '.' || c == '$' ||
           c == '\\' || c == '?' || u >= 0x80;
}

inline bool is_name_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return is_ascii_alpha(c) || c == '_' || c == '\\' || c == '$' || u >= 0x80;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

/// End of the number grammar  digits [. digits*] [e [+-] digits]  or
/// . digits [e ...]  starting at `pos`. Requires a digit or ".digit" there.
inline std::size_t scan_number(std::string_view src, std::size_t pos) {
    std::size_t i = pos;
    while (i < src.size() && is_digit(src[i])) ++i;
    if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && is_digit(src[i])) ++i;
    }
    if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && is_digit(src[j])) {
            while (j < src.size() && is_digit(src[j])) ++j;
            i = j;
        }
    }
    return i;
}

/// Value of a literal's text, optionally scaled by a trailing percent sign.
/// The scaling shifts the decimal exponent so the result is the correctly
/// rounded value of the scaled decimal (7.5% == 0.075 exactly as parsed).
inline std::optional<double> literal_value(std::string_view text, bool percent) {
    if (!percent) return parse_number(text);
    std::string mantissa(text);
    long exponent = 0;
    if (auto e = mantissa.find_first_of("eE"); e != std::string::npos) {
        std::string_view digits = std::string_view(mantissa).substr(e + 1);
        bool negative = !digits.empty() && digits.front() == '-';
        if (!digits.empty() && (digits.front() == '+' || digits.front() == '-'))
            digits.remove_prefix(1);
        auto ev = parse_u32(digits);
        if (!ev) return std::nullopt;
        exponent = negative ? -static_cast<long>(*ev) : static_cast<long>(*ev);
        mantissa.resize(e);
    }
    return parse_number(mantissa + "e" + std::to_string(exponent - 2));
}

/// Matches "$?<digits>:$?<digits>" (whole-row range) at `pos`; returns end.
inline std::optional<std::size_t> match_row_range(std::string_view src, std::size_t pos) {
    std::size_t i = pos;
    auto rows = [&]() -> bool {
        if (i < src.size() && src[i] == '$') ++i;
        std::size_t d = i;
        while (i < src.size() && is_digit(src[i])) ++i;
        auto v = parse_u32(src.substr(d, i - d));
        return v && *v >= 1 && *v <= kMaxFormulaRow;
    };
    if (!rows()) return std::nullopt;
    if (i >= src.size() || src[i] != ':') return std::nullopt;
    ++i;
    if (!rows()) return std::nullopt;
    if (i < src.size() && (is_name_char(src[i]) || src[i] == '(')) return std::nullopt;
    return i;
}

enum class A1Shape { None, Cell, Column, Row };

inline A1Shape classify_a1_word(std::string_view w) {
    std::size_t i = 0;
    if (i < w.size() && w[i] == '$') ++i;
    std::size_t c0 = i;
    while (i < w.size() && is_ascii_alpha(w[i])) ++i;
    std::size_t letters = i - c0;
    if (letters == 0) {
        auto row = parse_u32(w.substr(i));
        if (row && *row >= 1 && *row <= kMaxFormulaRow) return A1Shape::Row;
        return A1Shape::None;
    }
    if (letters > 3) return A1Shape::None;
    auto col = column_index(w.substr(c0, letters));
    if (!col || *col > kMaxFormulaColumn) return A1Shape::None;
    if (i == w.size()) return A1Shape::Column;
    if (w[i] == '$') ++i;
    auto row = parse_u32(w.substr(i));
    if (!row || *row < 1 || *row > kMaxFormulaRow) return A1Shape::None;
    return A1Shape::Cell;
}

/// Matches an R1C1 reference (R, C, RC, R2, C[-1], R[1]C2, ...) at `pos`.
inline std::optional<std::size_t> match_r1c1_ref(std::string_view src, std::size_t pos) {
    std::size_t i = pos;
    auto part = [&](std::uint32_t limit) -> bool {
        if (i < src.size() && src[i] == '[') {
            std::size_t j = i + 1;
            if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
            std::size_t d = j;
            while (j < src.size() && is_digit(src[j])) ++j;
            if (j == d || j >= src.size() || src[j] != ']') return false;
            i = j + 1;
            return true;
        }
        std::size_t d = i;
        while (i < src.size() && is_digit(src[i])) ++i;
        if (i == d) return true;
        auto v = parse_u32(src.substr(d, i - d));
        return v && *v >= 1 && *v <= limit;
    };
    if (i < src.size() && ascii_upper(src[i]) == 'R') {
        ++i;
        if (!part(kMaxFormulaRow)) return std::nullopt;
    }
    if (i < src.size() && ascii_upper(src[i]) == 'C') {
        ++i;
        if (!part(kMaxFormulaColumn)) return std::nullopt;
    }
    if (i == pos) return std::nullopt;
    if (i < src.size() &&
        (is_name_char(src[i]) || src[i] == '(' || src[i] == '!' || src[i] == '['))
        return std::nullopt;
    return i;
}

/// End of a balanced [...] group starting at `pos`. Inside brackets an
/// apostrophe escapes the next character.
inline std::optional<std::size_t> match_brackets(std::string_view src, std::size_t pos) {
    int depth = 0;
    for (std::size_t i = pos; i < src.size(); ++i) {
        char c = src[i];
        if (c == '\'') {
            ++i;
            continue;
        }
        if (c == '[') ++depth;
        if (c == ']' && --depth == 0) return i + 1;
    }
    return std::nullopt;
}

/// End of a quoted run (opening quote at `pos`, doubled quote escapes).
inline std::optional<std::size_t> match_quoted(std::string_view src, std::size_t pos) {
    char q = src[pos];
    for (std::size_t i = pos + 1; i < src.size(); ++i) {
        if (src[i] == q) {
            if (i + 1 < src.size() && src[i + 1] == q) {
                ++i;
                continue;
            }
            return i + 1;
        }
    }
    return std::nullopt;
}

class FormulaLexer {
public:
    FormulaLexer(std::string_view src, RefStyle style) : src_(src), style_(style) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) step();
        return std::move(out_);
    }

private:
    std::string_view src_;
    RefStyle style_;
    std::size_t pos_ = 0;
    std::vector<Token> out_;
    std::optional<TokenKind> last_significant_;

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void emit(TokenKind kind, std::size_t end, std::optional<double> value = std::nullopt) {
        out_.push_back(Token{kind, std::string(src_.substr(pos_, end - pos_)), Span{pos_, end}, value});
        if (kind != TokenKind::Whitespace) last_significant_ = kind;
        pos_ = end;
    }

    std::size_t word_end(std::size_t from) const {
        std::size_t i = from;
        while (i < src_.size() && is_name_char(src_[i])) ++i;
        return i;
    }

    void step() {
        char c = peek();
        if (is_space(c)) {
            std::size_t i = pos_;
            while (i < src_.size() && is_space(src_[i])) ++i;
            emit(TokenKind::Whitespace, i);
            return;
        }
        switch (c) {
            case '"': {
                auto end = match_quoted(src_, pos_);
                if (!end) throw LexError("unterminated string literal", pos_);
                emit(TokenKind::StringLiteral, *end);
                return;
            }
            case '\'': {
                auto end = match_quoted(src_, pos_);
                if (!end) throw LexError("unterminated quoted sheet name", pos_);
                if (*end >= src_.size() || src_[*end] != '!')
                    throw LexError("quoted sheet name not followed by '!'", *end);
                emit(TokenKind::SheetQualifier, *end + 1);
                return;
            }
            case '[': lex_bracket_prefix(); return;
            case '#': lex_hash(); return;
            case '{':
            case '}': emit(TokenKind::ArrayBrace, pos_ + 1); return;
            case '(': emit(TokenKind::OpenParen, pos_ + 1); return;
            case ')': emit(TokenKind::CloseParen, pos_ + 1); return;
            case ',':
            case ';': emit(TokenKind::Separator, pos_ + 1); return;
            case '%': emit(TokenKind::PercentSuffix, pos_ + 1); return;
            case '<':
                emit(TokenKind::Operator, (peek(1) == '=' || peek(1) == '>') ? pos_ + 2 : pos_ + 1);
                return;
            case '>': emit(TokenKind::Operator, peek(1) == '=' ? pos_ + 2 : pos_ + 1); return;
            case '+':
            case '-':
            case '*':
            case '/':
            case '^':
            case '&':
            case '=':
            case ':':
            case '@': emit(TokenKind::Operator, pos_ + 1); return;
            default: break;
        }
        if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
            lex_number();
            return;
        }
        if (is_name_start(c)) {
            lex_word();
            return;
        }
        throw LexError("illegal character '" + std::string(1, c) + "'", pos_);
    }

    void lex_number() {
        if (style_ == RefStyle::A1) {
            if (auto end = match_row_range(src_, pos_)) {
                emit(TokenKind::RangeRef, *end);
                return;
            }
        }
        std::size_t end = scan_number(src_, pos_);
        bool percent = end < src_.size() && src_[end] == '%';
        auto value = literal_value(src_.substr(pos_, end - pos_), percent);
        if (!value) throw LexError("numeric literal out of range", pos_);
        emit(TokenKind::NumericLiteral, end, value);
    }

    void lex_hash() {
        if (std::size_t n = match_error_literal(src_, pos_)) {
            emit(TokenKind::ErrorLiteral, pos_ + n);
            return;
        }
        // Spill-range operator: A1#
        if (last_significant_ &&
            (*last_significant_ == TokenKind::CellRef || *last_significant_ == TokenKind::RangeRef ||
             *last_significant_ == TokenKind::Identifier ||
             *last_significant_ == TokenKind::CloseParen)) {
            emit(TokenKind::Operator, pos_ + 1);
            return;
        }
        throw LexError("unknown error literal", pos_);
    }

    // "[Book.xlsx]Sheet1!" external qualifier or "[@Col]" structured reference.
    void lex_bracket_prefix() {
        auto end = match_brackets(src_, pos_);
        if (!end) throw LexError("unterminated '['", pos_);
        std::size_t w = word_end(*end);
        if (w > *end && w < src_.size() && src_[w] == '!') {
            emit(TokenKind::SheetQualifier, w + 1);
            return;
        }
        emit(TokenKind::Identifier, *end);
    }

    void lex_word() {
        if (style_ == RefStyle::R1C1) {
            if (auto end = match_r1c1_ref(src_, pos_)) {
                if (*end < src_.size() && src_[*end] == ':') {
                    if (auto end2 = match_r1c1_ref(src_, *end + 1)) {
                        emit(TokenKind::RangeRef, *end2);
                        return;
                    }
                }
                emit(TokenKind::CellRef, *end);
                return;
            }
        }
        std::size_t end = word_end(pos_);
        char next = end < src_.size() ? src_[end] : '\0';
        std::string_view word = src_.substr(pos_, end - pos_);

        if (next == '[') {
            std::size_t i = end;
            while (i < src_.size() && src_[i] == '[') {
                auto close = match_brackets(src_, i);
                if (!close) throw LexError("unterminated '['", i);
                i = *close;
            }
            emit(TokenKind::Identifier, i);
            return;
        }
        if (next == '!') {
            emit(TokenKind::SheetQualifier, end + 1);
            return;
        }
        if (next == ':' && end + 1 < src_.size() && is_name_start(src_[end + 1])) {
            std::size_t end2 = word_end(end + 1);
            if (end2 < src_.size() && src_[end2] == '!') {
                emit(TokenKind::SheetQualifier, end2 + 1);  // Sheet1:Sheet3!
                return;
            }
        }
        if (next == '(') {
            emit(TokenKind::FunctionName, end);
            return;
        }
        if (iequals(word, "TRUE") || iequals(word, "FALSE")) {
            emit(TokenKind::BooleanLiteral, end);
            return;
        }
        if (style_ == RefStyle::A1) {
            A1Shape shape = classify_a1_word(word);
            if (shape != A1Shape::None) {
                if (next == ':' && end + 1 < src_.size()) {
                    std::size_t start2 = end + 1;
                    std::size_t end2 = word_end(start2);
                    char after = end2 < src_.size() ? src_[end2] : '\0';
                    if (end2 > start2 && after != '(' && after != '!' && after != '[') {
                        A1Shape shape2 = classify_a1_word(src_.substr(start2, end2 - start2));
                        if (shape2 == shape) {
                            emit(TokenKind::RangeRef, end2);
                            return;
                        }
                    }
                }
                if (shape == A1Shape::Cell) {
                    emit(TokenKind::CellRef, end);
                    return;
                }
            }
        }
        emit(TokenKind::Identifier, end);
    }
};

}  // namespace detail

/// Splits formula text (with or without the leading "=") into tokens.
/// Throws LexError on an unterminated string, quoted name or bracket, an
/// out-of-range literal, or a character the formula language does not use.
inline std::vector<Token> tokenize(std::string_view formula, RefStyle style = RefStyle::A1) {
    return detail::FormulaLexer(formula, style).run();
}

inline std::string render(std::span<const Token> tokens) {
    std::string out;
    for (const auto& t : tokens) out += t.text;
    return out;
}

/// Every numeric literal in source order, duplicates kept. Array-constant
/// members are literals like any other.
inline std::vector<Constant> extract_constants(std::span<const Token> tokens) {
    std::vector<Constant> out;
    for (const auto& t : tokens)
        if (t.kind == TokenKind::NumericLiteral) out.push_back({*t.numeric_value, t.span});
    return out;
}

/// Offsets of digits that immediately follow a member of `ops`. Quoted
/// strings, quoted sheet names, bracket groups, error literals and whole-row
/// ranges ("1:3") are skipped. This is the character-scan detector; it sees a
/// subset of what extract_constants() reports.
inline std::vector<std::size_t> heuristic_scan(std::string_view formula,
                                               const OperatorSet& ops = OperatorSet::defaults()) {
    std::vector<std::size_t> flagged;
    std::size_t i = 0;
    while (i < formula.size()) {
        char c = formula[i];
        if (c == '"' || c == '\'') {
            auto end = detail::match_quoted(formula, i);
            if (!end) break;
            i = *end;
            continue;
        }
        if (c == '[') {
            auto end = detail::match_brackets(formula, i);
            if (!end) break;
            i = *end;
            continue;
        }
        if (c == '#') {
            if (std::size_t n = detail::match_error_literal(formula, i)) {
                i += n;
                continue;
            }
        }
        // A free-standing number is consumed whole so the sign of an exponent
        // ("2.5e-3") is not mistaken for an operator.
        bool number_start = detail::is_digit(c) ||
                            (c == '.' && i + 1 < formula.size() && detail::is_digit(formula[i + 1]));
        if (number_start && (i == 0 || !detail::is_name_char(formula[i - 1]))) {
            i = std::max(detail::scan_number(formula, i), i + 1);
            continue;
        }
        if (ops.contains(c) && i + 1 < formula.size() && detail::is_digit(formula[i + 1]) &&
            !detail::match_row_range(formula, i + 1)) {
            flagged.push_back(i + 1);
        }
        ++i;
    }
    return flagged;
}

/// The literal whose first digit sits at `offset`, read with the same number
/// grammar as the tokenizer (used to turn heuristic offsets into values).
inline std::optional<Constant> number_at(std::string_view formula, std::size_t offset) {
    if (offset >= formula.size() || !detail::is_digit(formula[offset])) return std::nullopt;
    std::size_t end = detail::scan_number(formula, offset);
    bool percent = end < formula.size() && formula[end] == '%';
    auto v = detail::literal_value(formula.substr(offset, end - offset), percent);
    if (!v) return std::nullopt;
    return Constant{*v, Span{offset, end}};
}

}  // namespace hcaudit
