#pragma once

#include <hcaudit/config.hpp>
#include <hcaudit/lexer.hpp>
#include <hcaudit/workbook.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hcaudit {

enum class FindingKind {
    HardCodedConstant,
    ConstantOnlyFormula,
    DirectNumericEntry,
    ExpectedInputValue,
    Unparseable,
};

inline std::string_view to_string(FindingKind k) {
    switch (k) {
        case FindingKind::HardCodedConstant: return "HardCodedConstant";
        case FindingKind::ConstantOnlyFormula: return "ConstantOnlyFormula";
        case FindingKind::DirectNumericEntry: return "DirectNumericEntry";
        case FindingKind::ExpectedInputValue: return "ExpectedInputValue";
        case FindingKind::Unparseable: return "Unparseable";
    }
    return "";
}

inline std::optional<FindingKind> finding_kind_from_string(std::string_view s) {
    for (auto k : {FindingKind::HardCodedConstant, FindingKind::ConstantOnlyFormula,
                   FindingKind::DirectNumericEntry, FindingKind::ExpectedInputValue,
                   FindingKind::Unparseable})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// Kinds whose constants count as hard codings.
inline bool carries_constants(FindingKind k) {
    return k == FindingKind::HardCodedConstant || k == FindingKind::ConstantOnlyFormula;
}

inline bool is_numeric_entry(FindingKind k) {
    return k == FindingKind::DirectNumericEntry || k == FindingKind::ExpectedInputValue;
}

struct Finding {
    FindingKind kind = FindingKind::HardCodedConstant;
    std::string sheet;
    CellAddress address;
    std::optional<std::string> formula_text;
    std::optional<Scalar> cached_value;
    /// Source order, duplicates kept; empty for value findings.
    std::vector<Constant> constants;
    /// Lexer message for Unparseable; truncation note when constants were capped.
    std::string detail;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct AnalysisReport {
    std::string workbook_name;
    std::string workbook_location;
    std::size_t worksheet_count = 0;
    std::size_t formula_count = 0;
    std::size_t hard_coding_count = 0;
    std::size_t numeric_value_count = 0;
    std::vector<Finding> findings;
    std::vector<AuditWarning> warnings;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

namespace detail {

// "=", optional unary signs, one literal, optional percent; nothing else.
inline bool is_constant_only(std::span<const Token> tokens) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < tokens.size() && tokens[i].kind == TokenKind::Whitespace) ++i;
    };
    skip_ws();
    if (i < tokens.size() && tokens[i].kind == TokenKind::Operator && tokens[i].text == "=") ++i;
    skip_ws();
    while (i < tokens.size() && tokens[i].kind == TokenKind::Operator &&
           (tokens[i].text == "+" || tokens[i].text == "-")) {
        ++i;
        skip_ws();
    }
    if (i >= tokens.size() || tokens[i].kind != TokenKind::NumericLiteral) return false;
    ++i;
    if (i < tokens.size() && tokens[i].kind == TokenKind::PercentSuffix) ++i;
    skip_ws();
    return i == tokens.size();
}

inline bool is_constant_only_text(std::string_view formula, const Constant& c) {
    auto is_blank = [](char ch) { return is_space(ch); };
    std::size_t i = 0;
    while (i < formula.size() && is_blank(formula[i])) ++i;
    if (i < formula.size() && formula[i] == '=') ++i;
    while (i < formula.size() && (is_blank(formula[i]) || formula[i] == '+' || formula[i] == '-')) ++i;
    if (i != c.span.begin) return false;
    i = c.span.end;
    if (i < formula.size() && formula[i] == '%') ++i;
    while (i < formula.size() && is_blank(formula[i])) ++i;
    return i == formula.size();
}

inline std::vector<Constant> heuristic_constants(std::string_view formula, const OperatorSet& ops) {
    std::vector<Constant> out;
    for (std::size_t offset : heuristic_scan(formula, ops)) {
        if (!out.empty() && out.back().span.contains(offset)) continue;
        if (auto c = number_at(formula, offset)) out.push_back(*c);
    }
    return out;
}

}  // namespace detail

/// Classifies one cell. Lexer failures become an Unparseable finding; the
/// function itself never throws on formula content.
inline std::vector<Finding> analyze_cell(const Cell& cell, std::string_view sheet_name,
                                         const DetectionConfig& config) {
    Finding f;
    f.sheet = std::string(sheet_name);
    f.address = make_address(cell.address.pos());
    f.formula_text = cell.formula_text;
    f.cached_value = cell.cached_value;

    if (!cell.formula_text) {
        if (!is_number(cell.cached_value)) return {};
        f.kind = config.in_data_region(sheet_name, cell.address.pos())
                     ? FindingKind::ExpectedInputValue
                     : FindingKind::DirectNumericEntry;
        return {std::move(f)};
    }

    const std::string& formula = *cell.formula_text;
    std::vector<Token> tokens;
    try {
        tokens = tokenize(formula, config.ref_style.value_or(RefStyle::A1));
    } catch (const LexError& e) {
        f.kind = FindingKind::Unparseable;
        f.detail = e.what();
        return {std::move(f)};
    }

    std::vector<Constant> found;
    bool constant_only = false;
    if (config.mode == DetectionMode::Lexical) {
        found = extract_constants(tokens);
        constant_only = detail::is_constant_only(tokens);
    } else {
        found = detail::heuristic_constants(formula, config.heuristic_operators);
        constant_only = found.size() == 1 && detail::is_constant_only_text(formula, found.front());
    }

    for (const auto& c : found)
        if (!config.ignore_constants.count(c.value)) f.constants.push_back(c);
    if (f.constants.empty()) return {};

    f.kind = constant_only ? FindingKind::ConstantOnlyFormula : FindingKind::HardCodedConstant;
    if (auto cap = config.max_reported_constants_per_cell; cap && f.constants.size() > *cap) {
        f.detail = std::to_string(f.constants.size() - *cap) + " further constant(s) not reported";
        f.constants.resize(*cap);
    }
    return {std::move(f)};
}

/// Parent directory of a workbook's source path, "." when it has none.
inline std::string workbook_location(const Workbook& wb) {
    auto parent = std::filesystem::path(wb.source_path).parent_path().string();
    return parent.empty() ? std::string(".") : parent;
}

/// Runs analyze_cell over every occupied cell of every sheet (hidden sheets
/// included) and fills the report counts. Findings come out in sheet order,
/// then row, then column.
inline AnalysisReport analyze_workbook(const Workbook& workbook, const DetectionConfig& config) {
    DetectionConfig effective = config;
    if (!effective.ref_style) effective.ref_style = workbook.ref_style;

    AnalysisReport report;
    report.workbook_name = workbook.name;
    report.workbook_location = workbook_location(workbook);
    report.worksheet_count = workbook.sheets.size();
    for (const auto& sheet : workbook.sheets) {
        // The cell map holds only occupied cells, all of them inside the used range.
        for (const auto& [pos, cell] : sheet.cells) {
            if (cell.formula_text) ++report.formula_count;
            for (auto& f : analyze_cell(cell, sheet.name, effective)) {
                if (carries_constants(f.kind)) report.hard_coding_count += f.constants.size();
                if (is_numeric_entry(f.kind)) ++report.numeric_value_count;
                report.findings.push_back(std::move(f));
            }
        }
    }
    report.warnings = audit_metadata(workbook);
    return report;
}

using Histogram = std::vector<std::pair<double, std::size_t>>;

/// Occurrences of each constant value across the constant-bearing findings
/// of all reports, ascending by value.
inline Histogram constant_histogram(std::span<const AnalysisReport> reports) {
    std::map<double, std::size_t> counts;
    for (const auto& r : reports)
        for (const auto& f : r.findings)
            if (carries_constants(f.kind))
                for (const auto& c : f.constants) ++counts[c.value];
    return Histogram(counts.begin(), counts.end());
}

}  // namespace hcaudit
