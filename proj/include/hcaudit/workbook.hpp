#pragma once

#include <hcaudit/cell_address.hpp>
#include <hcaudit/number_format.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace hcaudit {

/// Cached error value such as "#DIV/0!".
struct ErrorValue {
    std::string code;

    friend bool operator==(const ErrorValue&, const ErrorValue&) = default;
};

using Scalar = std::variant<double, std::string, bool, ErrorValue>;

inline bool is_number(const std::optional<Scalar>& v) {
    return v && std::holds_alternative<double>(*v);
}

/// Display text of a stored value; no number formatting is applied.
inline std::string to_display(const Scalar& v) {
    if (auto d = std::get_if<double>(&v)) return format_number(*d);
    if (auto s = std::get_if<std::string>(&v)) return *s;
    if (auto b = std::get_if<bool>(&v)) return *b ? "TRUE" : "FALSE";
    return std::get<ErrorValue>(v).code;
}

enum class Visibility { Visible, Hidden, VeryHidden };

inline std::string_view to_string(Visibility v) {
    switch (v) {
        case Visibility::Visible: return "visible";
        case Visibility::Hidden: return "hidden";
        case Visibility::VeryHidden: return "very_hidden";
    }
    return "visible";
}

struct Cell {
    CellAddress address;
    /// Always starts with "=" when present.
    std::optional<std::string> formula_text;
    std::optional<Scalar> cached_value;
    bool is_merged_anchor = false;

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Sheet {
    std::string name;
    Visibility visibility = Visibility::Visible;
    std::map<GridPos, Cell> cells;
    std::vector<Rectangle> merged_regions;
    std::set<std::uint32_t> hidden_rows;
    std::set<std::uint32_t> hidden_cols;
    /// Cells whose protection style hides the formula from the formula bar.
    std::set<GridPos> hidden_formula_cells;

    friend bool operator==(const Sheet&, const Sheet&) = default;
};

struct Workbook {
    std::string name;
    std::string source_path;
    std::vector<Sheet> sheets;
    RefStyle ref_style = RefStyle::A1;

    friend bool operator==(const Workbook&, const Workbook&) = default;
};

/// Normalizes formula text to carry exactly one leading "=".
inline std::string normalize_formula(std::string_view text) {
    if (!text.empty() && text.front() == '=') return std::string(text);
    return "=" + std::string(text);
}

/// Minimal rectangle covering every cell; nullopt for an empty sheet.
inline std::optional<Rectangle> used_range(const Sheet& sheet) {
    if (sheet.cells.empty()) return std::nullopt;
    GridPos lo = sheet.cells.begin()->first;
    GridPos hi = sheet.cells.rbegin()->first;
    std::uint32_t min_col = lo.column, max_col = lo.column;
    for (const auto& [pos, cell] : sheet.cells) {
        min_col = std::min(min_col, pos.column);
        max_col = std::max(max_col, pos.column);
    }
    return make_rectangle({lo.row, min_col}, {hi.row, max_col});
}

/// Marks merge anchors and drops content from covered (non-anchor) cells.
/// Returns the number of covered cells that had content.
inline std::size_t apply_merge_policy(Sheet& sheet) {
    std::size_t dropped = 0;
    for (const auto& region : sheet.merged_regions) {
        GridPos anchor = region.top_left.pos();
        for (auto it = sheet.cells.lower_bound({anchor.row, 1}); it != sheet.cells.end();) {
            if (it->first.row > region.bottom_right.row) break;
            if (region.contains(it->first)) {
                if (it->first == anchor) {
                    it->second.is_merged_anchor = true;
                } else {
                    it = sheet.cells.erase(it);
                    ++dropped;
                    continue;
                }
            }
            ++it;
        }
    }
    return dropped;
}

enum class WarningKind {
    HiddenSheet,
    VeryHiddenSheet,
    HiddenRows,
    HiddenColumns,
    MergedCells,
    HiddenFormulas,
};

inline std::string_view to_string(WarningKind k) {
    switch (k) {
        case WarningKind::HiddenSheet: return "HiddenSheet";
        case WarningKind::VeryHiddenSheet: return "VeryHiddenSheet";
        case WarningKind::HiddenRows: return "HiddenRows";
        case WarningKind::HiddenColumns: return "HiddenColumns";
        case WarningKind::MergedCells: return "MergedCells";
        case WarningKind::HiddenFormulas: return "HiddenFormulas";
    }
    return "";
}

inline std::optional<WarningKind> warning_kind_from_string(std::string_view s) {
    for (auto k : {WarningKind::HiddenSheet, WarningKind::VeryHiddenSheet, WarningKind::HiddenRows,
                   WarningKind::HiddenColumns, WarningKind::MergedCells,
                   WarningKind::HiddenFormulas})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// Something that hides content from a reviewer. Warnings never change
/// findings.
struct AuditWarning {
    WarningKind kind = WarningKind::HiddenSheet;
    std::string sheet;
    std::size_t count = 0;
    /// Row numbers, column letters, ranges or cell addresses, by kind.
    std::vector<std::string> locations;

    friend bool operator==(const AuditWarning&, const AuditWarning&) = default;
};

inline std::string describe(const AuditWarning& w) {
    switch (w.kind) {
        case WarningKind::HiddenSheet: return "sheet '" + w.sheet + "' is hidden";
        case WarningKind::VeryHiddenSheet: return "sheet '" + w.sheet + "' is very hidden";
        case WarningKind::HiddenRows:
            return std::to_string(w.count) + " hidden row(s) on '" + w.sheet + "'";
        case WarningKind::HiddenColumns:
            return std::to_string(w.count) + " hidden column(s) on '" + w.sheet + "'";
        case WarningKind::MergedCells:
            return std::to_string(w.count) + " merged region(s) on '" + w.sheet + "'";
        case WarningKind::HiddenFormulas:
            return std::to_string(w.count) + " cell(s) with hidden formulas on '" + w.sheet + "'";
    }
    return "";
}

inline std::vector<AuditWarning> audit_metadata(const Workbook& workbook) {
    std::vector<AuditWarning> out;
    for (const auto& sheet : workbook.sheets) {
        if (sheet.visibility == Visibility::Hidden)
            out.push_back({WarningKind::HiddenSheet, sheet.name, 1, {}});
        if (sheet.visibility == Visibility::VeryHidden)
            out.push_back({WarningKind::VeryHiddenSheet, sheet.name, 1, {}});
        if (!sheet.hidden_rows.empty()) {
            AuditWarning w{WarningKind::HiddenRows, sheet.name, sheet.hidden_rows.size(), {}};
            for (auto r : sheet.hidden_rows) w.locations.push_back(std::to_string(r));
            out.push_back(std::move(w));
        }
        if (!sheet.hidden_cols.empty()) {
            AuditWarning w{WarningKind::HiddenColumns, sheet.name, sheet.hidden_cols.size(), {}};
            for (auto c : sheet.hidden_cols) w.locations.push_back(column_letters(c));
            out.push_back(std::move(w));
        }
        if (!sheet.merged_regions.empty()) {
            AuditWarning w{WarningKind::MergedCells, sheet.name, sheet.merged_regions.size(), {}};
            for (const auto& r : sheet.merged_regions) w.locations.push_back(to_string(r));
            out.push_back(std::move(w));
        }
        if (!sheet.hidden_formula_cells.empty()) {
            AuditWarning w{WarningKind::HiddenFormulas, sheet.name,
                           sheet.hidden_formula_cells.size(), {}};
            for (auto p : sheet.hidden_formula_cells) w.locations.push_back(plain_a1(p));
            out.push_back(std::move(w));
        }
    }
    return out;
}

}  // namespace hcaudit
