#pragma once

// Random workbooks for property tests, built from generated formulas plus
// plain value cells. `planted` tallies every numeric literal written into a
// formula so histogram totals can be checked against it.

#include <hcaudit/config.hpp>
#include <hcaudit/workbook.hpp>

#include "support/formula_gen.hpp"

#include <map>
#include <random>
#include <string>

namespace hcaudit::testing {

struct WorkbookGenOptions {
    std::size_t sheets = 3;
    std::size_t formulas_per_sheet = 40;
    std::size_t values_per_sheet = 15;
    GenOptions formula_options = GenOptions::full();
    bool metadata = true;  // visibility, hidden rows/cols, merges
};

struct GeneratedWorkbook {
    Workbook workbook;
    std::map<double, std::size_t> planted;
    std::size_t formula_cells = 0;
};

inline GeneratedWorkbook generate_workbook(std::uint64_t seed, const WorkbookGenOptions& opt) {
    std::mt19937_64 rng(seed);
    FormulaGenerator formulas(seed ^ 0x9e3779b97f4a7c15ULL, opt.formula_options);
    auto pick = [&](std::uint64_t n) { return static_cast<std::uint32_t>(rng() % n); };
    static const char* names[] = {"Data", "Model", "Prod 2007", "Summary", "cp", "Inputs", "Calc"};

    GeneratedWorkbook out;
    Workbook& wb = out.workbook;
    wb.name = "generated-" + std::to_string(seed) + ".json";
    wb.ref_style = opt.formula_options.style;
    for (std::size_t s = 0; s < opt.sheets; ++s) {
        Sheet sheet;
        sheet.name = std::string(names[s % 7]) + (s >= 7 ? " " + std::to_string(s) : "");
        if (opt.metadata) {
            auto v = pick(10);
            sheet.visibility = v == 0 ? Visibility::Hidden : v == 1 ? Visibility::VeryHidden : Visibility::Visible;
            if (pick(4) == 0) sheet.hidden_rows.insert(1 + pick(60));
            if (pick(4) == 0) sheet.hidden_cols.insert(1 + pick(12));
        }
        auto free_pos = [&]() {
            for (;;) {
                GridPos p{1 + pick(200), 1 + pick(26)};
                if (!sheet.cells.count(p)) return p;
            }
        };
        for (std::size_t i = 0; i < opt.formulas_per_sheet; ++i) {
            GridPos p = free_pos();
            auto g = formulas.next();
            Cell c;
            c.address = make_address(p);
            c.formula_text = g.text;
            if (pick(3)) c.cached_value = static_cast<double>(pick(1000)) / 4;
            sheet.cells.emplace(p, std::move(c));
            for (double v : g.planted) ++out.planted[v];
            ++out.formula_cells;
        }
        for (std::size_t i = 0; i < opt.values_per_sheet; ++i) {
            GridPos p = free_pos();
            Cell c;
            c.address = make_address(p);
            switch (pick(6)) {
                case 0: c.cached_value = std::string("label ") + std::to_string(pick(99)); break;
                case 1: c.cached_value = pick(2) == 0; break;
                case 2: c.cached_value = ErrorValue{"#N/A"}; break;
                default: c.cached_value = static_cast<double>(pick(100000)) / 100; break;
            }
            sheet.cells.emplace(p, std::move(c));
        }
        if (opt.metadata && pick(3) == 0) {
            // Merge over a free 2x2 block so no content is dropped.
            for (int attempt = 0; attempt < 50; ++attempt) {
                GridPos a{1 + pick(200), 1 + pick(25)};
                GridPos b{a.row + 1, a.column + 1};
                bool clear = !sheet.cells.count({a.row, b.column}) && !sheet.cells.count({b.row, a.column}) &&
                             !sheet.cells.count(b);
                if (!clear) continue;
                sheet.merged_regions.push_back(make_rectangle(a, b));
                break;
            }
            apply_merge_policy(sheet);
        }
        wb.sheets.push_back(std::move(sheet));
    }
    return out;
}

/// Random detection config over the sheets of `wb`.
inline DetectionConfig random_config(std::mt19937_64& rng, const Workbook& wb) {
    DetectionConfig cfg;
    static const double candidates[] = {0, 1, 2, 12, 100, 200, 0.5, 0.075, 1000000};
    for (double v : candidates)
        if (rng() % 4 == 0) cfg.ignore_constants.insert(v);
    for (const auto& s : wb.sheets) {
        if (rng() % 3 != 0) continue;
        DataRegion r;
        r.sheet_pattern = s.name;
        if (rng() % 2) {
            std::uint32_t r0 = 1 + static_cast<std::uint32_t>(rng() % 150), c0 = 1 + static_cast<std::uint32_t>(rng() % 20);
            r.area = make_rectangle({r0, c0}, {r0 + 40, c0 + 5});
        }
        cfg.data_regions.push_back(r);
    }
    cfg.mode = rng() % 3 == 0 ? DetectionMode::Heuristic : DetectionMode::Lexical;
    if (rng() % 4 == 0) cfg.max_reported_constants_per_cell = 1 + rng() % 3;
    return cfg;
}

}  // namespace hcaudit::testing
