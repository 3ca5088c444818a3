#include <hcaudit/detection.hpp>
#include <hcaudit/json_io.hpp>

#include "support/workbook_gen.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace hcaudit;

namespace {

Cell formula_cell(const char* a1, const std::string& f, std::optional<Scalar> v = std::nullopt) {
    Cell c;
    c.address = make_address(parse_address(a1).pos());
    c.formula_text = f;
    c.cached_value = std::move(v);
    return c;
}

Cell value_cell(const char* a1, Scalar v) {
    Cell c;
    c.address = make_address(parse_address(a1).pos());
    c.cached_value = std::move(v);
    return c;
}

std::vector<double> values(const Finding& f) {
    std::vector<double> out;
    for (const auto& c : f.constants) out.push_back(c.value);
    return out;
}

using CellKey = std::pair<std::string, GridPos>;

std::set<CellKey> constant_cells(const AnalysisReport& r) {
    std::set<CellKey> out;
    for (const auto& f : r.findings)
        if (carries_constants(f.kind)) out.insert({f.sheet, f.address.pos()});
    return out;
}

std::size_t count_kind(const AnalysisReport& r, FindingKind k) {
    std::size_t n = 0;
    for (const auto& f : r.findings) n += f.kind == k;
    return n;
}

void expect_counts_consistent(const Workbook& wb, const AnalysisReport& r) {
    std::size_t hard = 0, numeric = 0, formulas = 0;
    for (const auto& f : r.findings) {
        if (carries_constants(f.kind)) hard += f.constants.size();
        if (is_numeric_entry(f.kind)) ++numeric;
    }
    for (const auto& s : wb.sheets)
        for (const auto& [p, c] : s.cells) formulas += c.formula_text.has_value();
    EXPECT_EQ(r.hard_coding_count, hard);
    EXPECT_EQ(r.numeric_value_count, numeric);
    EXPECT_EQ(r.formula_count, formulas);
    EXPECT_EQ(r.worksheet_count, wb.sheets.size());
}

}  // namespace

TEST(AnalyzeCell, SpecExamples) {
    DetectionConfig cfg;
    auto f = analyze_cell(formula_cell("D16", "=IF(C17*Data!$C$30>200, Data!$C$30*C17, 200)", 382.0), "C", cfg);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].kind, FindingKind::HardCodedConstant);
    EXPECT_EQ(values(f[0]), (std::vector<double>{200, 200}));
    EXPECT_EQ(f[0].sheet, "C");
    EXPECT_EQ(absolute_a1(f[0].address.pos()), "$D$16");

    auto only = analyze_cell(formula_cell("A14", "=9732311", 9732311.0), "ExecSummary", cfg);
    ASSERT_EQ(only.size(), 1u);
    EXPECT_EQ(only[0].kind, FindingKind::ConstantOnlyFormula);
    EXPECT_EQ(values(only[0]), (std::vector<double>{9732311}));

    DetectionConfig regions;
    regions.data_regions = {parse_data_region("Data")};
    auto input = analyze_cell(value_cell("H9", 0.08), "Data", regions);
    ASSERT_EQ(input.size(), 1u);
    EXPECT_EQ(input[0].kind, FindingKind::ExpectedInputValue);
    EXPECT_TRUE(input[0].constants.empty());
    EXPECT_FALSE(input[0].formula_text);

    DetectionConfig ignore_one;
    ignore_one.ignore_constants = {1};
    EXPECT_TRUE(analyze_cell(formula_cell("J7", "=I7*(1-Data!$C$24)"), "F", ignore_one).empty());
}

TEST(AnalyzeCell, OtherKinds) {
    DetectionConfig cfg;
    auto direct = analyze_cell(value_cell("B5", 175.0), "Model", cfg);
    ASSERT_EQ(direct.size(), 1u);
    EXPECT_EQ(direct[0].kind, FindingKind::DirectNumericEntry);

    EXPECT_TRUE(analyze_cell(value_cell("B6", std::string("label 12")), "Model", cfg).empty());
    EXPECT_TRUE(analyze_cell(value_cell("B7", true), "Model", cfg).empty());
    EXPECT_TRUE(analyze_cell(value_cell("B8", ErrorValue{"#N/A"}), "Model", cfg).empty());
    EXPECT_TRUE(analyze_cell(formula_cell("B9", "=A1+A2", 3.0), "Model", cfg).empty());

    auto bad = analyze_cell(formula_cell("B10", "=\"oops"), "Model", cfg);
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_EQ(bad[0].kind, FindingKind::Unparseable);
    EXPECT_NE(bad[0].detail.find("unterminated"), std::string::npos);
    EXPECT_TRUE(bad[0].constants.empty());

    DetectionConfig heuristic;
    heuristic.mode = DetectionMode::Heuristic;
    auto bad_h = analyze_cell(formula_cell("B10", "=\"oops"), "Model", heuristic);
    ASSERT_EQ(bad_h.size(), 1u);
    EXPECT_EQ(bad_h[0].kind, FindingKind::Unparseable);
}

TEST(AnalyzeCell, ConstantOnlyShapes) {
    DetectionConfig cfg;
    auto kind = [&](const std::string& f) { return analyze_cell(formula_cell("A1", f), "S", cfg).at(0).kind; };
    EXPECT_EQ(kind("=-5"), FindingKind::ConstantOnlyFormula);
    EXPECT_EQ(kind("= 7.5% "), FindingKind::ConstantOnlyFormula);
    EXPECT_EQ(kind("=5+1"), FindingKind::HardCodedConstant);
    EXPECT_EQ(kind("=ABS(5)"), FindingKind::HardCodedConstant);
    EXPECT_EQ(kind("=A1*5"), FindingKind::HardCodedConstant);
    EXPECT_EQ(kind("={5}"), FindingKind::HardCodedConstant);
}

TEST(AnalyzeCell, IgnoreListAndCap) {
    DetectionConfig cfg;
    cfg.ignore_constants = {0};
    auto f = analyze_cell(formula_cell("G7", "=IF(F7<0, F7*Data!$E$39/12, 0)"), "I", cfg);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(values(f[0]), (std::vector<double>{12}));

    cfg.ignore_constants = {9732311};
    EXPECT_TRUE(analyze_cell(formula_cell("A14", "=9732311"), "ExecSummary", cfg).empty());

    DetectionConfig capped;
    capped.max_reported_constants_per_cell = 2;
    auto c = analyze_cell(formula_cell("D17", "=IF(C6*(Data!H9+1)*Data!C30>200, C6*(Data!H9+1)*Data!C30, 200)"),
                          "C", capped);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(values(c[0]), (std::vector<double>{1, 200}));
    EXPECT_EQ(c[0].detail, "2 further constant(s) not reported");
}

TEST(AnalyzeCell, PercentValuesCompareNumerically) {
    DetectionConfig cfg;
    cfg.ignore_constants = {0.075};
    EXPECT_TRUE(analyze_cell(formula_cell("A1", "=B1*7.5%"), "S", cfg).empty());
    EXPECT_TRUE(analyze_cell(formula_cell("A1", "=B1*0.075"), "S", cfg).empty());
}

TEST(AnalyzeCell, HeuristicMode) {
    DetectionConfig cfg;
    cfg.mode = DetectionMode::Heuristic;
    auto f = analyze_cell(formula_cell("G7", "=IF(F7<0, F7*Data!$E$39/12, 0)"), "I", cfg);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(values(f[0]), (std::vector<double>{0, 12}));
    // No operator precedes the literal: invisible to the character scan.
    EXPECT_TRUE(analyze_cell(formula_cell("A1", "=SUM( 5, A2)"), "S", cfg).empty());
    auto only = analyze_cell(formula_cell("A14", "=9732311"), "S", cfg);
    ASSERT_EQ(only.size(), 1u);
    EXPECT_EQ(only[0].kind, FindingKind::ConstantOnlyFormula);

    cfg.heuristic_operators = OperatorSet::strict();
    auto strict = analyze_cell(formula_cell("A1", "=ROUND(A1,2)"), "S", cfg);
    EXPECT_TRUE(strict.empty());
}

TEST(AnalyzeWorkbook, RegionalModelFixture) {
    auto wb = load_json(HCAUDIT_TEST_DATA_DIR "/regional_model.json");
    auto cfg = load_config(HCAUDIT_TEST_DATA_DIR "/regional_config.json");
    auto r = analyze_workbook(wb, cfg);
    EXPECT_EQ(r.worksheet_count, 11u);
    EXPECT_EQ(r.formula_count, 9u);
    EXPECT_EQ(r.numeric_value_count, 4u);
    EXPECT_EQ(r.hard_coding_count, 18u);
    ASSERT_EQ(r.findings.size(), 13u);
    EXPECT_EQ(r.findings.front().sheet, "C");
    EXPECT_EQ(absolute_a1(r.findings.front().address.pos()), "$D$16");
    EXPECT_EQ(r.findings[9].kind, FindingKind::ExpectedInputValue);
    EXPECT_EQ(absolute_a1(r.findings[9].address.pos()), "$C$5");
    EXPECT_EQ(r.workbook_name, "305161814RowNumber7.xls");
    expect_counts_consistent(wb, r);
}

TEST(AnalyzeWorkbook, EmptyAndClean) {
    auto empty = analyze_workbook(Workbook{.name = "e"}, {});
    EXPECT_EQ(empty.formula_count + empty.hard_coding_count + empty.numeric_value_count, 0u);
    EXPECT_TRUE(empty.findings.empty());
    EXPECT_EQ(empty.workbook_location, ".");

    Workbook wb{.name = "clean"};
    Sheet s{.name = "Data"};
    s.cells.emplace(parse_address("A1").pos(), value_cell("A1", 2.0));
    s.cells.emplace(parse_address("A2").pos(), value_cell("A2", 3.0));
    s.cells.emplace(parse_address("A3").pos(), formula_cell("A3", "=A1+A2", 5.0));
    wb.sheets.push_back(s);
    DetectionConfig cfg;
    cfg.data_regions = {parse_data_region("Data")};
    auto r = analyze_workbook(wb, cfg);
    EXPECT_EQ(r.formula_count, 1u);
    EXPECT_EQ(r.hard_coding_count, 0u);
    EXPECT_EQ(r.numeric_value_count, 2u);
}

TEST(AnalyzeWorkbook, HiddenSheetsAreAnalyzedAndWarned) {
    Workbook wb{.name = "h"};
    Sheet s{.name = "Secret", .visibility = Visibility::VeryHidden};
    s.cells.emplace(parse_address("B2").pos(), formula_cell("B2", "=A1*1.1"));
    wb.sheets.push_back(s);
    auto r = analyze_workbook(wb, {});
    EXPECT_EQ(r.hard_coding_count, 1u);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_EQ(r.warnings[0].kind, WarningKind::VeryHiddenSheet);
}

TEST(AnalyzeWorkbook, RefStyleFollowsWorkbookUnlessOverridden) {
    Workbook wb{.name = "r", .ref_style = RefStyle::R1C1};
    Sheet s{.name = "S"};
    s.cells.emplace(GridPos{1, 1}, formula_cell("A1", "=R[-1]C*2"));
    wb.sheets.push_back(s);
    auto r = analyze_workbook(wb, {});
    ASSERT_EQ(r.findings.size(), 1u);
    EXPECT_EQ(values(r.findings[0]), (std::vector<double>{2}));

    // "1:3" is a whole-row range in A1 but two literals around ":" in R1C1.
    Workbook rows{.name = "rows"};
    Sheet t{.name = "S"};
    t.cells.emplace(GridPos{1, 1}, formula_cell("A1", "=SUM(1:3)"));
    rows.sheets.push_back(t);
    EXPECT_TRUE(analyze_workbook(rows, {}).findings.empty());
    DetectionConfig r1c1;
    r1c1.ref_style = RefStyle::R1C1;
    EXPECT_EQ(analyze_workbook(rows, r1c1).hard_coding_count, 2u);
}

TEST(AnalyzeWorkbook, FindingOrderIsSheetRowColumn) {
    hcaudit::testing::WorkbookGenOptions opt;
    auto g = hcaudit::testing::generate_workbook(3, opt);
    auto r = analyze_workbook(g.workbook, {});
    std::map<std::string, std::size_t> sheet_index;
    for (std::size_t i = 0; i < g.workbook.sheets.size(); ++i) sheet_index[g.workbook.sheets[i].name] = i;
    for (std::size_t i = 1; i < r.findings.size(); ++i) {
        auto a = std::make_pair(sheet_index[r.findings[i - 1].sheet], r.findings[i - 1].address.pos());
        auto b = std::make_pair(sheet_index[r.findings[i].sheet], r.findings[i].address.pos());
        ASSERT_LT(a, b);
    }
}

TEST(Histogram, SpecExamples) {
    AnalysisReport r;
    Finding f;
    f.constants = {{12, {}}, {12, {}}, {0, {}}};
    r.findings.push_back(f);
    std::vector<AnalysisReport> one{r};
    EXPECT_EQ(constant_histogram(one), (Histogram{{0, 1}, {12, 2}}));

    EXPECT_TRUE(constant_histogram(std::vector<AnalysisReport>{}).empty());
    EXPECT_TRUE(constant_histogram(std::vector<AnalysisReport>{AnalysisReport{}}).empty());

    // 0 x3, 1 x2, 1000000 x1 spread over cells, workbooks and kinds.
    Workbook a{.name = "a"}, b{.name = "b"};
    Sheet sa{.name = "S"}, sb{.name = "S"};
    sa.cells.emplace(GridPos{1, 1}, formula_cell("A1", "=IF(A2>0,1,0)"));
    sa.cells.emplace(GridPos{2, 1}, formula_cell("A2", "=1000000"));
    sb.cells.emplace(GridPos{1, 1}, formula_cell("A1", "=MAX(0,B1-1)"));
    sb.cells.emplace(GridPos{1, 2}, value_cell("B1", 7.0));
    a.sheets.push_back(sa);
    b.sheets.push_back(sb);
    std::vector<AnalysisReport> reports{analyze_workbook(a, {}), analyze_workbook(b, {})};
    EXPECT_EQ(constant_histogram(reports), (Histogram{{0, 3}, {1, 2}, {1000000, 1}}));
}

TEST(Histogram, NumericAggregation) {
    Sheet s{.name = "S"};
    s.cells.emplace(GridPos{1, 1}, formula_cell("A1", "=B1*0.01+.01+1%+1E-2"));
    Workbook wb{.name = "w"};
    wb.sheets.push_back(s);
    std::vector<AnalysisReport> r{analyze_workbook(wb, {})};
    EXPECT_EQ(constant_histogram(r), (Histogram{{0.01, 4}}));
}

// ---- properties over random workbooks ----

TEST(DetectionProperties, CountsMonotonicityContainmentDeterminism) {
    std::mt19937_64 rng(42);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        hcaudit::testing::WorkbookGenOptions opt;
        opt.formula_options = hcaudit::testing::GenOptions::full(seed % 5 == 0 ? RefStyle::R1C1 : RefStyle::A1);
        auto g = hcaudit::testing::generate_workbook(seed, opt);
        auto cfg = hcaudit::testing::random_config(rng, g.workbook);
        auto base = analyze_workbook(g.workbook, cfg);
        expect_counts_consistent(g.workbook, base);
        ASSERT_EQ(analyze_workbook(g.workbook, cfg), base);

        // Bigger ignore list: hard codings never increase.
        auto more_ignored = cfg;
        more_ignored.ignore_constants.insert(static_cast<double>(rng() % 20));
        EXPECT_LE(analyze_workbook(g.workbook, more_ignored).hard_coding_count, base.hard_coding_count);

        // Bigger data regions: direct entries never increase, formula findings unchanged.
        auto more_regions = cfg;
        more_regions.data_regions.push_back(parse_data_region(g.workbook.sheets[rng() % g.workbook.sheets.size()].name));
        auto widened = analyze_workbook(g.workbook, more_regions);
        EXPECT_LE(count_kind(widened, FindingKind::DirectNumericEntry), count_kind(base, FindingKind::DirectNumericEntry));
        EXPECT_EQ(widened.hard_coding_count, base.hard_coding_count);
        EXPECT_EQ(constant_cells(widened), constant_cells(base));

        // Heuristic-flagged cells are a subset of lexically flagged cells.
        auto lex = cfg, heu = cfg;
        lex.mode = DetectionMode::Lexical;
        heu.mode = DetectionMode::Heuristic;
        heu.heuristic_operators = OperatorSet::defaults();
        auto lex_cells = constant_cells(analyze_workbook(g.workbook, lex));
        for (const auto& key : constant_cells(analyze_workbook(g.workbook, heu)))
            EXPECT_TRUE(lex_cells.count(key)) << key.first << "!" << plain_a1(key.second);
    }
}
