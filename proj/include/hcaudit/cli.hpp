#pragma once

// Batch front end: expand input patterns, load and analyze every workbook,
// write one detail report per workbook plus a batch summary and constant
// histogram per format. Exit codes: 0 clean (hard codings <= threshold),
// 1 threshold exceeded, 2 load failure or invalid invocation.

#include <hcaudit/config.hpp>
#include <hcaudit/detection.hpp>
#include <hcaudit/json_io.hpp>
#include <hcaudit/reporting.hpp>
#include <hcaudit/xlsx.hpp>

#include <CLI11.hpp>

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace hcaudit::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitThreshold = 1;
inline constexpr int kExitError = 2;

struct RunOptions {
    std::vector<std::string> inputs;
    std::string output_dir = "hcaudit-reports";
    std::vector<Format> formats = {Format::Text};
    std::optional<std::string> config_path;
    /// Exit 1 when the total hard-coding count exceeds this.
    std::size_t fail_threshold = 0;
    std::optional<DetectionMode> mode;
    std::optional<std::set<double>> ignore_constants;
    std::vector<std::string> data_regions;
    std::optional<RefStyle> ref_style;
    std::optional<std::size_t> max_constants;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t jobs = 0;
    TextOptions text;
};

enum class InputKind { Xlsx, Json };

inline std::optional<InputKind> input_kind(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = detail::ascii_upper(c);
    if (ext == ".XLSX" || ext == ".XLSM") return InputKind::Xlsx;
    if (ext == ".JSON") return InputKind::Json;
    return std::nullopt;
}

/// Glob-expands every pattern; returns sorted, de-duplicated regular files.
inline std::vector<std::string> expand_inputs(const std::vector<std::string>& patterns) {
    std::set<std::string> found;
    for (const auto& pattern : patterns) {
        glob_t g{};
        if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) {
                std::error_code ec;
                if (std::filesystem::is_regular_file(g.gl_pathv[i], ec)) found.insert(g.gl_pathv[i]);
            }
        }
        globfree(&g);
    }
    return {found.begin(), found.end()};
}

inline Workbook load_workbook(const std::string& path) {
    auto kind = input_kind(path);
    if (kind == InputKind::Xlsx) return load_xlsx(path);
    return load_json(path);
}

/// Config document (if any) with command-line overrides applied.
inline DetectionConfig effective_config(const RunOptions& opts) {
    DetectionConfig cfg = opts.config_path ? load_config(*opts.config_path) : DetectionConfig{};
    if (opts.mode) cfg.mode = *opts.mode;
    if (opts.ignore_constants) cfg.ignore_constants = *opts.ignore_constants;
    if (!opts.data_regions.empty()) {
        cfg.data_regions.clear();
        for (const auto& r : opts.data_regions) cfg.data_regions.push_back(parse_data_region(r));
    }
    if (opts.ref_style) cfg.ref_style = *opts.ref_style;
    if (opts.max_constants) cfg.max_reported_constants_per_cell = *opts.max_constants;
    return cfg;
}

using LoadOutcome = std::variant<AnalysisReport, std::string>;

inline std::vector<LoadOutcome> analyze_all(const std::vector<std::string>& paths,
                                            const DetectionConfig& cfg, std::size_t jobs) {
    std::vector<LoadOutcome> results(paths.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < paths.size(); i = next++) {
            try {
                results[i] = analyze_workbook(load_workbook(paths[i]), cfg);
            } catch (const std::exception& e) {
                results[i] = std::string(e.what());
            }
        }
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(paths.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    return results;
}

inline int run(const RunOptions& opts, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    if (opts.inputs.empty() || opts.formats.empty()) {
        err << "hcaudit: error: at least one input pattern and one format are required\n";
        return kExitError;
    }
    DetectionConfig cfg;
    try {
        cfg = effective_config(opts);
    } catch (const std::exception& e) {
        err << "hcaudit: error: invalid configuration: " << e.what() << "\n";
        return kExitError;
    }

    std::vector<std::string> paths;
    for (const auto& p : expand_inputs(opts.inputs)) {
        if (input_kind(p)) paths.push_back(p);
        else err << "hcaudit: skipping '" << p << "': not a workbook (.xlsx, .xlsm, .json)\n";
    }
    if (paths.empty()) {
        err << "hcaudit: error: no inputs matched\n";
        return kExitError;
    }

    auto results = analyze_all(paths, cfg, opts.jobs);

    std::error_code ec;
    fs::create_directories(opts.output_dir, ec);
    if (ec) {
        err << "hcaudit: error: cannot create output directory '" << opts.output_dir
            << "': " << ec.message() << "\n";
        return kExitError;
    }

    bool load_failed = false;
    std::size_t total_hard = 0, total_numeric = 0;
    std::vector<BatchSummaryRow> rows;
    std::vector<AnalysisReport> reports;
    std::map<std::string, int> stem_uses;
    try {
        for (std::size_t i = 0; i < paths.size(); ++i) {
            fs::path path(paths[i]);
            if (auto* message = std::get_if<std::string>(&results[i])) {
                load_failed = true;
                err << "hcaudit: error: " << paths[i] << ": " << *message << "\n";
                BatchSummaryRow row;
                row.index = i + 1;
                row.workbook_name = path.filename().string();
                row.workbook_location = path.parent_path().empty() ? "." : path.parent_path().string();
                row.error = *message;
                rows.push_back(std::move(row));
                continue;
            }
            const auto& report = std::get<AnalysisReport>(results[i]);
            std::string stem = detail::file_stem_for(path.stem().string());
            int use = ++stem_uses[stem];
            if (use > 1) stem += "-" + std::to_string(use);
            for (Format f : opts.formats) {
                auto doc = render_detail(report, f, opts.text);
                write_file((fs::path(opts.output_dir) / (stem + ".detail." + std::string(extension(f)))).string(),
                           doc.body);
            }
            total_hard += report.hard_coding_count;
            total_numeric += report.numeric_value_count;
            rows.push_back(make_summary_row(report, i + 1));
            reports.push_back(report);
        }
        auto histogram = constant_histogram(reports);
        for (Format f : opts.formats) {
            auto summary = render_batch_summary(rows, f);
            write_file((fs::path(opts.output_dir) / summary.suggested_filename).string(), summary.body);
            auto hist = render_histogram(histogram, f);
            write_file((fs::path(opts.output_dir) / hist.suggested_filename).string(), hist.body);
        }
    } catch (const std::exception& e) {
        err << "hcaudit: error: " << e.what() << "\n";
        return kExitError;
    }

    out << "hcaudit: " << reports.size() << " of " << paths.size() << " workbook(s) analyzed; "
        << total_hard << " hard coding(s), " << total_numeric << " numeric value(s); reports in "
        << opts.output_dir << "\n";
    if (load_failed) return kExitError;
    return total_hard > opts.fail_threshold ? kExitThreshold : kExitClean;
}

/// Parses argv into `opts`. Returns an exit code when the program should stop
/// (help requested or bad arguments).
inline std::optional<int> parse_command_line(int argc, const char* const* argv, RunOptions& opts,
                                             std::ostream& out = std::cout,
                                             std::ostream& err = std::cerr) {
    CLI::App app{"Detect hard-coded constants in spreadsheet formulas and stray numeric entries."};
    app.name("hcaudit");
    std::vector<std::string> formats;
    std::string mode, ref_style, ignore;
    std::optional<std::size_t> max_constants;
    app.add_option("inputs", opts.inputs, "Workbook paths or glob patterns (.xlsx, .xlsm, .json)")
        ->required();
    app.add_option("--out", opts.output_dir, "Output directory for reports")->capture_default_str();
    app.add_option("--format", formats, "Report format: text, csv or json (repeatable)")
        ->check(CLI::IsMember({"text", "csv", "json"}, CLI::ignore_case));
    app.add_option("--config", opts.config_path, "Detection config JSON document");
    app.add_option("--mode", mode, "Detector: lexical or heuristic")
        ->check(CLI::IsMember({"lexical", "heuristic"}, CLI::ignore_case));
    app.add_option("--ignore-constants", ignore, "Comma-separated constants to dismiss, e.g. 0,1");
    app.add_option("--data-region", opts.data_regions, "Expected input area SHEET[!RANGE] (repeatable)");
    app.add_option("--fail-threshold", opts.fail_threshold, "Exit 1 when total hard codings exceed N")
        ->capture_default_str();
    app.add_option("--ref-style", ref_style, "Formula reference style: a1 or r1c1")
        ->check(CLI::IsMember({"a1", "r1c1"}, CLI::ignore_case));
    app.add_option("--max-constants", max_constants, "Report at most N constants per cell")
        ->check(CLI::PositiveNumber);
    app.add_option("--jobs", opts.jobs, "Worker threads (0 = number of cores)");
    app.add_option("--text-columns", opts.text.constant_columns,
                   "Constant columns shown in text detail reports")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitClean;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitError;
    }
    if (!formats.empty()) {
        opts.formats.clear();
        for (const auto& f : formats) {
            Format parsed = *format_from_string(f);
            if (std::find(opts.formats.begin(), opts.formats.end(), parsed) == opts.formats.end())
                opts.formats.push_back(parsed);
        }
    }
    if (!mode.empty()) opts.mode = detection_mode_from_string(mode);
    if (!ref_style.empty()) opts.ref_style = detail::iequals(ref_style, "r1c1") ? RefStyle::R1C1 : RefStyle::A1;
    if (max_constants) opts.max_constants = *max_constants;
    if (!ignore.empty()) {
        std::set<double> values;
        std::string_view rest = ignore;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            std::string_view item = rest.substr(0, comma);
            while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
            while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
            auto v = parse_number(item);
            if (!v) {
                err << "hcaudit: error: --ignore-constants: '" << item << "' is not a number\n";
                return kExitError;
            }
            values.insert(*v);
            rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
        }
        opts.ignore_constants = std::move(values);
    }
    return std::nullopt;
}

}  // namespace hcaudit::cli
