#pragma once

// Report rendering: per-workbook detail, batch summary and constant
// histogram, each as fixed-width text, CSV or JSON. Bodies depend only on
// their inputs, so identical inputs give byte-identical documents.

#include <hcaudit/detection.hpp>
#include <hcaudit/errors.hpp>
#include <hcaudit/json_io.hpp>
#include <hcaudit/number_format.hpp>
#include <hcaudit/workbook.hpp>

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hcaudit {

enum class Format { Text, Csv, Json };

inline std::string_view to_string(Format f) {
    switch (f) {
        case Format::Text: return "text";
        case Format::Csv: return "csv";
        case Format::Json: return "json";
    }
    return "text";
}

inline std::string_view extension(Format f) {
    switch (f) {
        case Format::Text: return "txt";
        case Format::Csv: return "csv";
        case Format::Json: return "json";
    }
    return "txt";
}

inline std::optional<Format> format_from_string(std::string_view s) {
    if (detail::iequals(s, "text") || detail::iequals(s, "txt")) return Format::Text;
    if (detail::iequals(s, "csv")) return Format::Csv;
    if (detail::iequals(s, "json")) return Format::Json;
    return std::nullopt;
}

struct RenderedDocument {
    Format format = Format::Text;
    std::string body;
    std::string suggested_filename;
};

struct BatchSummaryRow {
    std::size_t index = 0;
    std::string workbook_name;
    std::string workbook_location;
    std::size_t worksheet_count = 0;
    std::size_t formula_count = 0;
    std::size_t hard_coding_count = 0;
    std::size_t numeric_value_count = 0;
    /// Set when the workbook could not be loaded; counts are then zero.
    std::optional<std::string> error;

    friend bool operator==(const BatchSummaryRow&, const BatchSummaryRow&) = default;
};

inline BatchSummaryRow make_summary_row(const AnalysisReport& r, std::size_t index) {
    return {index,         r.workbook_name,     r.workbook_location,   r.worksheet_count,
            r.formula_count, r.hard_coding_count, r.numeric_value_count, std::nullopt};
}

struct TextOptions {
    /// Constant columns shown per detail row; the rest collapse into "+N".
    std::size_t constant_columns = 4;
};

namespace detail {

inline constexpr int kSchemaVersion = 1;

inline std::size_t display_width(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// Fixed-width table; columns separated by two spaces, trailing blanks trimmed.
inline std::string text_table(const std::vector<std::string>& header,
                              const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    auto measure = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], display_width(row[i]));
    };
    measure(header);
    for (const auto& r : rows) measure(r);
    std::string out;
    auto line = [&](const std::vector<std::string>& row) {
        std::string l;
        for (std::size_t i = 0; i < width.size(); ++i) {
            std::string cell = i < row.size() ? row[i] : std::string();
            l += cell;
            if (i + 1 < width.size()) l += std::string(width[i] - display_width(cell) + 2, ' ');
        }
        while (!l.empty() && l.back() == ' ') l.pop_back();
        out += l + "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

inline std::string csv_field(std::string_view s) {
    bool quote = s.find_first_of(",\"\r\n") != std::string_view::npos ||
                 (!s.empty() && (s.front() == ' ' || s.back() == ' '));
    if (!quote) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_field(fields[i]);
    }
    return out + "\n";
}

inline std::string join_constants(std::span<const Constant> cs) {
    std::string out;
    for (const auto& c : cs) {
        if (!out.empty()) out.push_back(' ');
        out += format_number(c.value);
    }
    return out;
}

inline std::string file_stem_for(std::string_view name) {
    std::string out;
    for (char c : name) {
        bool ok = is_ascii_alpha(c) || is_digit(c) || c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("workbook") : out;
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& ptr) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(child(ptr, key), "missing key");
    return j.at(key);
}

inline std::size_t expect_count(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw SchemaError(ptr, "expected a non-negative integer");
    return j.get<std::size_t>();
}

inline void expect_document(const nlohmann::json& doc, std::string_view kind) {
    if (!doc.is_object()) throw SchemaError("", "expected an object");
    if (require(doc, "schema_version", "") != kSchemaVersion)
        throw SchemaError("/schema_version", "unsupported schema version");
    if (expect_string(require(doc, "document", ""), "/document") != kind)
        throw SchemaError("/document", "expected a " + std::string(kind) + " document");
}

inline nlohmann::json parse_document(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Detail report

inline RenderedDocument render_detail(const AnalysisReport& report, Format format,
                                      const TextOptions& options = {}) {
    using namespace detail;
    RenderedDocument doc{format, {}, file_stem_for(report.workbook_name) + ".detail." +
                                         std::string(extension(format))};
    switch (format) {
        case Format::Text: {
            std::string& out = doc.body;
            out += "Hard-coded constant analysis of:\n";
            out += text_table({"Workbook Name", "Workbook Location", "Wks", "F'm", "Hard", "Num'c"},
                              {{report.workbook_name, report.workbook_location,
                                std::to_string(report.worksheet_count),
                                std::to_string(report.formula_count),
                                std::to_string(report.hard_coding_count),
                                std::to_string(report.numeric_value_count)}});
            out += "\nDetails of identified hard codings\n";
            std::size_t cap = std::max<std::size_t>(options.constant_columns, 1);
            bool overflow = false, notes = false;
            for (const auto& f : report.findings) {
                overflow = overflow || f.constants.size() > cap;
                notes = notes || !f.detail.empty();
            }
            std::vector<std::string> header = {"No.", "Kind", "Worksheet", "Cell", "Cell Formula",
                                               "Cell Value"};
            for (std::size_t i = 1; i <= cap; ++i) header.push_back("#" + std::to_string(i));
            if (overflow) header.push_back("More");
            if (notes) header.push_back("Note");
            std::vector<std::vector<std::string>> rows;
            for (std::size_t n = 0; n < report.findings.size(); ++n) {
                const auto& f = report.findings[n];
                std::vector<std::string> row = {std::to_string(n + 1), std::string(to_string(f.kind)),
                                                f.sheet, absolute_a1(f.address.pos()),
                                                f.formula_text.value_or(""),
                                                f.cached_value ? to_display(*f.cached_value) : ""};
                for (std::size_t i = 0; i < cap; ++i)
                    row.push_back(i < f.constants.size() ? format_number(f.constants[i].value) : "");
                if (overflow)
                    row.push_back(f.constants.size() > cap
                                      ? "+" + std::to_string(f.constants.size() - cap)
                                      : "");
                if (notes) row.push_back(f.detail);
                rows.push_back(std::move(row));
            }
            if (rows.empty()) rows.push_back({"-", "(no findings)"});
            out += text_table(header, rows);
            if (!report.warnings.empty()) {
                out += "\nWarnings\n";
                for (const auto& w : report.warnings) {
                    out += "- " + std::string(to_string(w.kind)) + ": " + describe(w);
                    if (!w.locations.empty()) {
                        out += " [";
                        for (std::size_t i = 0; i < w.locations.size(); ++i)
                            out += (i ? " " : "") + w.locations[i];
                        out += "]";
                    }
                    out += "\n";
                }
            }
            break;
        }
        case Format::Csv: {
            std::vector<std::string> head = {report.workbook_name,
                                             report.workbook_location,
                                             std::to_string(report.worksheet_count),
                                             std::to_string(report.formula_count),
                                             std::to_string(report.hard_coding_count),
                                             std::to_string(report.numeric_value_count)};
            auto row = [&](std::vector<std::string> tail) {
                std::vector<std::string> fields = head;
                fields.insert(fields.end(), tail.begin(), tail.end());
                doc.body += csv_line(fields);
            };
            doc.body += csv_line({"workbook_name", "workbook_location", "worksheets", "formulas",
                                  "hard_codings", "numeric_values", "record", "no", "kind",
                                  "worksheet", "cell", "formula", "value", "constants", "detail"});
            for (std::size_t n = 0; n < report.findings.size(); ++n) {
                const auto& f = report.findings[n];
                row({"finding", std::to_string(n + 1), std::string(to_string(f.kind)), f.sheet,
                     absolute_a1(f.address.pos()), f.formula_text.value_or(""),
                     f.cached_value ? to_display(*f.cached_value) : "", join_constants(f.constants),
                     f.detail});
            }
            if (report.findings.empty()) row({"none", "", "", "", "", "", "", "", "no findings"});
            for (const auto& w : report.warnings) {
                std::string locations;
                for (const auto& l : w.locations) locations += (locations.empty() ? "" : " ") + l;
                row({"warning", "", std::string(to_string(w.kind)), w.sheet, "", "",
                     std::to_string(w.count), "", locations});
            }
            break;
        }
        case Format::Json: {
            nlohmann::ordered_json j;
            j["schema_version"] = kSchemaVersion;
            j["document"] = "detail";
            j["workbook"] = {{"name", report.workbook_name}, {"location", report.workbook_location}};
            j["counts"] = {{"worksheets", report.worksheet_count},
                           {"formulas", report.formula_count},
                           {"hard_codings", report.hard_coding_count},
                           {"numeric_values", report.numeric_value_count}};
            j["findings"] = nlohmann::ordered_json::array();
            for (std::size_t n = 0; n < report.findings.size(); ++n) {
                const auto& f = report.findings[n];
                nlohmann::ordered_json e;
                e["no"] = n + 1;
                e["kind"] = std::string(to_string(f.kind));
                e["worksheet"] = f.sheet;
                e["cell"] = absolute_a1(f.address.pos());
                e["row"] = f.address.row;
                e["column"] = f.address.column;
                if (f.formula_text) e["formula"] = *f.formula_text;
                if (f.cached_value) e["value"] = scalar_to_json(*f.cached_value);
                e["constants"] = nlohmann::ordered_json::array();
                for (const auto& c : f.constants)
                    e["constants"].push_back(
                        {{"value", c.value}, {"begin", c.span.begin}, {"end", c.span.end}});
                if (!f.detail.empty()) e["detail"] = f.detail;
                j["findings"].push_back(std::move(e));
            }
            j["warnings"] = nlohmann::ordered_json::array();
            for (const auto& w : report.warnings)
                j["warnings"].push_back({{"kind", std::string(to_string(w.kind))},
                                         {"sheet", w.sheet},
                                         {"count", w.count},
                                         {"locations", w.locations}});
            doc.body = j.dump(2) + "\n";
            break;
        }
    }
    return doc;
}

inline AnalysisReport parse_detail_json(std::string_view text) {
    using namespace detail;
    auto doc = parse_document(text);
    expect_document(doc, "detail");
    AnalysisReport r;
    const auto& wb = require(doc, "workbook", "");
    r.workbook_name = expect_string(require(wb, "name", "/workbook"), "/workbook/name");
    r.workbook_location = expect_string(require(wb, "location", "/workbook"), "/workbook/location");
    const auto& counts = require(doc, "counts", "");
    r.worksheet_count = expect_count(require(counts, "worksheets", "/counts"), "/counts/worksheets");
    r.formula_count = expect_count(require(counts, "formulas", "/counts"), "/counts/formulas");
    r.hard_coding_count = expect_count(require(counts, "hard_codings", "/counts"), "/counts/hard_codings");
    r.numeric_value_count =
        expect_count(require(counts, "numeric_values", "/counts"), "/counts/numeric_values");
    const auto& findings = expect_array(require(doc, "findings", ""), "/findings");
    for (std::size_t i = 0; i < findings.size(); ++i) {
        auto p = child(std::string("/findings"), i);
        const auto& e = findings[i];
        Finding f;
        auto kind = finding_kind_from_string(expect_string(require(e, "kind", p), child(p, "kind")));
        if (!kind) throw SchemaError(child(p, "kind"), "unknown finding kind");
        f.kind = *kind;
        f.sheet = expect_string(require(e, "worksheet", p), child(p, "worksheet"));
        f.address = make_address({expect_index(require(e, "row", p), child(p, "row")),
                                  expect_index(require(e, "column", p), child(p, "column"))});
        if (e.contains("formula")) f.formula_text = expect_string(e.at("formula"), child(p, "formula"));
        if (e.contains("value")) f.cached_value = scalar_from_json(e.at("value"), child(p, "value"));
        const auto& cs = expect_array(require(e, "constants", p), child(p, "constants"));
        for (std::size_t k = 0; k < cs.size(); ++k) {
            auto cp = child(child(p, "constants"), k);
            f.constants.push_back({expect_number(require(cs[k], "value", cp), child(cp, "value")),
                                   Span{expect_count(require(cs[k], "begin", cp), child(cp, "begin")),
                                        expect_count(require(cs[k], "end", cp), child(cp, "end"))}});
        }
        if (e.contains("detail")) f.detail = expect_string(e.at("detail"), child(p, "detail"));
        r.findings.push_back(std::move(f));
    }
    const auto& warnings = expect_array(require(doc, "warnings", ""), "/warnings");
    for (std::size_t i = 0; i < warnings.size(); ++i) {
        auto p = child(std::string("/warnings"), i);
        const auto& e = warnings[i];
        AuditWarning w;
        auto kind = warning_kind_from_string(expect_string(require(e, "kind", p), child(p, "kind")));
        if (!kind) throw SchemaError(child(p, "kind"), "unknown warning kind");
        w.kind = *kind;
        w.sheet = expect_string(require(e, "sheet", p), child(p, "sheet"));
        w.count = expect_count(require(e, "count", p), child(p, "count"));
        const auto& locs = expect_array(require(e, "locations", p), child(p, "locations"));
        for (std::size_t k = 0; k < locs.size(); ++k)
            w.locations.push_back(expect_string(locs[k], child(child(p, "locations"), k)));
        r.warnings.push_back(std::move(w));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Batch summary

inline RenderedDocument render_batch_summary(std::span<const BatchSummaryRow> rows, Format format) {
    using namespace detail;
    if (rows.empty()) throw EmptyBatch();
    RenderedDocument doc{format, {}, "summary." + std::string(extension(format))};
    bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.error.has_value(); });
    switch (format) {
        case Format::Text: {
            std::vector<std::string> header = {"",           "Workbook Name",  "Workbook Location",
                                               "# worksheets", "# formulas",   "# hard codings",
                                               "# numeric values"};
            if (any_error) header.push_back("Status");
            std::vector<std::vector<std::string>> body;
            for (const auto& r : rows) {
                std::vector<std::string> line = {"#" + std::to_string(r.index), r.workbook_name,
                                                 r.workbook_location};
                if (r.error) {
                    line.insert(line.end(), {"-", "-", "-", "-", "load failed: " + *r.error});
                } else {
                    line.insert(line.end(), {std::to_string(r.worksheet_count),
                                             std::to_string(r.formula_count),
                                             std::to_string(r.hard_coding_count),
                                             std::to_string(r.numeric_value_count)});
                    if (any_error) line.push_back("ok");
                }
                body.push_back(std::move(line));
            }
            doc.body = "Hard-coded constant analysis summary\n" + text_table(header, body);
            break;
        }
        case Format::Csv: {
            doc.body = csv_line({"index", "workbook_name", "workbook_location", "worksheets", "formulas",
                                 "hard_codings", "numeric_values", "error"});
            for (const auto& r : rows)
                doc.body += csv_line({std::to_string(r.index), r.workbook_name, r.workbook_location,
                                      std::to_string(r.worksheet_count), std::to_string(r.formula_count),
                                      std::to_string(r.hard_coding_count),
                                      std::to_string(r.numeric_value_count), r.error.value_or("")});
            break;
        }
        case Format::Json: {
            nlohmann::ordered_json j;
            j["schema_version"] = kSchemaVersion;
            j["document"] = "summary";
            j["rows"] = nlohmann::ordered_json::array();
            for (const auto& r : rows) {
                nlohmann::ordered_json e;
                e["index"] = r.index;
                e["workbook_name"] = r.workbook_name;
                e["workbook_location"] = r.workbook_location;
                e["worksheets"] = r.worksheet_count;
                e["formulas"] = r.formula_count;
                e["hard_codings"] = r.hard_coding_count;
                e["numeric_values"] = r.numeric_value_count;
                if (r.error) e["error"] = *r.error;
                j["rows"].push_back(std::move(e));
            }
            doc.body = j.dump(2) + "\n";
            break;
        }
    }
    return doc;
}

inline std::vector<BatchSummaryRow> parse_summary_json(std::string_view text) {
    using namespace detail;
    auto doc = parse_document(text);
    expect_document(doc, "summary");
    std::vector<BatchSummaryRow> rows;
    const auto& arr = expect_array(require(doc, "rows", ""), "/rows");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto p = child(std::string("/rows"), i);
        const auto& e = arr[i];
        BatchSummaryRow r;
        r.index = expect_count(require(e, "index", p), child(p, "index"));
        r.workbook_name = expect_string(require(e, "workbook_name", p), child(p, "workbook_name"));
        r.workbook_location = expect_string(require(e, "workbook_location", p), child(p, "workbook_location"));
        r.worksheet_count = expect_count(require(e, "worksheets", p), child(p, "worksheets"));
        r.formula_count = expect_count(require(e, "formulas", p), child(p, "formulas"));
        r.hard_coding_count = expect_count(require(e, "hard_codings", p), child(p, "hard_codings"));
        r.numeric_value_count = expect_count(require(e, "numeric_values", p), child(p, "numeric_values"));
        if (e.contains("error")) r.error = expect_string(e.at("error"), child(p, "error"));
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Constant histogram

inline RenderedDocument render_histogram(std::span<const std::pair<double, std::size_t>> histogram,
                                         Format format) {
    using namespace detail;
    RenderedDocument doc{format, {}, "histogram." + std::string(extension(format))};
    switch (format) {
        case Format::Text: {
            std::vector<std::vector<std::string>> rows;
            for (const auto& [v, n] : histogram) rows.push_back({format_number(v), std::to_string(n)});
            doc.body = text_table({"Constant Value", "Number of Occurrences"}, rows);
            break;
        }
        case Format::Csv:
            doc.body = csv_line({"constant_value", "occurrences"});
            for (const auto& [v, n] : histogram) doc.body += csv_line({format_number(v), std::to_string(n)});
            break;
        case Format::Json: {
            nlohmann::ordered_json j;
            j["schema_version"] = kSchemaVersion;
            j["document"] = "histogram";
            j["rows"] = nlohmann::ordered_json::array();
            for (const auto& [v, n] : histogram) j["rows"].push_back({{"value", v}, {"count", n}});
            doc.body = j.dump(2) + "\n";
            break;
        }
    }
    return doc;
}

inline Histogram parse_histogram_json(std::string_view text) {
    using namespace detail;
    auto doc = parse_document(text);
    expect_document(doc, "histogram");
    Histogram out;
    const auto& arr = expect_array(require(doc, "rows", ""), "/rows");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto p = child(std::string("/rows"), i);
        out.emplace_back(expect_number(require(arr[i], "value", p), child(p, "value")),
                         expect_count(require(arr[i], "count", p), child(p, "count")));
    }
    return out;
}

}  // namespace hcaudit
