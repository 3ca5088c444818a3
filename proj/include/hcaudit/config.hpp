#pragma once

// Detection configuration and its JSON document form:
//
// { "ignore_constants": [0, 1],
//   "data_regions": [ { "sheet": "Data" }, { "sheet": "Input*", "range": "B2:F40" } ],
//   "mode": "lexical" | "heuristic",
//   "heuristic_operators": "=+-*/",
//   "max_reported_constants_per_cell": 8,
//   "ref_style": "A1" | "R1C1" }

#include <hcaudit/cell_address.hpp>
#include <hcaudit/errors.hpp>
#include <hcaudit/json_io.hpp>
#include <hcaudit/lexer.hpp>

#include <fnmatch.h>

#include <json.hpp>

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hcaudit {

enum class DetectionMode { Lexical, Heuristic };

inline std::string_view to_string(DetectionMode m) {
    return m == DetectionMode::Lexical ? "lexical" : "heuristic";
}

inline std::optional<DetectionMode> detection_mode_from_string(std::string_view s) {
    if (detail::iequals(s, "lexical")) return DetectionMode::Lexical;
    if (detail::iequals(s, "heuristic")) return DetectionMode::Heuristic;
    return std::nullopt;
}

/// Expected input area: sheets whose name matches the glob `sheet_pattern`
/// (case-insensitive), optionally restricted to a rectangle.
struct DataRegion {
    std::string sheet_pattern;
    std::optional<Rectangle> area;

    bool matches_sheet(std::string_view sheet) const {
        return fnmatch(sheet_pattern.c_str(), std::string(sheet).c_str(), FNM_CASEFOLD) == 0;
    }

    bool contains(std::string_view sheet, GridPos pos) const {
        return matches_sheet(sheet) && (!area || area->contains(pos));
    }

    friend bool operator==(const DataRegion&, const DataRegion&) = default;
};

/// "Data", "Data!B2:F40", "'Prod 2007'!A1:C3".
inline DataRegion parse_data_region(std::string_view text) {
    DataRegion region;
    std::string_view rest;
    if (!text.empty() && text.front() == '\'') {
        std::optional<std::string> sheet;
        rest = detail::split_sheet(text, sheet);
        region.sheet_pattern = *sheet;
    } else {
        auto bang = text.rfind('!');
        region.sheet_pattern = std::string(text.substr(0, bang));
        if (bang != std::string_view::npos) rest = text.substr(bang + 1);
        else rest = {};
        if (bang != std::string_view::npos && rest.empty())
            throw AddressError("data region '" + std::string(text) + "' has an empty range");
    }
    if (region.sheet_pattern.empty())
        throw AddressError("data region '" + std::string(text) + "' has no sheet name");
    if (!rest.empty()) region.area = parse_range(rest);
    return region;
}

inline std::string to_string(const DataRegion& r) {
    std::string out = r.sheet_pattern;
    if (r.area) out = sheet_prefix(r.sheet_pattern) + to_string(*r.area);
    return out;
}

struct DetectionConfig {
    /// Values dismissed after review (e.g. 0 and 1); compared numerically.
    std::set<double> ignore_constants;
    std::vector<DataRegion> data_regions;
    DetectionMode mode = DetectionMode::Lexical;
    OperatorSet heuristic_operators = OperatorSet::defaults();
    std::optional<std::size_t> max_reported_constants_per_cell;
    /// Overrides the workbook's reference style when set.
    std::optional<RefStyle> ref_style;

    bool in_data_region(std::string_view sheet, GridPos pos) const {
        for (const auto& r : data_regions)
            if (r.contains(sheet, pos)) return true;
        return false;
    }

    friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;
};

inline DetectionConfig config_from_json(const nlohmann::json& doc) {
    using namespace detail;
    const std::string root;
    expect_object(doc, root,
                  {"ignore_constants", "data_regions", "mode", "heuristic_operators",
                   "max_reported_constants_per_cell", "ref_style"});
    DetectionConfig cfg;
    if (doc.contains("ignore_constants")) {
        const auto& arr = expect_array(doc.at("ignore_constants"), "/ignore_constants");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.ignore_constants.insert(expect_number(arr[i], child(std::string("/ignore_constants"), i)));
    }
    if (doc.contains("data_regions")) {
        const auto& arr = expect_array(doc.at("data_regions"), "/data_regions");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto p = child(std::string("/data_regions"), i);
            expect_object(arr[i], p, {"sheet", "range"});
            if (!arr[i].contains("sheet")) throw SchemaError(p, "data region needs a \"sheet\"");
            DataRegion r;
            r.sheet_pattern = expect_string(arr[i].at("sheet"), child(p, "sheet"));
            if (r.sheet_pattern.empty()) throw SchemaError(child(p, "sheet"), "empty sheet pattern");
            if (arr[i].contains("range")) {
                auto rp = child(p, "range");
                try {
                    r.area = parse_range(expect_string(arr[i].at("range"), rp));
                } catch (const AddressError& e) {
                    throw SchemaError(rp, e.what());
                }
            }
            cfg.data_regions.push_back(std::move(r));
        }
    }
    if (doc.contains("mode")) {
        auto m = detection_mode_from_string(expect_string(doc.at("mode"), "/mode"));
        if (!m) throw SchemaError("/mode", "mode must be \"lexical\" or \"heuristic\"");
        cfg.mode = *m;
    }
    if (doc.contains("heuristic_operators")) {
        const auto& ops = expect_string(doc.at("heuristic_operators"), "/heuristic_operators");
        if (ops.empty()) throw SchemaError("/heuristic_operators", "operator set must not be empty");
        cfg.heuristic_operators = OperatorSet(ops);
    }
    if (doc.contains("max_reported_constants_per_cell"))
        cfg.max_reported_constants_per_cell =
            expect_index(doc.at("max_reported_constants_per_cell"), "/max_reported_constants_per_cell");
    if (doc.contains("ref_style")) cfg.ref_style = parse_ref_style(doc.at("ref_style"), "/ref_style");
    return cfg;
}

inline DetectionConfig parse_config_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(doc);
}

inline DetectionConfig load_config(const std::string& path) {
    return parse_config_json(read_file(path));
}

inline nlohmann::ordered_json config_to_json(const DetectionConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["ignore_constants"] = nlohmann::ordered_json::array();
    for (double v : cfg.ignore_constants) doc["ignore_constants"].push_back(v);
    doc["data_regions"] = nlohmann::ordered_json::array();
    for (const auto& r : cfg.data_regions) {
        nlohmann::ordered_json e;
        e["sheet"] = r.sheet_pattern;
        if (r.area) e["range"] = to_string(*r.area);
        doc["data_regions"].push_back(std::move(e));
    }
    doc["mode"] = std::string(to_string(cfg.mode));
    doc["heuristic_operators"] = cfg.heuristic_operators.chars();
    if (cfg.max_reported_constants_per_cell)
        doc["max_reported_constants_per_cell"] = *cfg.max_reported_constants_per_cell;
    if (cfg.ref_style) doc["ref_style"] = std::string(to_string(*cfg.ref_style));
    return doc;
}

}  // namespace hcaudit
