#pragma once

// Workbook interchange document:
//
// { "name": "...", "ref_style": "A1" | "R1C1",
//   "sheets": [ { "name": "...", "visibility": "visible" | "hidden" | "very_hidden",
//                 "cells": { "B2": { "f": "=A1*2", "v": 4 } },
//                 "merged": ["B2:C3"], "hidden_rows": [5], "hidden_cols": [2],
//                 "hidden_formulas": ["B2"] } ] }
//
// "v" is a number, string, boolean, or {"error": "#DIV/0!"}. Unknown keys are
// rejected.

#include <hcaudit/cell_address.hpp>
#include <hcaudit/errors.hpp>
#include <hcaudit/workbook.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

namespace hcaudit {

namespace detail {

inline std::string pointer_token(std::string_view key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out.push_back(c);
    }
    return out;
}

inline std::string child(const std::string& ptr, std::string_view key) {
    return ptr + "/" + pointer_token(key);
}

inline std::string child(const std::string& ptr, std::size_t index) {
    return ptr + "/" + std::to_string(index);
}

inline void expect_object(const nlohmann::json& j, const std::string& ptr,
                          std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw SchemaError(ptr, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) throw SchemaError(child(ptr, key), "unknown key '" + key + "'");
    }
}

inline const std::string& expect_string(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_string()) throw SchemaError(ptr, "expected a string");
    return j.get_ref<const std::string&>();
}

inline double expect_number(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_number()) throw SchemaError(ptr, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(ptr, "number must be finite");
    return v;
}

inline std::uint32_t expect_index(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1 || j.get<std::int64_t>() > UINT32_MAX)
        throw SchemaError(ptr, "expected a positive integer");
    return static_cast<std::uint32_t>(j.get<std::int64_t>());
}

inline const nlohmann::json& expect_array(const nlohmann::json& j, const std::string& ptr) {
    if (!j.is_array()) throw SchemaError(ptr, "expected an array");
    return j;
}

inline RefStyle parse_ref_style(const nlohmann::json& j, const std::string& ptr) {
    const auto& s = expect_string(j, ptr);
    if (iequals(s, "A1")) return RefStyle::A1;
    if (iequals(s, "R1C1")) return RefStyle::R1C1;
    throw SchemaError(ptr, "ref_style must be \"A1\" or \"R1C1\"");
}

inline GridPos parse_cell_key(std::string_view key, const std::string& ptr) {
    auto addr = try_parse_address(key);
    if (!addr || addr->sheet) throw SchemaError(ptr, "invalid cell address '" + std::string(key) + "'");
    return addr->pos();
}

inline Scalar scalar_from_json(const nlohmann::json& j, const std::string& ptr) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number()) return expect_number(j, ptr);
    if (j.is_string()) return j.get<std::string>();
    if (j.is_object()) {
        expect_object(j, ptr, {"error"});
        if (!j.contains("error")) throw SchemaError(ptr, "error value needs an \"error\" code");
        return ErrorValue{expect_string(j.at("error"), child(ptr, "error"))};
    }
    throw SchemaError(ptr, "expected a number, string, boolean or {\"error\": ...}");
}

inline nlohmann::ordered_json scalar_to_json(const Scalar& v) {
    if (auto d = std::get_if<double>(&v)) return *d;
    if (auto s = std::get_if<std::string>(&v)) return *s;
    if (auto b = std::get_if<bool>(&v)) return *b;
    nlohmann::ordered_json e;
    e["error"] = std::get<ErrorValue>(v).code;
    return e;
}

inline Sheet sheet_from_json(const nlohmann::json& j, const std::string& ptr) {
    expect_object(j, ptr,
                  {"name", "visibility", "cells", "merged", "hidden_rows", "hidden_cols",
                   "hidden_formulas"});
    Sheet sheet;
    if (!j.contains("name")) throw SchemaError(ptr, "sheet needs a \"name\"");
    sheet.name = expect_string(j.at("name"), child(ptr, "name"));
    if (sheet.name.empty()) throw SchemaError(child(ptr, "name"), "sheet name must not be empty");

    if (j.contains("visibility")) {
        auto p = child(ptr, "visibility");
        const auto& v = expect_string(j.at("visibility"), p);
        if (v == "visible") sheet.visibility = Visibility::Visible;
        else if (v == "hidden") sheet.visibility = Visibility::Hidden;
        else if (v == "very_hidden") sheet.visibility = Visibility::VeryHidden;
        else throw SchemaError(p, "visibility must be visible, hidden or very_hidden");
    }
    if (j.contains("cells")) {
        auto cells_ptr = child(ptr, "cells");
        const auto& cells = j.at("cells");
        if (!cells.is_object()) throw SchemaError(cells_ptr, "expected an object");
        for (const auto& [key, body] : cells.items()) {
            auto p = child(cells_ptr, key);
            GridPos pos = parse_cell_key(key, p);
            expect_object(body, p, {"f", "v"});
            Cell cell;
            cell.address = make_address(pos);
            if (body.contains("f"))
                cell.formula_text = normalize_formula(expect_string(body.at("f"), child(p, "f")));
            if (body.contains("v")) cell.cached_value = scalar_from_json(body.at("v"), child(p, "v"));
            if (!cell.formula_text && !cell.cached_value)
                throw SchemaError(p, "cell needs a formula \"f\" or a value \"v\"");
            if (!sheet.cells.emplace(pos, std::move(cell)).second)
                throw SchemaError(p, "duplicate cell address");
        }
    }
    if (j.contains("merged")) {
        auto p = child(ptr, "merged");
        const auto& arr = expect_array(j.at("merged"), p);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto ep = child(p, i);
            try {
                sheet.merged_regions.push_back(parse_range(expect_string(arr[i], ep)));
            } catch (const AddressError& e) {
                throw SchemaError(ep, e.what());
            }
        }
    }
    auto index_set = [&](const char* key, std::set<std::uint32_t>& out) {
        if (!j.contains(key)) return;
        auto p = child(ptr, key);
        const auto& arr = expect_array(j.at(key), p);
        for (std::size_t i = 0; i < arr.size(); ++i) out.insert(expect_index(arr[i], child(p, i)));
    };
    index_set("hidden_rows", sheet.hidden_rows);
    index_set("hidden_cols", sheet.hidden_cols);
    if (j.contains("hidden_formulas")) {
        auto p = child(ptr, "hidden_formulas");
        const auto& arr = expect_array(j.at("hidden_formulas"), p);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto ep = child(p, i);
            sheet.hidden_formula_cells.insert(parse_cell_key(expect_string(arr[i], ep), ep));
        }
    }

    for (const auto& region : sheet.merged_regions) {
        for (const auto& [pos, cell] : sheet.cells) {
            if (region.contains(pos) && pos != region.top_left.pos())
                throw SchemaError(child(child(ptr, "cells"), plain_a1(pos)),
                                  "content inside merged region " + to_string(region) +
                                      " outside its anchor cell");
        }
    }
    apply_merge_policy(sheet);
    return sheet;
}

}  // namespace detail

/// Builds a workbook from a parsed interchange document.
inline Workbook workbook_from_json(const nlohmann::json& doc, std::string source_path = {}) {
    using namespace detail;
    const std::string root;
    expect_object(doc, root, {"name", "ref_style", "sheets"});
    Workbook wb;
    wb.source_path = std::move(source_path);
    if (!doc.contains("name")) throw SchemaError(root, "workbook needs a \"name\"");
    wb.name = expect_string(doc.at("name"), "/name");
    if (doc.contains("ref_style")) wb.ref_style = parse_ref_style(doc.at("ref_style"), "/ref_style");
    if (!doc.contains("sheets")) throw SchemaError(root, "workbook needs \"sheets\"");
    const auto& sheets = expect_array(doc.at("sheets"), "/sheets");
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        auto p = child(std::string("/sheets"), i);
        Sheet sheet = sheet_from_json(sheets[i], p);
        for (const auto& other : wb.sheets)
            if (iequals(other.name, sheet.name))
                throw SchemaError(child(p, "name"), "duplicate sheet name '" + sheet.name + "'");
        wb.sheets.push_back(std::move(sheet));
    }
    return wb;
}

inline nlohmann::ordered_json workbook_to_json(const Workbook& wb) {
    nlohmann::ordered_json doc;
    doc["name"] = wb.name;
    doc["ref_style"] = std::string(to_string(wb.ref_style));
    doc["sheets"] = nlohmann::ordered_json::array();
    for (const auto& sheet : wb.sheets) {
        nlohmann::ordered_json s;
        s["name"] = sheet.name;
        s["visibility"] = std::string(to_string(sheet.visibility));
        nlohmann::ordered_json cells = nlohmann::ordered_json::object();
        for (const auto& [pos, cell] : sheet.cells) {
            nlohmann::ordered_json c = nlohmann::ordered_json::object();
            if (cell.formula_text) c["f"] = *cell.formula_text;
            if (cell.cached_value) c["v"] = detail::scalar_to_json(*cell.cached_value);
            cells[plain_a1(pos)] = std::move(c);
        }
        s["cells"] = std::move(cells);
        if (!sheet.merged_regions.empty()) {
            s["merged"] = nlohmann::ordered_json::array();
            for (const auto& r : sheet.merged_regions) s["merged"].push_back(to_string(r));
        }
        if (!sheet.hidden_rows.empty()) s["hidden_rows"] = sheet.hidden_rows;
        if (!sheet.hidden_cols.empty()) s["hidden_cols"] = sheet.hidden_cols;
        if (!sheet.hidden_formula_cells.empty()) {
            s["hidden_formulas"] = nlohmann::ordered_json::array();
            for (auto p : sheet.hidden_formula_cells) s["hidden_formulas"].push_back(plain_a1(p));
        }
        doc["sheets"].push_back(std::move(s));
    }
    return doc;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path + "'");
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("cannot write '" + path + "'");
}

inline Workbook parse_workbook_json(std::string_view text, std::string source_path = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
    return workbook_from_json(doc, std::move(source_path));
}

/// Loads an interchange document; `source_path` of the result is `path`.
inline Workbook load_json(const std::string& path) {
    return parse_workbook_json(read_file(path), path);
}

inline void save_json(const Workbook& wb, const std::string& path) {
    write_file(path, workbook_to_json(wb).dump(2) + "\n");
}

}  // namespace hcaudit
