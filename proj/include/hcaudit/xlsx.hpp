#pragma once

// SpreadsheetML package reader. Reads the workbook part (sheet list and
// visibility), shared strings, cell styles (formula-hiding protection only)
// and every worksheet or macro sheet. Formulas are taken as stored and never
// recomputed; cells of a shared formula get the anchor formula with relative
// references shifted.

#include <hcaudit/cell_address.hpp>
#include <hcaudit/errors.hpp>
#include <hcaudit/lexer.hpp>
#include <hcaudit/number_format.hpp>
#include <hcaudit/workbook.hpp>
#include <hcaudit/xml.hpp>
#include <hcaudit/zip.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hcaudit {

namespace detail {

struct RefPart {
    bool col_abs = false;
    std::optional<std::uint32_t> column;
    bool row_abs = false;
    std::optional<std::uint32_t> row;
};

inline std::optional<RefPart> parse_ref_part(std::string_view s) {
    RefPart p;
    std::size_t i = 0;
    if (i < s.size() && s[i] == '$') { p.col_abs = true; ++i; }
    std::size_t c0 = i;
    while (i < s.size() && is_ascii_alpha(s[i])) ++i;
    if (i > c0) {
        p.column = column_index(s.substr(c0, i - c0));
        if (!p.column) return std::nullopt;
    } else if (p.col_abs) {
        // "$5": the dollar belongs to the row.
        p.col_abs = false;
        p.row_abs = true;
    }
    if (i < s.size() && s[i] == '$') { p.row_abs = true; ++i; }
    if (i < s.size()) {
        p.row = parse_u32(s.substr(i));
        if (!p.row) return std::nullopt;
    }
    if (!p.column && !p.row) return std::nullopt;
    return p;
}

inline std::optional<std::string> shift_part(std::string_view text, long drow, long dcol) {
    auto p = parse_ref_part(text);
    if (!p) return std::string(text);
    std::string out;
    if (p->column) {
        long c = static_cast<long>(*p->column) + (p->col_abs ? 0 : dcol);
        if (c < 1 || c > static_cast<long>(kMaxFormulaColumn)) return std::nullopt;
        if (p->col_abs) out.push_back('$');
        out += column_letters(static_cast<std::uint32_t>(c));
    }
    if (p->row) {
        long r = static_cast<long>(*p->row) + (p->row_abs ? 0 : drow);
        if (r < 1 || r > static_cast<long>(kMaxFormulaRow)) return std::nullopt;
        if (p->row_abs) out.push_back('$');
        out += std::to_string(r);
    }
    return out;
}

}  // namespace detail

/// Moves every relative reference of an A1 formula by (drow, dcol), the way
/// a spreadsheet fills a shared formula. References pushed off the grid
/// become #REF!.
inline std::string shift_formula(std::string_view formula, long drow, long dcol) {
    auto tokens = tokenize(formula, RefStyle::A1);
    std::string out;
    for (const auto& t : tokens) {
        if (t.kind != TokenKind::CellRef && t.kind != TokenKind::RangeRef) {
            out += t.text;
            continue;
        }
        std::string_view text = t.text;
        auto colon = text.find(':');
        std::vector<std::string_view> parts;
        if (colon == std::string_view::npos) {
            parts = {text};
        } else {
            parts = {text.substr(0, colon), text.substr(colon + 1)};
        }
        std::string shifted;
        bool off_grid = false;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            auto s = detail::shift_part(parts[i], drow, dcol);
            if (!s) {
                off_grid = true;
                break;
            }
            if (i) shifted.push_back(':');
            shifted += *s;
        }
        out += off_grid ? std::string("#REF!") : shifted;
    }
    return out;
}

namespace detail {

inline std::string resolve_part_path(std::string_view base_dir, std::string_view target) {
    std::filesystem::path p;
    if (!target.empty() && target.front() == '/') p = std::filesystem::path(target.substr(1));
    else p = std::filesystem::path(base_dir) / std::filesystem::path(target);
    return p.lexically_normal().generic_string();
}

inline std::string part_dir(std::string_view part) {
    auto slash = part.rfind('/');
    return slash == std::string_view::npos ? std::string() : std::string(part.substr(0, slash));
}

inline std::string rels_path_for(std::string_view part) {
    auto slash = part.rfind('/');
    std::string dir = slash == std::string_view::npos ? "" : std::string(part.substr(0, slash + 1));
    std::string file(slash == std::string_view::npos ? part : part.substr(slash + 1));
    return dir + "_rels/" + file + ".rels";
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

struct Relationship {
    std::string type;
    std::string target;  // resolved part name
};

class RelsHandler : public XmlHandler {
public:
    explicit RelsHandler(std::string base_dir) : base_dir_(std::move(base_dir)) {}
    std::map<std::string, Relationship> rels;

    void on_start(std::string_view name, const XmlAttributes& a) override {
        if (name != "Relationship") return;
        if (a.get_or("TargetMode", "Internal") == "External") return;
        auto id = a.get("Id");
        auto target = a.get("Target");
        if (!id || !target) return;
        rels[std::string(*id)] = {std::string(a.get_or("Type", "")),
                                  resolve_part_path(base_dir_, *target)};
    }
    void on_end(std::string_view) override {}

private:
    std::string base_dir_;
};

inline std::map<std::string, Relationship> read_rels(const ZipArchive& zip, std::string_view part) {
    RelsHandler h(part_dir(part));
    auto path = rels_path_for(part);
    if (auto doc = zip.read_if_present(path)) parse_xml(*doc, h, path);
    return h.rels;
}

struct SheetEntry {
    std::string name;
    Visibility visibility = Visibility::Visible;
    std::string rel_id;
};

class WorkbookPartHandler : public XmlHandler {
public:
    std::vector<SheetEntry> sheets;

    void on_start(std::string_view name, const XmlAttributes& a) override {
        if (name != "sheet") return;
        SheetEntry e;
        auto n = a.get("name");
        if (!n) throw FormatError("workbook sheet entry without a name");
        e.name = std::string(*n);
        auto state = a.get_or("state", "visible");
        if (state == "hidden") e.visibility = Visibility::Hidden;
        else if (state == "veryHidden") e.visibility = Visibility::VeryHidden;
        e.rel_id = std::string(a.get_or("id", ""));
        sheets.push_back(std::move(e));
    }
    void on_end(std::string_view) override {}
};

class SharedStringsHandler : public XmlHandler {
public:
    std::vector<std::string> strings;

    void on_start(std::string_view name, const XmlAttributes&) override {
        if (name == "si") {
            current_.clear();
            in_si_ = true;
        } else if (name == "rPh") {
            ++skip_;
        } else if (name == "t" && in_si_ && skip_ == 0) {
            in_t_ = true;
        }
    }
    void on_end(std::string_view name) override {
        if (name == "si") {
            strings.push_back(std::move(current_));
            current_.clear();
            in_si_ = false;
        } else if (name == "rPh") {
            --skip_;
        } else if (name == "t") {
            in_t_ = false;
        }
    }
    void on_text(std::string_view s) override {
        if (in_t_) current_ += s;
    }

private:
    std::string current_;
    bool in_si_ = false;
    bool in_t_ = false;
    int skip_ = 0;
};

class StylesHandler : public XmlHandler {
public:
    /// cellXfs indices whose protection hides formulas.
    std::set<std::size_t> hidden_xfs;

    void on_start(std::string_view name, const XmlAttributes& a) override {
        if (name == "cellXfs") {
            in_cell_xfs_ = true;
            index_ = 0;
        } else if (name == "xf" && in_cell_xfs_) {
            in_xf_ = true;
        } else if (name == "protection" && in_xf_) {
            auto h = a.get_or("hidden", "0");
            if (h == "1" || h == "true") hidden_xfs.insert(index_);
        }
    }
    void on_end(std::string_view name) override {
        if (name == "cellXfs") in_cell_xfs_ = false;
        if (name == "xf" && in_xf_) {
            in_xf_ = false;
            ++index_;
        }
    }

private:
    bool in_cell_xfs_ = false;
    bool in_xf_ = false;
    std::size_t index_ = 0;
};

inline bool xml_true(std::string_view v) { return v == "1" || v == "true"; }

inline std::uint32_t xml_index(std::string_view v, const std::string& part) {
    auto n = parse_u32(v);
    if (!n || *n < 1) throw FormatError("invalid index '" + std::string(v) + "' in '" + part + "'");
    return *n;
}

class WorksheetHandler : public XmlHandler {
public:
    WorksheetHandler(Sheet& sheet, const std::vector<std::string>& sst,
                     const std::set<std::size_t>& hidden_xfs, std::string part)
        : sheet_(sheet), sst_(sst), hidden_xfs_(hidden_xfs), part_(std::move(part)) {}

    void on_start(std::string_view name, const XmlAttributes& a) override {
        if (name == "row") {
            auto r = a.get("r");
            row_ = r ? xml_index(*r, part_) : row_ + 1;
            column_ = 0;
            if (xml_true(a.get_or("hidden", "0"))) sheet_.hidden_rows.insert(row_);
        } else if (name == "c") {
            begin_cell(a);
        } else if (name == "f" && in_cell_) {
            has_f_ = true;
            in_f_ = true;
            f_type_ = std::string(a.get_or("t", "normal"));
            f_si_ = a.get("si") ? std::optional<std::string>(std::string(*a.get("si"))) : std::nullopt;
            f_dt_r1_ = std::string(a.get_or("r1", ""));
            f_dt_r2_ = std::string(a.get_or("r2", ""));
        } else if (name == "v" && in_cell_) {
            has_v_ = true;
            in_v_ = true;
        } else if (name == "is" && in_cell_) {
            in_is_ = true;
            has_v_ = true;
        } else if (name == "rPh") {
            ++skip_;
        } else if (name == "t" && in_is_ && skip_ == 0) {
            in_t_ = true;
        } else if (name == "col") {
            if (xml_true(a.get_or("hidden", "0"))) {
                auto lo = xml_index(a.get_or("min", "0"), part_);
                auto hi = xml_index(a.get_or("max", "0"), part_);
                for (auto c = lo; c <= hi; ++c) sheet_.hidden_cols.insert(c);
            }
        } else if (name == "mergeCell") {
            auto ref = a.get("ref");
            if (!ref) return;
            try {
                sheet_.merged_regions.push_back(parse_range(*ref));
            } catch (const AddressError& e) {
                throw FormatError("bad merge range in '" + part_ + "': " + e.what());
            }
        }
    }

    void on_end(std::string_view name) override {
        if (name == "c") {
            end_cell();
        } else if (name == "f") {
            in_f_ = false;
        } else if (name == "v") {
            in_v_ = false;
        } else if (name == "is") {
            in_is_ = false;
        } else if (name == "t") {
            in_t_ = false;
        } else if (name == "rPh") {
            --skip_;
        }
    }

    void on_text(std::string_view s) override {
        if (in_f_) f_text_ += s;
        else if (in_v_) v_text_ += s;
        else if (in_t_) v_text_ += s;
    }

    /// Fills dependents of shared formulas once all anchors have been seen.
    void finish() {
        for (const auto& [pos, si] : pending_shared_) {
            auto master = shared_masters_.find(si);
            if (master == shared_masters_.end())
                throw FormatError("shared formula " + si + " without an anchor in '" + part_ + "'");
            auto [anchor, text] = master->second;
            long drow = static_cast<long>(pos.row) - static_cast<long>(anchor.row);
            long dcol = static_cast<long>(pos.column) - static_cast<long>(anchor.column);
            std::string shifted;
            try {
                shifted = shift_formula(text, drow, dcol);
            } catch (const LexError&) {
                shifted = text;  // left for the detector to report as unparseable
            }
            sheet_.cells[pos].formula_text = normalize_formula(shifted);
        }
    }

private:
    Sheet& sheet_;
    const std::vector<std::string>& sst_;
    const std::set<std::size_t>& hidden_xfs_;
    std::string part_;

    std::uint32_t row_ = 0;
    std::uint32_t column_ = 0;
    bool in_cell_ = false;
    GridPos pos_;
    std::string type_;
    std::optional<std::size_t> style_;
    bool has_f_ = false, in_f_ = false, has_v_ = false, in_v_ = false;
    bool in_is_ = false, in_t_ = false;
    int skip_ = 0;
    std::string f_text_, f_type_, f_dt_r1_, f_dt_r2_, v_text_;
    std::optional<std::string> f_si_;
    std::map<std::string, std::pair<GridPos, std::string>> shared_masters_;
    std::vector<std::pair<GridPos, std::string>> pending_shared_;

    void begin_cell(const XmlAttributes& a) {
        in_cell_ = true;
        has_f_ = in_f_ = has_v_ = in_v_ = in_is_ = in_t_ = false;
        f_text_.clear();
        v_text_.clear();
        f_si_.reset();
        type_ = std::string(a.get_or("t", "n"));
        style_.reset();
        if (auto s = a.get("s")) {
            if (auto n = parse_u32(*s)) style_ = *n;
        }
        if (auto r = a.get("r")) {
            auto addr = try_parse_address(*r);
            if (!addr || addr->sheet) throw FormatError("invalid cell reference '" + std::string(*r) + "' in '" + part_ + "'");
            pos_ = addr->pos();
            row_ = pos_.row;
        } else {
            if (row_ == 0) row_ = 1;
            pos_ = GridPos{row_, column_ + 1};
        }
        column_ = pos_.column;
    }

    std::optional<Scalar> cached_value() const {
        if (!has_v_) return std::nullopt;
        if (type_ == "s") {
            auto idx = parse_u32(v_text_);
            if (!idx || *idx >= sst_.size())
                throw FormatError("shared string index '" + v_text_ + "' out of range in '" + part_ + "'");
            return Scalar(sst_[*idx]);
        }
        if (type_ == "str" || type_ == "inlineStr" || type_ == "d") return Scalar(v_text_);
        if (type_ == "b") return Scalar(xml_true(v_text_));
        if (type_ == "e") return Scalar(ErrorValue{v_text_});
        if (v_text_.empty()) return std::nullopt;
        auto n = parse_number(v_text_);
        if (!n) throw FormatError("invalid number '" + v_text_ + "' in '" + part_ + "'");
        return Scalar(*n);
    }

    void end_cell() {
        in_cell_ = false;
        Cell cell;
        cell.address = make_address(pos_);
        cell.cached_value = cached_value();
        bool pending = false;
        if (has_f_) {
            if (f_type_ == "shared" && f_si_) {
                if (!f_text_.empty()) shared_masters_[*f_si_] = {pos_, f_text_};
                else pending = true;
            }
            if (f_type_ == "dataTable") {
                std::string args = f_dt_r1_;
                if (!f_dt_r2_.empty()) args += "," + f_dt_r2_;
                cell.formula_text = "=TABLE(" + args + ")";
            } else if (!pending) {
                cell.formula_text = normalize_formula(f_text_);
            }
        }
        if (!cell.formula_text && !cell.cached_value && !pending) return;
        if (pending) pending_shared_.emplace_back(pos_, *f_si_);
        if (has_f_ && style_ && hidden_xfs_.count(*style_)) sheet_.hidden_formula_cells.insert(pos_);
        sheet_.cells[pos_] = std::move(cell);
    }
};

}  // namespace detail

/// Reads a ZIP-packaged SpreadsheetML workbook (.xlsx / .xlsm). All sheets are
/// loaded regardless of visibility. Throws IoError or FormatError.
inline Workbook load_xlsx(const std::string& path) {
    using namespace detail;
    ZipArchive zip = ZipArchive::open(path);

    std::string workbook_part = "xl/workbook.xml";
    for (const auto& [id, rel] : read_rels(zip, "")) {
        if (ends_with(rel.type, "/officeDocument")) {
            workbook_part = rel.target;
            break;
        }
    }
    if (!zip.contains(workbook_part)) throw FormatError("package has no workbook part");

    WorkbookPartHandler wb_handler;
    parse_xml(zip.read(workbook_part), wb_handler, workbook_part);
    auto rels = read_rels(zip, workbook_part);

    std::vector<std::string> sst;
    std::set<std::size_t> hidden_xfs;
    for (const auto& [id, rel] : rels) {
        if (ends_with(rel.type, "/sharedStrings")) {
            SharedStringsHandler h;
            parse_xml(zip.read(rel.target), h, rel.target);
            sst = std::move(h.strings);
        } else if (ends_with(rel.type, "/styles") && zip.contains(rel.target)) {
            StylesHandler h;
            parse_xml(zip.read(rel.target), h, rel.target);
            hidden_xfs = std::move(h.hidden_xfs);
        }
    }

    Workbook wb;
    wb.name = std::filesystem::path(path).filename().string();
    wb.source_path = path;
    wb.ref_style = RefStyle::A1;  // stored formulas are always A1
    for (const auto& entry : wb_handler.sheets) {
        auto rel = rels.find(entry.rel_id);
        if (rel == rels.end())
            throw FormatError("sheet '" + entry.name + "' has no part relationship");
        const auto& type = rel->second.type;
        if (!ends_with(type, "/worksheet") && !ends_with(type, "/macrosheet")) continue;
        for (const auto& other : wb.sheets)
            if (iequals(other.name, entry.name))
                throw FormatError("duplicate sheet name '" + entry.name + "'");
        Sheet sheet;
        sheet.name = entry.name;
        sheet.visibility = entry.visibility;
        WorksheetHandler h(sheet, sst, hidden_xfs, rel->second.target);
        parse_xml(zip.read(rel->second.target), h, rel->second.target);
        h.finish();
        apply_merge_policy(sheet);
        wb.sheets.push_back(std::move(sheet));
    }
    return wb;
}

}  // namespace hcaudit
