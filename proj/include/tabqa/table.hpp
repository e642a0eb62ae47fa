#pragma once

// Captioned, typed, keyed rectangular relations plus their markdown
// serialization. A Catalog is the immutable table universe one run works on.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/csv.hpp"
#include "tabqa/errors.hpp"
#include "tabqa/unicode.hpp"
#include "tabqa/value.hpp"

namespace tabqa {

enum class Domain { Property, CompanyFinance, LandAuction };

inline std::string domain_name(Domain d) {
    switch (d) {
        case Domain::Property: return "property";
        case Domain::CompanyFinance: return "company_finance";
        case Domain::LandAuction: return "land_auction";
    }
    return "?";
}

inline Domain domain_from_name(const std::string& s) {
    if (s == "property") return Domain::Property;
    if (s == "company_finance") return Domain::CompanyFinance;
    if (s == "land_auction") return Domain::LandAuction;
    throw ConfigError("unknown domain: " + s);
}

enum class ColType { Text, Integer, Decimal };

struct Column {
    std::string name;
    ColType type = ColType::Text;
};

struct Table {
    std::string caption;
    Domain domain = Domain::Property;
    std::string key_column;
    std::vector<Column> columns;
    std::vector<std::vector<CellValue>> rows;

    int column_index(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

struct Catalog {
    std::map<std::string, Table> tables;  // caption -> table
    std::string manifest_path;

    const Table& lookup(const std::string& caption) const {
        auto it = tables.find(caption);
        if (it == tables.end()) throw NotFound("no table with caption: " + caption);
        return it->second;
    }
    bool contains(const std::string& caption) const { return tables.count(caption) > 0; }
    size_t size() const { return tables.size(); }

    void add(Table t) {
        if (tables.count(t.caption))
            throw DuplicateCaption("duplicate caption: " + t.caption);
        if (t.caption.empty()) throw SchemaError("empty caption");
        if (t.column_index(t.key_column) < 0)
            throw SchemaError("key column '" + t.key_column + "' missing in table '" + t.caption + "'");
        tables.emplace(t.caption, std::move(t));
    }
};

// Column type inference: Integer if every non-empty cell parses as an
// integer, Decimal if every one parses as a number, else Text.
inline ColType infer_type(const std::vector<std::vector<std::string>>& rows, size_t col) {
    bool all_int = true, all_num = true, any = false;
    for (const auto& r : rows) {
        if (col >= r.size()) continue;
        std::string t = uni::trim(r[col]);
        if (t.empty()) continue;
        any = true;
        if (!parse_int(t)) all_int = false;
        if (!parse_double(t)) all_num = false;
        if (!all_num) break;
    }
    if (!any) return ColType::Text;
    if (all_int) return ColType::Integer;
    if (all_num) return ColType::Decimal;
    return ColType::Text;
}

inline CellValue cell_from_string(const std::string& raw, ColType type) {
    std::string t = uni::trim(raw);
    if (t.empty()) return CellValue();
    switch (type) {
        case ColType::Integer:
            if (auto i = parse_int(t)) return CellValue(*i);
            return CellValue();
        case ColType::Decimal:
            if (auto d = parse_double(t)) return CellValue(*d);
            return CellValue();
        case ColType::Text:
            return CellValue(t);
    }
    return CellValue();
}

// Builds a typed Table from header + string rows.
inline Table table_from_rows(std::string caption, Domain domain, std::string key_column,
                             const std::vector<std::vector<std::string>>& raw) {
    if (raw.empty()) throw MalformedTable("empty table: " + caption);
    const auto& header = raw[0];
    std::vector<std::vector<std::string>> body(raw.begin() + 1, raw.end());
    for (size_t i = 0; i < body.size(); ++i)
        if (body[i].size() != header.size())
            throw MalformedTable("ragged CSV row " + std::to_string(i + 2) + " in table '" +
                                 caption + "'");
    Table t;
    t.caption = std::move(caption);
    t.domain = domain;
    t.key_column = std::move(key_column);
    for (size_t c = 0; c < header.size(); ++c)
        t.columns.push_back({uni::trim(header[c]), infer_type(body, c)});
    for (const auto& r : body) {
        std::vector<CellValue> row;
        row.reserve(header.size());
        for (size_t c = 0; c < header.size(); ++c)
            row.push_back(cell_from_string(r[c], t.columns[c].type));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Manifest JSONL: one {caption, domain, key_column, csv_path} object per line.
inline Catalog ingest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw NotFound("cannot open manifest: " + manifest_path);
    Catalog cat;
    cat.manifest_path = manifest_path;
    std::string line;
    std::string base_dir;
    if (auto slash = manifest_path.find_last_of('/'); slash != std::string::npos)
        base_dir = manifest_path.substr(0, slash + 1);
    while (std::getline(in, line)) {
        if (uni::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string csv_path = j.at("csv_path").get<std::string>();
        if (!csv_path.empty() && csv_path[0] != '/') csv_path = base_dir + csv_path;
        auto rows = read_csv_file(csv_path);
        Table t = table_from_rows(j.at("caption").get<std::string>(),
                                  domain_from_name(j.at("domain").get<std::string>()),
                                  j.at("key_column").get<std::string>(), rows);
        cat.add(std::move(t));
    }
    return cat;
}

// ---- markdown ----

inline std::string md_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return out;
}

inline std::string to_markdown(const Table& t) {
    std::ostringstream os;
    if (!t.caption.empty()) os << t.caption << "\n";
    os << "|";
    for (const auto& c : t.columns) os << " " << md_escape(c.name) << " |";
    os << "\n|";
    for (size_t i = 0; i < t.columns.size(); ++i) os << " --- |";
    for (const auto& row : t.rows) {
        os << "\n|";
        for (const auto& cell : row) os << " " << md_escape(to_canonical_string(cell)) << " |";
    }
    return os.str();
}

inline std::string to_markdown(const std::vector<Table>& tables) {
    if (tables.empty()) throw EmptyInput("to_markdown: empty table list");
    std::string out;
    for (size_t i = 0; i < tables.size(); ++i) {
        if (i) out += "\n\n";
        out += to_markdown(tables[i]);
    }
    return out;
}

namespace detail {
// Splits a markdown table row into cells, honoring \| escapes.
inline std::vector<std::string> split_md_row(const std::string& line) {
    std::string t = uni::trim(line);
    size_t b = 0, e = t.size();
    if (b < e && t[b] == '|') ++b;
    if (e > b && t[e - 1] == '|' && (e < 2 || t[e - 2] != '\\')) --e;
    std::vector<std::string> cells;
    std::string cur;
    for (size_t i = b; i < e; ++i) {
        if (t[i] == '\\' && i + 1 < e && t[i + 1] == '|') {
            cur.push_back('|');
            ++i;
        } else if (t[i] == '|') {
            cells.push_back(uni::trim(cur));
            cur.clear();
        } else {
            cur.push_back(t[i]);
        }
    }
    cells.push_back(uni::trim(cur));
    return cells;
}

inline bool is_separator_row(const std::vector<std::string>& cells) {
    if (cells.empty()) return false;
    for (const auto& c : cells) {
        if (c.empty()) return false;
        for (char ch : c)
            if (ch != '-' && ch != ':' && ch != ' ') return false;
        if (c.find('-') == std::string::npos) return false;
    }
    return true;
}
}  // namespace detail

// Parses pipe tables out of free text. Cells come back as Text (no type
// inference); a non-table line directly above a table becomes its caption.
// Ragged rows are padded/truncated to header width and recorded as warnings.
inline std::vector<Table> parse_markdown(const std::string& text,
                                         std::vector<std::string>* warnings = nullptr) {
    std::vector<std::string> lines;
    {
        std::istringstream is(text);
        std::string l;
        while (std::getline(is, l)) lines.push_back(l);
    }
    std::vector<Table> out;
    size_t i = 0;
    auto is_table_line = [](const std::string& l) {
        std::string t = uni::trim(l);
        return !t.empty() && t[0] == '|';
    };
    while (i < lines.size()) {
        if (!is_table_line(lines[i])) {
            ++i;
            continue;
        }
        // candidate header; require a separator row beneath
        auto header = detail::split_md_row(lines[i]);
        if (i + 1 >= lines.size() || !is_table_line(lines[i + 1]) ||
            !detail::is_separator_row(detail::split_md_row(lines[i + 1]))) {
            ++i;
            continue;
        }
        Table t;
        // caption: nearest preceding non-empty, non-table line in this block
        for (size_t k = i; k-- > 0;) {
            std::string prev = uni::trim(lines[k]);
            if (prev.empty()) break;
            if (prev[0] == '|') break;
            t.caption = prev;
            break;
        }
        for (auto& h : header) t.columns.push_back({h, ColType::Text});
        size_t j = i + 2;
        while (j < lines.size() && is_table_line(lines[j])) {
            auto cells = detail::split_md_row(lines[j]);
            if (cells.size() != header.size()) {
                if (warnings)
                    warnings->push_back("ragged row (" + std::to_string(cells.size()) + " cells, header " +
                                        std::to_string(header.size()) + "): " + uni::trim(lines[j]));
                cells.resize(header.size());
            }
            std::vector<CellValue> row;
            for (auto& c : cells) row.push_back(c.empty() ? CellValue() : CellValue(c));
            t.rows.push_back(std::move(row));
            ++j;
        }
        out.push_back(std::move(t));
        i = j;
    }
    if (out.empty()) throw NoTableFound("no pipe table found in text");
    return out;
}

}  // namespace tabqa
