#pragma once

// Answer, retrieval, and SLU metrics. Tables are compared through
// normalized string grids; precision/recall/F1 pool micro-style over a run.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tabqa/slu/labels.hpp"
#include "tabqa/sql/ast.hpp"
#include "tabqa/table.hpp"
#include "tabqa/unicode.hpp"
#include "tabqa/value.hpp"

namespace tabqa::metrics {

// Trim, collapse whitespace, drop thousands separators, and round numbers
// to nine significant digits (shortest round-trip form), so 1,234.50 and
// 1234.5 compare equal.
inline std::string normalize_cell(const std::string& s) {
    std::string t = uni::collapse_ws(uni::trim(s));
    std::string u;
    for (size_t i = 0; i < t.size(); ++i) {
        bool sep = t[i] == ',' && i > 0 && i + 1 < t.size() &&
                   std::isdigit(static_cast<unsigned char>(t[i - 1])) &&
                   std::isdigit(static_cast<unsigned char>(t[i + 1]));
        if (!sep) u += t[i];
    }
    if (auto d = parse_double(u)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", *d);
        return format_double(parse_double(buf).value_or(*d));
    }
    return u;
}

struct PrfScore {
    double precision = 0, recall = 0, f1 = 0;
};

struct Counts {
    double match = 0, pred = 0, gold = 0;

    void operator+=(const Counts& o) {
        match += o.match;
        pred += o.pred;
        gold += o.gold;
    }
    PrfScore prf() const {
        PrfScore s;
        s.precision = pred > 0 ? match / pred : 0;
        s.recall = gold > 0 ? match / gold : 0;
        s.f1 = (s.precision + s.recall) > 0
                   ? 2 * s.precision * s.recall / (s.precision + s.recall)
                   : 0;
        return s;
    }
};

namespace metrics_detail {

inline double multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
    std::map<std::string, int> count;
    for (auto& x : a) ++count[x];
    double m = 0;
    for (auto& x : b) {
        auto it = count.find(x);
        if (it != count.end() && it->second > 0) {
            --it->second;
            ++m;
        }
    }
    return m;
}

}  // namespace metrics_detail

// A table reduced to normalized strings for comparison.
struct Grid {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool ordered = false;
};

inline Grid grid_from_table(const Table& t) {
    Grid g;
    for (const auto& c : t.columns) g.header.push_back(normalize_cell(c.name));
    for (const auto& row : t.rows) {
        std::vector<std::string> r;
        for (const auto& cell : row) r.push_back(normalize_cell(to_canonical_string(cell)));
        g.rows.push_back(std::move(r));
    }
    return g;
}

inline Grid grid_from_result(const sql::ResultTable& r) {
    Grid g;
    for (const auto& c : r.columns) g.header.push_back(normalize_cell(c));
    for (const auto& row : r.rows) {
        std::vector<std::string> out;
        for (const auto& cell : row) out.push_back(normalize_cell(to_canonical_string(cell)));
        g.rows.push_back(std::move(out));
    }
    g.ordered = r.ordered;
    return g;
}

namespace metrics_detail {

inline std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
        s += x;
        s += '\x1f';
    }
    return s;
}

inline std::vector<std::string> row_keys(const Grid& g) {
    std::vector<std::string> out;
    for (const auto& r : g.rows) out.push_back(join(r));
    return out;
}

// column signature: header plus cell multiset (row order is irrelevant to
// column identity)
inline std::vector<std::string> col_keys(const Grid& g) {
    std::vector<std::string> out;
    for (size_t c = 0; c < g.header.size(); ++c) {
        std::vector<std::string> cells;
        for (const auto& r : g.rows) cells.push_back(c < r.size() ? r[c] : "");
        std::sort(cells.begin(), cells.end());
        out.push_back(g.header[c] + '\x1e' + join(cells));
    }
    return out;
}

inline std::vector<std::string> cell_keys(const Grid& g) {
    std::vector<std::string> out;
    for (const auto& r : g.rows)
        for (const auto& c : r) out.push_back(c);
    return out;
}

}  // namespace metrics_detail

// Exact match; row order counts only when the gold grid is ordered.
inline bool grid_em(const Grid& pred, const Grid& gold) {
    if (pred.header != gold.header) return false;
    if (pred.rows.size() != gold.rows.size()) return false;
    if (gold.ordered) return pred.rows == gold.rows;
    auto a = metrics_detail::row_keys(pred);
    auto b = metrics_detail::row_keys(gold);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

inline bool grids_em(const std::vector<Grid>& pred, const std::vector<Grid>& gold) {
    if (pred.size() != gold.size()) return false;
    for (size_t i = 0; i < pred.size(); ++i)
        if (!grid_em(pred[i], gold[i])) return false;
    return true;
}

inline Counts counts_from_keys(const std::vector<std::string>& pred,
                               const std::vector<std::string>& gold) {
    Counts c;
    c.pred = static_cast<double>(pred.size());
    c.gold = static_cast<double>(gold.size());
    c.match = metrics_detail::multiset_overlap(gold, pred);
    return c;
}

inline Counts row_counts(const std::vector<Grid>& pred, const std::vector<Grid>& gold) {
    std::vector<std::string> a, b;
    for (const auto& g : pred)
        for (auto& k : metrics_detail::row_keys(g)) a.push_back(std::move(k));
    for (const auto& g : gold)
        for (auto& k : metrics_detail::row_keys(g)) b.push_back(std::move(k));
    return counts_from_keys(a, b);
}

inline Counts col_counts(const std::vector<Grid>& pred, const std::vector<Grid>& gold) {
    std::vector<std::string> a, b;
    for (const auto& g : pred)
        for (auto& k : metrics_detail::col_keys(g)) a.push_back(std::move(k));
    for (const auto& g : gold)
        for (auto& k : metrics_detail::col_keys(g)) b.push_back(std::move(k));
    return counts_from_keys(a, b);
}

inline Counts cell_counts(const std::vector<Grid>& pred, const std::vector<Grid>& gold) {
    std::vector<std::string> a, b;
    for (const auto& g : pred)
        for (auto& k : metrics_detail::cell_keys(g)) a.push_back(std::move(k));
    for (const auto& g : gold)
        for (auto& k : metrics_detail::cell_keys(g)) b.push_back(std::move(k));
    return counts_from_keys(a, b);
}

// Row-level result match (pass@1 for the SQL path): same rows, ordered when
// the gold result carries an ORDER BY.
inline bool result_match(const sql::ResultTable& pred, const sql::ResultTable& gold) {
    return grid_em(grid_from_result(pred), grid_from_result(gold));
}

// ---- retrieval ----

inline Counts retrieval_counts(const std::vector<std::string>& pred,
                               const std::vector<std::string>& gold) {
    std::set<std::string> p(pred.begin(), pred.end());
    std::set<std::string> g(gold.begin(), gold.end());
    Counts c;
    c.pred = static_cast<double>(p.size());
    c.gold = static_cast<double>(g.size());
    for (const auto& x : p)
        if (g.count(x)) ++c.match;
    return c;
}

// ---- SLU ----

inline Counts intent_counts(const std::set<slu::IntentLabel>& pred,
                            const std::set<slu::IntentLabel>& gold) {
    Counts c;
    c.pred = static_cast<double>(pred.size());
    c.gold = static_cast<double>(gold.size());
    for (auto i : pred)
        if (gold.count(i)) ++c.match;
    return c;
}

// chunk-level slot score: a predicted chunk counts only when type and both
// boundaries agree
inline Counts slot_counts(const std::vector<slu::SlotTag>& pred,
                          const std::vector<slu::SlotTag>& gold) {
    auto pc = slu::extract_chunks(pred);
    auto gc = slu::extract_chunks(gold);
    Counts c;
    c.pred = static_cast<double>(pc.size());
    c.gold = static_cast<double>(gc.size());
    for (const auto& a : pc)
        for (const auto& b : gc)
            if (a.type == b.type && a.start == b.start && a.end == b.end) {
                ++c.match;
                break;
            }
    return c;
}

}  // namespace tabqa::metrics
