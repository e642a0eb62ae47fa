#pragma once

// Relational evaluation over a Catalog: nested-loop equi-joins, predicate
// filtering with NULL-rejecting semantics, grouping, aggregation, stable
// ordering, and LIMIT.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "tabqa/errors.hpp"
#include "tabqa/sql/ast.hpp"
#include "tabqa/sql/parser.hpp"
#include "tabqa/table.hpp"

namespace tabqa::sql {

namespace exec_detail {

// A working row over the joined tables, with per-binding column namespaces.
struct Frame {
    // (binding, column name) for each slot, in table order
    std::vector<std::pair<std::string, std::string>> slots;

    int resolve(const ColumnRef& c) const {
        int found = -1;
        for (size_t i = 0; i < slots.size(); ++i) {
            if (slots[i].second != c.name) continue;
            if (!c.qualifier.empty() && slots[i].first != c.qualifier) continue;
            if (found >= 0 && c.qualifier.empty())
                throw SchemaError("ambiguous column: " + c.name);
            if (found < 0) found = static_cast<int>(i);
        }
        if (found < 0)
            throw SchemaError("unknown column: " + (c.qualifier.empty() ? c.name : c.qualifier + "." + c.name));
        return found;
    }
};

// Text compares with Text in codepoint order (UTF-8 byte order); numbers
// compare numerically across Integer/Decimal. NULL never compares.
// Returns <0, 0, >0; throws TypeError for Text-vs-number.
inline int compare_cells(const CellValue& a, const CellValue& b) {
    if (a.is_number() && b.is_number()) {
        double x = a.as_double(), y = b.as_double();
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    if (a.is_text() && b.is_text()) return a.text().compare(b.text());
    throw TypeError("type-incomparable values in predicate");
}

// SQL LIKE over codepoints: % = any run, _ = one codepoint.
inline bool like_match(const std::vector<std::string>& text, size_t ti,
                       const std::vector<std::string>& pat, size_t pi) {
    while (pi < pat.size()) {
        if (pat[pi] == "%") {
            for (size_t k = ti; k <= text.size(); ++k)
                if (like_match(text, k, pat, pi + 1)) return true;
            return false;
        }
        if (ti >= text.size()) return false;
        if (pat[pi] != "_" && pat[pi] != text[ti]) return false;
        ++ti;
        ++pi;
    }
    return ti == text.size();
}

inline bool like(const std::string& text, const std::string& pattern) {
    return like_match(uni::codepoints(text), 0, uni::codepoints(pattern), 0);
}

struct RowCtx {
    const Frame& frame;
    const std::vector<CellValue>& row;

    CellValue operand(const Operand& o) const {
        if (std::holds_alternative<CellValue>(o)) return std::get<CellValue>(o);
        return row[frame.resolve(std::get<ColumnRef>(o))];
    }
};

inline bool eval_bool(const BoolExpr& e, const RowCtx& ctx) {
    struct V {
        const RowCtx& ctx;
        bool operator()(const CmpPred& p) const {
            CellValue l = ctx.operand(p.lhs), r = ctx.operand(p.rhs);
            if (l.is_null() || r.is_null()) return false;
            int c = compare_cells(l, r);
            switch (p.op) {
                case CmpOp::Eq: return c == 0;
                case CmpOp::Ne: return c != 0;
                case CmpOp::Lt: return c < 0;
                case CmpOp::Le: return c <= 0;
                case CmpOp::Gt: return c > 0;
                case CmpOp::Ge: return c >= 0;
            }
            return false;
        }
        bool operator()(const LikePred& p) const {
            CellValue l = ctx.row[ctx.frame.resolve(p.col)];
            if (l.is_null()) return false;
            return like(to_canonical_string(l), p.pattern);
        }
        bool operator()(const InPred& p) const {
            CellValue l = ctx.row[ctx.frame.resolve(p.col)];
            if (l.is_null()) return false;
            for (const auto& v : p.values) {
                if (v.is_null()) continue;
                if ((l.is_number() && v.is_number()) || (l.is_text() && v.is_text())) {
                    if (compare_cells(l, v) == 0) return true;
                } else {
                    throw TypeError("type-incomparable IN list value");
                }
            }
            return false;
        }
        bool operator()(const BetweenPred& p) const {
            CellValue l = ctx.row[ctx.frame.resolve(p.col)];
            if (l.is_null() || p.lo.is_null() || p.hi.is_null()) return false;
            return compare_cells(l, p.lo) >= 0 && compare_cells(l, p.hi) <= 0;
        }
        bool operator()(const AndExpr& a) const {
            for (const auto& k : a.children)
                if (!eval_bool(*k, ctx)) return false;
            return true;
        }
        bool operator()(const OrExpr& o) const {
            for (const auto& k : o.children)
                if (eval_bool(*k, ctx)) return true;
            return false;
        }
        bool operator()(const NotExpr& n) const { return !eval_bool(*n.child, ctx); }
    };
    return std::visit(V{ctx}, e.node);
}

struct Accumulator {
    AggFn fn;
    int64_t count = 0;
    double sum = 0;
    bool any = false;
    bool all_int = true;
    CellValue extreme;

    void feed(const CellValue& v) {
        if (fn == AggFn::Count) {
            if (!v.is_null()) ++count;
            return;
        }
        if (v.is_null()) return;
        if (fn == AggFn::Sum || fn == AggFn::Avg) {
            if (!v.is_number()) throw TypeError("SUM/AVG over non-numeric column");
            sum += v.as_double();
            if (!v.is_int()) all_int = false;
            ++count;
            return;
        }
        // MIN/MAX
        if (!any) {
            extreme = v;
            any = true;
            return;
        }
        int c = compare_cells(v, extreme);
        if ((fn == AggFn::Min && c < 0) || (fn == AggFn::Max && c > 0)) extreme = v;
    }

    CellValue result() const {
        switch (fn) {
            case AggFn::Count: return CellValue(count);
            case AggFn::Sum:
                if (count == 0) return CellValue();
                if (all_int) return CellValue(static_cast<int64_t>(sum));
                return CellValue(sum);
            case AggFn::Avg:
                if (count == 0) return CellValue();
                return CellValue(sum / static_cast<double>(count));
            case AggFn::Min:
            case AggFn::Max: return any ? extreme : CellValue();
            case AggFn::None: break;
        }
        return CellValue();
    }
};

// Grouping key usable as a map key: canonical strings with a type marker so
// 1 and "1" group separately while 1 and 1.0 group together.
inline std::string group_key(const std::vector<CellValue>& cells) {
    std::string k;
    for (const auto& c : cells) {
        if (c.is_null()) k += "\x01N";
        else if (c.is_text()) k += "\x01T" + c.text();
        else k += "\x01D" + format_double(c.as_double());
    }
    return k;
}

inline std::string default_item_name(const SelectItem& it) {
    if (!it.alias.empty()) return it.alias;
    if (it.agg == AggFn::None) return it.col.name;
    if (it.star) return "COUNT(*)";
    return agg_name(it.agg) + "(" + it.col.name + ")";
}

}  // namespace exec_detail

inline ResultTable execute(const Catalog& catalog, const SqlAst& ast) {
    using namespace exec_detail;

    // Materialize FROM + JOINs into one frame of joined rows.
    Frame frame;
    std::vector<std::vector<CellValue>> rows;
    {
        const Table& base = catalog.lookup(ast.from.caption);
        for (const auto& c : base.columns) frame.slots.emplace_back(ast.from.binding(), c.name);
        for (const auto& r : base.rows) rows.push_back(r);
        for (const auto& j : ast.joins) {
            const Table& t = catalog.lookup(j.table.caption);
            Frame next = frame;
            for (const auto& c : t.columns) next.slots.emplace_back(j.table.binding(), c.name);
            int li, ri;
            {
                // join keys resolved against the combined frame
                Frame combined = next;
                li = combined.resolve(j.left);
                ri = combined.resolve(j.right);
            }
            std::vector<std::vector<CellValue>> joined;
            for (const auto& lr : rows) {
                for (const auto& rr : t.rows) {
                    std::vector<CellValue> merged = lr;
                    merged.insert(merged.end(), rr.begin(), rr.end());
                    const CellValue& a = merged[li];
                    const CellValue& b = merged[ri];
                    if (a.is_null() || b.is_null()) continue;
                    if (!((a.is_number() && b.is_number()) || (a.is_text() && b.is_text()))) continue;
                    if (compare_cells(a, b) != 0) continue;
                    joined.push_back(std::move(merged));
                }
            }
            frame = std::move(next);
            rows = std::move(joined);
        }
    }

    // WHERE
    if (ast.where) {
        std::vector<std::vector<CellValue>> kept;
        for (auto& r : rows)
            if (eval_bool(*ast.where, RowCtx{frame, r})) kept.push_back(std::move(r));
        rows = std::move(kept);
    }

    // resolve select list
    std::vector<SelectItem> items;
    if (ast.select_star) {
        for (const auto& s : frame.slots) {
            SelectItem it;
            it.col = ColumnRef{"", s.second};
            items.push_back(it);
        }
    } else {
        items = ast.select;
    }
    bool has_agg = false;
    for (const auto& it : items)
        if (it.agg != AggFn::None) has_agg = true;

    // validate column references up front (including on empty inputs)
    auto resolve_item_col = [&](const SelectItem& it) -> int {
        if (it.agg != AggFn::None && it.star) return -1;
        if (ast.select_star) {
            // slot-positional resolution for SELECT * (duplicate names allowed)
            for (size_t i = 0; i < frame.slots.size(); ++i)
                if (frame.slots[i].second == it.col.name && it.col.qualifier.empty())
                    return static_cast<int>(i);
        }
        return frame.resolve(it.col);
    };
    std::vector<int> item_cols(items.size());
    if (ast.select_star) {
        for (size_t i = 0; i < items.size(); ++i) item_cols[i] = static_cast<int>(i);
    } else {
        for (size_t i = 0; i < items.size(); ++i) item_cols[i] = resolve_item_col(items[i]);
    }
    std::vector<int> group_cols;
    for (const auto& g : ast.group_by) group_cols.push_back(frame.resolve(g));

    // bare columns must be grouping columns when aggregating
    if (has_agg || !group_cols.empty()) {
        for (size_t i = 0; i < items.size(); ++i) {
            if (items[i].agg != AggFn::None) continue;
            bool grouped = false;
            for (int g : group_cols)
                if (g == item_cols[i]) grouped = true;
            if (!grouped)
                throw SchemaError("column '" + items[i].col.name +
                                  "' must appear in GROUP BY when aggregating");
        }
    }

    ResultTable out;
    for (const auto& it : items) out.columns.push_back(default_item_name(it));

    auto project_row = [&](const std::vector<std::vector<CellValue>>& group) {
        std::vector<CellValue> r;
        for (size_t i = 0; i < items.size(); ++i) {
            const SelectItem& it = items[i];
            if (it.agg == AggFn::None) {
                r.push_back(group.front()[item_cols[i]]);
            } else if (it.star) {
                r.push_back(CellValue(static_cast<int64_t>(group.size())));
            } else {
                Accumulator acc{it.agg};
                for (const auto& gr : group) acc.feed(gr[item_cols[i]]);
                r.push_back(acc.result());
            }
        }
        return r;
    };

    if (has_agg || !group_cols.empty()) {
        if (group_cols.empty()) {
            // single whole-input group; aggregates over zero rows still emit
            // one row (COUNT -> 0, others NULL)
            out.rows.push_back(project_row(rows));
        } else {
            // insertion-ordered grouping for deterministic output
            std::map<std::string, size_t> index;
            std::vector<std::vector<std::vector<CellValue>>> groups;
            for (const auto& r : rows) {
                std::vector<CellValue> key;
                for (int g : group_cols) key.push_back(r[g]);
                std::string k = group_key(key);
                auto it = index.find(k);
                if (it == index.end()) {
                    index.emplace(k, groups.size());
                    groups.push_back({});
                    it = index.find(k);
                }
                groups[it->second].push_back(r);
            }
            for (const auto& g : groups) out.rows.push_back(project_row(g));
        }
    } else {
        for (const auto& r : rows) {
            std::vector<CellValue> pr;
            for (size_t i = 0; i < items.size(); ++i) pr.push_back(r[item_cols[i]]);
            out.rows.push_back(std::move(pr));
        }
    }

    // ORDER BY over the projected result: sort keys are result columns
    // (matched by alias/name) so aggregate ordering works after grouping.
    if (!ast.order_by.empty()) {
        std::vector<int> keys;
        std::vector<bool> desc;
        for (const auto& oi : ast.order_by) {
            std::string name = default_item_name(oi.expr);
            int idx = -1;
            for (size_t i = 0; i < out.columns.size(); ++i)
                if (out.columns[i] == name || (!oi.expr.alias.empty() && out.columns[i] == oi.expr.alias))
                    idx = static_cast<int>(i);
            if (idx < 0 && oi.expr.agg == AggFn::None) {
                // also accept a select alias referenced as a bare column
                for (size_t i = 0; i < items.size(); ++i)
                    if (items[i].alias == oi.expr.col.name) idx = static_cast<int>(i);
            }
            if (idx < 0) throw SchemaError("ORDER BY expression not in select list: " + name);
            keys.push_back(idx);
            desc.push_back(oi.desc);
        }
        auto cell_order = [](const CellValue& a, const CellValue& b) -> int {
            // NULLs sort first; cross-type falls back to canonical text
            if (a.is_null() && b.is_null()) return 0;
            if (a.is_null()) return -1;
            if (b.is_null()) return 1;
            if ((a.is_number() && b.is_number()) || (a.is_text() && b.is_text()))
                return exec_detail::compare_cells(a, b);
            return to_canonical_string(a).compare(to_canonical_string(b));
        };
        std::stable_sort(out.rows.begin(), out.rows.end(),
                         [&](const std::vector<CellValue>& a, const std::vector<CellValue>& b) {
                             for (size_t k = 0; k < keys.size(); ++k) {
                                 int c = cell_order(a[keys[k]], b[keys[k]]);
                                 if (c != 0) return desc[k] ? c > 0 : c < 0;
                             }
                             return false;  // stable: ties keep input order
                         });
        out.ordered = true;
    }

    if (ast.limit && out.rows.size() > static_cast<size_t>(*ast.limit))
        out.rows.resize(static_cast<size_t>(*ast.limit));

    return out;
}

inline ResultTable execute_sql(const Catalog& catalog, std::string_view text) {
    return execute(catalog, parse_sql(text));
}

// Validation outcome for generated SQL.
enum class SqlOutcome { ExecutableNonEmpty, ExecutableEmpty, NotExecutable };

struct ValidateResult {
    SqlOutcome outcome;
    std::string reason;  // set when NotExecutable
    bool executable() const { return outcome != SqlOutcome::NotExecutable; }
};

inline ValidateResult validate(const Catalog& catalog, const SqlAst& ast) {
    try {
        ResultTable r = execute(catalog, ast);
        bool non_empty = false;
        for (const auto& row : r.rows)
            for (const auto& c : row)
                if (!c.is_null()) non_empty = true;
        return {non_empty ? SqlOutcome::ExecutableNonEmpty : SqlOutcome::ExecutableEmpty, ""};
    } catch (const Error& e) {
        return {SqlOutcome::NotExecutable, e.what()};
    }
}

inline ValidateResult validate(const Catalog& catalog, std::string_view text) {
    try {
        ResultTable r = execute_sql(catalog, text);
        bool non_empty = false;
        for (const auto& row : r.rows)
            for (const auto& c : row)
                if (!c.is_null()) non_empty = true;
        return {non_empty ? SqlOutcome::ExecutableNonEmpty : SqlOutcome::ExecutableEmpty, ""};
    } catch (const Error& e) {
        return {SqlOutcome::NotExecutable, e.what()};
    }
}

// Converts an executed result to a markdown-renderable Table.
inline Table result_to_table(const ResultTable& r, const std::string& caption = "") {
    Table t;
    t.caption = caption;
    for (const auto& c : r.columns) t.columns.push_back({c, ColType::Text});
    if (!t.columns.empty()) t.key_column = t.columns[0].name;
    t.rows = r.rows;
    return t;
}

}  // namespace tabqa::sql
