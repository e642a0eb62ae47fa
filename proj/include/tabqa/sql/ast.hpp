#pragma once

// AST for the restricted SQL dialect: single-table or equi-join SELECT with
// WHERE / GROUP BY / ORDER BY / LIMIT. Grammar in docs/sql_grammar.md.

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tabqa/value.hpp"

namespace tabqa::sql {

enum class AggFn { None, Count, Sum, Avg, Min, Max };

inline std::string agg_name(AggFn f) {
    switch (f) {
        case AggFn::None: return "";
        case AggFn::Count: return "COUNT";
        case AggFn::Sum: return "SUM";
        case AggFn::Avg: return "AVG";
        case AggFn::Min: return "MIN";
        case AggFn::Max: return "MAX";
    }
    return "";
}

struct ColumnRef {
    std::string qualifier;  // table alias or caption; empty if unqualified
    std::string name;
    bool operator==(const ColumnRef&) const = default;
};

// One SELECT-list entry: a bare column, AGG(column), or COUNT(*).
struct SelectItem {
    AggFn agg = AggFn::None;
    bool star = false;  // COUNT(*)
    ColumnRef col;
    std::string alias;
    bool operator==(const SelectItem&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline std::string cmp_name(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "<>";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

using Operand = std::variant<ColumnRef, CellValue>;

struct CmpPred {
    CmpOp op;
    Operand lhs, rhs;
};
struct LikePred {
    ColumnRef col;
    std::string pattern;
};
struct InPred {
    ColumnRef col;
    std::vector<CellValue> values;
};
struct BetweenPred {
    ColumnRef col;
    CellValue lo, hi;
};

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<BoolExpr>;

struct AndExpr {
    std::vector<BoolExprPtr> children;
};
struct OrExpr {
    std::vector<BoolExprPtr> children;
};
struct NotExpr {
    BoolExprPtr child;
};

struct BoolExpr {
    std::variant<CmpPred, LikePred, InPred, BetweenPred, AndExpr, OrExpr, NotExpr> node;
};

struct TableRef {
    std::string caption;
    std::string alias;  // empty if none
    std::string binding() const { return alias.empty() ? caption : alias; }
};

struct JoinClause {
    TableRef table;
    ColumnRef left, right;  // equality condition
};

struct OrderItem {
    SelectItem expr;  // column, AGG(col), or alias reference (as bare column)
    bool desc = false;
};

struct SqlAst {
    bool select_star = false;
    std::vector<SelectItem> select;
    TableRef from;
    std::vector<JoinClause> joins;
    std::optional<BoolExpr> where;
    std::vector<ColumnRef> group_by;
    std::vector<OrderItem> order_by;
    std::optional<int64_t> limit;
};

// Result of executing an AST; `ordered` mirrors the presence of ORDER BY.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<CellValue>> rows;
    bool ordered = false;
};

// ---- printer (canonical text; parse(print(ast)) round-trips) ----

inline std::string quote_ident(const std::string& s) {
    std::string out = "`";
    for (char c : s) {
        if (c == '`') out += "``";
        else out.push_back(c);
    }
    return out + "`";
}

inline std::string quote_string(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    return out + "'";
}

inline std::string print_literal(const CellValue& v) {
    if (v.is_null()) return "NULL";
    if (v.is_text()) return quote_string(v.text());
    return to_canonical_string(v);
}

inline std::string print_column(const ColumnRef& c) {
    if (c.qualifier.empty()) return quote_ident(c.name);
    return quote_ident(c.qualifier) + "." + quote_ident(c.name);
}

inline std::string print_operand(const Operand& o) {
    if (std::holds_alternative<ColumnRef>(o)) return print_column(std::get<ColumnRef>(o));
    return print_literal(std::get<CellValue>(o));
}

inline std::string print_select_item(const SelectItem& it) {
    std::string s;
    if (it.agg == AggFn::None) {
        s = print_column(it.col);
    } else if (it.star) {
        s = agg_name(it.agg) + "(*)";
    } else {
        s = agg_name(it.agg) + "(" + print_column(it.col) + ")";
    }
    if (!it.alias.empty()) s += " AS " + quote_ident(it.alias);
    return s;
}

inline std::string print_bool(const BoolExpr& e);

inline std::string print_bool_child(const BoolExprPtr& p, bool paren) {
    std::string s = print_bool(*p);
    return paren ? "(" + s + ")" : s;
}

inline std::string print_bool(const BoolExpr& e) {
    struct V {
        std::string operator()(const CmpPred& p) const {
            return print_operand(p.lhs) + " " + cmp_name(p.op) + " " + print_operand(p.rhs);
        }
        std::string operator()(const LikePred& p) const {
            return print_column(p.col) + " LIKE " + quote_string(p.pattern);
        }
        std::string operator()(const InPred& p) const {
            std::string s = print_column(p.col) + " IN (";
            for (size_t i = 0; i < p.values.size(); ++i) {
                if (i) s += ", ";
                s += print_literal(p.values[i]);
            }
            return s + ")";
        }
        std::string operator()(const BetweenPred& p) const {
            return print_column(p.col) + " BETWEEN " + print_literal(p.lo) + " AND " +
                   print_literal(p.hi);
        }
        std::string operator()(const AndExpr& a) const {
            std::string s;
            for (size_t i = 0; i < a.children.size(); ++i) {
                if (i) s += " AND ";
                bool paren = std::holds_alternative<OrExpr>(a.children[i]->node);
                s += print_bool_child(a.children[i], paren);
            }
            return s;
        }
        std::string operator()(const OrExpr& o) const {
            std::string s;
            for (size_t i = 0; i < o.children.size(); ++i) {
                if (i) s += " OR ";
                s += print_bool_child(o.children[i], false);
            }
            return s;
        }
        std::string operator()(const NotExpr& n) const {
            return "NOT (" + print_bool(*n.child) + ")";
        }
    };
    return std::visit(V{}, e.node);
}

inline std::string print_sql(const SqlAst& ast) {
    std::ostringstream os;
    os << "SELECT ";
    if (ast.select_star) {
        os << "*";
    } else {
        for (size_t i = 0; i < ast.select.size(); ++i) {
            if (i) os << ", ";
            os << print_select_item(ast.select[i]);
        }
    }
    os << " FROM " << quote_ident(ast.from.caption);
    if (!ast.from.alias.empty()) os << " AS " << quote_ident(ast.from.alias);
    for (const auto& j : ast.joins) {
        os << " JOIN " << quote_ident(j.table.caption);
        if (!j.table.alias.empty()) os << " AS " << quote_ident(j.table.alias);
        os << " ON " << print_column(j.left) << " = " << print_column(j.right);
    }
    if (ast.where) os << " WHERE " << print_bool(*ast.where);
    if (!ast.group_by.empty()) {
        os << " GROUP BY ";
        for (size_t i = 0; i < ast.group_by.size(); ++i) {
            if (i) os << ", ";
            os << print_column(ast.group_by[i]);
        }
    }
    if (!ast.order_by.empty()) {
        os << " ORDER BY ";
        for (size_t i = 0; i < ast.order_by.size(); ++i) {
            if (i) os << ", ";
            const SelectItem& it = ast.order_by[i].expr;
            if (!it.alias.empty()) {
                os << quote_ident(it.alias);
            } else {
                os << print_select_item(it);
            }
            os << (ast.order_by[i].desc ? " DESC" : " ASC");
        }
    }
    if (ast.limit) os << " LIMIT " << *ast.limit;
    return os.str();
}

}  // namespace tabqa::sql
