#pragma once

// Recursive-descent parser for the restricted dialect. Keywords are
// case-insensitive; identifiers may be bare, backquoted, or double-quoted
// (captions and column names contain CJK text and spaces).

#include <cctype>
#include <string>
#include <vector>

#include "tabqa/errors.hpp"
#include "tabqa/sql/ast.hpp"

namespace tabqa::sql {

namespace detail {

enum class TokKind { Ident, String, Number, Op, Punct, End };

struct Token {
    TokKind kind;
    std::string text;   // identifiers unquoted, strings unescaped
    std::string upper;  // uppercase form for keyword matching (bare idents only)
    size_t pos;
    bool quoted = false;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { tokenize(); }
    const std::vector<Token>& tokens() const { return toks_; }

private:
    void tokenize() {
        size_t i = 0;
        const size_t n = src_.size();
        auto is_sp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
        while (i < n) {
            if (is_sp(src_[i])) {
                ++i;
                continue;
            }
            size_t start = i;
            char c = src_[i];
            if (c == '\'' ) {
                std::string s;
                ++i;
                while (i < n) {
                    if (src_[i] == '\'') {
                        if (i + 1 < n && src_[i + 1] == '\'') {
                            s.push_back('\'');
                            i += 2;
                        } else {
                            ++i;
                            break;
                        }
                    } else {
                        s.push_back(src_[i++]);
                    }
                }
                toks_.push_back({TokKind::String, s, "", start, true});
            } else if (c == '`' || c == '"') {
                char q = c;
                std::string s;
                ++i;
                while (i < n) {
                    if (src_[i] == q) {
                        if (i + 1 < n && src_[i + 1] == q) {
                            s.push_back(q);
                            i += 2;
                        } else {
                            ++i;
                            break;
                        }
                    } else {
                        s.push_back(src_[i++]);
                    }
                }
                toks_.push_back({TokKind::Ident, s, "", start, true});
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src_[i + 1])) &&
                        numeric_context())) {
                size_t j = i + (c == '-' ? 1 : 0);
                bool dot = false;
                while (j < n && (std::isdigit(static_cast<unsigned char>(src_[j])) ||
                                 (src_[j] == '.' && !dot))) {
                    if (src_[j] == '.') dot = true;
                    ++j;
                }
                toks_.push_back({TokKind::Number, std::string(src_.substr(i, j - i)), "", start});
                i = j;
            } else if (c == '<' || c == '>' || c == '=' || c == '!') {
                size_t j = i + 1;
                if (j < n && (src_[j] == '=' || (c == '<' && src_[j] == '>'))) ++j;
                toks_.push_back({TokKind::Op, std::string(src_.substr(i, j - i)), "", start});
                i = j;
            } else if (c == '(' || c == ')' || c == ',' || c == '.' || c == '*' || c == ';') {
                toks_.push_back({TokKind::Punct, std::string(1, c), "", start});
                ++i;
            } else {
                // bare identifier / keyword: run of bytes that are not
                // whitespace, punctuation, operators, or quotes
                size_t j = i;
                while (j < n) {
                    char d = src_[j];
                    if (is_sp(d) || d == '(' || d == ')' || d == ',' || d == '.' || d == '*' ||
                        d == ';' || d == '<' || d == '>' || d == '=' || d == '!' || d == '\'' ||
                        d == '`' || d == '"')
                        break;
                    ++j;
                }
                std::string s(src_.substr(i, j - i));
                Token t{TokKind::Ident, s, "", start};
                t.upper.reserve(s.size());
                for (char d : s)
                    t.upper.push_back(d >= 'a' && d <= 'z' ? static_cast<char>(d - 32) : d);
                toks_.push_back(std::move(t));
                i = j;
            }
        }
        toks_.push_back({TokKind::End, "", "", n});
    }

    // A leading '-' starts a number only where an operand can begin: after an
    // operator, comma, '(', or a keyword such as BETWEEN/AND/WHERE.
    bool numeric_context() const {
        if (toks_.empty()) return false;
        const Token& t = toks_.back();
        if (t.kind == TokKind::Op) return true;
        if (t.kind == TokKind::Punct && (t.text == "(" || t.text == ",")) return true;
        if (t.kind == TokKind::Ident && !t.quoted) {
            for (const char* k : {"BETWEEN", "AND", "OR", "NOT", "WHERE", "ON", "IN", "LIKE"})
                if (t.upper == k) return true;
        }
        return false;
    }

    std::string_view src_;
    std::vector<Token> toks_;
};

}  // namespace detail

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src), toks_(lexer_.tokens()) {}

    SqlAst parse() {
        expect_kw("SELECT");
        if (at_kw("DISTINCT")) throw UnsupportedSql("DISTINCT is not supported");
        SqlAst ast;
        parse_select_list(ast);
        expect_kw("FROM");
        ast.from = parse_table_ref();
        while (at_kw("JOIN") || at_kw("INNER")) {
            if (at_kw("INNER")) advance();
            expect_kw("JOIN");
            JoinClause j;
            j.table = parse_table_ref();
            expect_kw("ON");
            j.left = parse_column_ref();
            if (!(cur().kind == detail::TokKind::Op && cur().text == "="))
                fail("expected '=' in join condition");
            advance();
            j.right = parse_column_ref();
            ast.joins.push_back(std::move(j));
        }
        if (at_kw("WHERE")) {
            advance();
            ast.where = parse_or();
        }
        if (at_kw("GROUP")) {
            advance();
            expect_kw("BY");
            ast.group_by.push_back(parse_column_ref());
            while (at_punct(",")) {
                advance();
                ast.group_by.push_back(parse_column_ref());
            }
        }
        if (at_kw("HAVING")) throw UnsupportedSql("HAVING is not supported");
        if (at_kw("ORDER")) {
            advance();
            expect_kw("BY");
            ast.order_by.push_back(parse_order_item());
            while (at_punct(",")) {
                advance();
                ast.order_by.push_back(parse_order_item());
            }
        }
        if (at_kw("LIMIT")) {
            advance();
            if (cur().kind != detail::TokKind::Number) fail("expected integer after LIMIT");
            auto v = parse_int(cur().text);
            if (!v || *v < 0) fail("LIMIT must be a non-negative integer");
            ast.limit = *v;
            advance();
        }
        if (at_punct(";")) advance();
        if (cur().kind != detail::TokKind::End) {
            if (at_kw("UNION") || at_kw("EXCEPT") || at_kw("INTERSECT"))
                throw UnsupportedSql("set operations are not supported");
            fail("unexpected trailing input");
        }
        check_invariants(ast);
        return ast;
    }

private:
    void check_invariants(const SqlAst& ast) const {
        if (ast.select_star) return;
        bool any_agg = false, any_bare = false;
        for (const auto& it : ast.select) (it.agg == AggFn::None ? any_bare : any_agg) = true;
        if (any_agg && any_bare && ast.group_by.empty())
            throw UnsupportedSql(
                "bare columns mixed with aggregates require GROUP BY");
    }

    void parse_select_list(SqlAst& ast) {
        if (at_punct("*")) {
            ast.select_star = true;
            advance();
            return;
        }
        ast.select.push_back(parse_select_item());
        while (at_punct(",")) {
            advance();
            ast.select.push_back(parse_select_item());
        }
    }

    SelectItem parse_select_item() {
        SelectItem it = parse_value_expr();
        if (at_kw("AS")) {
            advance();
            if (cur().kind != detail::TokKind::Ident) fail("expected alias after AS");
            it.alias = cur().text;
            advance();
        } else if (cur().kind == detail::TokKind::Ident && !cur().quoted && !at_any_keyword()) {
            it.alias = cur().text;
            advance();
        }
        return it;
    }

    // column or AGG(column) or COUNT(*)
    SelectItem parse_value_expr() {
        SelectItem it;
        if (cur().kind == detail::TokKind::Ident && !cur().quoted) {
            AggFn fn = AggFn::None;
            const std::string& u = cur().upper;
            if (u == "COUNT") fn = AggFn::Count;
            else if (u == "SUM") fn = AggFn::Sum;
            else if (u == "AVG") fn = AggFn::Avg;
            else if (u == "MIN") fn = AggFn::Min;
            else if (u == "MAX") fn = AggFn::Max;
            if (fn != AggFn::None && peek_punct("(")) {
                advance();
                advance();  // consume '('
                it.agg = fn;
                if (at_punct("*")) {
                    if (fn != AggFn::Count) fail("only COUNT accepts *");
                    it.star = true;
                    advance();
                } else {
                    if (at_kw("DISTINCT")) throw UnsupportedSql("DISTINCT is not supported");
                    it.col = parse_column_ref();
                }
                if (!at_punct(")")) fail("expected ')'");
                advance();
                return it;
            }
        }
        if (at_kw("SELECT")) throw UnsupportedSql("subqueries are not supported");
        it.col = parse_column_ref();
        return it;
    }

    OrderItem parse_order_item() {
        OrderItem oi;
        oi.expr = parse_value_expr();
        if (at_kw("ASC")) advance();
        else if (at_kw("DESC")) {
            oi.desc = true;
            advance();
        }
        return oi;
    }

    TableRef parse_table_ref() {
        if (cur().kind == detail::TokKind::Punct && cur().text == "(")
            throw UnsupportedSql("subqueries are not supported");
        if (cur().kind != detail::TokKind::Ident) fail("expected table name");
        if (!cur().quoted && cur().upper == "SELECT") throw UnsupportedSql("subqueries are not supported");
        TableRef t;
        t.caption = cur().text;
        advance();
        if (at_kw("AS")) {
            advance();
            if (cur().kind != detail::TokKind::Ident) fail("expected alias after AS");
            t.alias = cur().text;
            advance();
        } else if (cur().kind == detail::TokKind::Ident && !cur().quoted && !at_any_keyword()) {
            t.alias = cur().text;
            advance();
        }
        return t;
    }

    ColumnRef parse_column_ref() {
        if (cur().kind != detail::TokKind::Ident) fail("expected column name");
        ColumnRef c;
        c.name = cur().text;
        advance();
        if (at_punct(".")) {
            advance();
            if (cur().kind != detail::TokKind::Ident) fail("expected column after '.'");
            c.qualifier = c.name;
            c.name = cur().text;
            advance();
        }
        return c;
    }

    // ---- boolean expressions ----
    BoolExpr parse_or() {
        std::vector<BoolExprPtr> kids;
        kids.push_back(std::make_shared<BoolExpr>(parse_and()));
        while (at_kw("OR")) {
            advance();
            kids.push_back(std::make_shared<BoolExpr>(parse_and()));
        }
        if (kids.size() == 1) return *kids[0];
        return BoolExpr{OrExpr{std::move(kids)}};
    }

    BoolExpr parse_and() {
        std::vector<BoolExprPtr> kids;
        kids.push_back(std::make_shared<BoolExpr>(parse_not()));
        while (at_kw("AND")) {
            advance();
            kids.push_back(std::make_shared<BoolExpr>(parse_not()));
        }
        if (kids.size() == 1) return *kids[0];
        return BoolExpr{AndExpr{std::move(kids)}};
    }

    BoolExpr parse_not() {
        if (at_kw("NOT")) {
            advance();
            return BoolExpr{NotExpr{std::make_shared<BoolExpr>(parse_not())}};
        }
        return parse_primary();
    }

    BoolExpr parse_primary() {
        if (at_punct("(")) {
            advance();
            if (at_kw("SELECT")) throw UnsupportedSql("subqueries are not supported");
            BoolExpr e = parse_or();
            if (!at_punct(")")) fail("expected ')'");
            advance();
            return e;
        }
        return parse_predicate();
    }

    Operand parse_operand() {
        if (cur().kind == detail::TokKind::String) {
            Operand o = CellValue(cur().text);
            advance();
            return o;
        }
        if (cur().kind == detail::TokKind::Number) {
            Operand o = parse_number(cur().text);
            advance();
            return o;
        }
        if (at_kw("NULL")) {
            advance();
            return CellValue();
        }
        return parse_column_ref();
    }

    CellValue parse_literal() {
        Operand o = parse_operand();
        if (!std::holds_alternative<CellValue>(o)) fail("expected a literal");
        return std::get<CellValue>(o);
    }

    static CellValue parse_number(const std::string& s) {
        if (auto i = parse_int(s)) return CellValue(*i);
        if (auto d = parse_double(s)) return CellValue(*d);
        return CellValue();
    }

    BoolExpr parse_predicate() {
        Operand lhs = parse_operand();
        if (cur().kind == detail::TokKind::Op) {
            std::string op = cur().text;
            advance();
            CmpOp c;
            if (op == "=") c = CmpOp::Eq;
            else if (op == "<>" || op == "!=") c = CmpOp::Ne;
            else if (op == "<") c = CmpOp::Lt;
            else if (op == "<=") c = CmpOp::Le;
            else if (op == ">") c = CmpOp::Gt;
            else if (op == ">=") c = CmpOp::Ge;
            else {
                fail("unknown comparison operator '" + op + "'");
                c = CmpOp::Eq;
            }
            return BoolExpr{CmpPred{c, std::move(lhs), parse_operand()}};
        }
        if (!std::holds_alternative<ColumnRef>(lhs)) fail("expected comparison operator");
        ColumnRef col = std::get<ColumnRef>(lhs);
        bool negate = false;
        if (at_kw("NOT")) {
            advance();
            negate = true;
        }
        BoolExpr inner;
        if (at_kw("LIKE")) {
            advance();
            if (cur().kind != detail::TokKind::String) fail("expected pattern string after LIKE");
            inner = BoolExpr{LikePred{col, cur().text}};
            advance();
        } else if (at_kw("IN")) {
            advance();
            if (!at_punct("(")) fail("expected '(' after IN");
            advance();
            if (at_kw("SELECT")) throw UnsupportedSql("subqueries are not supported");
            InPred p{col, {}};
            p.values.push_back(parse_literal());
            while (at_punct(",")) {
                advance();
                p.values.push_back(parse_literal());
            }
            if (!at_punct(")")) fail("expected ')'");
            advance();
            inner = BoolExpr{std::move(p)};
        } else if (at_kw("BETWEEN")) {
            advance();
            CellValue lo = parse_literal();
            expect_kw("AND");
            CellValue hi = parse_literal();
            inner = BoolExpr{BetweenPred{col, lo, hi}};
        } else if (at_kw("IS")) {
            throw UnsupportedSql("IS NULL is not supported");
        } else {
            fail("expected a predicate");
        }
        if (negate) return BoolExpr{NotExpr{std::make_shared<BoolExpr>(std::move(inner))}};
        return inner;
    }

    // ---- token helpers ----
    const detail::Token& cur() const { return toks_[pos_]; }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    bool at_kw(const char* kw) const {
        return cur().kind == detail::TokKind::Ident && !cur().quoted && cur().upper == kw;
    }
    bool at_punct(const char* p) const { return cur().kind == detail::TokKind::Punct && cur().text == p; }
    bool peek_punct(const char* p) const {
        return pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == detail::TokKind::Punct &&
               toks_[pos_ + 1].text == p;
    }
    bool at_any_keyword() const {
        static const char* kws[] = {"SELECT", "FROM",  "WHERE",   "GROUP", "BY",    "ORDER",
                                    "LIMIT",  "JOIN",  "INNER",   "ON",    "AND",   "OR",
                                    "NOT",    "LIKE",  "IN",      "BETWEEN", "AS",  "ASC",
                                    "DESC",   "HAVING", "UNION",  "NULL",  "IS",    "DISTINCT"};
        if (cur().kind != detail::TokKind::Ident || cur().quoted) return false;
        for (const char* k : kws)
            if (cur().upper == k) return true;
        return false;
    }
    void expect_kw(const char* kw) {
        if (!at_kw(kw)) fail(std::string("expected ") + kw);
        advance();
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("SQL parse error at offset " + std::to_string(cur().pos) + ": " + msg);
    }

    detail::Lexer lexer_;
    const std::vector<detail::Token>& toks_;
    size_t pos_ = 0;
};

inline SqlAst parse_sql(std::string_view text) { return Parser(text).parse(); }

}  // namespace tabqa::sql
