#pragma once

// Shared SQL test workload: small hand-written fixture tables and a random
// join/aggregate query generator for engine-vs-reference comparison.

#include <array>
#include <random>

#include "tabqa/sql/executor.hpp"
#include "tabqa/sql/parser.hpp"

namespace sqlwork {

using namespace tabqa;
using namespace tabqa::sql;

Table fixture_sales() {
    std::vector<std::vector<std::string>> raw = {
        {"name", "district", "price", "count", "dev"},
        {"甲园", "东区", "100.5", "3", "devA"},
        {"乙园", "东区", "200", "5", "devB"},
        {"丙园", "西区", "150.25", "", "devA"},
        {"丁园", "西区", "", "2", "devC"},
        {"戊园", "北区", "300", "7", "devB"},
        {"己园", "北区", "120", "4", "devA"},
        {"庚园", "东区", "180", "6", "devB"},
        {"辛园", "西区", "90", "1", "devC"},
        {"壬园", "北区", "210", "9", "devA"},
        {"癸园", "东区", "160", "5", "devB"},
    };
    return table_from_rows("sales", Domain::Property, "name", raw);
}

Table fixture_info() {
    std::vector<std::vector<std::string>> raw = {
        {"name", "group", "year"},
        {"甲园", "G1", "2021"}, {"乙园", "G2", "2021"}, {"丙园", "G1", "2022"},
        {"丁园", "G3", "2022"}, {"戊园", "G2", "2021"}, {"辛园", "G1", "2022"},
    };
    return table_from_rows("info", Domain::LandAuction, "name", raw);
}

const Catalog& fixture_catalog() {
    static const Catalog cat = [] {
        Catalog c;
        c.add(fixture_sales());
        c.add(fixture_info());
        return c;
    }();
    return cat;
}

// random small-table workload for the fuzz comparison
Catalog random_catalog(std::mt19937_64& rng) {
    auto uniform = [&](int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng);
    };
    Catalog cat;
    for (int t = 0; t < 2; ++t) {
        std::vector<std::vector<std::string>> raw = {{"id", "tag", "v", "w"}};
        int n = uniform(1, 8);
        for (int r = 0; r < n; ++r) {
            std::string id = std::to_string(uniform(1, 5));
            std::string tag(1, static_cast<char>('a' + uniform(0, 3)));
            std::string v = uniform(0, 5) == 0 ? "" : std::to_string(uniform(-20, 20));
            std::string w = std::to_string(uniform(0, 100)) + "." + std::to_string(uniform(0, 9));
            raw.push_back({id, tag, v, w});
        }
        cat.add(table_from_rows(t == 0 ? "t0" : "t1", Domain::Property, "id", raw));
    }
    return cat;
}

SqlAst random_query(std::mt19937_64& rng) {
    auto uniform = [&](int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng);
    };
    SqlAst ast;
    bool join = uniform(0, 1) == 1;
    ast.from = {"t0", join ? "a" : ""};
    if (join) ast.joins.push_back({{"t1", "b"}, {"a", "id"}, {"b", "id"}});
    std::string qa = join ? "a" : "";

    auto col = [&](const std::string& q, const std::string& n) { return ColumnRef{q, n}; };
    auto num_col = [&] { return col(qa, uniform(0, 1) ? "v" : "w"); };

    if (uniform(0, 1) == 0) {
        // aggregate query, sometimes grouped
        bool grouped = uniform(0, 1) == 1;
        if (grouped) {
            ast.group_by.push_back(col(qa, "tag"));
            SelectItem g;
            g.col = col(qa, "tag");
            ast.select.push_back(g);
        }
        int n_aggs = uniform(1, 2);
        for (int i = 0; i < n_aggs; ++i) {
            SelectItem it;
            int k = uniform(0, 4);
            it.agg = std::array{AggFn::Count, AggFn::Sum, AggFn::Avg, AggFn::Min, AggFn::Max}[k];
            if (it.agg == AggFn::Count && uniform(0, 1)) it.star = true;
            else it.col = num_col();
            it.alias = "x" + std::to_string(i);
            ast.select.push_back(it);
        }
        if (uniform(0, 1)) {
            OrderItem oi;
            oi.expr = ast.select.back();
            oi.desc = uniform(0, 1) == 1;
            ast.order_by.push_back(oi);
        }
    } else {
        for (const std::string n : {"id", "tag", "v"}) {
            SelectItem it;
            it.col = col(qa, n);
            ast.select.push_back(it);
        }
        if (uniform(0, 1)) {
            OrderItem oi;
            oi.expr = ast.select[uniform(0, 2)];
            oi.desc = uniform(0, 1) == 1;
            ast.order_by.push_back(oi);
        }
        if (uniform(0, 1)) ast.limit = uniform(1, 5);
    }

    if (uniform(0, 2) > 0) {
        auto leaf = [&]() -> BoolExprPtr {
            auto e = std::make_shared<BoolExpr>();
            switch (uniform(0, 3)) {
                case 0:
                    e->node = CmpPred{std::array{CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le,
                                                 CmpOp::Gt, CmpOp::Ge}[uniform(0, 5)],
                                      Operand{num_col()},
                                      Operand{CellValue(int64_t(uniform(-10, 10)))}};
                    break;
                case 1:
                    e->node = LikePred{col(qa, "tag"),
                                       uniform(0, 1) ? "%a%" : std::string(1, 'a' + uniform(0, 3))};
                    break;
                case 2: {
                    InPred p{col(qa, "id"), {}};
                    int n = uniform(1, 3);
                    for (int i = 0; i < n; ++i)
                        p.values.push_back(CellValue(int64_t(uniform(1, 5))));
                    e->node = std::move(p);
                    break;
                }
                default:
                    e->node = BetweenPred{num_col(), CellValue(int64_t(uniform(-10, 0))),
                                          CellValue(int64_t(uniform(0, 10)))};
            }
            return e;
        };
        BoolExpr w;
        switch (uniform(0, 3)) {
            case 0: w = *leaf(); break;
            case 1: w.node = AndExpr{{leaf(), leaf()}}; break;
            case 2: w.node = OrExpr{{leaf(), leaf()}}; break;
            default: w.node = NotExpr{leaf()};
        }
        ast.where = std::move(w);
    }
    return ast;
}

}  // namespace sqlwork
