#pragma once

// Shared fixtures for the test binaries: a small deterministic catalog, a
// synthesized corpus, and result-comparison helpers.

#include <algorithm>
#include <string>
#include <vector>

#include "tabqa/corpus.hpp"
#include "tabqa/domain.hpp"
#include "tabqa/synth/generate.hpp"
#include "tabqa/synth/templates.hpp"

namespace fixtures {

inline const tabqa::Catalog& small_catalog() {
    static const tabqa::Catalog cat = [] {
        tabqa::domain::TableGenSpec spec;
        spec.n_city_districts = 3;
        spec.years = {2021, 2022};
        spec.months = {1, 2, 3, 5, 7, 12};
        spec.property_rows_lo = 12;
        spec.property_rows_hi = 20;
        spec.finance_rows = 25;
        spec.land_rows = 15;
        return tabqa::domain::make_catalog(spec);
    }();
    return cat;
}

inline const std::vector<tabqa::QaPair>& small_corpus() {
    static const std::vector<tabqa::QaPair> pairs = [] {
        tabqa::synth::GenOptions opt;
        opt.per_template = 30;
        auto p = tabqa::synth::generate_corpus(small_catalog(), tabqa::synth::default_templates(),
                                               opt);
        tabqa::synth::assign_splits(p, opt.seed);
        return p;
    }();
    return pairs;
}

inline std::vector<std::string> result_rows_as_strings(const tabqa::sql::ResultTable& r) {
    std::vector<std::string> rows;
    for (const auto& row : r.rows) {
        std::string s;
        for (const auto& c : row) {
            s += tabqa::to_canonical_string(c);
            s += '\x1f';
        }
        rows.push_back(std::move(s));
    }
    return rows;
}

// multiset row equality; order-sensitive when either side is ordered
inline bool same_result(const tabqa::sql::ResultTable& a, const tabqa::sql::ResultTable& b) {
    if (a.columns != b.columns) return false;
    auto ra = result_rows_as_strings(a);
    auto rb = result_rows_as_strings(b);
    if (a.ordered || b.ordered) return ra == rb;
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    return ra == rb;
}

}  // namespace fixtures
