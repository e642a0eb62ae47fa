#pragma once

// Okapi BM25 over table captions. Tokenization: contiguous CJK runs emit
// single characters plus overlapping character bigrams; ASCII runs split on
// non-alphanumerics; digit runs are kept whole so years and months must
// match exactly.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "tabqa/errors.hpp"
#include "tabqa/table.hpp"
#include "tabqa/unicode.hpp"

namespace tabqa::retrieval {

inline std::vector<std::string> tokenize(const std::string& text) {
    auto cps = uni::codepoints(text);
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < cps.size()) {
        uint32_t cp = uni::decode_one(cps[i]);
        if (uni::is_cjk(cp)) {
            size_t j = i;
            while (j < cps.size() && uni::is_cjk(uni::decode_one(cps[j]))) ++j;
            for (size_t k = i; k < j; ++k) tokens.push_back(cps[k]);
            for (size_t k = i; k + 1 < j; ++k) tokens.push_back(cps[k] + cps[k + 1]);
            i = j;
        } else if (uni::is_ascii_digit(cp)) {
            std::string run;
            size_t j = i;
            while (j < cps.size() && uni::is_ascii_digit(uni::decode_one(cps[j]))) run += cps[j++];
            tokens.push_back(run);
            i = j;
        } else if (uni::is_ascii_alnum(cp)) {
            std::string run;
            size_t j = i;
            while (j < cps.size()) {
                uint32_t c = uni::decode_one(cps[j]);
                if (!uni::is_ascii_alnum(c) || uni::is_ascii_digit(c)) break;
                char ch = static_cast<char>(c);
                run += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch + 32) : ch;
                ++j;
            }
            tokens.push_back(run);
            i = j;
        } else {
            ++i;  // separator / punctuation / other scripts
        }
    }
    return tokens;
}

struct Bm25Index {
    std::map<std::string, std::vector<std::pair<int, int>>> postings;  // term -> (doc, tf)
    std::vector<int> doc_len;
    std::vector<std::string> captions;  // doc id -> caption
    double avgdl = 0;
    double k1 = 1.2;
    double b = 0.75;

    int N() const { return static_cast<int>(captions.size()); }

    double idf(const std::string& term) const {
        auto it = postings.find(term);
        int n = it == postings.end() ? 0 : static_cast<int>(it->second.size());
        // Okapi IDF with the +1 floor variant (never negative)
        return std::log(1.0 + (N() - n + 0.5) / (n + 0.5));
    }
};

inline Bm25Index build_index(const Catalog& catalog, double k1 = 1.2, double b = 0.75) {
    if (catalog.tables.empty()) throw EmptyInput("build_index: empty catalog");
    Bm25Index index;
    index.k1 = k1;
    index.b = b;
    double total_len = 0;
    for (const auto& [caption, _] : catalog.tables) {
        int doc = index.N();
        index.captions.push_back(caption);
        auto tokens = tokenize(caption);
        index.doc_len.push_back(static_cast<int>(tokens.size()));
        total_len += static_cast<double>(tokens.size());
        std::map<std::string, int> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, count] : tf) index.postings[term].emplace_back(doc, count);
    }
    index.avgdl = total_len / static_cast<double>(index.N());
    return index;
}

inline double score_doc(const Bm25Index& index, const std::map<std::string, int>& query_tf,
                        int doc) {
    double score = 0;
    for (const auto& [term, qtf] : query_tf) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        for (const auto& [d, tf] : it->second) {
            if (d != doc) continue;
            double denom = tf + index.k1 * (1 - index.b +
                                            index.b * index.doc_len[d] / index.avgdl);
            score += index.idf(term) * tf * (index.k1 + 1) / denom;
        }
    }
    return score;
}

// Top-k captions by BM25 score, descending; ties broken by caption order.
// Documents sharing no term with the query are omitted.
inline std::vector<std::pair<std::string, double>> search(const Bm25Index& index,
                                                          const std::string& text, int k) {
    if (k < 1) throw EmptyInput("search: k must be >= 1");
    std::map<std::string, int> query_tf;
    for (const auto& t : tokenize(text)) ++query_tf[t];

    std::map<int, double> scores;
    for (const auto& [term, qtf] : query_tf) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        double idf = index.idf(term);
        for (const auto& [doc, tf] : it->second) {
            double denom = tf + index.k1 * (1 - index.b +
                                            index.b * index.doc_len[doc] / index.avgdl);
            scores[doc] += idf * tf * (index.k1 + 1) / denom;
        }
    }
    std::vector<std::pair<std::string, double>> hits;
    for (const auto& [doc, s] : scores)
        if (s > 0) hits.emplace_back(index.captions[doc], s);
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (hits.size() > static_cast<size_t>(k)) hits.resize(static_cast<size_t>(k));
    return hits;
}

}  // namespace tabqa::retrieval
