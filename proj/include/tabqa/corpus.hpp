#pragma once

// The QA-pair record and its JSONL corpus format, plus the by-intent train
// pool used for ICL demonstration selection.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/errors.hpp"
#include "tabqa/slu/labels.hpp"
#include "tabqa/sql/ast.hpp"
#include "tabqa/table.hpp"

namespace tabqa {

enum class Split { Unassigned, Train, Test, Val };

inline std::string split_name(Split s) {
    switch (s) {
        case Split::Unassigned: return "unassigned";
        case Split::Train: return "train";
        case Split::Test: return "test";
        case Split::Val: return "val";
    }
    return "?";
}

inline Split split_from_name(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    if (s == "val") return Split::Val;
    if (s == "unassigned") return Split::Unassigned;
    throw ConfigError("unknown split: " + s);
}

struct QaPair {
    std::string query;
    slu::SluAnnotation annotation;
    std::vector<std::string> captions;  // gold table caption(s)
    std::string sql;
    sql::ResultTable sql_result;
    std::string markdown_answer;
    std::optional<std::string> nl_answer;
    std::string template_id;
    Split split = Split::Unassigned;
    std::optional<int> judge_score;
};

namespace corpus_detail {

inline nlohmann::json result_to_json(const sql::ResultTable& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& c : row) {
            if (c.is_null()) jr.push_back(nullptr);
            else if (c.is_int()) jr.push_back(c.as_int());
            else if (c.is_decimal()) jr.push_back(c.as_double());
            else jr.push_back(c.text());
        }
        rows.push_back(std::move(jr));
    }
    return {{"columns", r.columns}, {"rows", rows}, {"ordered", r.ordered}};
}

inline sql::ResultTable result_from_json(const nlohmann::json& j) {
    sql::ResultTable r;
    r.columns = j.at("columns").get<std::vector<std::string>>();
    r.ordered = j.value("ordered", false);
    for (const auto& jr : j.at("rows")) {
        std::vector<CellValue> row;
        for (const auto& c : jr) {
            if (c.is_null()) row.push_back(CellValue());
            else if (c.is_number_integer()) row.push_back(CellValue(c.get<int64_t>()));
            else if (c.is_number_float()) row.push_back(CellValue(c.get<double>()));
            else row.push_back(CellValue(c.get<std::string>()));
        }
        r.rows.push_back(std::move(row));
    }
    return r;
}

}  // namespace corpus_detail

inline nlohmann::json qa_pair_to_json(const QaPair& p) {
    nlohmann::ordered_json j;
    j["query"] = p.query;
    j["intents"] = slu::intents_to_string(p.annotation.intents);
    j["slots"] = slu::tags_to_string(p.annotation.tags);
    j["table_captions"] = p.captions;
    j["SQL"] = p.sql;
    j["SQL_result"] = corpus_detail::result_to_json(p.sql_result);
    j["markdown_answer"] = p.markdown_answer;
    if (p.nl_answer) j["natural_language_answer"] = *p.nl_answer;
    j["template_id"] = p.template_id;
    j["split"] = split_name(p.split);
    if (p.judge_score) j["judge_score"] = *p.judge_score;
    return j;
}

inline QaPair qa_pair_from_json(const nlohmann::json& j) {
    QaPair p;
    p.query = j.at("query").get<std::string>();
    {
        std::string s = j.at("intents").get<std::string>();
        std::string cur;
        auto flush = [&] {
            std::string t = uni::trim(cur);
            cur.clear();
            if (!t.empty()) p.annotation.intents.insert(slu::intent_from_name(t));
        };
        for (char c : s) {
            if (c == '+') flush();
            else cur.push_back(c);
        }
        flush();
        p.annotation.intent_count = static_cast<int>(p.annotation.intents.size());
    }
    p.annotation.tags = slu::tags_from_string(j.at("slots").get<std::string>());
    p.captions = j.at("table_captions").get<std::vector<std::string>>();
    p.sql = j.at("SQL").get<std::string>();
    p.sql_result = corpus_detail::result_from_json(j.at("SQL_result"));
    p.markdown_answer = j.at("markdown_answer").get<std::string>();
    if (j.contains("natural_language_answer"))
        p.nl_answer = j.at("natural_language_answer").get<std::string>();
    p.template_id = j.value("template_id", "");
    p.split = split_from_name(j.value("split", "unassigned"));
    if (j.contains("judge_score")) p.judge_score = j.at("judge_score").get<int>();
    return p;
}

inline void save_corpus(const std::vector<QaPair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw RecordError("cannot write corpus file: " + path);
    for (const auto& p : pairs) out << qa_pair_to_json(p).dump() << "\n";
}

inline std::vector<QaPair> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open corpus file: " + path);
    std::vector<QaPair> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (uni::trim(line).empty()) continue;
        pairs.push_back(qa_pair_from_json(nlohmann::json::parse(line)));
    }
    return pairs;
}

inline std::vector<QaPair> filter_split(const std::vector<QaPair>& pairs, Split s) {
    std::vector<QaPair> out;
    for (const auto& p : pairs)
        if (p.split == s) out.push_back(p);
    return out;
}

// Read-only demonstration pool over the train split, indexed by intent.
class TrainPool {
public:
    explicit TrainPool(std::vector<QaPair> pairs) : pairs_(std::move(pairs)) {
        for (size_t i = 0; i < pairs_.size(); ++i)
            for (auto intent : pairs_[i].annotation.intents)
                by_intent_[intent].push_back(i);
    }

    size_t size() const { return pairs_.size(); }
    const std::vector<QaPair>& pairs() const { return pairs_; }

    // Up to `n` examples sharing `intent`; falls back to seeded random
    // examples when none share it. `fell_back` reports the fallback.
    std::vector<const QaPair*> select_by_intent(slu::IntentLabel intent, size_t n, uint64_t seed,
                                                bool* fell_back = nullptr) const {
        if (fell_back) *fell_back = false;
        std::vector<const QaPair*> out;
        auto it = by_intent_.find(intent);
        if (it != by_intent_.end() && !it->second.empty()) {
            std::vector<size_t> idx = it->second;
            std::mt19937_64 rng(seed);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (size_t i = 0; i < idx.size() && out.size() < n; ++i) out.push_back(&pairs_[idx[i]]);
            return out;
        }
        if (fell_back) *fell_back = true;
        std::vector<size_t> idx(pairs_.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (size_t i = 0; i < idx.size() && out.size() < n; ++i) out.push_back(&pairs_[idx[i]]);
        return out;
    }

    // Seeded sample of `n` examples covering as many intents as possible
    // (used for the 22-shot SLU prompt).
    std::vector<const QaPair*> select_covering(size_t n, uint64_t seed) const {
        std::vector<const QaPair*> out;
        std::set<slu::IntentLabel> covered;
        std::vector<size_t> idx(pairs_.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<bool> used(pairs_.size(), false);
        // first pass: one example per uncovered intent
        for (size_t i : idx) {
            if (out.size() >= n) break;
            bool adds = false;
            for (auto intent : pairs_[i].annotation.intents)
                if (!covered.count(intent)) adds = true;
            if (!adds) continue;
            for (auto intent : pairs_[i].annotation.intents) covered.insert(intent);
            out.push_back(&pairs_[i]);
            used[i] = true;
        }
        for (size_t i : idx) {
            if (out.size() >= n) break;
            if (!used[i]) out.push_back(&pairs_[i]);
        }
        return out;
    }

private:
    std::vector<QaPair> pairs_;
    std::map<slu::IntentLabel, std::vector<size_t>> by_intent_;
};

}  // namespace tabqa
