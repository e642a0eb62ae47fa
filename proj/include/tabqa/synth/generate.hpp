#pragma once

// Corpus synthesis: template filling against a catalog, duplicate and
// non-executable filtering, gold answers, query rewriting with verbatim
// slot survival, naturalness judging, and stratified split assignment.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tabqa/corpus.hpp"
#include "tabqa/domain.hpp"
#include "tabqa/llm/client.hpp"
#include "tabqa/prompts.hpp"
#include "tabqa/sql/executor.hpp"
#include "tabqa/sql/parser.hpp"
#include "tabqa/synth/templates.hpp"

namespace tabqa::synth {

struct Fill {
    std::string query;
    slu::SluAnnotation annotation;
    std::vector<std::string> captions;
    std::string sql;
};

namespace synth_detail {

inline uint64_t draw_seed(uint64_t seed, const std::string& template_id, int draw) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void* p, size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    mix(&seed, sizeof seed);
    mix(template_id.data(), template_id.size());
    mix(&draw, sizeof draw);
    return h;
}

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

}  // namespace synth_detail

// One deterministic draw of a template against a catalog. Throws
// SamplingError when the catalog cannot satisfy the template.
inline Fill fill_template(const Catalog& cat, const Template& tpl, uint64_t seed, int draw) {
    std::mt19937_64 rng(synth_detail::draw_seed(seed, tpl.id, draw));
    auto uniform = [&](size_t n) {
        std::uniform_int_distribution<size_t> d(0, n - 1);
        return d(rng);
    };

    std::vector<const Table*> candidates;
    for (const auto& [_, t] : cat.tables)
        if (t.domain == tpl.domain) candidates.push_back(&t);
    if (candidates.empty())
        throw SamplingError("template " + tpl.id + ": no tables of its domain");

    const Table* first = nullptr;
    const Table* second = nullptr;
    if (tpl.multi_table()) {
        // pairs sharing city/district/year, differing in month
        std::map<std::string, std::vector<const Table*>> groups;
        for (const Table* t : candidates) {
            auto parts = domain::parse_caption(t->caption, t->domain);
            if (!parts || !parts->year) continue;
            groups[parts->city + "|" + parts->district + "|" + std::to_string(*parts->year)]
                .push_back(t);
        }
        std::vector<const std::vector<const Table*>*> eligible;
        for (const auto& [_, g] : groups)
            if (g.size() >= 2) eligible.push_back(&g);
        if (eligible.empty())
            throw SamplingError("template " + tpl.id + ": no same-year month pairs");
        const auto& group = *eligible[uniform(eligible.size())];
        size_t a = uniform(group.size());
        size_t b = uniform(group.size() - 1);
        if (b >= a) ++b;
        first = group[a];
        second = group[b];
    } else {
        first = candidates[uniform(candidates.size())];
    }

    auto parts = domain::parse_caption(first->caption, first->domain);

    std::map<std::string, std::string> values;
    std::set<std::string> used_keys;

    // distinct key-column values; intersection of both tables if joined
    auto sample_key = [&]() -> std::string {
        int k1 = first->column_index(first->key_column);
        std::set<std::string> keys;
        for (const auto& row : first->rows)
            if (row[k1].is_text()) keys.insert(row[k1].text());
        if (second) {
            int k2 = second->column_index(second->key_column);
            std::set<std::string> keys2;
            for (const auto& row : second->rows)
                if (row[k2].is_text()) keys2.insert(row[k2].text());
            std::set<std::string> both;
            for (const auto& k : keys)
                if (keys2.count(k)) both.insert(k);
            keys = std::move(both);
        }
        std::vector<std::string> pool;
        for (const auto& k : keys)
            if (!used_keys.count(k)) pool.push_back(k);
        if (pool.empty()) throw SamplingError("template " + tpl.id + ": key pool exhausted");
        std::string v = pool[uniform(pool.size())];
        used_keys.insert(v);
        return v;
    };

    auto column_values = [&](const std::string& col) {
        int c = first->column_index(col);
        if (c < 0) throw SamplingError("template " + tpl.id + ": no column " + col);
        std::set<std::string> vals;
        for (const auto& row : first->rows)
            if (!row[c].is_null()) vals.insert(to_canonical_string(row[c]));
        if (vals.empty()) throw SamplingError("template " + tpl.id + ": column " + col + " empty");
        return std::vector<std::string>(vals.begin(), vals.end());
    };

    // low/high pairs share one draw per column
    std::map<std::string, std::pair<std::string, std::string>> low_high;
    auto low_high_for = [&](const std::string& col) {
        auto it = low_high.find(col);
        if (it != low_high.end()) return it->second;
        auto vals = column_values(col);
        if (vals.size() < 2)
            throw SamplingError("template " + tpl.id + ": column " + col + " lacks two values");
        size_t a = uniform(vals.size());
        size_t b = uniform(vals.size() - 1);
        if (b >= a) ++b;
        double da = parse_double(vals[a]).value_or(0);
        double db = parse_double(vals[b]).value_or(0);
        auto pair = da <= db ? std::make_pair(vals[a], vals[b]) : std::make_pair(vals[b], vals[a]);
        low_high[col] = pair;
        return pair;
    };

    for (const auto& [name, spec] : tpl.vars) {
        const std::string& src = spec.source;
        if (src == "caption_city") values[name] = parts ? parts->city : "";
        else if (src == "caption_district") values[name] = parts ? parts->district : "";
        else if (src == "caption_year") {
            if (!parts || !parts->year)
                throw SamplingError("template " + tpl.id + ": caption has no year");
            values[name] = std::to_string(*parts->year);
        } else if (src == "caption_month") {
            if (!parts || !parts->month)
                throw SamplingError("template " + tpl.id + ": caption has no month");
            values[name] = std::to_string(*parts->month);
        } else if (src == "caption2_month") {
            std::optional<domain::CaptionParts> p2;
            if (second) p2 = domain::parse_caption(second->caption, second->domain);
            if (!p2 || !p2->month)
                throw SamplingError("template " + tpl.id + ": second caption has no month");
            values[name] = std::to_string(*p2->month);
        } else if (src == "key_value") {
            values[name] = sample_key();
        } else if (src.rfind("column_low:", 0) == 0) {
            values[name] = low_high_for(src.substr(11)).first;
        } else if (src.rfind("column_high:", 0) == 0) {
            values[name] = low_high_for(src.substr(12)).second;
        } else if (src.rfind("column:", 0) == 0) {
            auto vals = column_values(src.substr(7));
            values[name] = vals[uniform(vals.size())];
        } else {
            throw ConfigError("template " + tpl.id + ": unknown var source " + src);
        }
        if (values[name].empty())
            throw SamplingError("template " + tpl.id + ": empty value for var " + name);
    }

    Fill fill;
    fill.captions.push_back(first->caption);
    if (second) fill.captions.push_back(second->caption);

    // assemble the query, tagging slot spans as they are inserted
    std::vector<slu::SlotTag> tags;
    size_t cp_pos = 0;
    auto append_text = [&](const std::string& s) {
        fill.query += s;
        size_t n = uni::codepoint_count(s);
        for (size_t i = 0; i < n; ++i) tags.push_back(slu::SlotTag::O());
        cp_pos += n;
    };
    const std::string& qt = tpl.query_template;
    size_t pos = 0;
    while (pos < qt.size()) {
        size_t open = qt.find('{', pos);
        if (open == std::string::npos) {
            append_text(qt.substr(pos));
            break;
        }
        append_text(qt.substr(pos, open - pos));
        size_t close = qt.find('}', open);
        if (close == std::string::npos) throw ConfigError("template " + tpl.id + ": unclosed {");
        std::string name = qt.substr(open + 1, close - open - 1);
        auto it = tpl.vars.find(name);
        if (it == tpl.vars.end())
            throw ConfigError("template " + tpl.id + ": unknown query var " + name);
        const std::string& value = values[name];
        fill.query += value;
        size_t n = uni::codepoint_count(value);
        for (size_t i = 0; i < n; ++i) {
            if (it->second.slot)
                tags.push_back(i == 0 ? slu::SlotTag::B(*it->second.slot)
                                      : slu::SlotTag::I(*it->second.slot));
            else
                tags.push_back(slu::SlotTag::O());
        }
        cp_pos += n;
        pos = close + 1;
    }
    fill.annotation.tags = std::move(tags);
    for (auto i : tpl.intents) fill.annotation.intents.insert(i);
    fill.annotation.intent_count = static_cast<int>(fill.annotation.intents.size());

    std::string sql = tpl.sql_template;
    sql = synth_detail::replace_all(sql, "{caption}", first->caption);
    if (second) sql = synth_detail::replace_all(sql, "{caption2}", second->caption);
    for (const auto& [name, value] : values)
        sql = synth_detail::replace_all(sql, "{" + name + "}", value);
    fill.sql = sql;
    return fill;
}

struct GenOptions {
    int per_template = 50;
    uint64_t seed = 20240601;
    std::vector<std::string>* log = nullptr;
};

// Fills every template `per_template` times and keeps the draws that are
// unique and whose SQL executes to a non-empty result.
inline std::vector<QaPair> generate_corpus(const Catalog& cat, const std::vector<Template>& tpls,
                                           const GenOptions& opt = {}) {
    std::vector<QaPair> pairs;
    std::set<std::string> seen;
    for (const auto& tpl : tpls) {
        int kept = 0, dropped = 0;
        for (int draw = 0; draw < opt.per_template; ++draw) {
            Fill fill;
            try {
                fill = fill_template(cat, tpl, opt.seed, draw);
            } catch (const SamplingError&) {
                ++dropped;
                continue;
            }
            if (!seen.insert(fill.query).second) {
                ++dropped;
                continue;
            }
            sql::ResultTable result;
            try {
                auto ast = sql::parse_sql(fill.sql);
                auto v = sql::validate(cat, ast);
                if (v.outcome != sql::SqlOutcome::ExecutableNonEmpty) {
                    ++dropped;
                    continue;
                }
                result = sql::execute(cat, ast);
            } catch (const Error&) {
                ++dropped;
                continue;
            }
            QaPair p;
            p.query = fill.query;
            p.annotation = fill.annotation;
            p.captions = fill.captions;
            p.sql = fill.sql;
            p.sql_result = result;
            p.markdown_answer = to_markdown(sql::result_to_table(result));
            p.template_id = tpl.id;
            pairs.push_back(std::move(p));
            ++kept;
        }
        if (opt.log)
            opt.log->push_back("template " + tpl.id + ": kept " + std::to_string(kept) +
                               ", dropped " + std::to_string(dropped));
    }
    if (pairs.empty()) throw EmptyInput("corpus generation produced no pairs");
    return pairs;
}

// 0.8 / 0.1 / 0.1 per template; templates with at least three survivors get
// at least one test and one validation pair, smaller ones go whole to train.
inline void assign_splits(std::vector<QaPair>& pairs, uint64_t seed,
                          std::vector<std::string>* log = nullptr) {
    std::map<std::string, std::vector<size_t>> by_template;
    for (size_t i = 0; i < pairs.size(); ++i) by_template[pairs[i].template_id].push_back(i);
    for (auto& [tid, idx] : by_template) {
        std::mt19937_64 rng(synth_detail::draw_seed(seed, tid, -1));
        std::shuffle(idx.begin(), idx.end(), rng);
        size_t n = idx.size();
        // nearest-integer 10% test and val keeps every split within one pair
        // of the 0.8/0.1/0.1 targets regardless of n
        size_t n_test = static_cast<size_t>(std::llround(0.1 * double(n)));
        size_t n_val = n_test;
        if (log && n_test == 0)
            log->push_back("template " + tid + ": only " + std::to_string(n) +
                           " pairs, all assigned to train");
        for (size_t i = 0; i < n; ++i) {
            if (i < n_test) pairs[idx[i]].split = Split::Test;
            else if (i < n_test + n_val) pairs[idx[i]].split = Split::Val;
            else pairs[idx[i]].split = Split::Train;
        }
    }
}

// ---- rewriting and judging ----

struct RewriteResult {
    bool accepted = false;
    std::string rewritten;
    std::vector<slu::SlotTag> tags;
    std::string reason;
};

// A rewrite is accepted only when every slot value of the original query
// survives verbatim; tags are re-located onto the rewritten text.
inline RewriteResult rewrite_pair(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                                  const QaPair& pair, const std::string& model = "default") {
    llm::ChatRequest req;
    req.model = model;
    req.request_id = "rewrite";
    req.messages.push_back({"user", lib.render("rewrite", {{"query", pair.query}})});
    RewriteResult r;
    r.rewritten = uni::trim(client.complete(req));
    if (r.rewritten.empty()) {
        r.reason = "empty rewrite";
        return r;
    }

    auto chunks = slu::extract_chunks(pair.annotation.tags);
    auto orig_cps = uni::codepoints(pair.query);
    auto new_cps = uni::codepoints(r.rewritten);
    r.tags.assign(new_cps.size(), slu::SlotTag::O());
    std::vector<bool> taken(new_cps.size(), false);

    // longest chunks first so e.g. a year is not claimed by a month digit
    std::sort(chunks.begin(), chunks.end(), [](const slu::Chunk& a, const slu::Chunk& b) {
        return (a.end - a.start) > (b.end - b.start);
    });
    for (const auto& chunk : chunks) {
        size_t len = chunk.end - chunk.start;
        bool placed = false;
        for (size_t i = 0; i + len <= new_cps.size() && !placed; ++i) {
            bool match = true;
            for (size_t j = 0; j < len && match; ++j)
                if (taken[i + j] || new_cps[i + j] != orig_cps[chunk.start + j]) match = false;
            if (!match) continue;
            for (size_t j = 0; j < len; ++j) {
                taken[i + j] = true;
                r.tags[i + j] = j == 0 ? slu::SlotTag::B(chunk.type) : slu::SlotTag::I(chunk.type);
            }
            placed = true;
        }
        if (!placed) {
            std::string value;
            for (size_t j = chunk.start; j < chunk.end; ++j) value += orig_cps[j];
            r.reason = "slot value lost in rewrite: " + value;
            return r;
        }
    }
    r.accepted = true;
    return r;
}

inline int judge_query(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                       const std::string& query, const std::string& model = "default") {
    llm::ChatRequest req;
    req.model = model;
    req.request_id = "judge";
    req.messages.push_back({"user", lib.render("judge", {{"query", query}})});
    std::string response = uni::trim(client.complete(req));
    auto v = parse_int(response);
    if (!v) throw JudgeError("judge returned a non-integer: " + response);
    return static_cast<int>(std::clamp<int64_t>(*v, 0, 5));
}

// Applies rewrite_pair across the corpus, keeping accepted rewrites.
// Returns the number of queries replaced.
inline size_t rewrite_corpus(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                             std::vector<QaPair>& pairs, const std::string& model = "default",
                             std::vector<std::string>* log = nullptr) {
    size_t accepted = 0;
    for (auto& p : pairs) {
        auto r = rewrite_pair(client, lib, p, model);
        if (!r.accepted) {
            if (log) log->push_back("rewrite rejected (" + r.reason + "): " + p.query);
            continue;
        }
        p.query = r.rewritten;
        p.annotation.tags = r.tags;
        ++accepted;
    }
    return accepted;
}

inline double mean_judge_score(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                               std::vector<QaPair>& pairs, const std::string& model = "default") {
    if (pairs.empty()) throw EmptyInput("no pairs to judge");
    double sum = 0;
    for (auto& p : pairs) {
        p.judge_score = judge_query(client, lib, p.query, model);
        sum += *p.judge_score;
    }
    return sum / static_cast<double>(pairs.size());
}

}  // namespace tabqa::synth
