#pragma once

// Deterministic SLU backend: longest-match span tagging against slot
// lexicons plus keyphrase rules for intents. Fully offline; used both as a
// baseline and as the fallback when LLM output cannot be parsed.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/errors.hpp"
#include "tabqa/slu/labels.hpp"
#include "tabqa/unicode.hpp"

namespace tabqa::slu {

struct Lexicons {
    std::map<SlotType, std::set<std::string>> values;

    void add(SlotType t, const std::string& v) {
        if (!v.empty()) values[t].insert(v);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        for (const auto& [t, vs] : values) j[slot_type_name(t)] = vs;
        return j;
    }

    static Lexicons from_json(const nlohmann::json& j) {
        Lexicons lex;
        const auto& names = slot_type_names();
        for (size_t i = 0; i < names.size(); ++i) {
            if (!j.contains(names[i])) continue;
            for (const auto& v : j.at(names[i]))
                lex.add(static_cast<SlotType>(i), v.get<std::string>());
        }
        return lex;
    }
};

struct IntentRule {
    std::vector<std::string> keyphrases;  // all must appear
    IntentLabel intent;
};

// Longest-match, left-to-right, non-overlapping span tagging. Year/month
// digit spans are recognized by the pattern <digits>年 / <digits>月 when not
// covered by a lexicon match.
inline std::vector<SlotTag> lexicon_tag_slots(const Lexicons& lex, const std::string& query) {
    auto cps = uni::codepoints(query);
    const size_t n = cps.size();
    std::vector<SlotTag> tags(n, SlotTag::O());

    // prefix strings for O(1) substring assembly
    auto span_text = [&](size_t b, size_t e) {
        std::string s;
        for (size_t i = b; i < e; ++i) s += cps[i];
        return s;
    };

    size_t i = 0;
    while (i < n) {
        size_t best_len = 0;
        SlotType best_type{};
        for (const auto& [type, values] : lex.values) {
            // try decreasing lengths; lexicon entries are short
            for (size_t len = std::min<size_t>(n - i, 24); len > best_len; --len) {
                if (values.count(span_text(i, i + len))) {
                    best_len = len;
                    best_type = type;
                    break;
                }
            }
        }
        if (best_len == 0 && uni::is_ascii_digit(uni::decode_one(cps[i]))) {
            // digit run followed by 年 (year) or 月 (month)
            size_t j = i;
            while (j < n && uni::is_ascii_digit(uni::decode_one(cps[j]))) ++j;
            if (j < n && cps[j] == "\xe5\xb9\xb4") {  // 年
                best_len = j - i;
                best_type = SlotType::Year;
            } else if (j < n && cps[j] == "\xe6\x9c\x88") {  // 月
                best_len = j - i;
                best_type = SlotType::Month;
            }
        }
        if (best_len > 0) {
            tags[i] = SlotTag::B(best_type);
            for (size_t k = 1; k < best_len; ++k) tags[i + k] = SlotTag::I(best_type);
            i += best_len;
        } else {
            ++i;
        }
    }
    return tags;
}

inline SluAnnotation lexicon_tag(const Lexicons& lex, const std::vector<IntentRule>& rules,
                                 const std::string& query) {
    SluAnnotation ann;
    ann.tags = lexicon_tag_slots(lex, query);
    for (const auto& rule : rules) {
        bool all = true;
        for (const auto& kp : rule.keyphrases)
            if (query.find(kp) == std::string::npos) all = false;
        if (all) ann.intents.insert(rule.intent);
        if (ann.intents.size() == 2) break;
    }
    if (ann.intents.empty()) throw UnknownIntent("no intent rule fired for query: " + query);
    ann.intent_count = static_cast<int>(ann.intents.size());
    return ann;
}

}  // namespace tabqa::slu
