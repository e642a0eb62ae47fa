#pragma once

// LLM in-context-learning SLU backend: 22 annotated demonstrations, one call
// per query, fuzzy repair of out-of-vocabulary labels.

#include <string>
#include <vector>

#include "tabqa/llm/client.hpp"
#include "tabqa/prompts.hpp"
#include "tabqa/slu/labels.hpp"

namespace tabqa::slu {

struct AnnotatedQuery {
    std::string query;
    SluAnnotation annotation;
};

inline constexpr int kSluIclExamples = 22;

inline std::string build_slu_prompt(const prompts::PromptLibrary& lib,
                                    const std::vector<AnnotatedQuery>& examples,
                                    const std::string& query) {
    std::string demos;
    for (const auto& ex : examples) {
        demos += "Query: " + ex.query + "\n";
        demos += "Intents: " + intents_to_string(ex.annotation.intents) + "\n";
        demos += "Slots: " + tags_to_string(ex.annotation.tags) + "\n\n";
    }
    return lib.render("slu", {{"demos", demos}, {"query", query}});
}

// Parses "Intents: ..." / "Slots: ..." lines; unknown labels are repaired to
// the nearest vocabulary entry by edit distance.
inline SluAnnotation parse_slu_response(const std::string& response, const std::string& query) {
    std::string intents_line = prompts::last_field(response, "Intents");
    std::string slots_line = prompts::last_field(response, "Slots");
    if (intents_line.empty() || slots_line.empty())
        throw SluParseError("missing Intents/Slots lines in SLU response");

    SluAnnotation ann;
    std::string cur;
    auto flush = [&] {
        std::string t = uni::trim(cur);
        cur.clear();
        if (t.empty()) return;
        ann.intents.insert(intent_fuzzy(t));
    };
    for (char c : intents_line) {
        if (c == '+' || c == ',') flush();
        else cur.push_back(c);
    }
    flush();
    if (ann.intents.empty()) throw SluParseError("no intents parsed from: " + intents_line);
    while (ann.intents.size() > 2) ann.intents.erase(std::prev(ann.intents.end()));
    ann.intent_count = static_cast<int>(ann.intents.size());

    ann.tags = tags_from_string(slots_line, /*fuzzy=*/true);
    size_t len = uni::codepoint_count(query);
    if (ann.tags.empty()) throw SluParseError("no slot tags parsed from: " + slots_line);
    ann.tags.resize(len, SlotTag::O());
    ann.tags = iob_repair(std::move(ann.tags));
    return ann;
}

inline SluAnnotation predict_icl(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                                 const std::vector<AnnotatedQuery>& examples,
                                 const std::string& query, const std::string& model = "default") {
    llm::ChatRequest req;
    req.model = model;
    req.request_id = "slu";
    req.messages.push_back({"user", build_slu_prompt(lib, examples, query)});
    std::string response = client.complete(req);
    return parse_slu_response(response, query);
}

}  // namespace tabqa::slu
