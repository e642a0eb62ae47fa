#pragma once

// The SR stage: caption-shaped query summaries via SLU-guided ICL, and the
// top-1-per-entry retrieval over them.

#include <string>
#include <vector>

#include "tabqa/corpus.hpp"
#include "tabqa/llm/client.hpp"
#include "tabqa/prompts.hpp"
#include "tabqa/retrieval/bm25.hpp"
#include "tabqa/slu/labels.hpp"

namespace tabqa::retrieval {

struct QuerySummary {
    std::vector<std::string> entries;  // caption-shaped strings, >= 1
};

inline constexpr int kSrIclExamples = 5;

// Demonstrations carry query, intent(s), slots, and summary; `with_slu`
// false gives the vanilla prompt (same layout, SLU fields removed).
inline std::string build_summary_prompt(const prompts::PromptLibrary& lib,
                                        const std::vector<const QaPair*>& examples,
                                        const slu::SluAnnotation& annotation,
                                        const std::string& query, bool with_slu = true) {
    std::string demos;
    for (const QaPair* ex : examples) {
        demos += "Query: " + ex->query + "\n";
        if (with_slu) {
            demos += "Intents: " + slu::intents_to_string(ex->annotation.intents) + "\n";
            demos += "Slots: " + slu::tags_to_string(ex->annotation.tags) + "\n";
        }
        demos += "Summary:\n";
        for (const auto& c : ex->captions) demos += c + "\n";
        demos += "\n";
    }
    return lib.render("summary",
                      {{"demos", demos},
                       {"query", query},
                       {"intents", with_slu ? slu::intents_to_string(annotation.intents) : ""},
                       {"slots", with_slu ? slu::tags_to_string(annotation.tags) : ""}});
}

struct SummaryOptions {
    bool with_slu = true;  // false = vanilla ablation
    uint64_t seed = 17;
    std::string model = "default";
    std::vector<std::string>* log = nullptr;
};

inline QuerySummary generate_summary(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                                     const TrainPool& pool, const slu::SluAnnotation& annotation,
                                     const std::string& query, const SummaryOptions& opt = {}) {
    bool fell_back = false;
    auto examples = pool.select_by_intent(annotation.first_intent(), kSrIclExamples, opt.seed,
                                          &fell_back);
    if (fell_back && opt.log)
        opt.log->push_back("summary: no same-intent examples, using random examples");
    llm::ChatRequest req;
    req.model = opt.model;
    req.request_id = "summary";
    req.messages.push_back({"user", build_summary_prompt(lib, examples, annotation, query,
                                                         opt.with_slu)});
    std::string response = client.complete(req);

    QuerySummary summary;
    std::string cur;
    auto flush = [&] {
        std::string t = uni::trim(cur);
        cur.clear();
        if (!t.empty() && t.rfind("Summary", 0) != 0) summary.entries.push_back(t);
    };
    for (char c : response) {
        if (c == '\n') flush();
        else cur.push_back(c);
    }
    flush();
    if (summary.entries.empty()) throw SummaryError("empty summary from LLM for query: " + query);
    return summary;
}

// Top-1 caption per summary entry; duplicates collapse keeping first
// occurrence; entries with zero hits contribute nothing.
inline std::vector<std::string> retrieve(const Bm25Index& index, const QuerySummary& summary) {
    if (summary.entries.empty()) throw EmptyInput("retrieve: empty summary");
    std::vector<std::string> captions;
    for (const auto& entry : summary.entries) {
        auto hits = search(index, entry, 1);
        if (hits.empty()) continue;
        const std::string& c = hits[0].first;
        bool dup = false;
        for (const auto& seen : captions)
            if (seen == c) dup = true;
        if (!dup) captions.push_back(c);
    }
    if (captions.empty()) throw RetrievalEmpty("no summary entry retrieved a caption");
    return captions;
}

}  // namespace tabqa::retrieval
