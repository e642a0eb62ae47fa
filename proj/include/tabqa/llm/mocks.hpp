#pragma once

// Deterministic stand-in for a hosted model: answers every pipeline stage
// from the gold corpus, keyed by the query carried in the prompt. Stages
// are told apart by ChatRequest::request_id.

#include <functional>
#include <map>
#include <string>

#include "tabqa/corpus.hpp"
#include "tabqa/llm/client.hpp"
#include "tabqa/prompts.hpp"

namespace tabqa::llm {

class GoldEcho {
public:
    explicit GoldEcho(const std::vector<QaPair>& pairs) {
        for (const auto& p : pairs) by_query_.emplace(p.query, p);
    }

    std::function<std::string(const ChatRequest&)> rule() const {
        return [this](const ChatRequest& req) { return answer(req); };
    }

private:
    std::map<std::string, QaPair> by_query_;

    const QaPair& lookup(const std::string& prompt) const {
        std::string q = prompts::last_field(prompt, "Query");
        auto it = by_query_.find(q);
        if (it == by_query_.end()) throw ModelError("mock has no gold pair for query: " + q);
        return it->second;
    }

    std::string answer(const ChatRequest& req) const {
        if (req.messages.empty()) throw ModelError("mock got an empty request");
        const std::string& prompt = req.messages.back().content;
        const std::string& stage = req.request_id;

        if (stage == "slu") {
            const QaPair& p = lookup(prompt);
            return "Intents: " + slu::intents_to_string(p.annotation.intents) +
                   "\nSlots: " + slu::tags_to_string(p.annotation.tags) + "\n";
        }
        if (stage == "summary") {
            const QaPair& p = lookup(prompt);
            std::string out;
            for (const auto& c : p.captions) out += c + "\n";
            return out;
        }
        if (stage == "sql") {
            return "```sql\n" + lookup(prompt).sql + "\n```";
        }
        if (stage == "simplify") {
            // echo the presented table unchanged
            size_t start = prompt.rfind("Original table:\n");
            size_t end = prompt.rfind("Simplified table:");
            if (start == std::string::npos || end == std::string::npos || end <= start)
                throw ModelError("mock simplify: malformed prompt");
            start += std::string("Original table:\n").size();
            return prompt.substr(start, end - start);
        }
        if (stage == "answer_md") {
            return lookup(prompt).markdown_answer;
        }
        if (stage == "answer_nl") {
            std::string q = prompts::last_field(prompt, "Query");
            return "根据检索到的表格，问题“" + q + "”的答案见上表。";
        }
        if (stage == "rewrite") {
            return "请问，" + prompts::last_field(prompt, "Query");
        }
        if (stage == "judge") {
            std::string q = prompts::last_field(prompt, "Query");
            std::string h = request_hash(req);
            int base = q.rfind("请问", 0) == 0 ? 3 : 2;
            return std::to_string(base + (h.empty() ? 0 : (h.back() & 1)));
        }
        throw ModelError("mock: unknown stage " + stage);
    }
};

}  // namespace tabqa::llm
