#pragma once

// Prompt templates for every ICL call. Templates are plain text with named
// placeholders; the defaults below are mirrored by the files under prompts/
// and can be overridden from a directory of the same layout.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "tabqa/errors.hpp"

namespace tabqa::prompts {

inline const std::map<std::string, std::string>& default_templates() {
    static const std::map<std::string, std::string> t = {
        {"slu",
         "You annotate Chinese real-estate queries with intent labels and per-character IOB slot "
         "tags.\nAnswer with two lines: 'Intents: <intent>[+<intent>]' and 'Slots: <tag> <tag> "
         "...' (one tag per character).\n\n{demos}Query: {query}\n"},
        {"summary",
         "You rewrite a query as the caption(s) of the table(s) it should be answered from, one "
         "caption per line.\n\n{demos}Query: {query}\nIntents: {intents}\nSlots: {slots}\nSummary:\n"},
        {"sql",
         "You translate a query into one SQL statement over the captioned tables.\n\n{demos}Query: "
         "{query}\nIntents: {intents}\nSlots: {slots}\nCaptions: {captions}\nSQL:\n"},
        {"simplify",
         "You simplify a markdown table, keeping only the rows and columns the query needs.\n\n"
         "{demos}Query: {query}\nIntents: {intents}\nSlots: {slots}\nOriginal table:\n{table}\n"
         "Simplified table:\n"},
        {"answer_md",
         "You answer the query from the simplified markdown table. Output the answer as a markdown "
         "table.\n\n{demos}Query: {query}\nIntents: {intents}\nSlots: {slots}\nTable:\n{table}\n"
         "Answer:\n"},
        {"answer_nl",
         "Write one fluent sentence answering the query from the result table.\n\nQuery: {query}\n"
         "Result:\n{table}\nAnswer:\n"},
        {"rewrite",
         "Rewrite the query so it reads like a natural human question. Use synonym replacement and "
         "sentence inversion, keep every name, place, and number exactly as written, and keep the "
         "meaning unchanged. Output only the rewritten query.\n\nQuery: {query}\n"},
        {"judge",
         "Score how human the following query sounds on an integer scale from 0 (completely like "
         "template generation) to 5 (like human writing). Output only the integer.\n\nQuery: "
         "{query}\n"},
    };
    return t;
}

class PromptLibrary {
public:
    PromptLibrary() : templates_(default_templates()) {}

    // Overrides defaults with <dir>/<name>.txt files where present.
    static PromptLibrary from_dir(const std::string& dir) {
        PromptLibrary lib;
        for (auto& [name, _] : default_templates()) {
            std::filesystem::path p = std::filesystem::path(dir) / (name + ".txt");
            if (!std::filesystem::exists(p)) continue;
            std::ifstream in(p);
            std::ostringstream ss;
            ss << in.rdbuf();
            lib.templates_[name] = ss.str();
        }
        return lib;
    }

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& fields) const {
        auto it = templates_.find(name);
        if (it == templates_.end()) throw ConfigError("unknown prompt template: " + name);
        std::string out = it->second;
        for (const auto& [key, value] : fields) {
            std::string ph = "{" + key + "}";
            size_t pos = 0;
            while ((pos = out.find(ph, pos)) != std::string::npos) {
                out.replace(pos, ph.size(), value);
                pos += value.size();
            }
        }
        return out;
    }

private:
    std::map<std::string, std::string> templates_;
};

// Pulls the last "<field>: ..." line out of a prompt or response. Used by
// deterministic mock backends and by output parsers.
inline std::string last_field(const std::string& text, const std::string& field) {
    std::string needle = field + ":";
    size_t best = std::string::npos;
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        bool at_line_start = (pos == 0) || text[pos - 1] == '\n';
        if (at_line_start) best = pos;
        pos += needle.size();
    }
    if (best == std::string::npos) return "";
    size_t start = best + needle.size();
    size_t end = text.find('\n', start);
    std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    size_t b = line.find_first_not_of(" \t");
    return b == std::string::npos ? "" : line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace tabqa::prompts
