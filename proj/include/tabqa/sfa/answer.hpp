#pragma once

// Slot-filling answer stage: slot/intent-driven table filtering, ICL SQL
// generation, the two-step markdown path (simplify, then answer), and the
// per-query pipeline that strings SLU -> retrieval -> answering together.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tabqa/corpus.hpp"
#include "tabqa/domain.hpp"
#include "tabqa/llm/client.hpp"
#include "tabqa/prompts.hpp"
#include "tabqa/retrieval/summary.hpp"
#include "tabqa/sql/executor.hpp"
#include "tabqa/sql/parser.hpp"
#include "tabqa/table.hpp"

namespace tabqa::sfa {

namespace sfa_detail {

inline bool cell_matches(const CellValue& cell, const std::string& v) {
    if (cell.is_text()) return cell.text().find(v) != std::string::npos;
    if (cell.is_number()) {
        if (auto i = parse_int(v)) return cell.as_double() == static_cast<double>(*i);
        if (auto d = parse_double(v)) return cell.as_double() == *d;
    }
    return false;
}

}  // namespace sfa_detail

// Keeps the key column, the columns the predicted intents need, and any
// column some slot value refers to; keeps the rows matching every slot
// constraint (OR across values of the same column, AND across columns).
// Fails open to the full table when filtering would empty it.
inline Table filter_table(const Table& t, const slu::SluAnnotation& ann, const std::string& query,
                          const domain::IntentColumnMap& intent_columns,
                          std::vector<std::string>* log = nullptr,
                          const domain::SlotColumnMap& slot_columns = domain::default_slot_columns()) {
    auto slots = ann.slot_values(query);

    // column index -> slot values that occur somewhere in that column; a slot
    // only constrains columns of its own type so coincidental matches (a month
    // that equals some sales count) cannot change what the table answers
    std::map<int, std::vector<std::string>> constraints;
    for (const auto& [type, value] : slots) {
        auto allowed = slot_columns.find(type);
        if (allowed == slot_columns.end()) continue;
        for (size_t c = 0; c < t.columns.size(); ++c) {
            const auto& names = allowed->second;
            if (std::find(names.begin(), names.end(), t.columns[c].name) == names.end()) continue;
            bool hit = false;
            for (const auto& row : t.rows)
                if (sfa_detail::cell_matches(row[c], value)) { hit = true; break; }
            if (hit) constraints[static_cast<int>(c)].push_back(value);
        }
    }

    std::vector<size_t> kept_rows;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        bool keep = true;
        for (const auto& [c, values] : constraints) {
            bool any = false;
            for (const auto& v : values)
                if (sfa_detail::cell_matches(t.rows[r][c], v)) { any = true; break; }
            if (!any) { keep = false; break; }
        }
        if (keep) kept_rows.push_back(r);
    }
    if (kept_rows.empty()) {
        if (log) log->push_back("filter emptied " + t.caption + "; keeping all rows");
        kept_rows.resize(t.rows.size());
        for (size_t r = 0; r < t.rows.size(); ++r) kept_rows[r] = r;
    }

    std::set<std::string> wanted{t.key_column};
    for (slu::IntentLabel intent : ann.intents) {
        auto it = intent_columns.find(intent);
        if (it == intent_columns.end()) continue;
        for (const auto& c : it->second) wanted.insert(c);
    }
    for (const auto& [c, values] : constraints) {
        (void)values;
        wanted.insert(t.columns[c].name);
    }

    Table out;
    out.caption = t.caption;
    out.domain = t.domain;
    out.key_column = t.key_column;
    std::vector<size_t> kept_cols;
    for (size_t c = 0; c < t.columns.size(); ++c)
        if (wanted.count(t.columns[c].name)) {
            kept_cols.push_back(c);
            out.columns.push_back(t.columns[c]);
        }
    for (size_t r : kept_rows) {
        std::vector<CellValue> row;
        for (size_t c : kept_cols) row.push_back(t.rows[r][c]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---- SQL path ----

inline constexpr int kSqlIclExamples = 5;

inline std::string join_captions(const std::vector<std::string>& captions) {
    std::string s;
    for (size_t i = 0; i < captions.size(); ++i) s += (i ? " ; " : "") + captions[i];
    return s;
}

inline std::string build_sql_prompt(const prompts::PromptLibrary& lib,
                                    const std::vector<const QaPair*>& examples,
                                    const slu::SluAnnotation& ann, const std::string& query,
                                    const std::vector<std::string>& captions, bool with_slu = true) {
    std::string demos;
    for (const QaPair* ex : examples) {
        demos += "Query: " + ex->query + "\n";
        if (with_slu) {
            demos += "Intents: " + slu::intents_to_string(ex->annotation.intents) + "\n";
            demos += "Slots: " + slu::tags_to_string(ex->annotation.tags) + "\n";
        }
        demos += "Captions: " + join_captions(ex->captions) + "\n";
        demos += "SQL:\n```sql\n" + ex->sql + "\n```\n\n";
    }
    return lib.render("sql", {{"demos", demos},
                              {"query", query},
                              {"intents", with_slu ? slu::intents_to_string(ann.intents) : ""},
                              {"slots", with_slu ? slu::tags_to_string(ann.tags) : ""},
                              {"captions", join_captions(captions)}});
}

// First fenced code block if any, else the whole response trimmed.
inline std::string extract_sql(const std::string& response) {
    size_t open = response.find("```");
    if (open != std::string::npos) {
        size_t nl = response.find('\n', open);
        if (nl != std::string::npos) {
            size_t close = response.find("```", nl + 1);
            if (close != std::string::npos)
                return uni::trim(response.substr(nl + 1, close - nl - 1));
        }
    }
    std::string t = uni::trim(response);
    if (t.empty()) throw GenerationError("empty SQL response");
    return t;
}

struct SfaOptions {
    bool with_slu = true;
    bool do_simplify = true;       // stage one of the markdown path
    size_t context_budget = 24000; // max prompt chars for the simplify call
    uint64_t seed = 17;
    std::string model = "default";
    std::vector<std::string>* log = nullptr;
};

inline std::string generate_sql(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                                const TrainPool& pool, const slu::SluAnnotation& ann,
                                const std::string& query,
                                const std::vector<std::string>& captions,
                                const SfaOptions& opt = {}) {
    bool fell_back = false;
    auto examples = pool.select_by_intent(ann.first_intent(), kSqlIclExamples, opt.seed,
                                          &fell_back);
    if (fell_back && opt.log)
        opt.log->push_back("sql: no same-intent examples, using random examples");
    llm::ChatRequest req;
    req.model = opt.model;
    req.request_id = "sql";
    req.messages.push_back({"user", build_sql_prompt(lib, examples, ann, query, captions,
                                                     opt.with_slu)});
    return extract_sql(client.complete(req));
}

// ---- markdown path ----

inline std::string build_simplify_prompt(const prompts::PromptLibrary& lib, const Catalog& cat,
                                         const std::vector<const QaPair*>& examples,
                                         const domain::IntentColumnMap& intent_columns,
                                         const slu::SluAnnotation& ann, const std::string& query,
                                         const std::string& table_md, bool with_slu = true) {
    std::string demos;
    for (const QaPair* ex : examples) {
        std::vector<Table> orig, simp;
        for (const auto& cap : ex->captions) {
            const Table& t = cat.lookup(cap);
            orig.push_back(t);
            simp.push_back(filter_table(t, ex->annotation, ex->query, intent_columns));
        }
        demos += "Query: " + ex->query + "\n";
        if (with_slu) {
            demos += "Intents: " + slu::intents_to_string(ex->annotation.intents) + "\n";
            demos += "Slots: " + slu::tags_to_string(ex->annotation.tags) + "\n";
        }
        demos += "Original table:\n" + to_markdown(orig) + "\n";
        demos += "Simplified table:\n" + to_markdown(simp) + "\n\n";
    }
    return lib.render("simplify", {{"demos", demos},
                                   {"query", query},
                                   {"intents", with_slu ? slu::intents_to_string(ann.intents) : ""},
                                   {"slots", with_slu ? slu::tags_to_string(ann.tags) : ""},
                                   {"table", table_md}});
}

// Two to five demonstrations, as many as fit the context budget.
inline std::string simplify_tables(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                                   const Catalog& cat, const TrainPool& pool,
                                   const domain::IntentColumnMap& intent_columns,
                                   const slu::SluAnnotation& ann, const std::string& query,
                                   const std::vector<Table>& tables, const SfaOptions& opt = {}) {
    std::string table_md = to_markdown(tables);
    bool fell_back = false;
    auto pool_ex = pool.select_by_intent(ann.first_intent(), 5, opt.seed, &fell_back);
    std::string prompt;
    for (int n = static_cast<int>(std::min<size_t>(5, pool_ex.size())); n >= 2; --n) {
        std::vector<const QaPair*> demos(pool_ex.begin(), pool_ex.begin() + n);
        prompt = build_simplify_prompt(lib, cat, demos, intent_columns, ann, query, table_md,
                                       opt.with_slu);
        if (prompt.size() <= opt.context_budget || n == 2) break;
    }
    if (prompt.empty())
        prompt = build_simplify_prompt(lib, cat, pool_ex, intent_columns, ann, query, table_md,
                                       opt.with_slu);
    llm::ChatRequest req;
    req.model = opt.model;
    req.request_id = "simplify";
    req.messages.push_back({"user", prompt});
    std::string response = client.complete(req);

    std::vector<std::string> warnings;
    try {
        parse_markdown(response, &warnings);  // sanity only; answer stage reparses
        return response;
    } catch (const NoTableFound&) {
        if (opt.log)
            opt.log->push_back("simplify response had no table; using slot filter output");
        std::vector<Table> filtered;
        for (const auto& t : tables)
            filtered.push_back(filter_table(t, ann, query, intent_columns));
        return to_markdown(filtered);
    }
}

inline std::string build_answer_prompt(const prompts::PromptLibrary& lib, const Catalog& cat,
                                       const std::vector<const QaPair*>& examples,
                                       const domain::IntentColumnMap& intent_columns,
                                       const slu::SluAnnotation& ann, const std::string& query,
                                       const std::string& table_md, bool with_slu = true) {
    std::string demos;
    for (const QaPair* ex : examples) {
        std::vector<Table> simp;
        for (const auto& cap : ex->captions)
            simp.push_back(filter_table(cat.lookup(cap), ex->annotation, ex->query,
                                        intent_columns));
        demos += "Query: " + ex->query + "\n";
        if (with_slu) {
            demos += "Intents: " + slu::intents_to_string(ex->annotation.intents) + "\n";
            demos += "Slots: " + slu::tags_to_string(ex->annotation.tags) + "\n";
        }
        demos += "Table:\n" + to_markdown(simp) + "\n";
        demos += "Answer:\n" + ex->markdown_answer + "\n\n";
    }
    return lib.render("answer_md", {{"demos", demos},
                                    {"query", query},
                                    {"intents", with_slu ? slu::intents_to_string(ann.intents) : ""},
                                    {"slots", with_slu ? slu::tags_to_string(ann.tags) : ""},
                                    {"table", table_md}});
}

inline std::vector<Table> answer_markdown(llm::LlmClient& client, const prompts::PromptLibrary& lib,
                                          const Catalog& cat, const TrainPool& pool,
                                          const domain::IntentColumnMap& intent_columns,
                                          const slu::SluAnnotation& ann, const std::string& query,
                                          const std::string& table_md, const SfaOptions& opt = {}) {
    bool fell_back = false;
    auto examples = pool.select_by_intent(ann.first_intent(), 2, opt.seed, &fell_back);
    llm::ChatRequest req;
    req.model = opt.model;
    req.request_id = "answer_md";
    req.messages.push_back({"user", build_answer_prompt(lib, cat, examples, intent_columns, ann,
                                                        query, table_md, opt.with_slu)});
    std::string response = client.complete(req);
    try {
        return parse_markdown(response, nullptr);
    } catch (const NoTableFound&) {
        throw AnswerParseError("answer is not a markdown table: " + response);
    }
}

inline std::string answer_natural_language(llm::LlmClient& client,
                                           const prompts::PromptLibrary& lib,
                                           const std::string& query,
                                           const std::string& result_md,
                                           const std::string& model = "default") {
    llm::ChatRequest req;
    req.model = model;
    req.request_id = "answer_nl";
    req.messages.push_back({"user", lib.render("answer_nl", {{"query", query},
                                                             {"table", result_md}})});
    std::string out = uni::trim(client.complete(req));
    if (out.empty()) throw GenerationError("empty natural-language answer");
    return out;
}

// ---- per-query pipeline ----

enum class AnswerMode { Sql, Markdown };

struct AnswerBundle {
    std::string query;
    slu::SluAnnotation annotation;
    std::vector<std::string> summary_entries;
    std::vector<std::string> captions;
    std::string sql_text;
    std::optional<sql::ResultTable> sql_result;
    sql::SqlOutcome sql_outcome = sql::SqlOutcome::NotExecutable;
    std::vector<Table> answer_tables;  // markdown-mode answer
    std::optional<std::string> nl_answer;
    std::vector<std::string> log;
    std::vector<std::string> errors;   // stage failures; pipeline never throws per query
    bool ok = false;
};

using SluBackend = std::function<slu::SluAnnotation(const std::string&)>;

struct Pipeline {
    const Catalog* catalog = nullptr;
    const retrieval::Bm25Index* index = nullptr;
    const TrainPool* pool = nullptr;
    llm::LlmClient* client = nullptr;
    SluBackend slu_backend;
    prompts::PromptLibrary prompts;
    domain::IntentColumnMap intent_columns = domain::default_intent_columns();
    SfaOptions options;
    bool want_nl = false;
};

inline AnswerBundle answer_query(const Pipeline& pipe, const std::string& query, AnswerMode mode) {
    AnswerBundle b;
    b.query = query;
    SfaOptions opt = pipe.options;
    opt.log = &b.log;
    try {
        b.annotation = pipe.slu_backend(query);

        retrieval::SummaryOptions sopt;
        sopt.with_slu = opt.with_slu;
        sopt.seed = opt.seed;
        sopt.model = opt.model;
        sopt.log = &b.log;
        auto summary = retrieval::generate_summary(*pipe.client, pipe.prompts, *pipe.pool,
                                                   b.annotation, query, sopt);
        b.summary_entries = summary.entries;
        b.captions = retrieval::retrieve(*pipe.index, summary);

        if (mode == AnswerMode::Sql) {
            b.sql_text = generate_sql(*pipe.client, pipe.prompts, *pipe.pool, b.annotation, query,
                                      b.captions, opt);
            auto ast = sql::parse_sql(b.sql_text);
            auto v = sql::validate(*pipe.catalog, ast);
            b.sql_outcome = v.outcome;
            if (v.outcome == sql::SqlOutcome::NotExecutable)
                throw GenerationError("generated SQL not executable: " + v.reason);
            b.sql_result = sql::execute(*pipe.catalog, ast);
            if (pipe.want_nl)
                b.nl_answer = answer_natural_language(
                    *pipe.client, pipe.prompts, query,
                    to_markdown(sql::result_to_table(*b.sql_result)), opt.model);
        } else {
            std::vector<Table> tables;
            for (const auto& cap : b.captions) {
                const Table& t = pipe.catalog->lookup(cap);
                tables.push_back(opt.with_slu
                                     ? filter_table(t, b.annotation, query, pipe.intent_columns,
                                                    &b.log)
                                     : t);
            }
            std::string table_md =
                opt.do_simplify
                    ? simplify_tables(*pipe.client, pipe.prompts, *pipe.catalog, *pipe.pool,
                                      pipe.intent_columns, b.annotation, query, tables, opt)
                    : to_markdown(tables);
            b.answer_tables = answer_markdown(*pipe.client, pipe.prompts, *pipe.catalog,
                                              *pipe.pool, pipe.intent_columns, b.annotation, query,
                                              table_md, opt);
            if (pipe.want_nl)
                b.nl_answer = answer_natural_language(*pipe.client, pipe.prompts, query,
                                                      to_markdown(b.answer_tables), opt.model);
        }
        b.ok = true;
    } catch (const Error& e) {
        b.errors.push_back(e.what());
    }
    return b;
}

}  // namespace tabqa::sfa
