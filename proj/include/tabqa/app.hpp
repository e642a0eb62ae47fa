#pragma once

// Shared wiring for the command-line tool: backend/pipeline assembly from
// plain option structs, and the command bodies themselves.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "tabqa/domain.hpp"
#include "tabqa/eval.hpp"
#include "tabqa/llm/mocks.hpp"
#include "tabqa/sfa/answer.hpp"
#include "tabqa/slu/icl.hpp"
#include "tabqa/slu/lexicon.hpp"
#include "tabqa/slu/linear_model.hpp"
#include "tabqa/synth/generate.hpp"

namespace tabqa::app {

struct BackendOptions {
    std::string kind = "mock";  // mock | replay | http
    std::string replay_file;
    std::string base_url;
    std::string api_key;
    std::string model = "default";
    int max_in_flight = 4;
    std::string record_file;  // optional transcript of every call
};

struct SessionOptions {
    std::string tables_dir;     // directory with manifest.jsonl
    std::string corpus_file;    // QA corpus JSONL
    std::string prompts_dir;    // optional prompt overrides
    std::string slu_kind = "gold";  // gold | lexicon | linear | icl
    std::string slu_model_file;
    BackendOptions backend;
    bool with_slu = true;
    bool simplify = true;
    uint64_t seed = 17;
};

// Owns everything the pipeline borrows.
struct Session {
    Catalog catalog;
    std::vector<QaPair> corpus;
    std::unique_ptr<TrainPool> pool;
    retrieval::Bm25Index index;
    std::unique_ptr<llm::GoldEcho> echo;
    std::shared_ptr<llm::Backend> backend;
    std::unique_ptr<llm::LlmClient> client;
    slu::LinearSluModel linear_model;
    slu::Lexicons lexicons;
    std::vector<slu::IntentRule> intent_rules;
    sfa::Pipeline pipeline;
};

inline std::unique_ptr<Session> open_session(const SessionOptions& opt) {
    auto s = std::make_unique<Session>();
    s->catalog = ingest((std::filesystem::path(opt.tables_dir) / "manifest.jsonl").string());
    s->corpus = load_corpus(opt.corpus_file);
    s->pool = std::make_unique<TrainPool>(filter_split(s->corpus, Split::Train));
    s->index = retrieval::build_index(s->catalog);

    if (opt.backend.kind == "mock") {
        s->echo = std::make_unique<llm::GoldEcho>(s->corpus);
        s->backend = std::make_shared<llm::MockBackend>(s->echo->rule());
    } else if (opt.backend.kind == "replay") {
        s->backend = std::make_shared<llm::ReplayBackend>(opt.backend.replay_file);
    } else if (opt.backend.kind == "http") {
        llm::HttpConfig cfg;
        cfg.base_url = opt.backend.base_url;
        cfg.api_key = opt.backend.api_key;
        s->backend = std::make_shared<llm::HttpBackend>(cfg);
    } else {
        throw ConfigError("unknown backend kind: " + opt.backend.kind);
    }
    s->client = std::make_unique<llm::LlmClient>(s->backend, opt.backend.max_in_flight);
    if (!opt.backend.record_file.empty())
        s->client->set_recorder(std::make_shared<llm::Recorder>(opt.backend.record_file));

    s->pipeline.catalog = &s->catalog;
    s->pipeline.index = &s->index;
    s->pipeline.pool = s->pool.get();
    s->pipeline.client = s->client.get();
    if (!opt.prompts_dir.empty())
        s->pipeline.prompts = prompts::PromptLibrary::from_dir(opt.prompts_dir);
    s->pipeline.options.with_slu = opt.with_slu;
    s->pipeline.options.do_simplify = opt.simplify;
    s->pipeline.options.seed = opt.seed;
    s->pipeline.options.model = opt.backend.model;

    Session* raw = s.get();
    if (opt.slu_kind == "gold") {
        std::map<std::string, slu::SluAnnotation> gold;
        for (const auto& p : s->corpus) gold.emplace(p.query, p.annotation);
        s->pipeline.slu_backend = [gold](const std::string& q) {
            auto it = gold.find(q);
            if (it == gold.end()) throw NotFound("no gold annotation for query: " + q);
            return it->second;
        };
    } else if (opt.slu_kind == "lexicon") {
        s->lexicons = domain::build_lexicons(s->catalog);
        s->intent_rules = domain::default_intent_rules();
        s->pipeline.slu_backend = [raw](const std::string& q) {
            return slu::lexicon_tag(raw->lexicons, raw->intent_rules, q);
        };
    } else if (opt.slu_kind == "linear") {
        if (opt.slu_model_file.empty()) throw ConfigError("linear SLU needs --slu-model");
        s->linear_model = slu::load_model(opt.slu_model_file);
        s->pipeline.slu_backend = [raw](const std::string& q) {
            return slu::predict_linear(raw->linear_model, q);
        };
    } else if (opt.slu_kind == "icl") {
        s->pipeline.slu_backend = [raw, opt](const std::string& q) {
            auto examples = raw->pool->select_covering(slu::kSluIclExamples, opt.seed);
            std::vector<slu::AnnotatedQuery> demos;
            for (const QaPair* p : examples) demos.push_back({p->query, p->annotation});
            return slu::predict_icl(*raw->client, raw->pipeline.prompts, demos, q,
                                    opt.backend.model);
        };
    } else {
        throw ConfigError("unknown SLU backend: " + opt.slu_kind);
    }
    return s;
}

// ---- commands ----

inline int cmd_gen_tables(const std::string& out_dir, bool long_tables, uint64_t seed,
                          std::ostream& os) {
    domain::TableGenSpec spec = long_tables ? domain::long_table_spec() : domain::TableGenSpec{};
    spec.seed = seed;
    Catalog cat = domain::make_catalog(spec);
    domain::write_catalog_files(cat, out_dir);
    size_t rows = 0;
    for (const auto& [_, t] : cat.tables) rows += t.rows.size();
    os << "wrote " << cat.tables.size() << " tables (" << rows << " rows) to " << out_dir << "\n";
    return 0;
}

inline int cmd_synth(const std::string& tables_dir, const std::string& out_file, int per_template,
                     uint64_t seed, bool rewrite, std::ostream& os) {
    Catalog cat = ingest((std::filesystem::path(tables_dir) / "manifest.jsonl").string());
    auto templates = synth::default_templates();
    synth::GenOptions gopt;
    gopt.per_template = per_template;
    gopt.seed = seed;
    std::vector<std::string> log;
    gopt.log = &log;
    auto pairs = synth::generate_corpus(cat, templates, gopt);
    synth::assign_splits(pairs, seed, &log);
    if (rewrite) {
        llm::GoldEcho echo(pairs);
        auto backend = std::make_shared<llm::MockBackend>(echo.rule());
        llm::LlmClient client(backend, 1);
        prompts::PromptLibrary lib;
        double before = synth::mean_judge_score(client, lib, pairs);
        size_t n = synth::rewrite_corpus(client, lib, pairs);
        double after = synth::mean_judge_score(client, lib, pairs);
        os << "rewrote " << n << " queries; naturalness " << before << " -> " << after << "\n";
    }
    save_corpus(pairs, out_file);
    for (const auto& l : log) os << l << "\n";
    os << "wrote " << pairs.size() << " pairs to " << out_file << "\n";
    return 0;
}

inline int cmd_train_slu(const std::string& tables_dir, const std::string& corpus_file,
                         const std::string& out_file, int epochs, double lr, uint64_t seed,
                         std::ostream& os) {
    (void)tables_dir;
    auto pairs = load_corpus(corpus_file);
    std::vector<std::pair<std::string, slu::SluAnnotation>> train;
    for (const auto& p : filter_split(pairs, Split::Train))
        train.push_back({p.query, p.annotation});
    slu::TrainLog log;
    auto model = slu::train_linear(train, epochs, lr, seed, &log);
    slu::save_model(model, out_file);
    for (const auto& w : log.warnings) os << "warning: " << w << "\n";
    if (!log.epoch_loss.empty())
        os << "loss " << log.epoch_loss.front() << " -> " << log.epoch_loss.back() << "\n";
    os << "saved model to " << out_file << "\n";
    return 0;
}

inline int cmd_ask(const SessionOptions& sopt, const std::string& query, const std::string& mode,
                   bool want_nl, std::ostream& os) {
    auto s = open_session(sopt);
    s->pipeline.want_nl = want_nl;
    auto m = mode == "sql" ? sfa::AnswerMode::Sql : sfa::AnswerMode::Markdown;
    auto b = sfa::answer_query(s->pipeline, query, m);
    os << "intents: " << slu::intents_to_string(b.annotation.intents) << "\n";
    os << "captions:";
    for (const auto& c : b.captions) os << " " << c;
    os << "\n";
    if (m == sfa::AnswerMode::Sql) {
        os << "sql: " << b.sql_text << "\n";
        if (b.sql_result) os << to_markdown(sql::result_to_table(*b.sql_result)) << "\n";
    } else {
        os << to_markdown(b.answer_tables) << "\n";
    }
    if (b.nl_answer) os << *b.nl_answer << "\n";
    for (const auto& l : b.log) os << "note: " << l << "\n";
    for (const auto& e : b.errors) os << "error: " << e << "\n";
    return b.ok ? 0 : 1;
}

inline int cmd_eval(const SessionOptions& sopt, const std::string& split_name,
                    const std::string& mode, const std::string& json_out, std::ostream& os) {
    auto s = open_session(sopt);
    auto split = filter_split(s->corpus, split_from_name(split_name));
    auto m = mode == "sql" ? sfa::AnswerMode::Sql : sfa::AnswerMode::Markdown;
    auto report = eval::eval_run(s->pipeline, split, m);
    os << report.to_text();
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        f << report.to_json().dump(2) << "\n";
        os << "wrote " << json_out << "\n";
    }
    return 0;
}

// SLU-on vs SLU-off, and simplify-on vs simplify-off, side by side.
inline int cmd_ablate(const SessionOptions& base, const std::string& split_name,
                      std::ostream& os) {
    auto run = [&](bool with_slu, bool simplify, const std::string& mode) {
        SessionOptions o = base;
        o.with_slu = with_slu;
        o.simplify = simplify;
        auto s = open_session(o);
        auto split = filter_split(s->corpus, split_from_name(split_name));
        auto m = mode == "sql" ? sfa::AnswerMode::Sql : sfa::AnswerMode::Markdown;
        return eval::eval_run(s->pipeline, split, m);
    };
    auto a = run(true, true, "sql");
    auto b = run(false, true, "sql");
    os << "sql path, with SLU:\n" << a.to_text();
    os << "sql path, without SLU:\n" << b.to_text();
    auto c = run(true, true, "md");
    auto d = run(true, false, "md");
    os << "markdown path, simplify on:\n" << c.to_text();
    os << "markdown path, simplify off:\n" << d.to_text();
    return 0;
}

}  // namespace tabqa::app
