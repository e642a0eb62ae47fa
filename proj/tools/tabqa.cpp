// Command-line front end: table generation, corpus synthesis, SLU training,
// single-query answering, evaluation, and ablation runs.

#include <CLI11.hpp>

#include <iostream>

#include "tabqa/app.hpp"

int main(int argc, char** argv) {
    using namespace tabqa;

    CLI::App cli{"table question answering over an offline catalog"};
    cli.require_subcommand(1);
    cli.set_config("--config", "", "JSON/INI config file with long option names");

    app::SessionOptions sess;
    uint64_t seed = 17;

    auto add_session_flags = [&](CLI::App* c) {
        c->add_option("--tables", sess.tables_dir, "directory holding manifest.jsonl")->required();
        c->add_option("--corpus", sess.corpus_file, "QA corpus JSONL")->required();
        c->add_option("--prompts", sess.prompts_dir, "prompt template override directory");
        c->add_option("--slu", sess.slu_kind, "SLU backend: gold|lexicon|linear|icl");
        c->add_option("--slu-model", sess.slu_model_file, "trained linear SLU model file");
        c->add_option("--backend", sess.backend.kind, "LLM backend: mock|replay|http");
        c->add_option("--replay-file", sess.backend.replay_file, "replay transcript JSONL");
        c->add_option("--base-url", sess.backend.base_url, "HTTP backend base URL");
        c->add_option("--api-key", sess.backend.api_key, "HTTP backend API key");
        c->add_option("--model", sess.backend.model, "model name sent to the backend");
        c->add_option("--record", sess.backend.record_file, "record every LLM call to this JSONL");
        c->add_option("--max-in-flight", sess.backend.max_in_flight, "concurrent request cap");
        c->add_option("--seed", seed, "sampling seed");
        c->add_flag("!--no-slu", sess.with_slu, "drop SLU guidance from every prompt");
        c->add_flag("!--no-simplify", sess.simplify, "skip the table simplification call");
    };

    // gen-tables
    std::string out_dir, out_file = "corpus.jsonl";
    bool long_tables = false;
    auto* gen = cli.add_subcommand("gen-tables", "generate the synthetic table corpus");
    gen->add_option("--out", out_dir, "output directory")->required();
    gen->add_flag("--long-tables", long_tables, "row counts in the hundreds per table");
    gen->add_option("--seed", seed, "generation seed");

    // synth
    int per_template = 50;
    bool do_rewrite = false;
    auto* synth_cmd = cli.add_subcommand("synth", "synthesize the QA corpus from templates");
    synth_cmd->add_option("--tables", sess.tables_dir, "directory holding manifest.jsonl")
        ->required();
    synth_cmd->add_option("--out", out_file, "output corpus JSONL")->required();
    synth_cmd->add_option("--per-template", per_template, "draws per template");
    synth_cmd->add_option("--seed", seed, "sampling seed");
    synth_cmd->add_flag("--rewrite", do_rewrite, "rewrite queries and report naturalness");

    // train-slu
    std::string model_out = "slu_model.bin";
    int epochs = 120;
    double lr = 5.0;
    auto* train = cli.add_subcommand("train-slu", "train the linear SLU model");
    train->add_option("--corpus", sess.corpus_file, "QA corpus JSONL")->required();
    train->add_option("--out", model_out, "model output file");
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--lr", lr, "learning rate");
    train->add_option("--seed", seed, "shuffle seed");

    // ask
    std::string query, mode = "sql";
    bool want_nl = false;
    auto* ask = cli.add_subcommand("ask", "answer one query");
    add_session_flags(ask);
    ask->add_option("--query", query, "the question")->required();
    ask->add_option("--mode", mode, "sql|md");
    ask->add_flag("--nl", want_nl, "also produce a natural-language sentence");

    // eval
    std::string split = "test", json_out;
    auto* ev = cli.add_subcommand("eval", "run the pipeline over a split and score it");
    add_session_flags(ev);
    ev->add_option("--split", split, "train|test|val");
    ev->add_option("--mode", mode, "sql|md");
    ev->add_option("--json", json_out, "also write the report as JSON");

    // ablate
    auto* ab = cli.add_subcommand("ablate", "compare SLU / simplify variants");
    add_session_flags(ab);
    ab->add_option("--split", split, "train|test|val");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        sess.seed = seed;
        if (gen->parsed()) return app::cmd_gen_tables(out_dir, long_tables, seed, std::cout);
        if (synth_cmd->parsed())
            return app::cmd_synth(sess.tables_dir, out_file, per_template, seed, do_rewrite,
                                  std::cout);
        if (train->parsed())
            return app::cmd_train_slu(sess.tables_dir, sess.corpus_file, model_out, epochs, lr,
                                      seed, std::cout);
        if (ask->parsed()) return app::cmd_ask(sess, query, mode, want_nl, std::cout);
        if (ev->parsed()) return app::cmd_eval(sess, split, mode, json_out, std::cout);
        if (ab->parsed()) return app::cmd_ablate(sess, split, std::cout);
    } catch (const tabqa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
