#pragma once

// End-to-end evaluation: runs the answer pipeline over a split and pools
// the metric counts into one report.

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/metrics.hpp"
#include "tabqa/sfa/answer.hpp"

namespace tabqa::eval {

struct EvalReport {
    size_t n = 0;
    size_t pipeline_errors = 0;  // queries where some stage threw
    metrics::PrfScore retrieval, intent, slot, rows, cols, cells;
    double table_em = 0;  // markdown mode
    double ecr = 0;       // sql mode: share of generated SQL that executes
    double pass1 = 0;     // sql mode: share of exact result matches

    nlohmann::ordered_json to_json() const {
        auto prf = [](const metrics::PrfScore& s) {
            return nlohmann::ordered_json{
                {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
        };
        return {{"n", n},
                {"pipeline_errors", pipeline_errors},
                {"retrieval", prf(retrieval)},
                {"intent", prf(intent)},
                {"slot", prf(slot)},
                {"rows", prf(rows)},
                {"cols", prf(cols)},
                {"cells", prf(cells)},
                {"table_em", table_em},
                {"ecr", ecr},
                {"pass1", pass1}};
    }

    std::string to_text() const {
        std::ostringstream os;
        auto pct = [](double v) { return std::to_string(v * 100.0); };
        auto line = [&](const std::string& name, const metrics::PrfScore& s) {
            os << name << "  P=" << pct(s.precision) << "  R=" << pct(s.recall)
               << "  F1=" << pct(s.f1) << "\n";
        };
        os << "queries: " << n << "  errors: " << pipeline_errors << "\n";
        line("retrieval", retrieval);
        line("intent   ", intent);
        line("slot     ", slot);
        line("rows     ", rows);
        line("cols     ", cols);
        line("cells    ", cells);
        os << "table_em=" << pct(table_em) << "  ecr=" << pct(ecr) << "  pass@1=" << pct(pass1)
           << "\n";
        return os.str();
    }
};

inline EvalReport eval_run(const sfa::Pipeline& pipe, const std::vector<QaPair>& pairs,
                           sfa::AnswerMode mode, std::vector<std::string>* log = nullptr) {
    if (pairs.empty()) throw EmptyInput("empty evaluation split");
    EvalReport rep;
    rep.n = pairs.size();

    metrics::Counts retrieval, intent, slot, rows, cols, cells;
    size_t em_hits = 0, executable = 0, pass_hits = 0;

    for (const QaPair& gold : pairs) {
        auto b = sfa::answer_query(pipe, gold.query, mode);
        if (!b.ok) {
            ++rep.pipeline_errors;
            if (log)
                for (const auto& e : b.errors) log->push_back(gold.query + ": " + e);
        }

        if (b.annotation.tags.size() == uni::codepoint_count(gold.query)) {
            intent += metrics::intent_counts(b.annotation.intents, gold.annotation.intents);
            slot += metrics::slot_counts(b.annotation.tags, gold.annotation.tags);
        } else {
            intent += metrics::intent_counts({}, gold.annotation.intents);
            slot += metrics::slot_counts({}, gold.annotation.tags);
        }
        retrieval += metrics::retrieval_counts(b.captions, gold.captions);

        if (mode == sfa::AnswerMode::Sql) {
            if (b.ok && b.sql_outcome != sql::SqlOutcome::NotExecutable) ++executable;
            if (b.ok && b.sql_result && metrics::result_match(*b.sql_result, gold.sql_result))
                ++pass_hits;
        } else {
            std::vector<metrics::Grid> pred_grids, gold_grids;
            for (const auto& t : b.answer_tables) pred_grids.push_back(metrics::grid_from_table(t));
            auto gold_tables = parse_markdown(gold.markdown_answer, nullptr);
            // gold row order is authoritative when the gold SQL ordered rows
            for (const auto& t : gold_tables) {
                auto g = metrics::grid_from_table(t);
                g.ordered = gold.sql_result.ordered;
                gold_grids.push_back(std::move(g));
            }
            for (auto& g : pred_grids) g.ordered = gold.sql_result.ordered;
            if (b.ok && metrics::grids_em(pred_grids, gold_grids)) ++em_hits;
            rows += metrics::row_counts(pred_grids, gold_grids);
            cols += metrics::col_counts(pred_grids, gold_grids);
            cells += metrics::cell_counts(pred_grids, gold_grids);
        }
    }

    rep.retrieval = retrieval.prf();
    rep.intent = intent.prf();
    rep.slot = slot.prf();
    rep.rows = rows.prf();
    rep.cols = cols.prf();
    rep.cells = cells.prf();
    double dn = static_cast<double>(rep.n);
    rep.table_em = em_hits / dn;
    rep.ecr = executable / dn;
    rep.pass1 = pass_hits / dn;
    return rep;
}

}  // namespace tabqa::eval
