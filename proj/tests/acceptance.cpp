// Acceptance gate: nine checks, one pass/fail line each, nonzero exit when
// any fails. Runs entirely offline against deterministic mock backends.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tabqa/domain.hpp"
#include "tabqa/eval.hpp"
#include "tabqa/llm/mocks.hpp"
#include "tabqa/metrics.hpp"
#include "tabqa/retrieval/bm25.hpp"
#include "tabqa/retrieval/summary.hpp"
#include "tabqa/sfa/answer.hpp"
#include "tabqa/slu/lexicon.hpp"
#include "tabqa/slu/linear_model.hpp"
#include "tabqa/sql/executor.hpp"
#include "tabqa/sql/parser.hpp"
#include "tabqa/synth/generate.hpp"

#include "fixtures.hpp"
#include "sql_fuzz.hpp"
#include "sql_oracle.hpp"

using namespace tabqa;

namespace {

// ---- shared desk-scale data ----

const Catalog& desk_catalog() {
    static const Catalog cat = domain::make_catalog(domain::TableGenSpec{});
    return cat;
}

std::vector<QaPair> make_corpus(int per_template) {
    synth::GenOptions opt;
    opt.per_template = per_template;
    auto pairs = synth::generate_corpus(desk_catalog(), synth::default_templates(), opt);
    synth::assign_splits(pairs, opt.seed);
    return pairs;
}

const std::vector<QaPair>& desk_corpus() {
    static const std::vector<QaPair> pairs = make_corpus(50);
    return pairs;
}

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& why) {
        if (!cond && ok) {
            ok = false;
            detail = why;
        }
    }
};

// ---- independent metric references (brute force) ----

double ref_overlap(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double m = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) ++m, ++i, ++j;
        else if (a[i] < b[j]) ++i;
        else ++j;
    }
    return m;
}

std::vector<std::string> ref_rows(const metrics::Grid& g) {
    std::vector<std::string> out;
    for (const auto& r : g.rows) {
        std::string k;
        for (const auto& c : r) k += c + '\x1f';
        out.push_back(k);
    }
    return out;
}

std::vector<std::string> ref_cols(const metrics::Grid& g) {
    std::vector<std::string> out;
    for (size_t c = 0; c < g.header.size(); ++c) {
        std::vector<std::string> cells;
        for (const auto& r : g.rows) cells.push_back(c < r.size() ? r[c] : "");
        std::sort(cells.begin(), cells.end());
        std::string k = g.header[c];
        k += '\x1e';
        for (const auto& x : cells) k += x + '\x1f';
        out.push_back(k);
    }
    return out;
}

bool ref_em(const metrics::Grid& p, const metrics::Grid& g) {
    if (p.header != g.header || p.rows.size() != g.rows.size()) return false;
    if (g.ordered) return p.rows == g.rows;
    auto a = ref_rows(p), b = ref_rows(g);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// ---- the nine criteria ----

Check metric_oracles() {
    Check c;
    std::mt19937_64 rng(20240601);
    auto cell = [&] { return "c" + std::to_string(rng() % 9); };
    for (int iter = 0; iter < 200 && c.ok; ++iter) {
        std::vector<metrics::Grid> preds, golds;
        size_t n = 1 + rng() % 3;
        for (size_t t = 0; t < n; ++t) {
            metrics::Grid g;
            size_t cols = 1 + rng() % 3, rows = rng() % 5;
            for (size_t i = 0; i < cols; ++i) g.header.push_back("h" + std::to_string(rng() % 4));
            for (size_t r = 0; r < rows; ++r) {
                std::vector<std::string> row;
                for (size_t i = 0; i < cols; ++i) row.push_back(cell());
                g.rows.push_back(row);
            }
            g.ordered = rng() % 2 == 0;
            golds.push_back(g);
            metrics::Grid p = g;
            if (rng() % 2 && !p.rows.empty()) std::shuffle(p.rows.begin(), p.rows.end(), rng);
            if (rng() % 3 == 0 && !p.rows.empty()) p.rows[0][0] = "edited";
            preds.push_back(p);
        }
        std::vector<std::string> pr, gr, pc, gc, pcell, gcell;
        bool all_em = true;
        for (size_t t = 0; t < n; ++t) {
            for (auto& k : ref_rows(preds[t])) pr.push_back(k);
            for (auto& k : ref_rows(golds[t])) gr.push_back(k);
            for (auto& k : ref_cols(preds[t])) pc.push_back(k);
            for (auto& k : ref_cols(golds[t])) gc.push_back(k);
            for (const auto& r : preds[t].rows)
                for (const auto& x : r) pcell.push_back(x);
            for (const auto& r : golds[t].rows)
                for (const auto& x : r) gcell.push_back(x);
            bool em = ref_em(preds[t], golds[t]);
            if (!em) all_em = false;
            c.require(metrics::grid_em(preds[t], golds[t]) == em, "grid_em disagrees");
        }
        c.require(metrics::grids_em(preds, golds) == all_em, "grids_em disagrees");
        auto rowc = metrics::row_counts(preds, golds);
        c.require(rowc.match == ref_overlap(pr, gr) && rowc.pred == double(pr.size()) &&
                      rowc.gold == double(gr.size()),
                  "row counts disagree");
        auto colc = metrics::col_counts(preds, golds);
        c.require(colc.match == ref_overlap(pc, gc), "col counts disagree");
        auto cellc = metrics::cell_counts(preds, golds);
        c.require(cellc.match == ref_overlap(pcell, gcell), "cell counts disagree");

        // retrieval (set) and SLU (chunks) on random label sets
        std::vector<std::string> rp, rg;
        for (size_t i = 0; i < rng() % 4; ++i) rp.push_back("表" + std::to_string(rng() % 5));
        for (size_t i = 0; i < 1 + rng() % 3; ++i) rg.push_back("表" + std::to_string(rng() % 5));
        auto rc = metrics::retrieval_counts(rp, rg);
        std::set<std::string> sp(rp.begin(), rp.end()), sg(rg.begin(), rg.end());
        double inter = 0;
        for (const auto& x : sp) inter += sg.count(x) ? 1 : 0;
        c.require(rc.match == inter && rc.pred == double(sp.size()) && rc.gold == double(sg.size()),
                  "retrieval counts disagree");

        auto rand_tags = [&] {
            std::vector<slu::SlotTag> tags;
            size_t len = 4 + rng() % 10;
            while (tags.size() < len) {
                if (rng() % 2) tags.push_back(slu::SlotTag::O());
                else {
                    auto t = static_cast<slu::SlotType>(rng() % slu::kNumSlotTypes);
                    tags.push_back(slu::SlotTag::B(t));
                    if (rng() % 2 && tags.size() < len) tags.push_back(slu::SlotTag::I(t));
                }
            }
            tags.resize(len);
            return tags;
        };
        auto pt = rand_tags(), gt = rand_tags();
        auto sc = metrics::slot_counts(pt, gt);
        auto chunks = [](const std::vector<slu::SlotTag>& tags) {
            std::set<std::tuple<int, int, int>> out;
            int len = int(tags.size());
            for (int i = 0; i < len; ++i) {
                if (!tags[i].is_b()) continue;
                int j = i + 1;
                while (j < len && tags[j].is_i() && tags[j].type() == tags[i].type()) ++j;
                out.insert({int(tags[i].type()), i, j});
            }
            return out;
        };
        auto a = chunks(pt), b = chunks(gt);
        double m = 0;
        for (const auto& x : a) m += b.count(x) ? 1 : 0;
        c.require(sc.match == m && sc.pred == double(a.size()) && sc.gold == double(b.size()),
                  "slot counts disagree");
    }
    return c;
}

Check sql_engine() {
    Check c;
    // every template-family SQL shape against the reference interpreter
    for (const auto& tpl : synth::default_templates()) {
        for (int draw = 0; draw < 3; ++draw) {
            synth::Fill f;
            try {
                f = synth::fill_template(desk_catalog(), tpl, 11, draw);
            } catch (const SamplingError&) {
                continue;
            }
            auto ast = sql::parse_sql(f.sql);
            auto engine = sql::execute(desk_catalog(), ast);
            auto ref = oracle::run(desk_catalog(), ast);
            c.require(fixtures::same_result(engine, ref), "template SQL mismatch: " + f.sql);
        }
    }
    // canonical 10-row fixture shapes
    for (const std::string q : {
             "SELECT * FROM `sales`",
             "SELECT `name`, `price` FROM `sales` WHERE `price` > 120 ORDER BY `price` DESC",
             "SELECT `dev`, COUNT(*), SUM(`count`) FROM `sales` GROUP BY `dev`",
             "SELECT AVG(`price`) FROM `sales` WHERE `district` = '东区'",
             "SELECT `s`.`name`, `i`.`group` FROM `sales` AS `s` JOIN `info` AS `i` "
             "ON `s`.`name` = `i`.`name` WHERE `i`.`year` = 2021",
             "SELECT `name` FROM `sales` WHERE `price` BETWEEN 100 AND 200 LIMIT 3",
             "SELECT `name` FROM `sales` WHERE `dev` IN ('devA', 'devB') AND NOT "
             "(`district` LIKE '%西%')",
         }) {
        auto ast = sql::parse_sql(q);
        auto engine = sql::execute(sqlwork::fixture_catalog(), ast);
        auto ref = oracle::run(sqlwork::fixture_catalog(), ast);
        c.require(fixtures::same_result(engine, ref), "fixture SQL mismatch: " + q);
    }
    // 1,000 random join/aggregate queries plus the print round-trip
    std::mt19937_64 rng(20240915);
    for (int i = 0; i < 1000 && c.ok; ++i) {
        Catalog cat = sqlwork::random_catalog(rng);
        sql::SqlAst ast = sqlwork::random_query(rng);
        std::string text = sql::print_sql(ast);
        sql::SqlAst reparsed = sql::parse_sql(text);
        c.require(sql::print_sql(reparsed) == text, "round trip failed: " + text);
        auto engine = sql::execute(cat, reparsed);
        auto ref = oracle::run(cat, ast);
        c.require(fixtures::result_rows_as_strings(engine) ==
                          fixtures::result_rows_as_strings(ref) &&
                      engine.columns == ref.columns,
                  "fuzz mismatch: " + text);
    }
    return c;
}

Check synthesis_validity() {
    Check c;
    const auto& corpus = desk_corpus();
    std::set<std::string> queries;
    std::map<std::string, std::array<int, 3>> splits;
    for (const auto& p : corpus) {
        c.require(queries.insert(p.query).second, "duplicate query: " + p.query);
        auto v = sql::validate(desk_catalog(), sql::parse_sql(p.sql));
        c.require(v.outcome == sql::SqlOutcome::ExecutableNonEmpty,
                  "not executable+non-empty: " + p.sql);
        auto result = sql::execute_sql(desk_catalog(), p.sql);
        c.require(fixtures::same_result(result, p.sql_result), "re-execution drift: " + p.sql);
        c.require(slu::iob_valid(p.annotation.tags), "invalid IOB: " + p.query);
        c.require(p.annotation.tags.size() == uni::codepoint_count(p.query),
                  "tag length mismatch: " + p.query);
        auto cps = uni::codepoints(p.query);
        for (const auto& ch : slu::extract_chunks(p.annotation.tags)) {
            std::string text;
            for (size_t i = ch.start; i < ch.end; ++i) text += cps[i];
            c.require(!text.empty() && p.query.find(text) != std::string::npos,
                      "slot span is not a substring: " + p.query);
        }
        int s = p.split == Split::Train ? 0 : p.split == Split::Test ? 1 : 2;
        c.require(p.split != Split::Unassigned, "unassigned split");
        splits[p.template_id][size_t(s)]++;
    }
    c.require(splits.size() == 16, "expected all 16 templates to contribute");
    for (const auto& [tid, k] : splits) {
        int n = k[0] + k[1] + k[2];
        c.require(std::abs(k[0] - 0.8 * n) <= 1.0 + 1e-9 &&
                      std::abs(k[1] - 0.1 * n) <= 1.0 + 1e-9 &&
                      std::abs(k[2] - 0.1 * n) <= 1.0 + 1e-9,
                  "split out of tolerance for template " + tid);
    }
    return c;
}

struct MockRig {
    TrainPool pool;
    retrieval::Bm25Index index;
    llm::GoldEcho echo;
    llm::LlmClient client;
    std::map<std::string, slu::SluAnnotation> gold_slu;
    sfa::Pipeline pipe;

    explicit MockRig(std::shared_ptr<llm::Backend> backend = nullptr)
        : pool(filter_split(desk_corpus(), Split::Train)),
          index(retrieval::build_index(desk_catalog())),
          echo(desk_corpus()),
          client(backend ? std::move(backend) : std::make_shared<llm::MockBackend>(echo.rule())) {
        for (const auto& p : desk_corpus()) gold_slu[p.query] = p.annotation;
        pipe.catalog = &desk_catalog();
        pipe.index = &index;
        pipe.pool = &pool;
        pipe.client = &client;
        pipe.slu_backend = [this](const std::string& q) { return gold_slu.at(q); };
    }
};

Check end_to_end_plumbing() {
    Check c;
    MockRig rig;
    auto test_split = filter_split(desk_corpus(), Split::Test);
    c.require(!test_split.empty(), "empty test split");

    auto sql_rep = eval::eval_run(rig.pipe, test_split, sfa::AnswerMode::Sql);
    c.require(sql_rep.pipeline_errors == 0, "pipeline errors in SQL mode");
    c.require(sql_rep.retrieval.precision == 1.0 && sql_rep.retrieval.recall == 1.0,
              "retrieval not perfect");
    c.require(sql_rep.ecr == 1.0, "ECR below 1.0");
    c.require(sql_rep.pass1 == 1.0, "pass@1 below 1.0");

    auto md_rep = eval::eval_run(rig.pipe, test_split, sfa::AnswerMode::Markdown);
    c.require(md_rep.table_em == 1.0, "Table EM below 1.0");
    return c;
}

Check slu_linear_model() {
    Check c;
    const auto& corpus = desk_corpus();

    // gradient vs central finite differences on 20 sampled parameters
    slu::TrainExample ex{corpus[0].query, corpus[0].annotation, slu::featurize(corpus[0].query)};
    slu::LinearSluModel model = slu::LinearSluModel::zeros();
    {
        std::mt19937_64 rng(99);
        std::normal_distribution<float> nd(0.f, 0.05f);
        for (auto blk : {&slu::LinearSluModel::w_intent, &slu::LinearSluModel::b_intent,
                         &slu::LinearSluModel::w_count, &slu::LinearSluModel::b_count,
                         &slu::LinearSluModel::w_slot, &slu::LinearSluModel::b_slot})
            for (auto& v : model.*blk) v = nd(rng);
    }
    slu::LinearSluModel grad = slu::LinearSluModel::zeros();
    slu::example_grad(model, ex, grad);
    struct P {
        std::vector<float> slu::LinearSluModel::*blk;
        size_t off;
    };
    std::vector<P> candidates;
    auto consider = [&](std::vector<float> slu::LinearSluModel::*blk, size_t off) {
        if (std::abs((grad.*blk)[off]) > 0.05f) candidates.push_back({blk, off});
    };
    for (size_t k = 0; k < grad.b_intent.size(); ++k) consider(&slu::LinearSluModel::b_intent, k);
    for (size_t k = 0; k < grad.b_count.size(); ++k) consider(&slu::LinearSluModel::b_count, k);
    for (size_t k = 0; k < grad.b_slot.size(); ++k) consider(&slu::LinearSluModel::b_slot, k);
    for (int head = 0; head < slu::kNumIntents; ++head)
        for (const auto& [i, v] : ex.feats.pooled.entries)
            consider(&slu::LinearSluModel::w_intent, size_t(head) * slu::kFeatureDim + i);
    for (int head = 0; head < slu::SlotTag::kCount; ++head)
        for (const auto& [i, v] : ex.feats.per_char[0].entries)
            consider(&slu::LinearSluModel::w_slot, size_t(head) * slu::kFeatureDim + i);
    c.require(candidates.size() >= 20, "too few gradient-bearing parameters");
    std::mt19937_64 rng(4242);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const double eps = 1e-3;
    for (size_t s = 0; s < 20 && s < candidates.size(); ++s) {
        auto [blk, off] = candidates[s];
        slu::LinearSluModel m2 = model;
        float orig = (m2.*blk)[off];
        (m2.*blk)[off] = orig + float(eps);
        double lp = slu::example_loss(m2, ex);
        (m2.*blk)[off] = orig - float(eps);
        double lm = slu::example_loss(m2, ex);
        double fd = (lp - lm) / (2 * eps);
        double an = (grad.*blk)[off];
        c.require(std::abs(fd - an) <= 1e-4 * std::max(1.0, std::abs(an)),
                  "finite-difference check failed");
    }

    // train on the desk train split, measure on validation
    std::vector<std::pair<std::string, slu::SluAnnotation>> train;
    std::vector<const QaPair*> val;
    for (const auto& p : corpus) {
        if (p.split == Split::Train) train.push_back({p.query, p.annotation});
        else if (p.split == Split::Val) val.push_back(&p);
    }
    auto trained = slu::train_linear(train, 120, 5.0, 7);
    metrics::Counts ic;
    int count_hits = 0;
    for (const auto* p : val) {
        auto ann = slu::predict_linear(trained, p->query);
        ic += metrics::intent_counts(ann.intents, p->annotation.intents);
        if (ann.intent_count == p->annotation.intent_count) ++count_hits;
    }
    char buf[128];
    snprintf(buf, sizeof buf, "intent F1 %.4f, count acc %.4f", ic.prf().f1,
             double(count_hits) / double(val.size()));
    c.require(ic.prf().f1 >= 0.95, std::string("intent F1 < 0.95 (") + buf + ")");
    c.require(double(count_hits) / double(val.size()) >= 0.95,
              std::string("count accuracy < 0.95 (") + buf + ")");
    return c;
}

Check lexicon_tagger() {
    Check c;
    static const std::vector<QaPair> big = make_corpus(80);
    c.require(big.size() >= 500, "could not synthesize a 500-pair split");
    auto lex = domain::build_lexicons(desk_catalog());
    auto rules = domain::default_intent_rules();
    metrics::Counts slots;
    for (size_t i = 0; i < 500 && i < big.size(); ++i) {
        auto ann = slu::lexicon_tag(lex, rules, big[i].query);
        slots += metrics::slot_counts(ann.tags, big[i].annotation.tags);
    }
    char buf[64];
    snprintf(buf, sizeof buf, "chunk slot F1 %.4f", slots.prf().f1);
    c.require(slots.prf().f1 >= 0.99, std::string(buf) + " < 0.99");
    return c;
}

Check retrieval_directional() {
    Check c;
    static const char* kCn[] = {"",   "一", "二", "三", "四", "五", "六",
                                "七", "八", "九", "十", "十一", "十二"};
    auto index = retrieval::build_index(desk_catalog());
    metrics::Counts raw, summary;
    int n = 0;
    for (const auto& [caption, table] : desk_catalog().tables) {
        if (table.domain != Domain::Property) continue;
        auto parts = domain::parse_caption(caption, table.domain);
        if (!parts || !parts->month) continue;
        ++n;
        std::string query = "请帮我查一下" + parts->city + "市" + parts->district + "区" +
                            std::to_string(parts->year.value()) + "年" +
                            kCn[parts->month.value()] + "月住宅的平均成交价格是多少";
        std::vector<std::string> gold{caption};
        auto hits = retrieval::search(index, query, 1);
        std::vector<std::string> raw_pred;
        if (!hits.empty()) raw_pred.push_back(hits[0].first);
        raw += metrics::retrieval_counts(raw_pred, gold);
        summary += metrics::retrieval_counts(
            retrieval::retrieve(index, retrieval::QuerySummary{gold}), gold);
    }
    c.require(n >= 100, "fewer than 100 near-duplicate captions");
    double rf = raw.prf().f1, sf = summary.prf().f1;
    char buf[96];
    snprintf(buf, sizeof buf, "raw F1 %.4f vs summary F1 %.4f over %d captions", rf, sf, n);
    c.require(sf >= 0.95, std::string(buf) + ": summary < 0.95");
    c.require(sf - rf >= 0.10 && rf < sf, std::string(buf) + ": gap < 10 points");
    return c;
}

Check filter_safety() {
    Check c;
    auto intent_columns = domain::default_intent_columns();
    int n = 0;
    for (const auto& p : desk_corpus()) {
        if (n >= 100) break;
        ++n;
        Catalog filtered;
        for (const auto& cap : p.captions) {
            const Table& t = desk_catalog().lookup(cap);
            Table f = sfa::filter_table(t, p.annotation, p.query, intent_columns);
            c.require(to_markdown(f).size() <= to_markdown(t).size(),
                      "filtered markdown grew: " + cap);
            filtered.tables[cap] = std::move(f);
        }
        auto full = sql::execute_sql(desk_catalog(), p.sql);
        auto reduced = sql::execute_sql(filtered, p.sql);
        c.require(fixtures::same_result(reduced, full),
                  "filter changed the answer: " + p.sql);
    }
    c.require(n == 100, "fewer than 100 pairs available");
    return c;
}

Check reproducibility() {
    Check c;
    std::string path = "acceptance_transcript.jsonl";
    std::remove(path.c_str());
    auto test_split = filter_split(desk_corpus(), Split::Test);
    if (test_split.size() > 10) test_split.resize(10);
    {
        MockRig rig;
        rig.client.set_recorder(std::make_shared<llm::Recorder>(path));
        eval::eval_run(rig.pipe, test_split, sfa::AnswerMode::Sql);
    }
    auto run = [&] {
        MockRig rig(std::make_shared<llm::ReplayBackend>(path));
        return eval::eval_run(rig.pipe, test_split, sfa::AnswerMode::Sql).to_json().dump(2);
    };
    std::string a = run(), b = run();
    c.require(!a.empty() && a == b, "replayed reports differ");
    std::remove(path.c_str());
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Check()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"metric oracle equivalence", 30, metric_oracles},
        {"SQL engine vs reference interpreter", 120, sql_engine},
        {"synthesis validity (16x50 corpus)", 120, synthesis_validity},
        {"end-to-end plumbing with gold mocks", 60, end_to_end_plumbing},
        {"SLU linear model (gradient + training)", 300, slu_linear_model},
        {"lexicon tagger slot F1", 10, lexicon_tagger},
        {"retrieval directional (raw vs summary)", 30, retrieval_directional},
        {"deterministic-filter safety", 30, filter_safety},
        {"byte-identical replayed evaluation", 600, reproducibility},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = criteria[i].fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > criteria[i].budget_s) {
            c.ok = false;
            if (c.detail.empty()) c.detail = "over time budget";
        }
        std::printf("[%zu/9] %-42s %s (%.1fs)%s%s\n", i + 1, criteria[i].name,
                    c.ok ? "PASS" : "FAIL", secs, c.detail.empty() ? "" : " - ",
                    c.detail.c_str());
        if (!c.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
