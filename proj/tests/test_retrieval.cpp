// Tests for caption retrieval: the CJK/ASCII tokenizer, Okapi BM25 scoring
// checked against an inline hand computation, summary-guided retrieval over
// the synthesized corpus, and the directional comparison between raw-query
// retrieval and caption-shaped-summary retrieval on near-duplicate captions.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "tabqa/domain.hpp"
#include "tabqa/llm/client.hpp"
#include "tabqa/metrics.hpp"
#include "tabqa/retrieval/bm25.hpp"
#include "tabqa/retrieval/summary.hpp"

#include "fixtures.hpp"

using namespace tabqa;
using namespace tabqa::retrieval;

namespace {

Catalog caption_catalog(const std::vector<std::string>& captions) {
    Catalog cat;
    for (const auto& c : captions) {
        Table t;
        t.caption = c;
        cat.tables[c] = t;
    }
    return cat;
}

}  // namespace

TEST_CASE("tokenizer: CJK unigrams+bigrams, whole digit runs, ASCII words") {
    auto t = tokenize("北京市2021年BM25指数");
    std::vector<std::string> expect{"北", "京", "市", "北京", "京市", "2021",
                                    "年", "bm",  "25", "指",   "数",   "指数"};
    std::sort(t.begin(), t.end());
    std::sort(expect.begin(), expect.end());
    CHECK(t == expect);

    CHECK(tokenize("，。！ ... ---").empty());
    CHECK(tokenize("Hello WORLD") == std::vector<std::string>{"hello", "world"});
    // digit runs are atomic: "12" does not match "1" or "2"
    CHECK(tokenize("12月") == std::vector<std::string>{"12", "月"});
}

TEST_CASE("BM25 scores match a hand computation") {
    // three ASCII docs so term statistics are easy to audit
    Catalog cat = caption_catalog({"alpha beta", "alpha gamma gamma", "beta delta"});
    Bm25Index index = build_index(cat);
    REQUIRE(index.N() == 3);
    CHECK(index.avgdl == Catch::Approx((2 + 3 + 2) / 3.0));

    const double k1 = 1.2, b = 0.75, avgdl = 7.0 / 3.0;
    auto idf = [&](int n) { return std::log(1.0 + (3 - n + 0.5) / (n + 0.5)); };
    auto tfw = [&](int tf, int dl) {
        return tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl));
    };

    // query "alpha gamma": alpha appears in docs 0,1 (n=2); gamma in doc 1 (n=1)
    auto hits = search(index, "alpha gamma", 3);
    std::map<std::string, double> got(hits.begin(), hits.end());
    REQUIRE(got.size() == 2);  // "beta delta" shares no term and is omitted
    double exp_doc0 = idf(2) * tfw(1, 2);
    double exp_doc1 = idf(2) * tfw(1, 3) + idf(1) * tfw(2, 3);
    CHECK(got.at("alpha beta") == Catch::Approx(exp_doc0).margin(1e-9));
    CHECK(got.at("alpha gamma gamma") == Catch::Approx(exp_doc1).margin(1e-9));
    CHECK(hits[0].first == "alpha gamma gamma");  // higher score ranks first

    // score_doc agrees with search
    std::map<std::string, int> qtf{{"alpha", 1}, {"gamma", 1}};
    CHECK(score_doc(index, qtf, 0) == Catch::Approx(exp_doc0).margin(1e-12));
    CHECK(score_doc(index, qtf, 1) == Catch::Approx(exp_doc1).margin(1e-12));
}

TEST_CASE("search tie-break, truncation, and error cases") {
    Catalog cat = caption_catalog({"zz shared", "aa shared", "mm shared", "unrelated"});
    Bm25Index index = build_index(cat);
    auto hits = search(index, "shared", 10);
    REQUIRE(hits.size() == 3);
    // equal scores: caption lexicographic order
    CHECK(hits[0].first == "aa shared");
    CHECK(hits[1].first == "mm shared");
    CHECK(hits[2].first == "zz shared");
    CHECK(hits[0].second == Catch::Approx(hits[2].second));

    CHECK(search(index, "shared", 2).size() == 2);
    CHECK(search(index, "nothing matches this", 5).empty());
    CHECK_THROWS_AS(search(index, "shared", 0), EmptyInput);
    CHECK_THROWS_AS(build_index(Catalog{}), EmptyInput);
}

TEST_CASE("caption-shaped summaries retrieve their gold tables exactly") {
    const auto& corpus = fixtures::small_corpus();
    Bm25Index index = build_index(fixtures::small_catalog());
    metrics::Counts c;
    for (const auto& p : corpus) {
        QuerySummary s{p.captions};
        c += metrics::retrieval_counts(retrieve(index, s), p.captions);
    }
    auto prf = c.prf();
    CHECK(prf.precision == 1.0);
    CHECK(prf.recall == 1.0);
}

TEST_CASE("generate_summary parses mock responses and drives retrieval") {
    const auto& corpus = fixtures::small_corpus();
    TrainPool pool(filter_split(corpus, Split::Train));
    Bm25Index index = build_index(fixtures::small_catalog());
    prompts::PromptLibrary lib;

    std::map<std::string, const QaPair*> by_query;
    for (const auto& p : corpus) by_query[p.query] = &p;
    auto backend = std::make_shared<llm::MockBackend>([&](const llm::ChatRequest& req) {
        std::string target = prompts::last_field(req.messages.back().content, "Query");
        std::string out = "Summary:\n";  // headers and blank lines must be ignored
        for (const auto& c : by_query.at(target)->captions) out += c + "\n\n";
        return out;
    });
    llm::LlmClient client(backend);

    metrics::Counts c;
    int n = 0;
    for (const auto& p : corpus) {
        if (p.split != Split::Test) continue;
        QuerySummary s = generate_summary(client, lib, pool, p.annotation, p.query);
        CHECK(s.entries == p.captions);
        c += metrics::retrieval_counts(retrieve(index, s), p.captions);
        if (++n >= 50) break;
    }
    REQUIRE(n >= 20);
    CHECK(c.prf().f1 == 1.0);

    // an empty response is an error, not an empty retrieval
    auto empty_backend = std::make_shared<llm::MockBackend>(
        [](const llm::ChatRequest&) { return std::string("Summary:\n\n"); });
    llm::LlmClient empty_client(empty_backend);
    const QaPair& p0 = corpus.front();
    CHECK_THROWS_AS(generate_summary(empty_client, lib, pool, p0.annotation, p0.query),
                    SummaryError);
}

TEST_CASE("raw-query retrieval trails summary retrieval on near-duplicate captions") {
    // >= 100 captions differing only in district/year/month. Queries phrase
    // the month colloquially (Chinese numerals), as users do, while captions
    // use digits; caption-shaped summaries restore the canonical form.
    static const char* kCn[] = {"",   "一", "二", "三", "四", "五", "六",
                                "七", "八", "九", "十", "十一", "十二"};
    domain::TableGenSpec spec;  // 5 districts x 2 years x 12 months = 120
    Catalog cat = domain::make_catalog(spec);
    Bm25Index index = build_index(cat);

    metrics::Counts raw, summary;
    int n_property = 0;
    for (const auto& [caption, table] : cat.tables) {
        if (table.domain != Domain::Property) continue;
        auto parts = domain::parse_caption(caption, table.domain);
        REQUIRE(parts.has_value());
        ++n_property;
        std::string query = "请帮我查一下" + parts->city + "市" + parts->district + "区" +
                            std::to_string(parts->year.value()) + "年" +
                            kCn[parts->month.value()] +
                            "月住宅的平均成交价格是多少";
        std::vector<std::string> gold{caption};

        auto hits = search(index, query, 1);
        std::vector<std::string> raw_pred;
        if (!hits.empty()) raw_pred.push_back(hits[0].first);
        raw += metrics::retrieval_counts(raw_pred, gold);

        summary += metrics::retrieval_counts(retrieve(index, QuerySummary{gold}), gold);
    }
    REQUIRE(n_property >= 100);

    double raw_f1 = raw.prf().f1;
    double summary_f1 = summary.prf().f1;
    INFO("raw F1 " << raw_f1 << " vs summary F1 " << summary_f1 << " over " << n_property
                   << " near-duplicate captions");
    CHECK(summary_f1 >= 0.95);
    CHECK(summary_f1 - raw_f1 >= 0.10);
    CHECK(raw_f1 < summary_f1);
}
