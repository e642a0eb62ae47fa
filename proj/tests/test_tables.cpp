#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "tabqa/csv.hpp"
#include "tabqa/domain.hpp"
#include "tabqa/table.hpp"
#include "tabqa/unicode.hpp"
#include "tabqa/value.hpp"

using namespace tabqa;

TEST_CASE("csv parsing handles quoting, escapes, and embedded newlines") {
    auto rows = parse_csv("a,b,c\r\n\"x,y\",\"he said \"\"hi\"\"\",\"line1\nline2\"\n1,2,3\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1][0] == "x,y");
    CHECK(rows[1][1] == "he said \"hi\"");
    CHECK(rows[1][2] == "line1\nline2");
    CHECK(rows[2] == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("csv escape round-trips through parse") {
    std::vector<std::string> values = {"plain", "with,comma", "with\"quote", "with\nnewline", ""};
    std::string line;
    for (size_t i = 0; i < values.size(); ++i) line += (i ? "," : "") + csv_escape(values[i]);
    auto rows = parse_csv(line + "\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == values);
}

TEST_CASE("numeric parsing requires full-string matches") {
    CHECK(parse_int("42").value() == 42);
    CHECK(parse_int("-7").value() == -7);
    CHECK(parse_int(" 42 ").value() == 42);
    CHECK_FALSE(parse_int("42x"));
    CHECK_FALSE(parse_int("4.2"));
    CHECK_FALSE(parse_int(""));
    CHECK(parse_double("3.5").value() == 3.5);
    CHECK_FALSE(parse_double("3.5cm"));
}

TEST_CASE("canonical double formatting is shortest round trip") {
    for (double d : {0.1, 1.0, -2.5, 12345.678, 1e20, 1e-7}) {
        std::string s = format_double(d);
        CHECK(parse_double(s).value() == d);
    }
    CHECK(to_canonical_string(CellValue()) == "");
    CHECK(to_canonical_string(CellValue(int64_t(5))) == "5");
}

TEST_CASE("codepoint segmentation of mixed text") {
    auto cps = uni::codepoints("a北京b12");
    REQUIRE(cps.size() == 6);
    CHECK(cps[1] == "北");
    CHECK(cps[2] == "京");
    CHECK(uni::codepoint_count("北京市") == 3);
    CHECK(uni::is_cjk(0x5317));
}

TEST_CASE("column type inference and cell typing") {
    std::vector<std::vector<std::string>> raw = {
        {"name", "count", "price", "note"},
        {"甲", "3", "1.5", "x1"},
        {"乙", "4", "2", ""},
    };
    Table t = table_from_rows("t", Domain::Property, "name", raw);
    CHECK(t.columns[0].type == ColType::Text);
    CHECK(t.columns[1].type == ColType::Integer);
    CHECK(t.columns[2].type == ColType::Decimal);
    CHECK(t.columns[3].type == ColType::Text);
    CHECK(t.rows[0][1].as_int() == 3);
    CHECK(t.rows[1][2].as_double() == 2.0);
    CHECK(t.rows[1][3].is_null());  // empty cell
}

TEST_CASE("catalog enforces unique captions and present key columns") {
    Catalog cat;
    std::vector<std::vector<std::string>> raw = {{"k", "v"}, {"a", "1"}};
    cat.add(table_from_rows("t1", Domain::Property, "k", raw));
    CHECK_THROWS_AS(cat.add(table_from_rows("t1", Domain::Property, "k", raw)), DuplicateCaption);
    CHECK_THROWS_AS(cat.add(table_from_rows("t2", Domain::Property, "missing", raw)), SchemaError);
    CHECK_THROWS_AS(cat.lookup("nope"), NotFound);
}

TEST_CASE("ragged csv rows are rejected") {
    std::vector<std::vector<std::string>> raw = {{"a", "b"}, {"1", "2"}, {"3"}};
    CHECK_THROWS_AS(table_from_rows("t", Domain::Property, "a", raw), MalformedTable);
}

TEST_CASE("file ingest reproduces the generated catalog cell for cell") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tabqa_ingest_test";
    fs::remove_all(dir);
    const Catalog& cat = fixtures::small_catalog();
    domain::write_catalog_files(cat, dir.string());
    Catalog back = ingest((dir / "manifest.jsonl").string());
    REQUIRE(back.size() == cat.size());
    for (const auto& [caption, t] : cat.tables) {
        const Table& b = back.lookup(caption);
        REQUIRE(b.columns.size() == t.columns.size());
        REQUIRE(b.rows.size() == t.rows.size());
        for (size_t r = 0; r < t.rows.size(); ++r)
            for (size_t c = 0; c < t.columns.size(); ++c)
                CHECK(to_canonical_string(b.rows[r][c]) == to_canonical_string(t.rows[r][c]));
    }
    fs::remove_all(dir);
}

TEST_CASE("long-table corpus: 120 property tables averaging a few hundred rows") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tabqa_long_tables";
    fs::remove_all(dir);
    domain::TableGenSpec spec = domain::long_table_spec();
    Catalog cat = domain::make_catalog(spec);
    domain::write_catalog_files(cat, dir.string());

    size_t property_tables = 0;
    for (const auto& [_, t] : cat.tables)
        if (t.domain == Domain::Property) ++property_tables;
    CHECK(property_tables == 120);

    // independent recount: data lines in the CSV files, CSV-aware
    std::ifstream manifest(dir / "manifest.jsonl");
    std::string line;
    size_t total_rows = 0, counted_tables = 0;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        if (j.at("domain") != "property") continue;
        auto rows = read_csv_file((dir / j.at("csv_path").get<std::string>()).string());
        total_rows += rows.size() - 1;  // header
        ++counted_tables;
    }
    REQUIRE(counted_tables == 120);
    double avg = static_cast<double>(total_rows) / static_cast<double>(counted_tables);
    CHECK(avg >= 200.0);
    CHECK(avg <= 310.0);
    fs::remove_all(dir);
}

TEST_CASE("markdown round trip preserves cells for random synthetic tables") {
    const Catalog& cat = fixtures::small_catalog();
    std::vector<const Table*> all;
    for (const auto& [_, t] : cat.tables) all.push_back(&t);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const Table& t = *all[rng() % all.size()];
        auto parsed = parse_markdown(to_markdown(t), nullptr);
        REQUIRE(parsed.size() == 1);
        const Table& p = parsed[0];
        CHECK(p.caption == t.caption);
        REQUIRE(p.columns.size() == t.columns.size());
        REQUIRE(p.rows.size() == t.rows.size());
        for (size_t r = 0; r < t.rows.size(); ++r)
            for (size_t c = 0; c < t.columns.size(); ++c)
                CHECK(to_canonical_string(p.rows[r][c]) == to_canonical_string(t.rows[r][c]));
    }
}

TEST_CASE("markdown parser: captions, escaped pipes, ragged rows, multiple tables") {
    std::string md =
        "some caption\n| a | b |\n| --- | --- |\n| 1 | x\\|y |\n\n"
        "second table\n| c |\n| --- |\n| 2 | extra |\n";
    std::vector<std::string> warnings;
    auto tables = parse_markdown(md, &warnings);
    REQUIRE(tables.size() == 2);
    CHECK(tables[0].caption == "some caption");
    CHECK(tables[0].rows[0][1].text() == "x|y");
    CHECK(tables[1].caption == "second table");
    REQUIRE(tables[1].rows.size() == 1);
    CHECK(tables[1].rows[0].size() == 1);  // ragged row truncated
    CHECK_FALSE(warnings.empty());

    CHECK_THROWS_AS(parse_markdown("no pipes here at all", nullptr), NoTableFound);
}

TEST_CASE("caption scheme parses back into components") {
    auto p = domain::parse_caption(domain::property_caption("北京", "朝阳", 2021, 5),
                                   Domain::Property);
    REQUIRE(p);
    CHECK(p->city == "北京");
    CHECK(p->district == "朝阳");
    CHECK(p->year == 2021);
    CHECK(p->month == 5);
    auto f = domain::parse_caption(domain::finance_caption(2022), Domain::CompanyFinance);
    REQUIRE(f);
    CHECK(f->year == 2022);
    auto l = domain::parse_caption(domain::land_caption("上海", "徐汇"), Domain::LandAuction);
    REQUIRE(l);
    CHECK(l->district == "徐汇");
    CHECK_FALSE(domain::parse_caption("随便一个标题", Domain::Property));
}
