#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <random>

#include "fixtures.hpp"
#include "sql_fuzz.hpp"
#include "sql_oracle.hpp"
#include "tabqa/sql/executor.hpp"
#include "tabqa/sql/parser.hpp"
#include "tabqa/synth/generate.hpp"

using namespace tabqa;
using namespace tabqa::sql;
using sqlwork::fixture_catalog;
using sqlwork::random_catalog;
using sqlwork::random_query;

namespace {







void check_against_oracle(const Catalog& cat, const std::string& text) {
    INFO(text);
    SqlAst ast = parse_sql(text);
    ResultTable engine = execute(cat, ast);
    ResultTable ref = oracle::run(cat, ast);
    CHECK(fixtures::same_result(engine, ref));
    // and unordered comparisons also see identical row sequences
    CHECK(fixtures::result_rows_as_strings(engine) == fixtures::result_rows_as_strings(ref));
}

}  // namespace

TEST_CASE("canonical statement shapes match the reference interpreter") {
    const Catalog& cat = fixture_catalog();
    for (const std::string q : {
             "SELECT `price` FROM `sales` WHERE `name` = '甲园'",
             "SELECT `name`, `price` FROM `sales`",
             "SELECT * FROM `sales` WHERE `district` = '东区'",
             "SELECT `dev`, COUNT(*) FROM `sales` GROUP BY `dev`",
             "SELECT `dev`, COUNT(`count`) FROM `sales` GROUP BY `dev`",
             "SELECT AVG(`price`) FROM `sales`",
             "SELECT SUM(`count`) FROM `sales` WHERE `district` = '西区'",
             "SELECT MAX(`price`), MIN(`count`) FROM `sales`",
             "SELECT `name`, `price` FROM `sales` WHERE `price` BETWEEN 100 AND 200 "
             "ORDER BY `price` ASC",
             "SELECT `name` FROM `sales` WHERE `district` <> '东区'",
             "SELECT `name`, `count` FROM `sales` ORDER BY `count` DESC LIMIT 3",
             "SELECT `name` FROM `sales` WHERE `name` IN ('甲园', '戊园', '不存在')",
             "SELECT `name` FROM `sales` WHERE `name` LIKE '乙%'",
             "SELECT `name` FROM `sales` WHERE `district` = '东区' AND `count` >= 5",
             "SELECT `name` FROM `sales` WHERE `district` = '北区' OR `price` < 100",
             "SELECT `name` FROM `sales` WHERE NOT `district` = '东区'",
             "SELECT a.`price`, b.`group` FROM `sales` AS a JOIN `info` AS b "
             "ON a.`name` = b.`name` WHERE a.`name` = '甲园'",
             "SELECT b.`group`, SUM(a.`count`) FROM `sales` AS a JOIN `info` AS b "
             "ON a.`name` = b.`name` GROUP BY b.`group`",
         }) {
        check_against_oracle(cat, q);
    }
}

TEST_CASE("template-library SQL runs identically on engine and oracle") {
    const Catalog& cat = fixtures::small_catalog();
    for (const auto& tpl : synth::default_templates()) {
        int checked = 0;
        for (int draw = 0; draw < 8 && checked < 3; ++draw) {
            synth::Fill fill;
            try {
                fill = synth::fill_template(cat, tpl, 7, draw);
            } catch (const SamplingError&) {
                continue;
            }
            check_against_oracle(cat, fill.sql);
            ++checked;
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("null semantics: predicates never match, aggregates skip") {
    const Catalog& cat = fixture_catalog();
    // 丁园 has a NULL price: no comparison picks it up
    auto r = execute_sql(cat, "SELECT `name` FROM `sales` WHERE `price` >= 0");
    for (const auto& row : r.rows) CHECK(row[0].text() != "丁园");
    auto r2 = execute_sql(cat, "SELECT `name` FROM `sales` WHERE `price` <> 100.5");
    for (const auto& row : r2.rows) CHECK(row[0].text() != "丁园");

    // COUNT(col) skips the NULL, COUNT(*) does not
    auto r3 = execute_sql(cat, "SELECT COUNT(`price`), COUNT(*) FROM `sales`");
    CHECK(r3.rows[0][0].as_int() == 9);
    CHECK(r3.rows[0][1].as_int() == 10);

    // aggregates over an empty selection: COUNT 0, SUM NULL
    auto r4 = execute_sql(cat, "SELECT COUNT(*), SUM(`count`) FROM `sales` WHERE `price` > 9999");
    CHECK(r4.rows[0][0].as_int() == 0);
    CHECK(r4.rows[0][1].is_null());
}

TEST_CASE("sum stays integral over integer columns, avg is always decimal") {
    const Catalog& cat = fixture_catalog();
    auto r = execute_sql(cat, "SELECT SUM(`count`), AVG(`count`) FROM `sales`");
    CHECK(r.rows[0][0].is_int());
    CHECK(r.rows[0][1].is_decimal());
    auto r2 = execute_sql(cat, "SELECT SUM(`price`) FROM `sales`");
    CHECK(r2.rows[0][0].is_decimal());
}

TEST_CASE("order by is stable and ranks nulls first ascending") {
    const Catalog& cat = fixture_catalog();
    auto r = execute_sql(cat, "SELECT `name`, `district` FROM `sales` ORDER BY `district` ASC");
    REQUIRE(r.ordered);
    // equal districts keep catalog row order: 甲园 before 乙园 before 庚园
    std::vector<std::string> east;
    for (const auto& row : r.rows)
        if (row[1].text() == "东区") east.push_back(row[0].text());
    CHECK(east == std::vector<std::string>{"甲园", "乙园", "庚园", "癸园"});

    auto r2 = execute_sql(cat, "SELECT `name`, `price` FROM `sales` ORDER BY `price` ASC LIMIT 1");
    CHECK(r2.rows[0][0].text() == "丁园");  // the NULL price sorts first
}

TEST_CASE("unsupported constructs raise UnsupportedSql, junk raises ParseError") {
    for (const std::string q : {
             "SELECT DISTINCT `name` FROM `sales`",
             "SELECT `dev`, COUNT(*) FROM `sales` GROUP BY `dev` HAVING COUNT(*) > 1",
             "SELECT `name` FROM `sales` WHERE `price` IS NULL",
             "SELECT `name` FROM (SELECT * FROM `sales`)",
             "SELECT `name` FROM `sales` UNION SELECT `name` FROM `info`",
             "SELECT `name`, MAX(`price`) FROM `sales`",
         }) {
        INFO(q);
        CHECK_THROWS_AS(parse_sql(q), UnsupportedSql);
    }
    CHECK_THROWS_AS(parse_sql("SELEKT nothing"), ParseError);
    CHECK_THROWS_AS(parse_sql(""), ParseError);
}

TEST_CASE("schema and type errors surface at execution") {
    const Catalog& cat = fixture_catalog();
    CHECK_THROWS_AS(execute_sql(cat, "SELECT `nope` FROM `sales`"), SchemaError);
    CHECK_THROWS_AS(execute_sql(cat, "SELECT `name` FROM `missing_table`"), NotFound);
    CHECK_THROWS_AS(execute_sql(cat, "SELECT `name` FROM `sales` WHERE `price` = 'abc'"),
                    TypeError);
    // unqualified ambiguous column across a join
    CHECK_THROWS_AS(execute_sql(cat, "SELECT `name` FROM `sales` AS a JOIN `info` AS b "
                                     "ON a.`name` = b.`name`"),
                    SchemaError);
}

TEST_CASE("parse -> print -> parse round trips to the same canonical text") {
    for (const std::string q : {
             "SELECT `name` FROM `sales` WHERE `price` > 100 ORDER BY `price` DESC LIMIT 2",
             "SELECT a.`price` AS p FROM `sales` AS a JOIN `info` AS b ON a.`name` = b.`name`",
             "SELECT `dev`, COUNT(*) FROM `sales` GROUP BY `dev`",
             "select name from sales where district in ('东区','西区') and not price < 10",
         }) {
        INFO(q);
        std::string once = print_sql(parse_sql(q));
        std::string twice = print_sql(parse_sql(once));
        CHECK(once == twice);
    }
}

namespace {





}  // namespace

TEST_CASE("1000 random queries agree with the reference interpreter") {
    std::mt19937_64 rng(20240915);
    for (int i = 0; i < 1000; ++i) {
        Catalog cat = random_catalog(rng);
        SqlAst ast = random_query(rng);
        std::string text = print_sql(ast);
        INFO("iteration " << i << ": " << text);

        // round trip through the printer and parser
        SqlAst reparsed = parse_sql(text);
        CHECK(print_sql(reparsed) == text);

        ResultTable engine = execute(cat, reparsed);
        ResultTable ref = oracle::run(cat, ast);
        CHECK(fixtures::result_rows_as_strings(engine) == fixtures::result_rows_as_strings(ref));
        CHECK(engine.columns == ref.columns);
    }
}
