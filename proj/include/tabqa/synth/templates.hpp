#pragma once

// Query template library. Each template carries a Chinese query pattern, a
// SQL pattern over the caption scheme, the intent label(s), and a var table
// describing where each placeholder value is sampled from. Templates are
// JSON round-trippable so new families can be dropped in from a file.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/errors.hpp"
#include "tabqa/slu/labels.hpp"
#include "tabqa/table.hpp"

namespace tabqa::synth {

// Sampling sources:
//   caption_city / caption_district / caption_year / caption_month
//       component of the chosen table's caption
//   caption2_month
//       month of a second table sharing city/district/year (marks the
//       template as multi-table)
//   key_value
//       drawn without replacement from the key column (intersection of key
//       columns for multi-table templates)
//   column:<name>
//       any non-null value of that column
//   column_low:<name> / column_high:<name>
//       the smaller / larger of two distinct numeric values of that column
struct VarSpec {
    std::string source;
    std::optional<slu::SlotType> slot;
};

struct Template {
    std::string id;
    Domain domain = Domain::Property;
    std::vector<slu::IntentLabel> intents;
    std::string query_template;
    std::string sql_template;
    std::map<std::string, VarSpec> vars;

    bool multi_table() const {
        for (const auto& [_, v] : vars)
            if (v.source == "caption2_month") return true;
        return false;
    }
};

inline nlohmann::ordered_json template_to_json(const Template& t) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["domain"] = domain_name(t.domain);
    nlohmann::ordered_json intents = nlohmann::ordered_json::array();
    for (auto i : t.intents) intents.push_back(slu::intent_name(i));
    j["intents"] = std::move(intents);
    j["query"] = t.query_template;
    j["sql"] = t.sql_template;
    nlohmann::ordered_json vars;
    for (const auto& [name, v] : t.vars) {
        nlohmann::ordered_json jv{{"source", v.source}};
        jv["slot"] = v.slot ? nlohmann::ordered_json(slu::slot_type_name(*v.slot))
                            : nlohmann::ordered_json(nullptr);
        vars[name] = std::move(jv);
    }
    j["vars"] = std::move(vars);
    return j;
}

inline Template template_from_json(const nlohmann::json& j) {
    Template t;
    t.id = j.at("id").get<std::string>();
    t.domain = domain_from_name(j.at("domain").get<std::string>());
    for (const auto& name : j.at("intents"))
        t.intents.push_back(slu::intent_from_name(name.get<std::string>()));
    if (t.intents.empty() || t.intents.size() > 2)
        throw ConfigError("template " + t.id + ": need 1 or 2 intents");
    t.query_template = j.at("query").get<std::string>();
    t.sql_template = j.at("sql").get<std::string>();
    for (auto it = j.at("vars").begin(); it != j.at("vars").end(); ++it) {
        VarSpec v;
        v.source = it.value().at("source").get<std::string>();
        if (!it.value().at("slot").is_null()) {
            std::string s = it.value().at("slot").get<std::string>();
            const auto& names = slu::slot_type_names();
            bool found = false;
            for (int i = 0; i < slu::kNumSlotTypes; ++i)
                if (names[i] == s) {
                    v.slot = static_cast<slu::SlotType>(i);
                    found = true;
                }
            if (!found) throw ConfigError("template " + t.id + ": unknown slot type " + s);
        }
        t.vars[it.key()] = std::move(v);
    }
    return t;
}

inline std::vector<Template> templates_from_json(const nlohmann::json& arr) {
    std::vector<Template> out;
    for (const auto& j : arr) out.push_back(template_from_json(j));
    if (out.empty()) throw EmptyInput("empty template file");
    return out;
}

inline std::vector<Template> default_templates() {
    using I = slu::IntentLabel;
    using S = slu::SlotType;
    auto v = [](std::string source, std::optional<S> slot = std::nullopt) {
        return VarSpec{std::move(source), slot};
    };
    std::vector<Template> ts;

    ts.push_back({"sales_volume_lookup",
                  Domain::Property,
                  {I::RealEstateProjectSalesVolumeQuery},
                  "{year}年{month}月{city}市{district}区{development_name}成交了多少套住宅？",
                  "SELECT `成交套数` FROM `{caption}` WHERE `楼盘名称` = '{development_name}'",
                  {{"year", v("caption_year", S::Year)},
                   {"month", v("caption_month", S::Month)},
                   {"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"development_name", v("key_value", S::DevelopmentName)}}});

    ts.push_back({"developer_project_counts",
                  Domain::Property,
                  {I::RealEstateProjectDeveloperInformationQuery},
                  "{city}市{district}区{year}年{month}月各开发商分别有多少个楼盘在售？",
                  "SELECT `开发商`, COUNT(*) FROM `{caption}` GROUP BY `开发商`",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"year", v("caption_year", S::Year)},
                   {"month", v("caption_month", S::Month)}}});

    ts.push_back({"avg_price_two_months",
                  Domain::Property,
                  {I::RealEstateProjectAveragePriceQuery},
                  "{development_name}在{city}市{district}区{year}年{month}月和{month2}月的平均成交"
                  "价格分别是多少？",
                  "SELECT a.`平均成交价格` AS `{month}月均价`, b.`平均成交价格` AS `{month2}月均价` "
                  "FROM `{caption}` AS a JOIN `{caption2}` AS b ON a.`楼盘名称` = b.`楼盘名称` "
                  "WHERE a.`楼盘名称` = '{development_name}'",
                  {{"development_name", v("key_value", S::DevelopmentName)},
                   {"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"year", v("caption_year", S::Year)},
                   {"month", v("caption_month", S::Month)},
                   {"month2", v("caption2_month", S::Month)}}});

    ts.push_back({"green_ratio_range",
                  Domain::LandAuction,
                  {I::RealEstateProjectGreenCoverageRatioQuery},
                  "{city}市{district}区绿化率在{green_lo}%和{green_hi}%之间的地块有哪些？",
                  "SELECT `楼盘名称`, `绿化率` FROM `{caption}` WHERE `绿化率` BETWEEN {green_lo} "
                  "AND {green_hi} ORDER BY `绿化率` ASC",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"green_lo", v("column_low:绿化率")},
                   {"green_hi", v("column_high:绿化率")}}});

    ts.push_back({"max_building_density",
                  Domain::LandAuction,
                  {I::RealEstateProjectBuildingDensityQuery},
                  "{city}市{district}区土地拍卖中最高的建筑密度是多少？",
                  "SELECT MAX(`建筑密度`) FROM `{caption}`",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)}}});

    ts.push_back({"plot_ratio_above",
                  Domain::LandAuction,
                  {I::RealEstateProjectPlotRatioQuery},
                  "{city}市{district}区容积率高于{ratio}的地块有哪些？",
                  "SELECT `楼盘名称`, `容积率` FROM `{caption}` WHERE `容积率` > {ratio} ORDER BY "
                  "`容积率` DESC",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"ratio", v("column_low:容积率")}}});

    ts.push_back({"land_price_total",
                  Domain::LandAuction,
                  {I::LandTotalPriceQuery},
                  "{city}市{district}区土地拍卖的成交总价合计是多少万元？",
                  "SELECT SUM(`成交总价`) FROM `{caption}`",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)}}});

    ts.push_back({"land_ownership_lookup",
                  Domain::LandAuction,
                  {I::LandOwnershipQuery},
                  "{city}市{district}区{development_name}地块所属的集团是哪家？",
                  "SELECT `所属集团` FROM `{caption}` WHERE `楼盘名称` = '{development_name}'",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"development_name", v("column:楼盘名称", S::DevelopmentName)}}});

    ts.push_back({"land_deal_date",
                  Domain::LandAuction,
                  {I::LandTransactionDateQuery},
                  "{city}市{district}区{development_name}地块的成交日期是什么时候？",
                  "SELECT `成交年份`, `成交月份` FROM `{caption}` WHERE `楼盘名称` = "
                  "'{development_name}'",
                  {{"city", v("caption_city", S::City)},
                   {"district", v("caption_district", S::District)},
                   {"development_name", v("column:楼盘名称", S::DevelopmentName)}}});

    ts.push_back({"company_cost_lookup",
                  Domain::CompanyFinance,
                  {I::CompanyCostQuery},
                  "{year}年{company_name}的营业总成本是多少亿元？",
                  "SELECT `营业总成本` FROM `{caption}` WHERE `公司名称` = '{company_name}'",
                  {{"year", v("caption_year", S::Year)},
                   {"company_name", v("key_value", S::CompanyName)}}});

    ts.push_back({"companies_by_nature",
                  Domain::CompanyFinance,
                  {I::CompanyNatureQuery},
                  "{year}年哪些房地产企业的性质是{nature}？",
                  "SELECT `公司名称` FROM `{caption}` WHERE `企业性质` = '{nature}'",
                  {{"year", v("caption_year", S::Year)}, {"nature", v("column:企业性质")}}});

    ts.push_back({"risk_level_excluding",
                  Domain::CompanyFinance,
                  {I::CompanyRiskAssessmentQuery},
                  "{year}年风险等级不是{risk}的房地产企业有哪些？",
                  "SELECT `公司名称`, `风险等级` FROM `{caption}` WHERE `风险等级` <> '{risk}'",
                  {{"year", v("caption_year", S::Year)}, {"risk", v("column:风险等级")}}});

    ts.push_back({"top_debt_companies",
                  Domain::CompanyFinance,
                  {I::CompanyDebtQuery},
                  "{year}年负债总计最高的前三家房地产企业是哪几家？",
                  "SELECT `公司名称`, `负债总计` FROM `{caption}` ORDER BY `负债总计` DESC LIMIT 3",
                  {{"year", v("caption_year", S::Year)}}});

    ts.push_back({"mean_total_revenue",
                  Domain::CompanyFinance,
                  {I::CompanyTotalRevenueQuery},
                  "{year}年中国房地产企业的营业总收入平均是多少亿元？",
                  "SELECT AVG(`营业总收入`) FROM `{caption}`",
                  {{"year", v("caption_year", S::Year)}}});

    ts.push_back({"higher_profit_of_two",
                  Domain::CompanyFinance,
                  {I::CompanyProfitQuery},
                  "{year}年{company_a}和{company_b}哪家公司的营业利润更高？",
                  "SELECT `公司名称`, `营业利润` FROM `{caption}` WHERE `公司名称` IN "
                  "('{company_a}', '{company_b}') ORDER BY `营业利润` DESC LIMIT 1",
                  {{"year", v("caption_year", S::Year)},
                   {"company_a", v("key_value", S::CompanyName)},
                   {"company_b", v("key_value", S::CompanyName)}}});

    ts.push_back({"credit_bond_and_debt",
                  Domain::CompanyFinance,
                  {I::CompanyDebtDefaultQuery, I::CompanyDebtQuery},
                  "{year}年{company_name}的信用债情况和负债总计分别是怎样的？",
                  "SELECT `信用债情况`, `负债总计` FROM `{caption}` WHERE `公司名称` = "
                  "'{company_name}'",
                  {{"year", v("caption_year", S::Year)},
                   {"company_name", v("key_value", S::CompanyName)}}});

    return ts;
}

}  // namespace tabqa::synth
