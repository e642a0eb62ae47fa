#pragma once

// The synthetic real-estate domain: column schemas, caption scheme, value
// pools, the table-corpus generator, lexicon construction, intent keyphrase
// rules, and the intent -> needed-columns map.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabqa/csv.hpp"
#include "tabqa/slu/labels.hpp"
#include "tabqa/slu/lexicon.hpp"
#include "tabqa/table.hpp"

namespace tabqa::domain {

// ---- column names (property / company finance / land auction) ----
namespace col {
inline const std::string kDevName = "楼盘名称";
inline const std::string kDistrict = "所在区域";
inline const std::string kAvgPrice = "平均成交价格";
inline const std::string kSalesCount = "成交套数";
inline const std::string kDeveloper = "开发商";
inline const std::string kYear = "年份";
inline const std::string kMonth = "月份";

inline const std::string kCompanyName = "公司名称";
inline const std::string kTotalRevenue = "营业总收入";
inline const std::string kProfit = "营业利润";
inline const std::string kTotalCost = "营业总成本";
inline const std::string kTotalAssets = "资产总计";
inline const std::string kTotalDebt = "负债总计";
inline const std::string kNature = "企业性质";
inline const std::string kCreditBond = "信用债情况";
inline const std::string kRiskLevel = "风险等级";

inline const std::string kParcelName = "地块名称";
inline const std::string kGroup = "所属集团";
inline const std::string kTotalPrice = "成交总价";
inline const std::string kPlotRatio = "容积率";
inline const std::string kBuildDensity = "建筑密度";
inline const std::string kGreenRatio = "绿化率";
inline const std::string kDealYear = "成交年份";
inline const std::string kDealMonth = "成交月份";
}  // namespace col

// ---- caption scheme ----

inline std::string property_caption(const std::string& city, const std::string& district,
                                    int year, int month) {
    return city + "市" + district + "区" + std::to_string(year) + "年" + std::to_string(month) +
           "月住宅房产销售价格表";
}

inline std::string finance_caption(int year) {
    return std::to_string(year) + "年中国房地产企业财务报表";
}

inline std::string land_caption(const std::string& city, const std::string& district) {
    return city + "市" + district + "区土地拍卖信息表";
}

struct CaptionParts {
    std::string city, district;
    std::optional<int> year, month;
};

// Parses the caption scheme back into components; nullopt if the caption
// does not follow the scheme.
inline std::optional<CaptionParts> parse_caption(const std::string& caption, Domain domain) {
    auto find_tok = [&](const std::string& tok, size_t from) { return caption.find(tok, from); };
    CaptionParts parts;
    if (domain == Domain::CompanyFinance) {
        size_t y = find_tok("年", 0);
        if (y == std::string::npos) return std::nullopt;
        if (auto v = parse_int(caption.substr(0, y))) parts.year = static_cast<int>(*v);
        else return std::nullopt;
        return parts;
    }
    size_t shi = find_tok("市", 0);
    size_t qu = find_tok("区", shi == std::string::npos ? 0 : shi);
    if (shi == std::string::npos || qu == std::string::npos) return std::nullopt;
    parts.city = caption.substr(0, shi);
    parts.district = caption.substr(shi + 3, qu - shi - 3);
    if (domain == Domain::LandAuction) return parts;
    size_t y = find_tok("年", qu);
    size_t m = find_tok("月", qu);
    if (y == std::string::npos || m == std::string::npos) return std::nullopt;
    auto yv = parse_int(caption.substr(qu + 3, y - qu - 3));
    auto mv = parse_int(caption.substr(y + 3, m - y - 3));
    if (!yv || !mv) return std::nullopt;
    parts.year = static_cast<int>(*yv);
    parts.month = static_cast<int>(*mv);
    return parts;
}

// ---- value pools ----

struct Pools {
    std::vector<std::pair<std::string, std::string>> city_districts;  // (city, district)
    std::vector<std::string> dev_names;
    std::vector<std::string> company_names;
    std::vector<std::string> developers;
    std::vector<std::string> groups;
    std::vector<std::string> natures;
    std::vector<std::string> credit_bond;
    std::vector<std::string> risk_levels;
};

inline Pools default_pools() {
    Pools p;
    p.city_districts = {{"北京", "朝阳"}, {"北京", "海淀"}, {"上海", "徐汇"}, {"上海", "浦东"},
                        {"南京", "江宁"}, {"南京", "鼓楼"}, {"杭州", "西湖"}, {"深圳", "南山"},
                        {"苏州", "姑苏"}, {"武汉", "洪山"}};
    std::vector<std::string> prefixes = {"翠湖", "金色", "阳光", "碧水", "龙栖", "万象", "云顶",
                                         "星河", "春江", "御景", "紫荆", "蓝湾", "麓山", "锦绣",
                                         "澜庭", "晴川", "汇景", "松涛", "兰亭", "曦城"};
    std::vector<std::string> suffixes = {"雅苑", "家园", "华庭", "名邸", "花园", "公馆", "小筑",
                                         "广场", "佳苑", "台", "里", "郡", "湾", "府", "庄园"};
    for (const auto& a : prefixes)
        for (const auto& b : suffixes) p.dev_names.push_back(a + b);
    std::vector<std::string> stems = {"华宇", "金辉", "龙光", "中骏", "祥生", "泰禾", "宏远",
                                      "众安", "嘉合", "盛和", "瑞安", "景瑞", "弘阳", "佳源",
                                      "德信", "海伦", "朗诗", "新力", "福晟", "三巽"};
    for (const auto& s : stems) {
        // company names must stay clear of the land-ownership keyphrase 集团
        p.company_names.push_back(s + "地产股份");
        p.company_names.push_back(s + "置业有限公司");
        p.developers.push_back(s + "地产");
        p.groups.push_back(s + "控股集团");
    }
    p.natures = {"国有企业", "民营企业", "中外合资企业"};
    p.credit_bond = {"有存续信用债", "无存续信用债", "信用债已违约"};
    p.risk_levels = {"低风险", "中风险", "高风险"};
    return p;
}

// ---- synthetic table corpus generator ----

struct TableGenSpec {
    int n_city_districts = 5;   // property (city, district) pairs used
    std::vector<int> years = {2021, 2022};
    std::vector<int> months = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    int property_rows_lo = 30;  // per-table row count range
    int property_rows_hi = 50;
    int finance_rows = 40;      // companies per finance table
    int land_rows = 30;         // parcels per land table
    uint64_t seed = 20240601;
};

// Row-count range mirroring the long-table corpus (averages ~253 rows).
inline TableGenSpec long_table_spec() {
    TableGenSpec s;
    s.property_rows_lo = 201;
    s.property_rows_hi = 305;
    return s;
}

inline Catalog make_catalog(const TableGenSpec& spec = {}) {
    Pools pools = default_pools();
    std::mt19937_64 rng(spec.seed);
    Catalog cat;
    cat.manifest_path = "<generated>";

    auto pick = [&](const auto& v) -> const auto& {
        std::uniform_int_distribution<size_t> d(0, v.size() - 1);
        return v[d(rng)];
    };
    auto uniform_int = [&](int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng);
    };
    auto uniform_money = [&](double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        // two decimal places, keeps canonical forms short
        return std::round(d(rng) * 100.0) / 100.0;
    };

    const int n_cd = std::min<int>(spec.n_city_districts,
                                   static_cast<int>(pools.city_districts.size()));

    // property tables: one per (city,district) x year x month
    for (int cd = 0; cd < n_cd; ++cd) {
        const auto& [city, district] = pools.city_districts[cd];
        for (int year : spec.years) {
            for (int month : spec.months) {
                Table t;
                t.caption = property_caption(city, district, year, month);
                t.domain = Domain::Property;
                t.key_column = col::kDevName;
                t.columns = {{col::kDevName, ColType::Text},    {col::kDistrict, ColType::Text},
                             {col::kAvgPrice, ColType::Decimal}, {col::kSalesCount, ColType::Integer},
                             {col::kDeveloper, ColType::Text},   {col::kYear, ColType::Integer},
                             {col::kMonth, ColType::Integer}};
                int n_rows = uniform_int(spec.property_rows_lo, spec.property_rows_hi);
                std::vector<std::string> names = pools.dev_names;
                std::shuffle(names.begin(), names.end(), rng);
                n_rows = std::min<int>(n_rows, static_cast<int>(names.size()));
                for (int r = 0; r < n_rows; ++r) {
                    t.rows.push_back({CellValue(names[r]), CellValue(district),
                                      CellValue(uniform_money(8000, 90000)),
                                      CellValue(static_cast<int64_t>(uniform_int(1, 400))),
                                      CellValue(pick(pools.developers)), CellValue(int64_t(year)),
                                      CellValue(int64_t(month))});
                }
                cat.add(std::move(t));
            }
        }
    }

    // company finance tables: one per year
    for (int year : spec.years) {
        Table t;
        t.caption = finance_caption(year);
        t.domain = Domain::CompanyFinance;
        t.key_column = col::kCompanyName;
        t.columns = {{col::kCompanyName, ColType::Text}, {col::kTotalRevenue, ColType::Decimal},
                     {col::kProfit, ColType::Decimal},   {col::kTotalCost, ColType::Decimal},
                     {col::kTotalAssets, ColType::Decimal}, {col::kTotalDebt, ColType::Decimal},
                     {col::kNature, ColType::Text},      {col::kCreditBond, ColType::Text},
                     {col::kRiskLevel, ColType::Text},   {col::kYear, ColType::Integer}};
        std::vector<std::string> names = pools.company_names;
        std::shuffle(names.begin(), names.end(), rng);
        int n = std::min<int>(spec.finance_rows, static_cast<int>(names.size()));
        for (int r = 0; r < n; ++r) {
            double revenue = uniform_money(50, 5000);
            t.rows.push_back({CellValue(names[r]), CellValue(revenue),
                              CellValue(uniform_money(-200, 800)), CellValue(uniform_money(40, 4500)),
                              CellValue(uniform_money(100, 20000)),
                              CellValue(uniform_money(50, 15000)), CellValue(pick(pools.natures)),
                              CellValue(pick(pools.credit_bond)), CellValue(pick(pools.risk_levels)),
                              CellValue(int64_t(year))});
        }
        cat.add(std::move(t));
    }

    // land auction tables: one per (city,district)
    for (int cd = 0; cd < n_cd; ++cd) {
        const auto& [city, district] = pools.city_districts[cd];
        Table t;
        t.caption = land_caption(city, district);
        t.domain = Domain::LandAuction;
        t.key_column = col::kParcelName;
        t.columns = {{col::kParcelName, ColType::Text}, {col::kDevName, ColType::Text},
                     {col::kGroup, ColType::Text},      {col::kTotalPrice, ColType::Decimal},
                     {col::kPlotRatio, ColType::Decimal}, {col::kBuildDensity, ColType::Decimal},
                     {col::kGreenRatio, ColType::Decimal}, {col::kDealYear, ColType::Integer},
                     {col::kDealMonth, ColType::Integer}};
        std::vector<std::string> names = pools.dev_names;
        std::shuffle(names.begin(), names.end(), rng);
        for (int r = 0; r < spec.land_rows; ++r) {
            std::string parcel = district + "储备地块" + std::to_string(2000 + r) + "号";
            t.rows.push_back({CellValue(parcel), CellValue(names[r]), CellValue(pick(pools.groups)),
                              CellValue(uniform_money(5000, 120000)),
                              CellValue(uniform_money(1.0, 6.0)), CellValue(uniform_money(15, 45)),
                              CellValue(uniform_money(20, 55)),
                              CellValue(int64_t(pick(spec.years))),
                              CellValue(int64_t(uniform_int(1, 12)))});
        }
        cat.add(std::move(t));
    }
    return cat;
}

// Writes a catalog to <dir>/manifest.jsonl plus one CSV per table.
inline void write_catalog_files(const Catalog& cat, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream manifest(fs::path(dir) / "manifest.jsonl");
    if (!manifest) throw RecordError("cannot write manifest in " + dir);
    int n = 0;
    for (const auto& [caption, t] : cat.tables) {
        std::string csv_name = "table_" + std::to_string(n++) + ".csv";
        std::ofstream csv(fs::path(dir) / csv_name, std::ios::binary);
        for (size_t c = 0; c < t.columns.size(); ++c)
            csv << (c ? "," : "") << csv_escape(t.columns[c].name);
        csv << "\n";
        for (const auto& row : t.rows) {
            for (size_t c = 0; c < row.size(); ++c)
                csv << (c ? "," : "") << csv_escape(to_canonical_string(row[c]));
            csv << "\n";
        }
        nlohmann::ordered_json j{{"caption", caption},
                                 {"domain", domain_name(t.domain)},
                                 {"key_column", t.key_column},
                                 {"csv_path", csv_name}};
        manifest << j.dump() << "\n";
    }
}

// ---- lexicons from the catalog ----

inline slu::Lexicons build_lexicons(const Catalog& cat) {
    slu::Lexicons lex;
    for (const auto& [caption, t] : cat.tables) {
        if (auto parts = parse_caption(caption, t.domain)) {
            lex.add(slu::SlotType::City, parts->city);
            lex.add(slu::SlotType::District, parts->district);
        }
        auto add_col = [&](const std::string& name, slu::SlotType type) {
            int idx = t.column_index(name);
            if (idx < 0) return;
            for (const auto& row : t.rows)
                if (row[idx].is_text()) lex.add(type, row[idx].text());
        };
        add_col(col::kDevName, slu::SlotType::DevelopmentName);
        add_col(col::kCompanyName, slu::SlotType::CompanyName);
    }
    return lex;
}

// ---- intent keyphrase rules (fixed phrases of the template library) ----

inline std::vector<slu::IntentRule> default_intent_rules() {
    using I = slu::IntentLabel;
    return {
        {{"成交套数"}, I::RealEstateProjectSalesVolumeQuery},
        {{"成交了多少套"}, I::RealEstateProjectSalesVolumeQuery},
        {{"开发商"}, I::RealEstateProjectDeveloperInformationQuery},
        {{"平均成交价格"}, I::RealEstateProjectAveragePriceQuery},
        {{"绿化率"}, I::RealEstateProjectGreenCoverageRatioQuery},
        {{"建筑密度"}, I::RealEstateProjectBuildingDensityQuery},
        {{"容积率"}, I::RealEstateProjectPlotRatioQuery},
        {{"成交总价"}, I::LandTotalPriceQuery},
        {{"集团"}, I::LandOwnershipQuery},
        {{"成交日期"}, I::LandTransactionDateQuery},
        {{"营业总成本"}, I::CompanyCostQuery},
        {{"性质"}, I::CompanyNatureQuery},
        {{"风险等级"}, I::CompanyRiskAssessmentQuery},
        {{"负债总计"}, I::CompanyDebtQuery},
        {{"营业总收入"}, I::CompanyTotalRevenueQuery},
        {{"营业利润"}, I::CompanyProfitQuery},
        {{"信用债"}, I::CompanyDebtDefaultQuery},
    };
}

// ---- intent -> columns the templates of that intent touch ----

using IntentColumnMap = std::map<slu::IntentLabel, std::vector<std::string>>;

inline IntentColumnMap default_intent_columns() {
    using I = slu::IntentLabel;
    return {
        {I::RealEstateProjectSalesVolumeQuery, {col::kSalesCount, col::kDevName}},
        {I::RealEstateProjectDeveloperInformationQuery, {col::kDeveloper, col::kDevName}},
        {I::RealEstateProjectAveragePriceQuery, {col::kAvgPrice, col::kDevName}},
        {I::RealEstateProjectGreenCoverageRatioQuery, {col::kGreenRatio, col::kDevName}},
        {I::RealEstateProjectBuildingDensityQuery, {col::kBuildDensity, col::kDevName}},
        {I::RealEstateProjectPlotRatioQuery, {col::kPlotRatio, col::kDevName}},
        {I::LandTotalPriceQuery, {col::kTotalPrice, col::kDevName}},
        {I::LandOwnershipQuery, {col::kGroup, col::kDevName}},
        {I::LandTransactionDateQuery, {col::kDealYear, col::kDealMonth, col::kDevName}},
        {I::CompanyCostQuery, {col::kTotalCost, col::kCompanyName}},
        {I::CompanyNatureQuery, {col::kNature, col::kCompanyName}},
        {I::CompanyRiskAssessmentQuery, {col::kRiskLevel, col::kCompanyName}},
        {I::CompanyDebtQuery, {col::kTotalDebt, col::kCompanyName}},
        {I::CompanyTotalRevenueQuery, {col::kTotalRevenue, col::kCompanyName}},
        {I::CompanyProfitQuery, {col::kProfit, col::kCompanyName}},
        {I::CompanyDebtDefaultQuery, {col::kCreditBond, col::kCompanyName}},
    };
}

// ---- slot type -> columns whose cells can hold that kind of value ----
//
// Used by the deterministic table filter: a slot value may only constrain a
// column that stores values of its own type, so e.g. a month "11" never
// filters a sales-count column that happens to contain an 11.

using SlotColumnMap = std::map<slu::SlotType, std::vector<std::string>>;

inline SlotColumnMap default_slot_columns() {
    using S = slu::SlotType;
    return {
        {S::City, {}},  // city appears only in captions, never in a column
        {S::District, {col::kDistrict}},
        {S::DevelopmentName, {col::kDevName}},
        {S::CompanyName, {col::kCompanyName, col::kDeveloper, col::kGroup}},
        {S::Year, {col::kYear, col::kDealYear}},
        {S::Month, {col::kMonth, col::kDealMonth}},
    };
}

inline nlohmann::json intent_columns_to_json(const IntentColumnMap& m) {
    nlohmann::json j;
    for (const auto& [intent, cols] : m) j[slu::intent_name(intent)] = cols;
    return j;
}

inline IntentColumnMap intent_columns_from_json(const nlohmann::json& j) {
    IntentColumnMap m;
    for (auto it = j.begin(); it != j.end(); ++it)
        m[slu::intent_from_name(it.key())] = it.value().get<std::vector<std::string>>();
    return m;
}

}  // namespace tabqa::domain
