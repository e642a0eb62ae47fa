#pragma once

// Intent and slot label vocabularies, IOB tag handling, and the per-query
// annotation record.

#include <array>
#include <set>
#include <string>
#include <vector>

#include "tabqa/errors.hpp"
#include "tabqa/unicode.hpp"

namespace tabqa::slu {

// 16 query intents.
enum class IntentLabel {
    RealEstateProjectSalesVolumeQuery,
    RealEstateProjectDeveloperInformationQuery,
    RealEstateProjectAveragePriceQuery,
    RealEstateProjectGreenCoverageRatioQuery,
    RealEstateProjectBuildingDensityQuery,
    RealEstateProjectPlotRatioQuery,
    LandTotalPriceQuery,
    LandOwnershipQuery,
    LandTransactionDateQuery,
    CompanyCostQuery,
    CompanyNatureQuery,
    CompanyRiskAssessmentQuery,
    CompanyDebtQuery,
    CompanyTotalRevenueQuery,
    CompanyProfitQuery,
    CompanyDebtDefaultQuery,
};

inline constexpr int kNumIntents = 16;

inline const std::array<std::string, kNumIntents>& intent_names() {
    static const std::array<std::string, kNumIntents> names = {
        "real_estate_project_sales_volume_query",
        "real_estate_project_developer_information_query",
        "real_estate_project_average_price_query",
        "real_estate_project_green_coverage_ratio_query",
        "real_estate_project_building_density_query",
        "real_estate_project_plot_ratio_query",
        "land_total_price_query",
        "land_ownership_query",
        "land_transaction_date_query",
        "company_cost_query",
        "company_nature_query",
        "company_risk_assessment_query",
        "company_debt_query",
        "company_total_revenue_query",
        "company_profit_query",
        "company_debt_default_query",
    };
    return names;
}

inline const std::string& intent_name(IntentLabel i) {
    return intent_names()[static_cast<size_t>(i)];
}

inline IntentLabel intent_from_name(const std::string& s) {
    const auto& names = intent_names();
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == s) return static_cast<IntentLabel>(i);
    throw UnknownIntent("unknown intent label: " + s);
}

// Nearest vocabulary entry by edit distance (repair of free-form LLM labels).
inline IntentLabel intent_fuzzy(const std::string& s) {
    const auto& names = intent_names();
    size_t best = 0, best_d = SIZE_MAX;
    for (size_t i = 0; i < names.size(); ++i) {
        size_t d = uni::edit_distance(s, names[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return static_cast<IntentLabel>(best);
}

// 6 slot types.
enum class SlotType { City, District, DevelopmentName, CompanyName, Year, Month };

inline constexpr int kNumSlotTypes = 6;

inline const std::array<std::string, kNumSlotTypes>& slot_type_names() {
    static const std::array<std::string, kNumSlotTypes> names = {
        "city", "district", "development_name", "company_name", "year", "month"};
    return names;
}

inline const std::string& slot_type_name(SlotType s) {
    return slot_type_names()[static_cast<size_t>(s)];
}

// IOB tags: O + {B,I} x 6 slot types = 13 tags.
// Encoding: 0 = O; 1 + 2*type = B-type; 2 + 2*type = I-type.
struct SlotTag {
    int id = 0;

    static constexpr int kCount = 1 + 2 * kNumSlotTypes;  // 13

    static SlotTag O() { return {0}; }
    static SlotTag B(SlotType t) { return {1 + 2 * static_cast<int>(t)}; }
    static SlotTag I(SlotType t) { return {2 + 2 * static_cast<int>(t)}; }

    bool is_o() const { return id == 0; }
    bool is_b() const { return id > 0 && (id - 1) % 2 == 0; }
    bool is_i() const { return id > 0 && (id - 1) % 2 == 1; }
    SlotType type() const { return static_cast<SlotType>((id - 1) / 2); }

    bool operator==(const SlotTag&) const = default;

    std::string name() const {
        if (is_o()) return "O";
        return std::string(is_b() ? "B-" : "I-") + slot_type_name(type());
    }

    static SlotTag from_name(const std::string& s) {
        if (s == "O" || s == "o") return O();
        if (s.size() > 2 && (s[0] == 'B' || s[0] == 'I') && s[1] == '-') {
            std::string t = s.substr(2);
            const auto& names = slot_type_names();
            for (size_t i = 0; i < names.size(); ++i)
                if (names[i] == t)
                    return s[0] == 'B' ? B(static_cast<SlotType>(i)) : I(static_cast<SlotType>(i));
        }
        throw SluParseError("unknown slot tag: " + s);
    }

    // Fuzzy variant for repairing LLM output.
    static SlotTag from_name_fuzzy(const std::string& s) {
        size_t best_d = SIZE_MAX;
        SlotTag best = O();
        for (int id = 0; id < kCount; ++id) {
            SlotTag t{id};
            size_t d = uni::edit_distance(s, t.name());
            if (d < best_d) {
                best_d = d;
                best = t;
            }
        }
        return best;
    }
};

// True iff no I- tag follows O or an I/B of a different slot type.
inline bool iob_valid(const std::vector<SlotTag>& tags) {
    for (size_t i = 0; i < tags.size(); ++i) {
        if (!tags[i].is_i()) continue;
        if (i == 0) return false;
        const SlotTag& prev = tags[i - 1];
        if (prev.is_o() || prev.type() != tags[i].type()) return false;
    }
    return true;
}

// Orphan I- tags become B- tags.
inline std::vector<SlotTag> iob_repair(std::vector<SlotTag> tags) {
    for (size_t i = 0; i < tags.size(); ++i) {
        if (!tags[i].is_i()) continue;
        bool orphan = (i == 0) || tags[i - 1].is_o() || tags[i - 1].type() != tags[i].type();
        if (orphan) tags[i] = SlotTag::B(tags[i].type());
    }
    return tags;
}

struct Chunk {
    SlotType type;
    size_t start;  // codepoint index
    size_t end;    // exclusive
    auto operator<=>(const Chunk&) const = default;
};

inline std::vector<Chunk> extract_chunks(const std::vector<SlotTag>& tags) {
    std::vector<Chunk> out;
    for (size_t i = 0; i < tags.size(); ++i) {
        if (!tags[i].is_b()) continue;
        size_t j = i + 1;
        while (j < tags.size() && tags[j].is_i() && tags[j].type() == tags[i].type()) ++j;
        out.push_back({tags[i].type(), i, j});
    }
    return out;
}

struct SluAnnotation {
    std::set<IntentLabel> intents;  // 1 or 2
    int intent_count = 1;
    std::vector<SlotTag> tags;  // one per query codepoint

    bool consistent(size_t query_len) const {
        return intents.size() == static_cast<size_t>(intent_count) &&
               (intent_count == 1 || intent_count == 2) && tags.size() == query_len &&
               iob_valid(tags);
    }

    IntentLabel first_intent() const {
        if (intents.empty()) throw ModelError("annotation has no intents");
        return *intents.begin();
    }

    // Slot values recovered from the query text, in chunk order.
    std::vector<std::pair<SlotType, std::string>> slot_values(const std::string& query) const {
        auto cps = uni::codepoints(query);
        std::vector<std::pair<SlotType, std::string>> out;
        for (const auto& ch : extract_chunks(tags)) {
            std::string v;
            for (size_t i = ch.start; i < ch.end && i < cps.size(); ++i) v += cps[i];
            out.emplace_back(ch.type, v);
        }
        return out;
    }
};

// "intent_a+intent_b" serialization used in corpus files.
inline std::string intents_to_string(const std::set<IntentLabel>& intents) {
    std::string out;
    for (auto i : intents) {
        if (!out.empty()) out += "+";
        out += intent_name(i);
    }
    return out;
}

inline std::string tags_to_string(const std::vector<SlotTag>& tags) {
    std::string out;
    for (size_t i = 0; i < tags.size(); ++i) {
        if (i) out += " ";
        out += tags[i].name();
    }
    return out;
}

inline std::vector<SlotTag> tags_from_string(const std::string& s, bool fuzzy = false) {
    std::vector<SlotTag> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        out.push_back(fuzzy ? SlotTag::from_name_fuzzy(cur) : SlotTag::from_name(cur));
        cur.clear();
    };
    for (char c : s) {
        if (c == ' ' || c == '\t') flush();
        else cur.push_back(c);
    }
    flush();
    return out;
}

}  // namespace tabqa::slu
