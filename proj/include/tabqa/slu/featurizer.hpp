#pragma once

// Hashed character n-gram features. Each query character gets the n-grams
// (n = 1..3) that fit inside a +/-2 codepoint window around it, signed-hashed
// into 2^18 buckets and L2-normalized. The pooled vector is the mean of the
// per-character vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tabqa/errors.hpp"
#include "tabqa/unicode.hpp"

namespace tabqa::slu {

inline constexpr int kFeatureDimLog2 = 18;
inline constexpr size_t kFeatureDim = size_t(1) << kFeatureDimLog2;

// Sparse vector: sorted unique (index, value) pairs.
struct SparseVec {
    std::vector<std::pair<uint32_t, float>> entries;

    float dot_dense(const float* w) const {
        float s = 0;
        for (const auto& [i, v] : entries) s += w[i] * v;
        return s;
    }
};

namespace feat_detail {

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline void accumulate(std::vector<std::pair<uint32_t, float>>& raw, std::string_view gram) {
    uint64_t h = fnv1a(gram);
    uint32_t idx = static_cast<uint32_t>(h & (kFeatureDim - 1));
    float sign = (h >> 63) ? -1.0f : 1.0f;
    raw.emplace_back(idx, sign);
}

inline SparseVec finalize(std::vector<std::pair<uint32_t, float>> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVec out;
    for (const auto& e : raw) {
        if (!out.entries.empty() && out.entries.back().first == e.first)
            out.entries.back().second += e.second;
        else
            out.entries.push_back(e);
    }
    double norm = 0;
    for (const auto& [i, v] : out.entries) norm += double(v) * v;
    if (norm > 0) {
        float inv = static_cast<float>(1.0 / std::sqrt(norm));
        for (auto& [i, v] : out.entries) v *= inv;
    }
    return out;
}

}  // namespace feat_detail

struct Features {
    SparseVec pooled;
    std::vector<SparseVec> per_char;
};

// N-grams contributing to position j: all n-grams of length 1..3 fully inside
// [j-2, j+2] that cover position j, keyed by their offset relative to j.
inline SparseVec featurize_char(const std::vector<std::string>& cps, size_t j) {
    std::vector<std::pair<uint32_t, float>> raw;
    const int n_cps = static_cast<int>(cps.size());
    const int pos = static_cast<int>(j);
    for (int n = 1; n <= 3; ++n) {
        for (int start = pos - n + 1; start <= pos; ++start) {
            if (start < pos - 2 || start + n - 1 > pos + 2) continue;
            if (start < 0 || start + n > n_cps) continue;
            std::string gram = std::to_string(start - pos) + "|";
            for (int k = start; k < start + n; ++k) gram += cps[k];
            feat_detail::accumulate(raw, gram);
        }
    }
    return feat_detail::finalize(std::move(raw));
}

inline Features featurize(const std::string& query) {
    auto cps = uni::codepoints(query);
    if (cps.empty()) throw EmptyInput("featurize: empty query");
    Features f;
    f.per_char.reserve(cps.size());
    std::vector<std::pair<uint32_t, float>> pooled_raw;
    for (size_t j = 0; j < cps.size(); ++j) {
        SparseVec v = featurize_char(cps, j);
        for (const auto& [i, val] : v.entries)
            pooled_raw.emplace_back(i, val / static_cast<float>(cps.size()));
        f.per_char.push_back(std::move(v));
    }
    // mean of the per-character vectors (already divided by count above)
    std::sort(pooled_raw.begin(), pooled_raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& e : pooled_raw) {
        if (!f.pooled.entries.empty() && f.pooled.entries.back().first == e.first)
            f.pooled.entries.back().second += e.second;
        else
            f.pooled.entries.push_back(e);
    }
    return f;
}

}  // namespace tabqa::slu
