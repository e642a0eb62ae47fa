#pragma once

// Minimal UTF-8 utilities: codepoint segmentation, classification, and the
// string canonicalization used across the tagger and metrics. Input text is
// expected to already be NFC (true for the CJK + ASCII corpus handled here).

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tabqa::uni {

// Byte length of the UTF-8 sequence starting with `lead`.
inline int seq_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;  // invalid byte, consume one
}

// Splits text into codepoint-sized chunks (each chunk is one UTF-8 sequence).
inline std::vector<std::string> codepoints(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        int n = seq_len(static_cast<unsigned char>(text[i]));
        if (i + n > text.size()) n = 1;
        out.emplace_back(text.substr(i, n));
        i += n;
    }
    return out;
}

inline size_t codepoint_count(std::string_view text) {
    size_t count = 0, i = 0;
    while (i < text.size()) {
        i += static_cast<size_t>(seq_len(static_cast<unsigned char>(text[i])));
        ++count;
    }
    return count;
}

inline uint32_t decode_one(std::string_view s) {
    if (s.empty()) return 0;
    auto b0 = static_cast<unsigned char>(s[0]);
    int n = seq_len(b0);
    if (n == 1) return b0;
    uint32_t cp = b0 & (0xFF >> (n + 1));
    for (int k = 1; k < n && k < static_cast<int>(s.size()); ++k)
        cp = (cp << 6) | (static_cast<unsigned char>(s[k]) & 0x3F);
    return cp;
}

inline bool is_cjk(uint32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
           (cp >= 0xF900 && cp <= 0xFAFF);
}

inline bool is_ascii_alnum(uint32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

inline bool is_ascii_digit(uint32_t cp) { return cp >= '0' && cp <= '9'; }

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    auto is_ws = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (b < e && is_ws(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_ws(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Trim plus internal whitespace-run collapse to a single space.
inline std::string collapse_ws(std::string_view s) {
    std::string t = trim(s);
    std::string out;
    out.reserve(t.size());
    bool in_ws = false;
    for (char c : t) {
        bool ws = (c == ' ' || c == '\t' || c == '\r' || c == '\n');
        if (ws) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

inline std::string to_upper_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return c >= 'a' && c <= 'z' ? c - 32 : c; });
    return out;
}

// Levenshtein distance over bytes; labels compared with it are ASCII.
inline size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace tabqa::uni
