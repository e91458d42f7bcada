#include "featforge/text.hpp"

#include <algorithm>
#include <array>

namespace featforge::text {

namespace {

struct Range {
    char32_t lo;
    char32_t hi;
};

// Sorted, non-overlapping.
constexpr std::array<Range, 31> kPunctSymbolRanges{{
    {0x21, 0x2F},      // ! " # $ % & ' ( ) * + , - . /
    {0x3A, 0x40},      // : ; < = > ? @
    {0x5B, 0x60},      // [ \ ] ^ _ `
    {0x7B, 0x7E},      // { | } ~
    {0xA1, 0xA9},      // inverted !, currency, section, diaeresis, (c)
    {0xAB, 0xAC},      // left guillemet, not sign
    {0xAE, 0xB1},      // (r), macron, degree, plus-minus
    {0xB4, 0xB4},      // acute accent
    {0xB6, 0xB8},      // pilcrow, middle dot, cedilla
    {0xBB, 0xBB},      // right guillemet
    {0xBF, 0xBF},      // inverted ?
    {0xD7, 0xD7},      // multiplication sign
    {0xF7, 0xF7},      // division sign
    {0x2010, 0x2027},  // dashes, quotes, daggers, bullet, ellipsis
    {0x2030, 0x205E},  // permille, primes, guillemets, punctuation marks
    {0x20A0, 0x20BF},  // currency symbols
    {0x2190, 0x2BFF},  // arrows, math operators, technical, shapes, dingbats
    {0x2E00, 0x2E7F},  // supplemental punctuation
    {0x3001, 0x3003},  // ideographic comma/full stop, ditto
    {0x3008, 0x3011},  // CJK brackets
    {0x3014, 0x301F},  // CJK brackets/quotes
    {0x3030, 0x3030},  // wavy dash
    {0x303D, 0x303F},  // part alternation mark etc.
    {0xFE50, 0xFE6F},  // small form variants
    {0xFF01, 0xFF0F},  // fullwidth ASCII punctuation
    {0xFF1A, 0xFF20},
    {0xFF3B, 0xFF40},
    {0xFF5B, 0xFF65},  // fullwidth brackets, halfwidth forms
    {0xFFE0, 0xFFE6},  // fullwidth currency/signs
    {0xFFFD, 0xFFFD},  // replacement character
    {0x1F300, 0x1FAFF},
}};

constexpr std::array<Range, 11> kSpaceRanges{{
    {0x09, 0x0D},
    {0x20, 0x20},
    {0x85, 0x85},
    {0xA0, 0xA0},
    {0x1680, 0x1680},
    {0x2000, 0x200A},
    {0x2028, 0x2029},
    {0x202F, 0x202F},
    {0x205F, 0x205F},
    {0x3000, 0x3000},
    {0xFEFF, 0xFEFF},
}};

template <std::size_t N>
bool in_ranges(const std::array<Range, N>& ranges, char32_t cp) {
    auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                               [](char32_t v, const Range& r) { return v < r.lo; });
    if (it == ranges.begin()) return false;
    --it;
    return cp <= it->hi;
}

}  // namespace

char32_t decode_utf8(std::string_view s, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + len > s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (int i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings and surrogates.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
        ++pos;
        return 0xFFFD;
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space(char32_t cp) { return in_ranges(kSpaceRanges, cp); }

bool is_punct_or_symbol(char32_t cp) { return in_ranges(kPunctSymbolRanges, cp); }

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x130) return 0x69;  // dotted capital I
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 0x20;  // Greek
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;                 // Cyrillic
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    return cp;
}

std::string lowercase(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) append_utf8(out, to_lower(decode_utf8(s, pos)));
    return out;
}

std::size_t codepoint_count(std::string_view s) {
    std::size_t pos = 0, n = 0;
    while (pos < s.size()) {
        decode_utf8(s, pos);
        ++n;
    }
    return n;
}

std::vector<std::string> tokenize(std::string_view sentence, bool lowercase) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < sentence.size()) {
        char32_t cp = decode_utf8(sentence, pos);
        if (is_space(cp)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (lowercase) cp = to_lower(cp);
        if (is_punct_or_symbol(cp)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
            std::string punct;
            append_utf8(punct, cp);
            tokens.push_back(std::move(punct));
            continue;
        }
        append_utf8(current, cp);
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool is_punct_token(std::string_view token) {
    if (token.empty()) return false;
    std::size_t pos = 0;
    while (pos < token.size()) {
        if (!is_punct_or_symbol(decode_utf8(token, pos))) return false;
    }
    return true;
}

}  // namespace featforge::text
