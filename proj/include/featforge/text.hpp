#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace featforge::text {

// Decodes one UTF-8 sequence starting at `pos`; advances `pos` past it.
// Malformed bytes decode to U+FFFD one byte at a time.
char32_t decode_utf8(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

// Unicode White_Space property.
bool is_space(char32_t cp);

// Approximation of Unicode general categories P and S over the BMP blocks
// that occur in ordinary text (ASCII, Latin-1, general punctuation, currency,
// arrows/math/symbol blocks, CJK and fullwidth punctuation).
bool is_punct_or_symbol(char32_t cp);

// Simple lowercase mapping for Latin, Latin-1, Latin Extended-A, Greek and
// Cyrillic; other codepoints are returned unchanged.
char32_t to_lower(char32_t cp);

std::string lowercase(std::string_view s);

std::size_t codepoint_count(std::string_view s);

// Splits on whitespace; every punctuation/symbol codepoint becomes its own
// single-character token. Deterministic; empty input yields no tokens.
std::vector<std::string> tokenize(std::string_view sentence, bool lowercase);

// True if every codepoint of the token is punctuation/symbol (and the token
// is non-empty).
bool is_punct_token(std::string_view token);

}  // namespace featforge::text
