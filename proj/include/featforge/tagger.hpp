#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace featforge {

struct TaggedSentence {
    std::vector<std::string> tokens;
    std::vector<std::string> tags;
};

// Averaged perceptron with greedy left-to-right decoding. Weights are
// per-feature vectors indexed by tag position in `tagset` (sorted).
struct TaggerModel {
    std::vector<std::string> tagset;
    std::unordered_map<std::string, std::vector<double>> weights;

    bool operator==(const TaggerModel&) const = default;
};

// One sentence per line, tokens as "token_TAG" separated by spaces. The tag
// starts after the last underscore, so tokens may contain underscores.
// Throws DataError with a line number on malformed tokens.
std::vector<TaggedSentence> parse_tagged_corpus(std::string_view text);

// Throws DataError on an empty corpus.
TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus, int epochs,
                         std::uint64_t seed);

std::vector<std::string> tag(const std::vector<std::string>& tokens, const TaggerModel& model);

}  // namespace featforge
