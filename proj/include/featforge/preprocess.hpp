#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "featforge/config.hpp"
#include "featforge/ngram_lm.hpp"
#include "featforge/sparse.hpp"
#include "featforge/tagger.hpp"

namespace featforge {

struct TokenStream {
    std::vector<std::vector<std::string>> sentences;

    bool operator==(const TokenStream&) const = default;
};

struct TagStream {
    std::vector<std::vector<std::string>> sentences;  // parallel to a TokenStream

    bool operator==(const TagStream&) const = default;
};

// N-gram keys are the tokens' UTF-8 bytes joined by 0x1F (also the exact
// byte string the hashing extractor feeds to FNV-1a).
struct NgramCountTable {
    int order = 1;
    std::uint64_t cutoff = 1;
    std::map<std::string, std::uint64_t> counts;

    bool operator==(const NgramCountTable&) const = default;
};

struct EmbeddingTable {
    std::size_t dim = 0;
    std::map<std::string, std::vector<double>> vectors;

    bool operator==(const EmbeddingTable&) const = default;
};

std::string join_ngram(const std::vector<std::string>& tokens, std::size_t start, std::size_t n);

// Counts all within-sentence n-grams (no padding, no cross-sentence grams)
// and drops entries with count < cutoff.
NgramCountTable count_ngrams(const std::vector<std::vector<std::string>>& sentences, int n,
                             std::uint64_t cutoff);

// word2vec text format: optional "<count> <dim>" header, then one
// "<token> v1 ... vdim" per line. First occurrence of a token wins.
EmbeddingTable parse_embeddings(std::string_view text);
EmbeddingTable load_embeddings(const std::string& path);

// Reads the four [input] files: one sentence per line, one label token per
// line. Label names are the sorted distinct labels of train plus test.
Dataset load_dataset(const RunConfig& cfg);

enum class Split { Train, Test };

struct PreprocessRequest {
    enum class Kind {
        TokenizeTrain,
        TokenizeTest,
        TagTrain,
        TagTest,
        NgramCounts,    // n, cutoff, level
        BuildLm,        // n (order), level
        LoadEmbeddings,
    };

    Kind kind;
    int n = 0;
    std::uint64_t cutoff = 0;
    std::string level;  // "word" or "pos"

    // Canonical dedup key, e.g. "ngram-counts(2,5,word)".
    std::string identity() const;

    static PreprocessRequest tokenize(Split s);
    static PreprocessRequest tag(Split s);
    static PreprocessRequest ngram_counts(int n, std::uint64_t cutoff, std::string level);
    static PreprocessRequest build_lm(int order, std::string level);
    static PreprocessRequest load_embeddings();
};

// Write-once store of fulfilled resources. Lookups for anything that was not
// requested in phase 1 throw ExtractionError.
class ResourceCache {
public:
    const TokenStream& tokens(Split s) const;
    const TagStream& tags(Split s) const;
    const NgramCountTable& ngram_counts(int n, std::uint64_t cutoff,
                                        const std::string& level) const;
    const KNLanguageModel& lm(int order, const std::string& level) const;
    const EmbeddingTable& embeddings() const;

    std::vector<std::string> keys() const;          // sorted identities
    const std::vector<std::string>& build_log() const { return build_log_; }

private:
    friend ResourceCache fulfill(const std::vector<PreprocessRequest>& requests,
                                 const RunConfig& cfg, const Dataset& data);

    std::optional<TokenStream> train_tokens_;
    std::optional<TokenStream> test_tokens_;
    std::optional<TagStream> train_tags_;
    std::optional<TagStream> test_tags_;
    std::map<std::string, NgramCountTable> tables_;
    std::map<std::string, KNLanguageModel> lms_;
    std::optional<EmbeddingTable> embeddings_;
    std::vector<std::string> build_log_;
};

// Deduplicates requests by identity, adds implied dependencies (tagging needs
// tokens and a tagged corpus; POS-level counts need tags), and builds each
// resource exactly once. Missing configured inputs raise ExtractionError
// naming the request and the input.
ResourceCache fulfill(const std::vector<PreprocessRequest>& requests, const RunConfig& cfg,
                      const Dataset& data);

}  // namespace featforge
