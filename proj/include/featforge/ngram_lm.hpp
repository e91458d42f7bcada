#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace featforge {

struct OrderDiscounts {
    double d1 = 0;
    double d2 = 0;
    double d3 = 0;       // applies to counts >= 3
    bool fallback = false;  // absolute-discount 0.75 used (sparse count-of-counts)

    bool operator==(const OrderDiscounts&) const = default;
};

// Interpolated modified Kneser-Ney model. Token ids: <s>=0, </s>=1, <unk>=2,
// remaining vocabulary sorted. N-gram keys are the ids packed as 4-byte
// little-endian words. Stored probabilities already include the interpolated
// lower-order mass; queries walk down one order per miss, multiplying the
// missed context's backoff weight.
struct KNLanguageModel {
    int order = 0;
    std::vector<std::string> vocab;  // id -> token
    std::unordered_map<std::string, std::uint32_t> vocab_ids;
    std::vector<std::unordered_map<std::string, double>> logprob;     // [k-1]: k-gram -> log10 p
    std::vector<std::unordered_map<std::string, double>> logbackoff;  // [len]: context -> log10 weight
    std::vector<OrderDiscounts> discounts;  // [k-1]

    // Boundary literals map to their reserved ids; anything else out of
    // vocabulary maps to <unk>.
    std::uint32_t token_id(std::string_view token) const;

    // Conditional log10 probability of `target` given up to order-1 trailing
    // context ids. Predicting <s> has probability zero.
    double cond_log10_ids(const std::vector<std::uint32_t>& context, std::uint32_t target) const;
    double cond_log10(const std::vector<std::string>& context, std::string_view token) const;
    double cond_prob(const std::vector<std::string>& context, std::string_view token) const;

    bool operator==(const KNLanguageModel&) const = default;
};

// Sentences are padded with order-1 <s> and one </s>; token types seen once
// in training are folded into <unk> (open vocabulary). Boundary literals
// occurring inside sentences also fold to <unk>.
KNLanguageModel train_kn(const std::vector<std::vector<std::string>>& corpus, int order);

// Sum of conditional log10 probabilities over positions 1..n+1 (the +1 is
// the </s> position).
double logprob10(const KNLanguageModel& model, const std::vector<std::string>& tokens);

// 10^(-logprob10 / (n+1)).
double perplexity(const KNLanguageModel& model, const std::vector<std::string>& tokens);

// Mean per-position surprisal in bits; perplexity == 2^surprisal_bits.
double surprisal_bits(const KNLanguageModel& model, const std::vector<std::string>& tokens);

// Versioned little-endian binary persistence (magic "KNLM").
void save_model(const KNLanguageModel& model, const std::string& path);
KNLanguageModel load_model(const std::string& path);

}  // namespace featforge
