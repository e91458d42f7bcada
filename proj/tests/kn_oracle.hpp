#pragma once

// Direct-formula interpolated modified Kneser-Ney reference, kept deliberately
// naive and separate from the production model: string-vector n-gram maps and
// recursive interpolation instead of packed ids and precomputed backoff
// tables. Tests compare production probabilities against this.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kn_oracle {

struct Discounts {
    double d1 = 0.75, d2 = 0.75, d3 = 0.75;
};

struct Oracle {
    int order = 0;
    std::vector<std::string> unigram_universe;  // vocab without <s>
    std::vector<std::map<std::vector<std::string>, std::uint64_t>> adj;  // [k-1]
    std::vector<Discounts> discounts;                                    // [k-1]
};

inline bool is_boundary(const std::string& t) {
    return t == "<s>" || t == "</s>" || t == "<unk>";
}

inline Oracle build_oracle(const std::vector<std::vector<std::string>>& corpus, int order) {
    Oracle o;
    o.order = order;

    std::map<std::string, std::uint64_t> freq;
    for (const auto& sent : corpus)
        for (const auto& tok : sent) ++freq[is_boundary(tok) ? "<unk>" : tok];

    std::vector<std::vector<std::string>> folded;
    for (const auto& sent : corpus) {
        std::vector<std::string> f;
        for (const auto& tok : sent) {
            if (is_boundary(tok) || freq[tok] < 2)
                f.push_back("<unk>");
            else
                f.push_back(tok);
        }
        folded.push_back(std::move(f));
    }

    o.unigram_universe = {"</s>", "<unk>"};
    for (const auto& [tok, count] : freq)
        if (tok != "<unk>" && count >= 2) o.unigram_universe.push_back(tok);

    o.adj.resize(order);
    std::vector<std::map<std::vector<std::string>, std::uint64_t>> bos_suffix(order);
    for (const auto& sent : folded) {
        std::vector<std::string> padded(order - 1, "<s>");
        padded.insert(padded.end(), sent.begin(), sent.end());
        padded.push_back("</s>");
        for (std::size_t end = static_cast<std::size_t>(order) - 1; end < padded.size(); ++end) {
            const std::vector<std::string> window(padded.begin() + (end - order + 1),
                                                  padded.begin() + end + 1);
            ++o.adj[order - 1][window];
            for (int len = 1; len < order; ++len) {
                const std::vector<std::string> suffix(window.end() - len, window.end());
                if (suffix.front() == "<s>") ++bos_suffix[len - 1][suffix];
            }
        }
    }
    for (int k = order - 1; k >= 1; --k) {
        for (const auto& [gram, count] : o.adj[k]) {
            const std::vector<std::string> suffix(gram.begin() + 1, gram.end());
            if (suffix.front() != "<s>") ++o.adj[k - 1][suffix];
        }
        for (const auto& [gram, count] : bos_suffix[k - 1]) o.adj[k - 1][gram] = count;
    }

    for (int k = 1; k <= order; ++k) {
        std::uint64_t n[5] = {0, 0, 0, 0, 0};
        for (const auto& [gram, count] : o.adj[k - 1])
            if (count >= 1 && count <= 4) ++n[count];
        Discounts d;
        if (n[1] > 0 && n[2] > 0 && n[3] > 0 && n[4] > 0) {
            const double y = static_cast<double>(n[1]) / (n[1] + 2.0 * n[2]);
            d.d1 = std::clamp(1.0 - 2.0 * y * n[2] / n[1], 0.0, 1.0);
            d.d2 = std::clamp(2.0 - 3.0 * y * n[3] / n[2], 0.0, 2.0);
            d.d3 = std::clamp(3.0 - 4.0 * y * n[4] / n[3], 0.0, 3.0);
        }
        o.discounts.push_back(d);
    }
    return o;
}

inline double discount_of(const Discounts& d, std::uint64_t count) {
    if (count == 0) return 0.0;
    if (count == 1) return d.d1;
    if (count == 2) return d.d2;
    return d.d3;
}

// p(target | context) with context length <= order-1, recursing one order
// down per step. Unknown target tokens must already be folded by the caller.
inline double oracle_prob(const Oracle& o, std::vector<std::string> context,
                          const std::string& target) {
    if (target == "<s>") return 0.0;
    const int k = static_cast<int>(context.size()) + 1;
    const auto& grams = o.adj[k - 1];
    const auto& d = o.discounts[k - 1];

    std::uint64_t total = 0, n1 = 0, n2 = 0, n3p = 0, c = 0;
    for (const auto& [gram, count] : grams) {
        if (gram.size() != context.size() + 1) continue;
        if (!std::equal(context.begin(), context.end(), gram.begin())) continue;
        total += count;
        if (count == 1) ++n1;
        if (count == 2) ++n2;
        if (count >= 3) ++n3p;
        if (gram.back() == target) c = count;
    }

    const double uniform = 1.0 / static_cast<double>(o.unigram_universe.size());
    const auto lower = [&]() -> double {
        if (k == 1) return uniform;
        return oracle_prob(o, std::vector<std::string>(context.begin() + 1, context.end()),
                           target);
    };
    if (total == 0) return lower();

    const double gamma =
        (d.d1 * n1 + d.d2 * n2 + d.d3 * n3p) / static_cast<double>(total);
    const double held = std::max(static_cast<double>(c) - discount_of(d, c), 0.0) /
                        static_cast<double>(total);
    return held + gamma * lower();
}

}  // namespace kn_oracle
