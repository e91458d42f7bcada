#include "featforge/tagger.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "featforge/common.hpp"
#include "featforge/text.hpp"

namespace featforge {

namespace {

constexpr const char* kBoundaryPrev = "<S>";
constexpr const char* kBoundaryNext = "</S>";

std::string utf8_suffix(const std::string& s, std::size_t n_codepoints) {
    std::vector<std::size_t> starts;
    std::size_t pos = 0;
    while (pos < s.size()) {
        starts.push_back(pos);
        text::decode_utf8(s, pos);
    }
    if (starts.size() <= n_codepoints) return s;
    return s.substr(starts[starts.size() - n_codepoints]);
}

std::vector<std::string> features_at(const std::vector<std::string>& tokens, std::size_t i,
                                     const std::string& prev_tag) {
    const std::string& w = tokens[i];
    const std::string lw = text::lowercase(w);
    std::vector<std::string> feats;
    feats.reserve(10);
    feats.push_back("w=" + w);
    feats.push_back("lw=" + lw);
    feats.push_back("s1=" + utf8_suffix(lw, 1));
    feats.push_back("s2=" + utf8_suffix(lw, 2));
    feats.push_back("s3=" + utf8_suffix(lw, 3));
    feats.push_back("pt=" + prev_tag);
    feats.push_back("pw=" + (i > 0 ? tokens[i - 1] : kBoundaryPrev));
    feats.push_back("nw=" + (i + 1 < tokens.size() ? tokens[i + 1] : kBoundaryNext));

    bool all_digit = !w.empty();
    bool has_hyphen = false;
    std::size_t pos = 0;
    bool first = true;
    bool capitalized = false;
    while (pos < w.size()) {
        const char32_t cp = text::decode_utf8(w, pos);
        if (cp < '0' || cp > '9') all_digit = false;
        if (cp == '-') has_hyphen = true;
        if (first && text::to_lower(cp) != cp) capitalized = true;
        first = false;
    }
    if (all_digit) feats.push_back("sh=digit");
    if (has_hyphen) feats.push_back("sh=hyphen");
    if (capitalized) feats.push_back("sh=cap");
    return feats;
}

std::size_t best_tag(const std::unordered_map<std::string, std::vector<double>>& weights,
                     const std::vector<std::string>& feats, std::size_t n_tags) {
    std::vector<double> scores(n_tags, 0.0);
    for (const auto& f : feats) {
        const auto it = weights.find(f);
        if (it == weights.end()) continue;
        for (std::size_t t = 0; t < n_tags; ++t) scores[t] += it->second[t];
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < n_tags; ++t)
        if (scores[t] > scores[best]) best = t;
    return best;
}

}  // namespace

std::vector<TaggedSentence> parse_tagged_corpus(std::string_view text) {
    std::vector<TaggedSentence> corpus;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        TaggedSentence sent;
        std::size_t tok_start = 0;
        while (tok_start < line.size()) {
            while (tok_start < line.size() && line[tok_start] == ' ') ++tok_start;
            if (tok_start >= line.size()) break;
            auto tok_end = line.find(' ', tok_start);
            if (tok_end == std::string_view::npos) tok_end = line.size();
            const std::string_view pair = line.substr(tok_start, tok_end - tok_start);
            tok_start = tok_end;
            const auto us = pair.rfind('_');
            if (us == std::string_view::npos || us == 0 || us == pair.size() - 1)
                throw DataError("tagged corpus line " + std::to_string(line_no) +
                                ": expected token_TAG, got '" + std::string(pair) + "'");
            sent.tokens.emplace_back(pair.substr(0, us));
            sent.tags.emplace_back(pair.substr(us + 1));
        }
        if (!sent.tokens.empty()) corpus.push_back(std::move(sent));
    }
    return corpus;
}

TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus, int epochs,
                         std::uint64_t seed) {
    if (corpus.empty()) throw DataError("tagger training corpus is empty");

    std::set<std::string> tags;
    for (const auto& s : corpus)
        for (const auto& t : s.tags) tags.insert(t);
    TaggerModel model;
    model.tagset.assign(tags.begin(), tags.end());
    const std::size_t n_tags = model.tagset.size();
    std::unordered_map<std::string, std::size_t> tag_id;
    for (std::size_t i = 0; i < n_tags; ++i) tag_id[model.tagset[i]] = i;

    std::unordered_map<std::string, std::vector<double>> w;
    std::unordered_map<std::string, std::vector<double>> totals;
    std::unordered_map<std::string, std::vector<std::uint64_t>> stamps;
    std::uint64_t step = 0;

    const auto update = [&](const std::string& feat, std::size_t t, double delta) {
        auto& wv = w[feat];
        if (wv.empty()) wv.assign(n_tags, 0.0);
        auto& tv = totals[feat];
        if (tv.empty()) tv.assign(n_tags, 0.0);
        auto& sv = stamps[feat];
        if (sv.empty()) sv.assign(n_tags, 0);
        tv[t] += static_cast<double>(step - sv[t]) * wv[t];
        sv[t] = step;
        wv[t] += delta;
    };

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        fy_shuffle(order, rng);
        for (const std::size_t si : order) {
            const auto& sent = corpus[si];
            std::string prev_tag = kBoundaryPrev;
            for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
                ++step;
                const auto feats = features_at(sent.tokens, i, prev_tag);
                const std::size_t pred = best_tag(w, feats, n_tags);
                const std::size_t gold = tag_id.at(sent.tags[i]);
                if (pred != gold) {
                    for (const auto& f : feats) {
                        update(f, gold, 1.0);
                        update(f, pred, -1.0);
                    }
                }
                prev_tag = model.tagset[pred];
            }
        }
    }

    for (auto& [feat, wv] : w) {
        auto& tv = totals[feat];
        auto& sv = stamps[feat];
        std::vector<double> avg(n_tags);
        bool any = false;
        for (std::size_t t = 0; t < n_tags; ++t) {
            tv[t] += static_cast<double>(step - sv[t]) * wv[t];
            avg[t] = tv[t] / static_cast<double>(step);
            if (avg[t] != 0.0) any = true;
        }
        if (any) model.weights.emplace(feat, std::move(avg));
    }
    return model;
}

std::vector<std::string> tag(const std::vector<std::string>& tokens, const TaggerModel& model) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::string prev_tag = kBoundaryPrev;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto feats = features_at(tokens, i, prev_tag);
        const std::size_t t = best_tag(model.weights, feats, model.tagset.size());
        prev_tag = model.tagset[t];
        out.push_back(prev_tag);
    }
    return out;
}

}  // namespace featforge
