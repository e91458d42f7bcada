#include "featforge/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "featforge/common.hpp"
#include "featforge/text.hpp"

namespace featforge {

std::string join_ngram(const std::vector<std::string>& tokens, std::size_t start, std::size_t n) {
    std::string key;
    std::size_t bytes = n ? n - 1 : 0;
    for (std::size_t i = 0; i < n; ++i) bytes += tokens[start + i].size();
    key.reserve(bytes);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) key.push_back('\x1f');
        key += tokens[start + i];
    }
    return key;
}

NgramCountTable count_ngrams(const std::vector<std::vector<std::string>>& sentences, int n,
                             std::uint64_t cutoff) {
    if (n < 1) throw ExtractionError("ngram counts: order must be >= 1");
    if (cutoff < 1) throw ExtractionError("ngram counts: cutoff must be >= 1");
    NgramCountTable table;
    table.order = n;
    table.cutoff = cutoff;
    const auto un = static_cast<std::size_t>(n);
    for (const auto& sent : sentences) {
        if (sent.size() < un) continue;
        for (std::size_t start = 0; start + un <= sent.size(); ++start)
            table.counts[join_ngram(sent, start, un)] += 1;
    }
    for (auto it = table.counts.begin(); it != table.counts.end();) {
        if (it->second < cutoff) it = table.counts.erase(it);
        else ++it;
    }
    return table;
}

namespace {

double parse_component(std::string_view field, std::size_t line_no) {
    double v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw DataError("embeddings line " + std::to_string(line_no) + ": non-numeric value '" +
                        std::string(field) + "'");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

}  // namespace

EmbeddingTable parse_embeddings(std::string_view text) {
    EmbeddingTable table;
    const auto lines = split_lines(text);
    bool first_data = true;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto fields = split_fields(lines[li]);
        if (fields.empty()) continue;
        if (first_data && fields.size() == 2) {
            // Optional "<count> <dim>" header.
            std::uint64_t a = 0, b = 0;
            const auto ra = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), a);
            const auto rb = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), b);
            if (ra.ec == std::errc{} && ra.ptr == fields[0].data() + fields[0].size() &&
                rb.ec == std::errc{} && rb.ptr == fields[1].data() + fields[1].size()) {
                first_data = false;
                continue;
            }
        }
        if (fields.size() < 2)
            throw DataError("embeddings line " + std::to_string(li + 1) + ": expected token and vector");
        const std::size_t dim = fields.size() - 1;
        if (table.dim == 0) table.dim = dim;
        else if (dim != table.dim)
            throw DataError("embeddings line " + std::to_string(li + 1) + ": dimension " +
                            std::to_string(dim) + " != " + std::to_string(table.dim));
        first_data = false;
        std::string token(fields[0]);
        if (table.vectors.count(token)) continue;  // first occurrence wins
        std::vector<double> vec(dim);
        for (std::size_t d = 0; d < dim; ++d) vec[d] = parse_component(fields[d + 1], li + 1);
        table.vectors.emplace(std::move(token), std::move(vec));
    }
    if (table.vectors.empty()) throw DataError("embeddings: no vectors found");
    return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
    return parse_embeddings(read_file(path));
}

namespace {

std::vector<std::string> load_label_lines(const std::string& path, const char* what) {
    const auto lines = split_lines(read_file(path));
    std::vector<std::string> labels;
    labels.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string label = lines[i];
        while (!label.empty() && (label.back() == ' ' || label.back() == '\t')) label.pop_back();
        std::size_t lead = 0;
        while (lead < label.size() && (label[lead] == ' ' || label[lead] == '\t')) ++lead;
        label.erase(0, lead);
        if (label.empty())
            throw DataError(std::string(what) + " line " + std::to_string(i + 1) + ": empty label");
        labels.push_back(std::move(label));
    }
    return labels;
}

}  // namespace

Dataset load_dataset(const RunConfig& cfg) {
    Dataset data;
    data.train_sentences = split_lines(read_file(cfg.input.train_text));
    data.test_sentences = split_lines(read_file(cfg.input.test_text));
    const auto train_labels = load_label_lines(cfg.input.train_labels, "train_labels");
    const auto test_labels = load_label_lines(cfg.input.test_labels, "test_labels");
    if (train_labels.size() != data.train_sentences.size())
        throw DataError("train split: " + std::to_string(data.train_sentences.size()) +
                        " sentences but " + std::to_string(train_labels.size()) + " labels");
    if (test_labels.size() != data.test_sentences.size())
        throw DataError("test split: " + std::to_string(data.test_sentences.size()) +
                        " sentences but " + std::to_string(test_labels.size()) + " labels");

    std::set<std::string> names(train_labels.begin(), train_labels.end());
    names.insert(test_labels.begin(), test_labels.end());
    data.label_names.assign(names.begin(), names.end());
    const auto id_of = [&](const std::string& name) {
        return static_cast<int>(std::lower_bound(data.label_names.begin(), data.label_names.end(),
                                                 name) -
                                data.label_names.begin());
    };
    data.train_labels.reserve(train_labels.size());
    for (const auto& l : train_labels) data.train_labels.push_back(id_of(l));
    data.test_labels.reserve(test_labels.size());
    for (const auto& l : test_labels) data.test_labels.push_back(id_of(l));
    data.validate();
    return data;
}

std::string PreprocessRequest::identity() const {
    switch (kind) {
        case Kind::TokenizeTrain: return "tokenize-train";
        case Kind::TokenizeTest: return "tokenize-test";
        case Kind::TagTrain: return "tag-train";
        case Kind::TagTest: return "tag-test";
        case Kind::NgramCounts:
            return "ngram-counts(" + std::to_string(n) + "," + std::to_string(cutoff) + "," +
                   level + ")";
        case Kind::BuildLm: return "build-lm(" + std::to_string(n) + "," + level + ")";
        case Kind::LoadEmbeddings: return "load-embeddings";
    }
    return "?";
}

PreprocessRequest PreprocessRequest::tokenize(Split s) {
    return {s == Split::Train ? Kind::TokenizeTrain : Kind::TokenizeTest, 0, 0, ""};
}
PreprocessRequest PreprocessRequest::tag(Split s) {
    return {s == Split::Train ? Kind::TagTrain : Kind::TagTest, 0, 0, ""};
}
PreprocessRequest PreprocessRequest::ngram_counts(int n, std::uint64_t cutoff, std::string level) {
    return {Kind::NgramCounts, n, cutoff, std::move(level)};
}
PreprocessRequest PreprocessRequest::build_lm(int order, std::string level) {
    return {Kind::BuildLm, order, 0, std::move(level)};
}
PreprocessRequest PreprocessRequest::load_embeddings() {
    return {Kind::LoadEmbeddings, 0, 0, ""};
}

namespace {

[[noreturn]] void not_requested(const std::string& identity) {
    throw ExtractionError("resource not requested in phase 1: " + identity);
}

}  // namespace

const TokenStream& ResourceCache::tokens(Split s) const {
    const auto& slot = (s == Split::Train) ? train_tokens_ : test_tokens_;
    if (!slot) not_requested(PreprocessRequest::tokenize(s).identity());
    return *slot;
}

const TagStream& ResourceCache::tags(Split s) const {
    const auto& slot = (s == Split::Train) ? train_tags_ : test_tags_;
    if (!slot) not_requested(PreprocessRequest::tag(s).identity());
    return *slot;
}

const NgramCountTable& ResourceCache::ngram_counts(int n, std::uint64_t cutoff,
                                                   const std::string& level) const {
    const auto id = PreprocessRequest::ngram_counts(n, cutoff, level).identity();
    const auto it = tables_.find(id);
    if (it == tables_.end()) not_requested(id);
    return it->second;
}

const KNLanguageModel& ResourceCache::lm(int order, const std::string& level) const {
    const auto id = PreprocessRequest::build_lm(order, level).identity();
    const auto it = lms_.find(id);
    if (it == lms_.end()) not_requested(id);
    return it->second;
}

const EmbeddingTable& ResourceCache::embeddings() const {
    if (!embeddings_) not_requested(PreprocessRequest::load_embeddings().identity());
    return *embeddings_;
}

std::vector<std::string> ResourceCache::keys() const {
    std::vector<std::string> out;
    if (train_tokens_) out.push_back("tokenize-train");
    if (test_tokens_) out.push_back("tokenize-test");
    if (train_tags_) out.push_back("tag-train");
    if (test_tags_) out.push_back("tag-test");
    for (const auto& [k, v] : tables_) out.push_back(k);
    for (const auto& [k, v] : lms_) out.push_back(k);
    if (embeddings_) out.push_back("load-embeddings");
    std::sort(out.begin(), out.end());
    return out;
}

ResourceCache fulfill(const std::vector<PreprocessRequest>& requests, const RunConfig& cfg,
                      const Dataset& data) {
    std::map<std::string, PreprocessRequest> wanted;
    for (const auto& r : requests) {
        if (r.kind == PreprocessRequest::Kind::NgramCounts ||
            r.kind == PreprocessRequest::Kind::BuildLm) {
            if (r.n < 1)
                throw ExtractionError(r.identity() + ": order must be >= 1");
            if (r.level != "word" && r.level != "pos")
                throw ExtractionError(r.identity() + ": level must be word or pos");
            if (r.kind == PreprocessRequest::Kind::NgramCounts && r.cutoff < 1)
                throw ExtractionError(r.identity() + ": cutoff must be >= 1");
        }
        wanted.emplace(r.identity(), r);
    }

    const auto want = [&](PreprocessRequest::Kind kind) {
        for (const auto& [id, r] : wanted)
            if (r.kind == kind) return true;
        return false;
    };
    const auto add = [&](PreprocessRequest r) { wanted.emplace(r.identity(), r); };

    // Implied dependencies.
    for (const auto& [id, r] : std::map<std::string, PreprocessRequest>(wanted)) {
        if (r.kind == PreprocessRequest::Kind::TagTrain) add(PreprocessRequest::tokenize(Split::Train));
        if (r.kind == PreprocessRequest::Kind::TagTest) add(PreprocessRequest::tokenize(Split::Test));
        if (r.kind == PreprocessRequest::Kind::NgramCounts) {
            if (r.level == "pos") {
                add(PreprocessRequest::tag(Split::Train));
                add(PreprocessRequest::tokenize(Split::Train));
            } else {
                add(PreprocessRequest::tokenize(Split::Train));
            }
        }
    }

    ResourceCache cache;
    const bool lc = cfg.settings.lowercase;
    const auto tokenize_all = [&](const std::vector<std::string>& sentences) {
        TokenStream stream;
        stream.sentences.reserve(sentences.size());
        for (const auto& s : sentences) stream.sentences.push_back(text::tokenize(s, lc));
        return stream;
    };

    if (want(PreprocessRequest::Kind::TokenizeTrain)) {
        cache.train_tokens_ = tokenize_all(data.train_sentences);
        cache.build_log_.push_back("tokenize-train");
    }
    if (want(PreprocessRequest::Kind::TokenizeTest)) {
        cache.test_tokens_ = tokenize_all(data.test_sentences);
        cache.build_log_.push_back("tokenize-test");
    }

    const bool need_pos_lm = [&] {
        for (const auto& [id, r] : wanted)
            if (r.kind == PreprocessRequest::Kind::BuildLm && r.level == "pos") return true;
        return false;
    }();
    std::optional<TaggerModel> tagger_model;
    if (want(PreprocessRequest::Kind::TagTrain) || want(PreprocessRequest::Kind::TagTest) ||
        need_pos_lm) {
        if (cfg.input.tagged_corpus.empty()) {
            for (const auto& [id, r] : wanted)
                if (r.kind == PreprocessRequest::Kind::TagTrain ||
                    r.kind == PreprocessRequest::Kind::TagTest ||
                    (r.kind == PreprocessRequest::Kind::BuildLm && r.level == "pos"))
                    throw ExtractionError(id +
                                          " requires [input] tagged_corpus, which is not configured");
        }
        const auto corpus = parse_tagged_corpus(read_file(cfg.input.tagged_corpus));
        tagger_model = train_tagger(corpus, 5, cfg.settings.seed);
        cache.build_log_.push_back("tagger-model");
    }

    const auto tag_all = [&](const TokenStream& tokens) {
        TagStream stream;
        stream.sentences.reserve(tokens.sentences.size());
        for (const auto& sent : tokens.sentences) stream.sentences.push_back(tag(sent, *tagger_model));
        return stream;
    };
    if (want(PreprocessRequest::Kind::TagTrain)) {
        cache.train_tags_ = tag_all(*cache.train_tokens_);
        cache.build_log_.push_back("tag-train");
    }
    if (want(PreprocessRequest::Kind::TagTest)) {
        cache.test_tags_ = tag_all(*cache.test_tokens_);
        cache.build_log_.push_back("tag-test");
    }

    std::optional<TokenStream> lm_tokens;
    std::optional<TagStream> lm_tags;
    for (const auto& [id, r] : wanted) {
        if (r.kind != PreprocessRequest::Kind::BuildLm) continue;
        if (cfg.input.lm_corpus.empty())
            throw ExtractionError(id + " requires [input] lm_corpus, which is not configured");
        if (!lm_tokens) {
            lm_tokens = tokenize_all(split_lines(read_file(cfg.input.lm_corpus)));
            cache.build_log_.push_back("tokenize-lm");
        }
        if (r.level == "pos" && !lm_tags) {
            lm_tags = tag_all(*lm_tokens);
            cache.build_log_.push_back("tag-lm");
        }
        cache.lms_.emplace(id, train_kn(r.level == "pos" ? lm_tags->sentences : lm_tokens->sentences,
                                        r.n));
        cache.build_log_.push_back(id);
    }

    for (const auto& [id, r] : wanted) {
        if (r.kind != PreprocessRequest::Kind::NgramCounts) continue;
        const auto& sentences = (r.level == "pos") ? cache.train_tags_->sentences
                                                   : cache.train_tokens_->sentences;
        cache.tables_.emplace(id, count_ngrams(sentences, r.n, r.cutoff));
        cache.build_log_.push_back(id);
    }

    if (want(PreprocessRequest::Kind::LoadEmbeddings)) {
        if (cfg.input.embeddings.empty())
            throw ExtractionError(
                "load-embeddings requires [input] embeddings, which is not configured");
        cache.embeddings_ = load_embeddings(cfg.input.embeddings);
        cache.build_log_.push_back("load-embeddings");
    }
    return cache;
}

}  // namespace featforge
