#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"
#include "featforge/features.hpp"
#include "featforge/text.hpp"

namespace featforge {
namespace {

using Args = std::map<std::string, std::string>;

// Per-order defaults (orders past 5 reuse the order-5 entry).
constexpr std::uint64_t kWordCutoffs[5] = {3, 5, 5, 10, 10};
constexpr std::uint64_t kPosCutoffs[5] = {10, 20, 20, 20, 20};
constexpr std::size_t kWordDims[5] = {50000, 70000, 70000, 100000, 150000};
constexpr std::size_t kPosDims[5] = {50, 2500, 7000, 10000, 15000};

void reject_unknown(const Args& args, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : args) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            std::string msg = "unknown arg '" + key + "' (allowed:";
            if (allowed.size() == 0) msg += " none";
            for (const char* a : allowed) msg += std::string(" ") + a;
            throw ExtractionError(msg + ")");
        }
    }
}

long long arg_int(const Args& args, const std::string& key, long long def, long long min_value) {
    const auto it = args.find(key);
    if (it == args.end()) return def;
    long long value = 0;
    const auto [ptr, ec] =
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), value);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size())
        throw ExtractionError("arg " + key + "=" + it->second + " is not an integer");
    if (value < min_value)
        throw ExtractionError("arg " + key + "=" + it->second + " must be >= " +
                              std::to_string(min_value));
    return value;
}

double arg_real(const Args& args, const std::string& key, double def) {
    const auto it = args.find(key);
    if (it == args.end()) return def;
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size() || !std::isfinite(value)) throw std::invalid_argument("");
        return value;
    } catch (const std::exception&) {
        throw ExtractionError("arg " + key + "=" + it->second + " is not a number");
    }
}

std::string arg_level(const Args& args) {
    const auto it = args.find("level");
    if (it == args.end()) return "word";
    if (it->second != "word" && it->second != "pos")
        throw ExtractionError("arg level=" + it->second + " (expected word or pos)");
    return it->second;
}

std::uint64_t effective_cutoff(std::uint64_t base, double scale) {
    const double scaled = std::llround(static_cast<double>(base) * scale);
    return static_cast<std::uint64_t>(std::max(1.0, scaled));
}

std::uint64_t default_cutoff(int n, const std::string& level) {
    const auto& table = level == "pos" ? kPosCutoffs : kWordCutoffs;
    return table[std::min(n, 5) - 1];
}

struct NgramParams {
    std::string level;
    int n = 1;
    std::uint64_t cutoff = 1;
};

NgramParams ngram_params(const Args& args, const RunConfig& cfg) {
    NgramParams p;
    p.level = arg_level(args);
    p.n = static_cast<int>(arg_int(args, "n", 1, 1));
    const auto it = args.find("cutoff");
    const std::uint64_t base = it == args.end()
                                   ? default_cutoff(p.n, p.level)
                                   : static_cast<std::uint64_t>(arg_int(args, "cutoff", 1, 1));
    p.cutoff = effective_cutoff(base, cfg.settings.cutoff_scale);
    return p;
}

// "ngram2", "ngram2[pos]", "hashed-ngram3", ...
std::string block_prefix(const std::string& base, int n, const std::string& level) {
    std::string prefix = base;
    if (n > 0) prefix += std::to_string(n);
    if (level == "pos") prefix += "[pos]";
    return prefix;
}

const std::vector<std::vector<std::string>>& level_stream(const ResourceCache& cache,
                                                          const std::string& level, Split split) {
    if (level == "pos") return cache.tags(split).sentences;
    return cache.tokens(split).sentences;
}

std::vector<PreprocessRequest> stream_requests(const std::string& level) {
    if (level == "pos")
        return {PreprocessRequest::tag(Split::Train), PreprocessRequest::tag(Split::Test)};
    return {PreprocessRequest::tokenize(Split::Train), PreprocessRequest::tokenize(Split::Test)};
}

SparseMatrix rows_to_sparse(const std::vector<std::vector<double>>& rows, std::size_t n_cols) {
    std::vector<Triplet> triplets;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            if (rows[r][c] != 0.0) triplets.push_back({r, static_cast<std::uint32_t>(c), rows[r][c]});
    return sparse_from_triplets(rows.size(), n_cols, triplets);
}

FeatureDescriptor make_descriptor(std::vector<std::string> names, int feature_id) {
    FeatureDescriptor d;
    d.column_names = std::move(names);
    d.source_feature_id.assign(d.column_names.size(), feature_id);
    return d;
}

// ---------------------------------------------------------------------------
// surface (id 1): token count, mean word length, type-token ratio, four
// tag-class ratios. Tag classes match by tag prefix.

struct SurfaceClasses {
    std::string adj = "JJ", verb = "VB", noun = "NN", adv = "RB";
};

SurfaceClasses surface_classes(const Args& args) {
    reject_unknown(args, {"adj", "verb", "noun", "adv"});
    SurfaceClasses c;
    if (auto it = args.find("adj"); it != args.end()) c.adj = it->second;
    if (auto it = args.find("verb"); it != args.end()) c.verb = it->second;
    if (auto it = args.find("noun"); it != args.end()) c.noun = it->second;
    if (auto it = args.find("adv"); it != args.end()) c.adv = it->second;
    for (const std::string* p : {&c.adj, &c.verb, &c.noun, &c.adv})
        if (p->empty()) throw ExtractionError("surface tag prefixes must be non-empty");
    return c;
}

std::vector<PreprocessRequest> surface_requests(const RequestContext& ctx) {
    surface_classes(ctx.args);
    return {PreprocessRequest::tokenize(Split::Train), PreprocessRequest::tokenize(Split::Test),
            PreprocessRequest::tag(Split::Train), PreprocessRequest::tag(Split::Test)};
}

SparseMatrix surface_matrix(const std::vector<std::vector<std::string>>& tokens,
                            const std::vector<std::vector<std::string>>& tags,
                            const SurfaceClasses& classes) {
    std::vector<std::vector<double>> rows;
    rows.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& sent = tokens[i];
        std::vector<double> row(7, 0.0);
        if (!sent.empty()) {
            row[0] = static_cast<double>(sent.size());
            std::size_t words = 0, chars = 0;
            std::set<std::string_view> types;
            for (const auto& tok : sent) {
                types.insert(tok);
                if (!text::is_punct_token(tok)) {
                    ++words;
                    chars += text::codepoint_count(tok);
                }
            }
            if (words > 0) row[1] = static_cast<double>(chars) / static_cast<double>(words);
            row[2] = static_cast<double>(types.size()) / static_cast<double>(sent.size());
            const std::string* prefixes[4] = {&classes.adj, &classes.verb, &classes.noun,
                                              &classes.adv};
            for (const auto& tag : tags[i])
                for (int c = 0; c < 4; ++c)
                    if (tag.starts_with(*prefixes[c])) row[3 + c] += 1.0;
            for (int c = 0; c < 4; ++c) row[3 + c] /= static_cast<double>(sent.size());
        }
        rows.push_back(std::move(row));
    }
    return rows_to_sparse(rows, 7);
}

FeatureBlock surface_extract(const ExtractorContext& ctx) {
    const auto classes = surface_classes(ctx.args);
    FeatureBlock block;
    block.feature_id = 1;
    block.train = surface_matrix(ctx.cache.tokens(Split::Train).sentences,
                                 ctx.cache.tags(Split::Train).sentences, classes);
    block.test = surface_matrix(ctx.cache.tokens(Split::Test).sentences,
                                ctx.cache.tags(Split::Test).sentences, classes);
    block.descriptor = make_descriptor(
        {"surface:token_count", "surface:mean_word_length", "surface:type_token_ratio",
         "surface:adjective_ratio", "surface:verb_ratio", "surface:noun_ratio",
         "surface:adverb_ratio"},
        1);
    return block;
}

// ---------------------------------------------------------------------------
// ngram (id 2): bag of n-grams over the cutoff table, columns sorted by key.

std::vector<PreprocessRequest> ngram_requests(const RequestContext& ctx) {
    reject_unknown(ctx.args, {"level", "n", "cutoff"});
    const auto p = ngram_params(ctx.args, ctx.cfg);
    auto reqs = stream_requests(p.level);
    reqs.push_back(PreprocessRequest::ngram_counts(p.n, p.cutoff, p.level));
    return reqs;
}

SparseMatrix count_matrix(const std::vector<std::vector<std::string>>& sentences, int n,
                          const std::unordered_map<std::string, std::size_t>& columns,
                          std::size_t n_cols) {
    std::vector<Triplet> triplets;
    std::map<std::size_t, double> row_counts;
    for (std::size_t r = 0; r < sentences.size(); ++r) {
        row_counts.clear();
        const auto& sent = sentences[r];
        if (sent.size() >= static_cast<std::size_t>(n)) {
            for (std::size_t start = 0; start + n <= sent.size(); ++start) {
                const auto it = columns.find(join_ngram(sent, start, n));
                if (it != columns.end()) row_counts[it->second] += 1.0;
            }
        }
        for (const auto& [col, count] : row_counts)
            triplets.push_back({r, static_cast<std::uint32_t>(col), count});
    }
    return sparse_from_triplets(sentences.size(), n_cols, triplets);
}

FeatureBlock ngram_extract(const ExtractorContext& ctx) {
    const auto p = ngram_params(ctx.args, ctx.cfg);
    const auto& table = ctx.cache.ngram_counts(p.n, p.cutoff, p.level);

    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> columns;
    names.reserve(table.counts.size());
    const std::string prefix = block_prefix("ngram", p.n, p.level) + ":";
    for (const auto& [key, count] : table.counts) {
        columns.emplace(key, names.size());
        std::string shown = key;
        std::replace(shown.begin(), shown.end(), '\x1f', ' ');
        names.push_back(prefix + shown);
    }

    FeatureBlock block;
    block.feature_id = 2;
    block.train = count_matrix(level_stream(ctx.cache, p.level, Split::Train), p.n, columns,
                               names.size());
    block.test = count_matrix(level_stream(ctx.cache, p.level, Split::Test), p.n, columns,
                              names.size());
    block.descriptor = make_descriptor(std::move(names), 2);
    return block;
}

// ---------------------------------------------------------------------------
// hashed-ngram (id 3): signed feature hashing of the cutoff table's n-grams.

struct HashedParams {
    NgramParams base;
    std::size_t dims = 1;
};

HashedParams hashed_params(const Args& args, const RunConfig& cfg) {
    HashedParams p;
    p.base = ngram_params(args, cfg);
    const auto it = args.find("dims");
    const auto& defaults = p.base.level == "pos" ? kPosDims : kWordDims;
    p.dims = it == args.end() ? defaults[std::min(p.base.n, 5) - 1]
                              : static_cast<std::size_t>(arg_int(args, "dims", 1, 1));
    return p;
}

std::vector<PreprocessRequest> hashed_requests(const RequestContext& ctx) {
    reject_unknown(ctx.args, {"level", "n", "cutoff", "dims"});
    const auto p = hashed_params(ctx.args, ctx.cfg);
    auto reqs = stream_requests(p.base.level);
    reqs.push_back(PreprocessRequest::ngram_counts(p.base.n, p.base.cutoff, p.base.level));
    return reqs;
}

SparseMatrix hashed_matrix(const std::vector<std::vector<std::string>>& sentences, int n,
                           const NgramCountTable& table, std::size_t dims) {
    std::vector<Triplet> triplets;
    std::map<std::size_t, double> row_values;
    for (std::size_t r = 0; r < sentences.size(); ++r) {
        row_values.clear();
        const auto& sent = sentences[r];
        if (sent.size() >= static_cast<std::size_t>(n)) {
            for (std::size_t start = 0; start + n <= sent.size(); ++start) {
                const std::string key = join_ngram(sent, start, n);
                if (!table.counts.count(key)) continue;
                const std::uint32_t h = fnv1a32(key);
                const double sign = (h & 0x80000000u) ? -1.0 : 1.0;
                row_values[h % dims] += sign;
            }
        }
        for (const auto& [col, value] : row_values)
            if (value != 0.0) triplets.push_back({r, static_cast<std::uint32_t>(col), value});
    }
    return sparse_from_triplets(sentences.size(), dims, triplets);
}

FeatureBlock hashed_extract(const ExtractorContext& ctx) {
    const auto p = hashed_params(ctx.args, ctx.cfg);
    const auto& table = ctx.cache.ngram_counts(p.base.n, p.base.cutoff, p.base.level);

    FeatureBlock block;
    block.feature_id = 3;
    block.train = hashed_matrix(level_stream(ctx.cache, p.base.level, Split::Train), p.base.n,
                                table, p.dims);
    block.test = hashed_matrix(level_stream(ctx.cache, p.base.level, Split::Test), p.base.n,
                               table, p.dims);
    const std::string prefix = block_prefix("hashed-ngram", p.base.n, p.base.level) + ":b";
    std::vector<std::string> names;
    names.reserve(p.dims);
    for (std::size_t i = 0; i < p.dims; ++i) names.push_back(prefix + std::to_string(i));
    block.descriptor = make_descriptor(std::move(names), 3);
    return block;
}

// ---------------------------------------------------------------------------
// lm (id 4): per-sentence log probability, perplexity, mean surprisal bits.

struct LmParams {
    std::string level;
    int order = 5;
};

LmParams lm_params(const Args& args) {
    reject_unknown(args, {"level", "order"});
    LmParams p;
    p.level = arg_level(args);
    p.order = static_cast<int>(arg_int(args, "order", 5, 1));
    return p;
}

std::vector<PreprocessRequest> lm_requests(const RequestContext& ctx) {
    const auto p = lm_params(ctx.args);
    auto reqs = stream_requests(p.level);
    reqs.push_back(PreprocessRequest::build_lm(p.order, p.level));
    return reqs;
}

SparseMatrix lm_matrix(const KNLanguageModel& model,
                       const std::vector<std::vector<std::string>>& sentences) {
    std::vector<std::vector<double>> rows;
    rows.reserve(sentences.size());
    for (const auto& sent : sentences) {
        const double lp = logprob10(model, sent);
        rows.push_back({lp, perplexity(model, sent), surprisal_bits(model, sent)});
    }
    return rows_to_sparse(rows, 3);
}

FeatureBlock lm_extract(const ExtractorContext& ctx) {
    const auto p = lm_params(ctx.args);
    const auto& model = ctx.cache.lm(p.order, p.level);

    FeatureBlock block;
    block.feature_id = 4;
    block.train = lm_matrix(model, level_stream(ctx.cache, p.level, Split::Train));
    block.test = lm_matrix(model, level_stream(ctx.cache, p.level, Split::Test));
    const std::string prefix = block_prefix("lm", 0, p.level) + ":";
    block.descriptor = make_descriptor(
        {prefix + "logprob10", prefix + "perplexity", prefix + "surprisal_bits"}, 4);
    return block;
}

// ---------------------------------------------------------------------------
// quantile (id 5): distribution of a sentence's n-grams over four corpus
// frequency-rank bins plus an OOV bin. q1 holds the lowest frequencies; any
// remainder after the even split also goes to the low bins.

std::vector<PreprocessRequest> quantile_requests(const RequestContext& ctx) {
    reject_unknown(ctx.args, {"level", "n", "cutoff"});
    const auto p = ngram_params(ctx.args, ctx.cfg);
    auto reqs = stream_requests(p.level);
    reqs.push_back(PreprocessRequest::ngram_counts(p.n, p.cutoff, p.level));
    return reqs;
}

std::unordered_map<std::string, int> quantile_bins(const NgramCountTable& table) {
    std::vector<std::pair<std::uint64_t, const std::string*>> ranked;
    ranked.reserve(table.counts.size());
    for (const auto& [key, count] : table.counts) ranked.emplace_back(count, &key);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::unordered_map<std::string, int> bins;
    const std::size_t base = ranked.size() / 4, rem = ranked.size() % 4;
    std::size_t next = 0;
    for (int b = 0; b < 4; ++b) {
        const std::size_t size = base + (static_cast<std::size_t>(b) < rem ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) bins.emplace(*ranked[next++].second, b);
    }
    return bins;
}

SparseMatrix quantile_matrix(const std::vector<std::vector<std::string>>& sentences, int n,
                             const std::unordered_map<std::string, int>& bins) {
    std::vector<std::vector<double>> rows;
    rows.reserve(sentences.size());
    for (const auto& sent : sentences) {
        std::vector<double> row(5, 0.0);
        if (sent.size() >= static_cast<std::size_t>(n)) {
            const std::size_t positions = sent.size() - n + 1;
            for (std::size_t start = 0; start < positions; ++start) {
                const auto it = bins.find(join_ngram(sent, start, n));
                row[it == bins.end() ? 4 : it->second] += 1.0;
            }
            for (double& v : row) v /= static_cast<double>(positions);
        }
        rows.push_back(std::move(row));
    }
    return rows_to_sparse(rows, 5);
}

FeatureBlock quantile_extract(const ExtractorContext& ctx) {
    const auto p = ngram_params(ctx.args, ctx.cfg);
    const auto bins = quantile_bins(ctx.cache.ngram_counts(p.n, p.cutoff, p.level));

    FeatureBlock block;
    block.feature_id = 5;
    block.train = quantile_matrix(level_stream(ctx.cache, p.level, Split::Train), p.n, bins);
    block.test = quantile_matrix(level_stream(ctx.cache, p.level, Split::Test), p.n, bins);
    const std::string prefix = block_prefix("quantile", p.n, p.level) + ":";
    block.descriptor = make_descriptor({prefix + "q1", prefix + "q2", prefix + "q3",
                                        prefix + "q4", prefix + "oov"},
                                       5);
    return block;
}

// ---------------------------------------------------------------------------
// avg-embedding (id 6): mean of pretrained vectors over in-vocabulary tokens.

std::vector<PreprocessRequest> avg_embedding_requests(const RequestContext& ctx) {
    reject_unknown(ctx.args, {});
    return {PreprocessRequest::tokenize(Split::Train), PreprocessRequest::tokenize(Split::Test),
            PreprocessRequest::load_embeddings()};
}

SparseMatrix avg_embedding_matrix(const EmbeddingTable& table,
                                  const std::vector<std::vector<std::string>>& sentences) {
    std::vector<std::vector<double>> rows;
    rows.reserve(sentences.size());
    for (const auto& sent : sentences) {
        std::vector<double> row(table.dim, 0.0);
        std::size_t known = 0;
        for (const auto& tok : sent) {
            const auto it = table.vectors.find(tok);
            if (it == table.vectors.end()) continue;
            ++known;
            for (std::size_t d = 0; d < table.dim; ++d) row[d] += it->second[d];
        }
        if (known > 0)
            for (double& v : row) v /= static_cast<double>(known);
        rows.push_back(std::move(row));
    }
    return rows_to_sparse(rows, table.dim);
}

FeatureBlock avg_embedding_extract(const ExtractorContext& ctx) {
    const auto& table = ctx.cache.embeddings();

    FeatureBlock block;
    block.feature_id = 6;
    block.train = avg_embedding_matrix(table, ctx.cache.tokens(Split::Train).sentences);
    block.test = avg_embedding_matrix(table, ctx.cache.tokens(Split::Test).sentences);
    std::vector<std::string> names;
    names.reserve(table.dim);
    for (std::size_t i = 0; i < table.dim; ++i)
        names.push_back("avg-embedding:e" + std::to_string(i));
    block.descriptor = make_descriptor(std::move(names), 6);
    return block;
}

// ---------------------------------------------------------------------------
// supervised-embedding (id 7): trains the classify module's embedding model on
// the training split and emits each sentence's averaged hidden representation.

struct EmbedParams {
    std::size_t dim = 10;
    int epochs = 5;
    double lr = 0.1;
    std::size_t buckets = 1000000;
};

EmbedParams embed_params(const Args& args) {
    reject_unknown(args, {"dim", "epochs", "lr", "buckets"});
    EmbedParams p;
    p.dim = static_cast<std::size_t>(arg_int(args, "dim", 10, 1));
    p.epochs = static_cast<int>(arg_int(args, "epochs", 5, 1));
    p.lr = arg_real(args, "lr", 0.1);
    if (p.lr <= 0) throw ExtractionError("arg lr must be > 0");
    p.buckets = static_cast<std::size_t>(arg_int(args, "buckets", 1000000, 1));
    return p;
}

std::vector<PreprocessRequest> embed_requests(const RequestContext& ctx) {
    embed_params(ctx.args);
    return {PreprocessRequest::tokenize(Split::Train), PreprocessRequest::tokenize(Split::Test)};
}

SparseMatrix repr_matrix(const SupervisedEmbeddingModel& model,
                         const std::vector<std::vector<std::string>>& sentences) {
    std::vector<std::vector<double>> rows;
    rows.reserve(sentences.size());
    for (const auto& sent : sentences) rows.push_back(sentence_repr(model, sent));
    return rows_to_sparse(rows, model.dim);
}

FeatureBlock embed_extract(const ExtractorContext& ctx) {
    const auto p = embed_params(ctx.args);
    const auto model = train_supervised_embedding(
        ctx.cache.tokens(Split::Train).sentences, ctx.data.train_labels,
        ctx.data.label_names.size(), p.dim, p.epochs, p.lr, p.buckets, ctx.seed);

    FeatureBlock block;
    block.feature_id = 7;
    block.train = repr_matrix(model, ctx.cache.tokens(Split::Train).sentences);
    block.test = repr_matrix(model, ctx.cache.tokens(Split::Test).sentences);
    std::vector<std::string> names;
    names.reserve(p.dim);
    for (std::size_t i = 0; i < p.dim; ++i)
        names.push_back("supervised-embedding:h" + std::to_string(i));
    block.descriptor = make_descriptor(std::move(names), 7);
    return block;
}

const bool registered = [] {
    auto& r = ExtractorRegistry::instance();
    r.add({1, "surface", "adj= verb= noun= adv= (tag prefixes)", surface_requests,
           surface_extract});
    r.add({2, "ngram", "level=word|pos n= cutoff=", ngram_requests, ngram_extract});
    r.add({3, "hashed-ngram", "level=word|pos n= cutoff= dims=", hashed_requests,
           hashed_extract});
    r.add({4, "lm", "level=word|pos order=", lm_requests, lm_extract});
    r.add({5, "quantile", "level=word|pos n= cutoff=", quantile_requests, quantile_extract});
    r.add({6, "avg-embedding", "(no args)", avg_embedding_requests, avg_embedding_extract});
    r.add({7, "supervised-embedding", "dim= epochs= lr= buckets=", embed_requests,
           embed_extract});
    return true;
}();

}  // namespace
}  // namespace featforge
