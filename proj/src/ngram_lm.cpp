#include "featforge/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include "featforge/common.hpp"

namespace featforge {

namespace {

constexpr std::uint32_t kBos = 0;
constexpr std::uint32_t kEos = 1;
constexpr std::uint32_t kUnk = 2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string pack(const std::uint32_t* ids, std::size_t n) {
    std::string key(n * 4, '\0');
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t v = ids[i];
        key[4 * i] = static_cast<char>(v & 0xFF);
        key[4 * i + 1] = static_cast<char>((v >> 8) & 0xFF);
        key[4 * i + 2] = static_cast<char>((v >> 16) & 0xFF);
        key[4 * i + 3] = static_cast<char>((v >> 24) & 0xFF);
    }
    return key;
}

std::uint32_t first_id(const std::string& key) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(key[0])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(key[1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(key[2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(key[3])) << 24);
}

bool is_boundary_literal(std::string_view t) {
    return t == "<s>" || t == "</s>" || t == "<unk>";
}

struct CtxAgg {
    std::uint64_t total = 0;
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t n3p = 0;
};

double discount_for(const OrderDiscounts& d, std::uint64_t count) {
    if (count == 0) return 0.0;
    if (count == 1) return d.d1;
    if (count == 2) return d.d2;
    return d.d3;
}

double gamma_of(const CtxAgg& agg, const OrderDiscounts& d) {
    return (d.d1 * static_cast<double>(agg.n1) + d.d2 * static_cast<double>(agg.n2) +
            d.d3 * static_cast<double>(agg.n3p)) /
           static_cast<double>(agg.total);
}

}  // namespace

std::uint32_t KNLanguageModel::token_id(std::string_view token) const {
    if (token == "<s>") return kBos;
    if (token == "</s>") return kEos;
    if (token == "<unk>") return kUnk;
    const auto it = vocab_ids.find(std::string(token));
    return it == vocab_ids.end() ? kUnk : it->second;
}

double KNLanguageModel::cond_log10_ids(const std::vector<std::uint32_t>& context,
                                       std::uint32_t target) const {
    if (target == kBos) return kNegInf;
    const std::size_t m = std::min(context.size(), static_cast<std::size_t>(order - 1));
    const std::uint32_t* ctx = context.data() + (context.size() - m);

    for (std::size_t k = m + 1; k >= 1; --k) {
        std::string key = pack(ctx + (m - (k - 1)), k - 1);
        key += pack(&target, 1);
        const auto it = logprob[k - 1].find(key);
        if (it == logprob[k - 1].end()) continue;
        double lp = it->second;
        for (std::size_t j = k; j <= m; ++j) {
            const auto bo = logbackoff[j].find(pack(ctx + (m - j), j));
            if (bo != logbackoff[j].end()) lp += bo->second;
        }
        return lp;
    }
    // Zero-count token: uniform floor under the full backoff chain.
    double lp = std::log10(1.0 / static_cast<double>(vocab.size() - 1));
    for (std::size_t j = 0; j <= m; ++j) {
        const auto bo = logbackoff[j].find(pack(ctx + (m - j), j));
        if (bo != logbackoff[j].end()) lp += bo->second;
    }
    return lp;
}

double KNLanguageModel::cond_log10(const std::vector<std::string>& context,
                                   std::string_view token) const {
    std::vector<std::uint32_t> ids;
    ids.reserve(context.size());
    for (const auto& c : context) ids.push_back(token_id(c));
    return cond_log10_ids(ids, token_id(token));
}

double KNLanguageModel::cond_prob(const std::vector<std::string>& context,
                                  std::string_view token) const {
    return std::pow(10.0, cond_log10(context, token));
}

KNLanguageModel train_kn(const std::vector<std::vector<std::string>>& corpus, int order) {
    if (order < 1) throw TrainingError("lm: order must be >= 1");
    if (corpus.empty()) throw TrainingError("lm: training corpus is empty");

    // Type frequencies with boundary literals folded into <unk>.
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const auto& sent : corpus)
        for (const auto& tok : sent) freq[is_boundary_literal(tok) ? "<unk>" : tok] += 1;

    KNLanguageModel m;
    m.order = order;
    m.vocab = {"<s>", "</s>", "<unk>"};
    {
        std::vector<std::string> kept;
        for (const auto& [tok, c] : freq)
            if (c >= 2 && tok != "<unk>") kept.push_back(tok);
        std::sort(kept.begin(), kept.end());
        m.vocab.insert(m.vocab.end(), kept.begin(), kept.end());
    }
    for (std::uint32_t i = 0; i < m.vocab.size(); ++i) m.vocab_ids[m.vocab[i]] = i;

    const auto train_id = [&](const std::string& tok) -> std::uint32_t {
        const std::string& folded = is_boundary_literal(tok) ? "<unk>" : tok;
        const auto it = m.vocab_ids.find(folded);
        return (it == m.vocab_ids.end() || freq.at(folded) < 2) ? kUnk : it->second;
    };

    const auto n = static_cast<std::size_t>(order);
    // adj[k]: adjusted counts of k-grams. Highest order holds raw counts of
    // the scoring windows (each real token and </s> with its full history);
    // lower orders hold continuation counts, except grams starting with <s>,
    // which keep raw window-suffix counts (nothing can precede <s>).
    std::vector<std::unordered_map<std::string, std::uint64_t>> adj(n + 1);
    std::vector<std::unordered_map<std::string, std::uint64_t>> raw_bos(n);

    for (const auto& sent : corpus) {
        std::vector<std::uint32_t> padded(n - 1, kBos);
        padded.reserve(n + sent.size());
        for (const auto& tok : sent) padded.push_back(train_id(tok));
        padded.push_back(kEos);
        for (std::size_t i = n - 1; i < padded.size(); ++i) {
            const std::uint32_t* win = padded.data() + (i - (n - 1));
            adj[n][pack(win, n)] += 1;
            for (std::size_t k = 1; k < n; ++k) {
                const std::uint32_t* suf = win + (n - k);
                if (suf[0] == kBos) raw_bos[k][pack(suf, k)] += 1;
            }
        }
    }

    for (std::size_t k = n - 1; k >= 1; --k) {
        for (const auto& [key, cnt] : adj[k + 1]) {
            const std::string suffix = key.substr(4);
            if (first_id(suffix) == kBos) continue;
            adj[k][suffix] += 1;  // one distinct predecessor
        }
        for (const auto& [key, cnt] : raw_bos[k]) adj[k][key] = cnt;
    }

    m.discounts.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        std::uint64_t nc[5] = {0, 0, 0, 0, 0};
        for (const auto& [key, cnt] : adj[k])
            if (cnt <= 4) nc[cnt] += 1;
        auto& d = m.discounts[k - 1];
        if (nc[1] == 0 || nc[2] == 0 || nc[3] == 0 || nc[4] == 0) {
            d = {0.75, 0.75, 0.75, true};
            log::info("lm: order " + std::to_string(k) +
                      " count-of-counts too sparse, using absolute discount 0.75");
        } else {
            const double y = static_cast<double>(nc[1]) /
                             (static_cast<double>(nc[1]) + 2.0 * static_cast<double>(nc[2]));
            d.d1 = 1.0 - 2.0 * y * static_cast<double>(nc[2]) / static_cast<double>(nc[1]);
            d.d2 = 2.0 - 3.0 * y * static_cast<double>(nc[3]) / static_cast<double>(nc[2]);
            d.d3 = 3.0 - 4.0 * y * static_cast<double>(nc[4]) / static_cast<double>(nc[3]);
            d.d1 = std::clamp(d.d1, 0.0, 1.0);
            d.d2 = std::clamp(d.d2, 0.0, 2.0);
            d.d3 = std::clamp(d.d3, 0.0, 3.0);
        }
    }

    std::vector<std::unordered_map<std::string, CtxAgg>> ctx(n + 1);
    for (std::size_t k = 1; k <= n; ++k) {
        for (const auto& [key, cnt] : adj[k]) {
            auto& agg = ctx[k][key.substr(0, 4 * (k - 1))];
            agg.total += cnt;
            if (cnt == 1) agg.n1 += 1;
            else if (cnt == 2) agg.n2 += 1;
            else agg.n3p += 1;
        }
    }

    m.logprob.resize(n);
    m.logbackoff.resize(n);
    const double uniform = 1.0 / static_cast<double>(m.vocab.size() - 1);
    for (std::size_t k = 1; k <= n; ++k) {
        const auto& d = m.discounts[k - 1];
        for (const auto& [ctx_key, agg] : ctx[k])
            m.logbackoff[k - 1][ctx_key] = std::log10(gamma_of(agg, d));
        for (const auto& [key, cnt] : adj[k]) {
            const auto& agg = ctx[k].at(key.substr(0, 4 * (k - 1)));
            const double held =
                std::max(static_cast<double>(cnt) - discount_for(d, cnt), 0.0) /
                static_cast<double>(agg.total);
            const double lower = (k == 1)
                                     ? uniform
                                     : std::pow(10.0, m.logprob[k - 2].at(key.substr(4)));
            m.logprob[k - 1][key] = std::log10(held + gamma_of(agg, d) * lower);
        }
    }
    return m;
}

double logprob10(const KNLanguageModel& model, const std::vector<std::string>& tokens) {
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens)
        ids.push_back(is_boundary_literal(t) ? kUnk : model.token_id(t));

    std::vector<std::uint32_t> context(static_cast<std::size_t>(model.order - 1), kBos);
    double lp = 0.0;
    for (std::size_t i = 0; i <= ids.size(); ++i) {
        const std::uint32_t target = (i < ids.size()) ? ids[i] : kEos;
        lp += model.cond_log10_ids(context, target);
        if (model.order > 1) {
            context.erase(context.begin());
            context.push_back(target);
        }
    }
    return lp;
}

double perplexity(const KNLanguageModel& model, const std::vector<std::string>& tokens) {
    const double denom = static_cast<double>(tokens.size() + 1);
    return std::pow(10.0, -logprob10(model, tokens) / denom);
}

double surprisal_bits(const KNLanguageModel& model, const std::vector<std::string>& tokens) {
    const double denom = static_cast<double>(tokens.size() + 1);
    return -logprob10(model, tokens) / (denom * std::log10(2.0));
}

namespace {

constexpr char kMagic[4] = {'K', 'N', 'L', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void write_table(std::ofstream& out, const std::unordered_map<std::string, double>& table) {
    std::vector<const std::string*> keys;
    keys.reserve(table.size());
    for (const auto& [k, v] : table) keys.push_back(&k);
    std::sort(keys.begin(), keys.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    write_raw(out, static_cast<std::uint64_t>(keys.size()));
    for (const auto* k : keys) {
        out.write(k->data(), static_cast<std::streamsize>(k->size()));
        write_raw(out, table.at(*k));
    }
}

std::unordered_map<std::string, double> read_table(std::ifstream& in, std::size_t key_bytes) {
    std::unordered_map<std::string, double> table;
    const auto count = read_raw<std::uint64_t>(in);
    table.reserve(count);
    std::string key(key_bytes, '\0');
    for (std::uint64_t i = 0; i < count; ++i) {
        in.read(key.data(), static_cast<std::streamsize>(key_bytes));
        table[key] = read_raw<double>(in);
    }
    return table;
}

}  // namespace

void save_model(const KNLanguageModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("lm: cannot write " + path);
    out.write(kMagic, 4);
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint32_t>(model.order));
    write_raw(out, static_cast<std::uint64_t>(model.vocab.size()));
    for (const auto& tok : model.vocab) {
        write_raw(out, static_cast<std::uint32_t>(tok.size()));
        out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    }
    for (const auto& d : model.discounts) {
        write_raw(out, d.d1);
        write_raw(out, d.d2);
        write_raw(out, d.d3);
        write_raw(out, static_cast<std::uint8_t>(d.fallback ? 1 : 0));
    }
    for (int k = 1; k <= model.order; ++k) write_table(out, model.logprob[k - 1]);
    for (int len = 0; len < model.order; ++len) write_table(out, model.logbackoff[len]);
    if (!out) throw DataError("lm: write failed for " + path);
}

KNLanguageModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("lm: cannot read " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("lm: " + path + " is not a KNLM model file");
    if (read_raw<std::uint32_t>(in) != kVersion)
        throw DataError("lm: unsupported model version in " + path);

    KNLanguageModel m;
    m.order = static_cast<int>(read_raw<std::uint32_t>(in));
    const auto vocab_size = read_raw<std::uint64_t>(in);
    m.vocab.resize(vocab_size);
    for (auto& tok : m.vocab) {
        const auto len = read_raw<std::uint32_t>(in);
        tok.resize(len);
        in.read(tok.data(), static_cast<std::streamsize>(len));
    }
    for (std::uint32_t i = 0; i < m.vocab.size(); ++i) m.vocab_ids[m.vocab[i]] = i;
    m.discounts.resize(static_cast<std::size_t>(m.order));
    for (auto& d : m.discounts) {
        d.d1 = read_raw<double>(in);
        d.d2 = read_raw<double>(in);
        d.d3 = read_raw<double>(in);
        d.fallback = read_raw<std::uint8_t>(in) != 0;
    }
    m.logprob.resize(static_cast<std::size_t>(m.order));
    m.logbackoff.resize(static_cast<std::size_t>(m.order));
    for (int k = 1; k <= m.order; ++k)
        m.logprob[k - 1] = read_table(in, static_cast<std::size_t>(k) * 4);
    for (int len = 0; len < m.order; ++len)
        m.logbackoff[len] = read_table(in, static_cast<std::size_t>(len) * 4);
    if (!in) throw DataError("lm: truncated model file " + path);
    return m;
}

}  // namespace featforge
