#include <algorithm>
#include <cmath>
#include <set>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"

namespace featforge {

namespace {

// Feature ids of a sentence: known-token ids plus hashed bigram buckets for
// adjacent in-vocabulary pairs.
std::vector<std::uint32_t> feature_ids(const SupervisedEmbeddingModel& m,
                                       const std::vector<std::string>& tokens) {
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size() * 2);
    std::int64_t prev = -1;
    for (const auto& tok : tokens) {
        const auto it = m.vocab_ids.find(tok);
        if (it == m.vocab_ids.end()) {
            prev = -1;
            continue;
        }
        ids.push_back(it->second);
        if (prev >= 0 && m.buckets > 0) {
            const std::string key = m.vocab[static_cast<std::size_t>(prev)] + '\x1f' + tok;
            ids.push_back(static_cast<std::uint32_t>(
                m.vocab.size() + fnv1a32(key) % static_cast<std::uint32_t>(m.buckets)));
        }
        prev = it->second;
    }
    return ids;
}

std::vector<double> repr_from_ids(const SupervisedEmbeddingModel& m,
                                  const std::vector<std::uint32_t>& ids) {
    std::vector<double> h(m.dim, 0.0);
    if (ids.empty()) return h;
    for (const auto id : ids) {
        const double* row = m.E.data() + static_cast<std::size_t>(id) * m.dim;
        for (std::size_t d = 0; d < m.dim; ++d) h[d] += row[d];
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    for (double& v : h) v *= inv;
    return h;
}

std::vector<double> output_probs(const SupervisedEmbeddingModel& m,
                                 const std::vector<double>& h) {
    std::vector<double> scores(m.n_classes, 0.0);
    for (std::size_t d = 0; d < m.dim; ++d) {
        const double* wrow = m.Wout.data() + d * m.n_classes;
        for (std::size_t c = 0; c < m.n_classes; ++c) scores[c] += h[d] * wrow[c];
    }
    const double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (double& s : scores) s /= sum;
    return scores;
}

}  // namespace

SupervisedEmbeddingModel train_supervised_embedding(
    const std::vector<std::vector<std::string>>& sentences, const std::vector<int>& labels,
    std::size_t n_classes, std::size_t dim, int epochs, double lr, std::size_t buckets,
    std::uint64_t seed) {
    if (sentences.empty()) throw TrainingError("supervised-embedding: empty training data");
    if (sentences.size() != labels.size())
        throw TrainingError("supervised-embedding: label count does not match sentences");
    if (dim < 1) throw TrainingError("supervised-embedding: dim must be >= 1");
    if (epochs < 1) throw TrainingError("supervised-embedding: epochs must be >= 1");
    if (lr <= 0) throw TrainingError("supervised-embedding: learning rate must be > 0");
    if (n_classes < 2) throw TrainingError("supervised-embedding: need at least 2 classes");

    SupervisedEmbeddingModel m;
    m.dim = dim;
    m.buckets = buckets;
    m.n_classes = n_classes;
    {
        std::set<std::string> vocab;
        for (const auto& s : sentences) vocab.insert(s.begin(), s.end());
        m.vocab.assign(vocab.begin(), vocab.end());
    }
    for (std::uint32_t i = 0; i < m.vocab.size(); ++i) m.vocab_ids[m.vocab[i]] = i;

    std::mt19937_64 rng(seed);
    m.E.resize((m.vocab.size() + buckets) * dim);
    const double scale = 1.0 / static_cast<double>(dim);
    for (double& v : m.E) v = (2.0 * rand_unit(rng) - 1.0) * scale;
    m.Wout.assign(dim * n_classes, 0.0);

    const std::uint64_t total_steps = static_cast<std::uint64_t>(epochs) * sentences.size();
    std::uint64_t step = 0;
    std::vector<double> dscores(n_classes);
    std::vector<double> dh(dim);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t si = 0; si < sentences.size(); ++si) {
            const double step_lr =
                lr * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
            ++step;
            const auto ids = feature_ids(m, sentences[si]);
            const auto h = repr_from_ids(m, ids);
            const auto p = output_probs(m, h);
            for (std::size_t c = 0; c < n_classes; ++c)
                dscores[c] = p[c] - (static_cast<int>(c) == labels[si] ? 1.0 : 0.0);

            // dh from the pre-update output weights.
            for (std::size_t d = 0; d < dim; ++d) {
                const double* wrow = m.Wout.data() + d * n_classes;
                double s = 0.0;
                for (std::size_t c = 0; c < n_classes; ++c) s += wrow[c] * dscores[c];
                dh[d] = s;
            }
            for (std::size_t d = 0; d < dim; ++d) {
                double* wrow = m.Wout.data() + d * n_classes;
                for (std::size_t c = 0; c < n_classes; ++c)
                    wrow[c] -= step_lr * h[d] * dscores[c];
            }
            if (!ids.empty()) {
                const double g = step_lr / static_cast<double>(ids.size());
                for (const auto id : ids) {
                    double* row = m.E.data() + static_cast<std::size_t>(id) * dim;
                    for (std::size_t d = 0; d < dim; ++d) row[d] -= g * dh[d];
                }
            }
        }
    }
    return m;
}

std::vector<double> sentence_repr(const SupervisedEmbeddingModel& m,
                                  const std::vector<std::string>& tokens) {
    return repr_from_ids(m, feature_ids(m, tokens));
}

std::vector<double> predict_proba(const SupervisedEmbeddingModel& m,
                                  const std::vector<std::string>& tokens) {
    return output_probs(m, sentence_repr(m, tokens));
}

std::vector<int> predict(const SupervisedEmbeddingModel& m,
                         const std::vector<std::vector<std::string>>& sentences) {
    std::vector<int> out(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto p = predict_proba(m, sentences[i]);
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.size(); ++c)
            if (p[c] > p[best]) best = c;
        out[i] = static_cast<int>(best);
    }
    return out;
}

}  // namespace featforge
