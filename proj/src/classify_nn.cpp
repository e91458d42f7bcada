#include <algorithm>
#include <cmath>
#include <set>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"

namespace featforge {

namespace {

void softmax_inplace(std::vector<double>& scores) {
    const double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (double& s : scores) s /= sum;
}

std::vector<double> linear_scores(const SparseMatrix& X, std::size_t r,
                                  const std::vector<std::vector<double>>& weights) {
    std::vector<double> scores(weights.size());
    for (std::size_t c = 0; c < weights.size(); ++c) {
        double s = weights[c].back();
        for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k)
            s += X.values[k] * weights[c][X.col_indices[k]];
        scores[c] = s;
    }
    return scores;
}

int argmax_low(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
    return static_cast<int>(best);
}

int require_multiclass(const std::vector<int>& labels, const char* who) {
    std::set<int> s(labels.begin(), labels.end());
    if (s.size() < 2) throw TrainingError(std::string(who) + ": training data has a single class");
    return *s.rbegin() + 1;
}

}  // namespace

double logreg_loss(const LogRegModel& m, const SparseMatrix& X, const std::vector<int>& labels) {
    double loss = 0.0;
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        auto p = linear_scores(X, r, m.weights);
        softmax_inplace(p);
        loss -= std::log(p[static_cast<std::size_t>(labels[r])]);
    }
    return loss / static_cast<double>(X.n_rows);
}

std::vector<std::vector<double>> logreg_grad(const LogRegModel& m, const SparseMatrix& X,
                                             const std::vector<int>& labels) {
    std::vector<std::vector<double>> grad(m.weights.size(),
                                          std::vector<double>(m.n_features + 1, 0.0));
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        auto p = linear_scores(X, r, m.weights);
        softmax_inplace(p);
        for (std::size_t c = 0; c < grad.size(); ++c) {
            const double d = p[c] - (labels[r] == static_cast<int>(c) ? 1.0 : 0.0);
            for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k)
                grad[c][X.col_indices[k]] += d * X.values[k];
            grad[c].back() += d;
        }
    }
    const double inv = 1.0 / static_cast<double>(X.n_rows);
    for (auto& g : grad)
        for (double& v : g) v *= inv;
    return grad;
}

LogRegModel train_logreg(const SparseMatrix& X, const std::vector<int>& labels, double lr,
                         int epochs, int batch, std::uint64_t seed) {
    if (lr <= 0) throw TrainingError("logreg: learning rate must be > 0");
    if (batch < 1) throw TrainingError("logreg: batch size must be >= 1");
    if (labels.size() != X.n_rows) throw TrainingError("logreg: label count does not match rows");
    const int n_classes = require_multiclass(labels, "logreg");

    LogRegModel m;
    m.n_features = X.n_cols;
    m.weights.assign(static_cast<std::size_t>(n_classes),
                     std::vector<double>(X.n_cols + 1, 0.0));

    std::vector<std::size_t> order(X.n_rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    const auto ub = static_cast<std::size_t>(batch);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        fy_shuffle(order, rng);
        for (std::size_t start = 0; start < order.size(); start += ub) {
            const std::size_t end = std::min(order.size(), start + ub);
            std::vector<std::vector<double>> grad(m.weights.size(),
                                                  std::vector<double>(X.n_cols + 1, 0.0));
            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t r = order[bi];
                auto p = linear_scores(X, r, m.weights);
                softmax_inplace(p);
                for (std::size_t c = 0; c < grad.size(); ++c) {
                    const double d = p[c] - (labels[r] == static_cast<int>(c) ? 1.0 : 0.0);
                    for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k)
                        grad[c][X.col_indices[k]] += d * X.values[k];
                    grad[c].back() += d;
                }
            }
            const double step = lr / static_cast<double>(end - start);
            for (std::size_t c = 0; c < m.weights.size(); ++c)
                for (std::size_t j = 0; j < m.weights[c].size(); ++j)
                    m.weights[c][j] -= step * grad[c][j];
        }
    }
    return m;
}

MLPModel mlp_init(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw TrainingError("mlp: need at least input and output layers");
    MLPModel m;
    m.layer_sizes = layer_sizes;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t fan_in = layer_sizes[l];
        const std::size_t fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<double> w(fan_in * fan_out);
        for (double& v : w) v = (2.0 * rand_unit(rng) - 1.0) * limit;
        m.W.push_back(std::move(w));
        m.b.emplace_back(fan_out, 0.0);
    }
    return m;
}

namespace {

struct ForwardState {
    // activations[0] is unused for the sparse input layer; activations[l]
    // holds the post-ReLU (and post-dropout) output of layer l-1.
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> act;   // post-activation per layer
    std::vector<std::vector<double>> mask;  // dropout mask per hidden layer (empty = off)
};

void mlp_forward_row(const MLPModel& m, const SparseMatrix& X, std::size_t r, ForwardState& st,
                     double dropout, std::mt19937_64* rng) {
    const std::size_t n_layers = m.W.size();
    st.pre.assign(n_layers, {});
    st.act.assign(n_layers, {});
    st.mask.assign(n_layers, {});
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t out_dim = m.layer_sizes[l + 1];
        std::vector<double> z = m.b[l];
        if (l == 0) {
            for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k) {
                const double x = X.values[k];
                const double* wrow = m.W[0].data() +
                                     static_cast<std::size_t>(X.col_indices[k]) * out_dim;
                for (std::size_t j = 0; j < out_dim; ++j) z[j] += x * wrow[j];
            }
        } else {
            const auto& a = st.act[l - 1];
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] == 0.0) continue;
                const double* wrow = m.W[l].data() + i * out_dim;
                for (std::size_t j = 0; j < out_dim; ++j) z[j] += a[i] * wrow[j];
            }
        }
        st.pre[l] = z;
        if (l + 1 == n_layers) {
            softmax_inplace(z);
            st.act[l] = std::move(z);
        } else {
            for (double& v : z) v = std::max(v, 0.0);
            if (dropout > 0.0 && rng) {
                std::vector<double> mask(out_dim);
                const double keep = 1.0 - dropout;
                for (std::size_t j = 0; j < out_dim; ++j)
                    mask[j] = (rand_unit(*rng) >= dropout) ? 1.0 / keep : 0.0;
                for (std::size_t j = 0; j < out_dim; ++j) z[j] *= mask[j];
                st.mask[l] = std::move(mask);
            }
            st.act[l] = std::move(z);
        }
    }
}

// Accumulates this row's gradient contributions (unscaled).
void mlp_backward_row(const MLPModel& m, const SparseMatrix& X, std::size_t r, int label,
                      const ForwardState& st, MLPGradients& g) {
    const std::size_t n_layers = m.W.size();
    std::vector<double> delta = st.act[n_layers - 1];  // softmax probs
    delta[static_cast<std::size_t>(label)] -= 1.0;

    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t out_dim = m.layer_sizes[l + 1];
        for (std::size_t j = 0; j < out_dim; ++j) g.db[l][j] += delta[j];
        if (l == 0) {
            for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k) {
                const double x = X.values[k];
                double* grow = g.dW[0].data() +
                               static_cast<std::size_t>(X.col_indices[k]) * out_dim;
                for (std::size_t j = 0; j < out_dim; ++j) grow[j] += x * delta[j];
            }
            break;
        }
        const auto& a = st.act[l - 1];
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) continue;
            double* grow = g.dW[l].data() + i * out_dim;
            for (std::size_t j = 0; j < out_dim; ++j) grow[j] += a[i] * delta[j];
        }
        std::vector<double> prev(a.size(), 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (st.pre[l - 1][i] <= 0.0) continue;  // ReLU gate
            const double* wrow = m.W[l].data() + i * out_dim;
            double s = 0.0;
            for (std::size_t j = 0; j < out_dim; ++j) s += wrow[j] * delta[j];
            if (!st.mask[l - 1].empty()) s *= st.mask[l - 1][i];
            prev[i] = s;
        }
        delta = std::move(prev);
    }
}

MLPGradients zero_grads(const MLPModel& m) {
    MLPGradients g;
    for (std::size_t l = 0; l < m.W.size(); ++l) {
        g.dW.emplace_back(m.W[l].size(), 0.0);
        g.db.emplace_back(m.b[l].size(), 0.0);
    }
    return g;
}

}  // namespace

double mlp_loss(const MLPModel& m, const SparseMatrix& X, const std::vector<int>& labels) {
    ForwardState st;
    double loss = 0.0;
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        mlp_forward_row(m, X, r, st, 0.0, nullptr);
        loss -= std::log(st.act.back()[static_cast<std::size_t>(labels[r])]);
    }
    return loss / static_cast<double>(X.n_rows);
}

MLPGradients mlp_grad(const MLPModel& m, const SparseMatrix& X, const std::vector<int>& labels) {
    MLPGradients g = zero_grads(m);
    ForwardState st;
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        mlp_forward_row(m, X, r, st, 0.0, nullptr);
        mlp_backward_row(m, X, r, labels[r], st, g);
    }
    const double inv = 1.0 / static_cast<double>(X.n_rows);
    for (auto& v : g.dW)
        for (double& x : v) x *= inv;
    for (auto& v : g.db)
        for (double& x : v) x *= inv;
    return g;
}

MLPModel train_mlp(const SparseMatrix& X, const std::vector<int>& labels,
                   const std::vector<std::size_t>& hidden, double lr, double dropout, int epochs,
                   int batch, std::uint64_t seed, std::vector<double>* epoch_loss_out) {
    if (lr <= 0) throw TrainingError("mlp: learning rate must be > 0");
    if (dropout < 0 || dropout >= 1) throw TrainingError("mlp: dropout must be in [0,1)");
    if (batch < 1) throw TrainingError("mlp: batch size must be >= 1");
    for (const std::size_t h : hidden)
        if (h < 1) throw TrainingError("mlp: hidden sizes must be >= 1");
    if (labels.size() != X.n_rows) throw TrainingError("mlp: label count does not match rows");
    const int n_classes = require_multiclass(labels, "mlp");

    std::vector<std::size_t> sizes;
    sizes.push_back(X.n_cols);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(static_cast<std::size_t>(n_classes));
    MLPModel m = mlp_init(sizes, seed);
    m.dropout = dropout;

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    MLPGradients mom = zero_grads(m);
    MLPGradients vel = zero_grads(m);
    std::uint64_t t = 0;

    std::vector<std::size_t> order(X.n_rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed ^ 0x517cc1b727220a95ull);
    ForwardState st;
    const auto ub = static_cast<std::size_t>(batch);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        fy_shuffle(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += ub) {
            const std::size_t end = std::min(order.size(), start + ub);
            MLPGradients g = zero_grads(m);
            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t r = order[bi];
                mlp_forward_row(m, X, r, st, dropout, &rng);
                epoch_loss -= std::log(
                    std::max(st.act.back()[static_cast<std::size_t>(labels[r])], 1e-300));
                mlp_backward_row(m, X, r, labels[r], st, g);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            ++t;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
            for (std::size_t l = 0; l < m.W.size(); ++l) {
                for (std::size_t i = 0; i < m.W[l].size(); ++i) {
                    const double gi = g.dW[l][i] * inv;
                    mom.dW[l][i] = kBeta1 * mom.dW[l][i] + (1.0 - kBeta1) * gi;
                    vel.dW[l][i] = kBeta2 * vel.dW[l][i] + (1.0 - kBeta2) * gi * gi;
                    m.W[l][i] -= lr * (mom.dW[l][i] / bc1) / (std::sqrt(vel.dW[l][i] / bc2) + kEps);
                }
                for (std::size_t i = 0; i < m.b[l].size(); ++i) {
                    const double gi = g.db[l][i] * inv;
                    mom.db[l][i] = kBeta1 * mom.db[l][i] + (1.0 - kBeta1) * gi;
                    vel.db[l][i] = kBeta2 * vel.db[l][i] + (1.0 - kBeta2) * gi * gi;
                    m.b[l][i] -= lr * (mom.db[l][i] / bc1) / (std::sqrt(vel.db[l][i] / bc2) + kEps);
                }
            }
        }
        if (epoch_loss_out)
            epoch_loss_out->push_back(epoch_loss / static_cast<double>(X.n_rows));
    }
    return m;
}

std::vector<int> predict(const LogRegModel& m, const SparseMatrix& X) {
    if (X.n_cols != m.n_features)
        throw TrainingError("logreg predict: expected " + std::to_string(m.n_features) +
                            " features, got " + std::to_string(X.n_cols));
    std::vector<int> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = argmax_low(linear_scores(X, r, m.weights));
    return out;
}

std::vector<std::vector<double>> predict_proba(const LogRegModel& m, const SparseMatrix& X) {
    std::vector<std::vector<double>> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        auto p = linear_scores(X, r, m.weights);
        softmax_inplace(p);
        out[r] = std::move(p);
    }
    return out;
}

std::vector<int> predict(const MLPModel& m, const SparseMatrix& X) {
    if (X.n_cols != m.layer_sizes.front())
        throw TrainingError("mlp predict: expected " + std::to_string(m.layer_sizes.front()) +
                            " features, got " + std::to_string(X.n_cols));
    std::vector<int> out(X.n_rows);
    ForwardState st;
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        mlp_forward_row(m, X, r, st, 0.0, nullptr);
        out[r] = argmax_low(st.act.back());
    }
    return out;
}

std::vector<std::vector<double>> predict_proba(const MLPModel& m, const SparseMatrix& X) {
    std::vector<std::vector<double>> out(X.n_rows);
    ForwardState st;
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        mlp_forward_row(m, X, r, st, 0.0, nullptr);
        out[r] = st.act.back();
    }
    return out;
}

}  // namespace featforge
