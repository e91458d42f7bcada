#include <algorithm>
#include <cmath>
#include <set>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"

namespace featforge {

namespace {

// Dot with the bias-augmented row [x_i; 1].
double row_score(const SparseMatrix& X, std::size_t r, const std::vector<double>& w) {
    double s = w.back();
    for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k)
        s += X.values[k] * w[X.col_indices[k]];
    return s;
}

void row_axpy(const SparseMatrix& X, std::size_t r, double a, std::vector<double>& w) {
    for (std::size_t k = X.row_offsets[r]; k < X.row_offsets[r + 1]; ++k)
        w[X.col_indices[k]] += a * X.values[k];
    w.back() += a;
}

int distinct_classes(const std::vector<int>& labels) {
    std::set<int> s(labels.begin(), labels.end());
    return static_cast<int>(s.size());
}

}  // namespace

LinearSVMModel train_linear_svm(const SparseMatrix& X, const std::vector<int>& labels, double C,
                                double tol, int max_epochs, std::uint64_t seed) {
    if (C <= 0) throw TrainingError("svm: C must be > 0");
    if (labels.size() != X.n_rows) throw TrainingError("svm: label count does not match rows");
    if (distinct_classes(labels) < 2) throw TrainingError("svm: training data has a single class");

    const int n_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    const std::size_t n = X.n_rows;

    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 1.0;  // the implicit bias feature
        for (std::size_t k = X.row_offsets[i]; k < X.row_offsets[i + 1]; ++k)
            q += X.values[k] * X.values[k];
        qii[i] = q;
    }

    LinearSVMModel model;
    model.n_features = X.n_cols;
    model.C = C;
    model.weights.assign(static_cast<std::size_t>(n_classes),
                         std::vector<double>(X.n_cols + 1, 0.0));
    model.dual_objective.resize(static_cast<std::size_t>(n_classes));

    for (int c = 0; c < n_classes; ++c) {
        std::vector<double>& w = model.weights[static_cast<std::size_t>(c)];
        std::vector<double> alpha(n, 0.0);
        std::vector<signed char> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = (labels[i] == c) ? 1 : -1;

        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(c) * 0x9E3779B97F4A7C15ull);

        for (int epoch = 0; epoch < max_epochs; ++epoch) {
            fy_shuffle(order, rng);
            double max_pg = 0.0;
            for (const std::size_t i : order) {
                const double g = y[i] * row_score(X, i, w) - 1.0;
                double pg = g;
                if (alpha[i] == 0.0) pg = std::min(g, 0.0);
                else if (alpha[i] == C) pg = std::max(g, 0.0);
                max_pg = std::max(max_pg, std::fabs(pg));
                if (pg != 0.0) {
                    const double old = alpha[i];
                    alpha[i] = std::clamp(old - g / qii[i], 0.0, C);
                    if (alpha[i] != old) row_axpy(X, i, (alpha[i] - old) * y[i], w);
                }
            }
            double dual = 0.0;
            for (const double wv : w) dual += wv * wv;
            dual *= 0.5;
            for (const double a : alpha) dual -= a;
            model.dual_objective[static_cast<std::size_t>(c)].push_back(dual);
            if (max_pg < tol) break;
        }
    }
    return model;
}

std::vector<double> svm_c_grid() {
    std::vector<double> grid(10);
    for (int k = 0; k < 10; ++k)
        grid[static_cast<std::size_t>(k)] = std::pow(2.0, -5.0 + 10.0 * k / 9.0);
    return grid;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds) {
    std::map<int, int> seen;
    std::vector<int> fold_of(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) fold_of[i] = seen[labels[i]]++ % folds;
    return fold_of;
}

GridSearchResult grid_search_C(const SparseMatrix& X, const std::vector<int>& labels, int folds,
                               double tol, int max_epochs, std::uint64_t seed) {
    if (folds < 2) throw TrainingError("grid search: folds must be >= 2");
    if (X.n_rows < static_cast<std::size_t>(folds))
        throw TrainingError("grid search: fewer samples (" + std::to_string(X.n_rows) +
                            ") than folds (" + std::to_string(folds) + ")");

    const auto fold_of = stratified_folds(labels, folds);
    std::vector<std::vector<std::size_t>> train_rows(static_cast<std::size_t>(folds));
    std::vector<std::vector<std::size_t>> held_rows(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (int f = 0; f < folds; ++f)
            (fold_of[i] == f ? held_rows : train_rows)[static_cast<std::size_t>(f)].push_back(i);

    GridSearchResult result;
    double best_acc = -1.0;
    for (const double c : svm_c_grid()) {
        std::size_t correct = 0;
        for (int f = 0; f < folds; ++f) {
            const auto& tr = train_rows[static_cast<std::size_t>(f)];
            const auto& ho = held_rows[static_cast<std::size_t>(f)];
            if (ho.empty()) continue;
            std::vector<int> tr_labels(tr.size());
            for (std::size_t i = 0; i < tr.size(); ++i) tr_labels[i] = labels[tr[i]];
            const auto model =
                train_linear_svm(row_slice(X, tr), tr_labels, c, tol, max_epochs, seed);
            const auto preds = predict(model, row_slice(X, ho));
            for (std::size_t i = 0; i < ho.size(); ++i)
                if (preds[i] == labels[ho[i]]) ++correct;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(X.n_rows);
        result.scores.emplace_back(c, acc);
        if (acc > best_acc) {  // ties keep the earlier (smaller) C
            best_acc = acc;
            result.best_C = c;
        }
    }
    result.model = train_linear_svm(X, labels, result.best_C, tol, max_epochs, seed);
    return result;
}

std::vector<int> predict(const LinearSVMModel& m, const SparseMatrix& X) {
    if (X.n_cols != m.n_features)
        throw TrainingError("svm predict: expected " + std::to_string(m.n_features) +
                            " features, got " + std::to_string(X.n_cols));
    std::vector<int> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) {
        int best = 0;
        double best_score = row_score(X, r, m.weights[0]);
        for (std::size_t c = 1; c < m.weights.size(); ++c) {
            const double s = row_score(X, r, m.weights[c]);
            if (s > best_score) {
                best_score = s;
                best = static_cast<int>(c);
            }
        }
        out[r] = best;
    }
    return out;
}

}  // namespace featforge
