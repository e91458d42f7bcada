#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "featforge/sparse.hpp"

namespace featforge {

// One-vs-rest L1-loss linear SVM trained by dual coordinate descent. Each
// class weight vector carries an implicit constant-1 bias feature in its
// last slot.
struct LinearSVMModel {
    std::size_t n_features = 0;
    double C = 1.0;
    std::vector<std::vector<double>> weights;          // [class][n_features + 1]
    std::vector<std::vector<double>> dual_objective;   // [class][epoch], non-increasing
};

LinearSVMModel train_linear_svm(const SparseMatrix& X, const std::vector<int>& labels, double C,
                                double tol, int max_epochs, std::uint64_t seed);

// The 10 grid candidates 2^(-5 + 10k/9), k = 0..9.
std::vector<double> svm_c_grid();

struct GridSearchResult {
    double best_C = 0;
    std::vector<std::pair<double, double>> scores;  // (C, pooled CV accuracy)
    LinearSVMModel model;                           // retrained on the full data
};

// Deterministic stratified assignment: the j-th row of each class goes to
// fold j % folds.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds);

GridSearchResult grid_search_C(const SparseMatrix& X, const std::vector<int>& labels, int folds,
                               double tol, int max_epochs, std::uint64_t seed);

// Softmax regression; weights[class] has the bias in its last slot.
struct LogRegModel {
    std::size_t n_features = 0;
    std::vector<std::vector<double>> weights;  // [class][n_features + 1]
};

double logreg_loss(const LogRegModel& m, const SparseMatrix& X, const std::vector<int>& labels);
std::vector<std::vector<double>> logreg_grad(const LogRegModel& m, const SparseMatrix& X,
                                             const std::vector<int>& labels);
LogRegModel train_logreg(const SparseMatrix& X, const std::vector<int>& labels, double lr,
                         int epochs, int batch, std::uint64_t seed);

// Fully connected ReLU net with softmax output. Weight matrices are row-major
// by input index so the first layer can consume sparse rows directly.
struct MLPModel {
    std::vector<std::size_t> layer_sizes;  // input, hidden..., classes
    std::vector<std::vector<double>> W;    // [layer][in * out]
    std::vector<std::vector<double>> b;    // [layer][out]
    double dropout = 0.0;
};

MLPModel mlp_init(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

struct MLPGradients {
    std::vector<std::vector<double>> dW;
    std::vector<std::vector<double>> db;
};

// Mean cross-entropy and its gradients with dropout disabled (used by the
// finite-difference checks).
double mlp_loss(const MLPModel& m, const SparseMatrix& X, const std::vector<int>& labels);
MLPGradients mlp_grad(const MLPModel& m, const SparseMatrix& X, const std::vector<int>& labels);

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) over shuffled mini-batches;
// inverted dropout after each hidden layer during training only. If
// epoch_loss_out is given, the mean training loss of each epoch is appended.
MLPModel train_mlp(const SparseMatrix& X, const std::vector<int>& labels,
                   const std::vector<std::size_t>& hidden, double lr, double dropout, int epochs,
                   int batch, std::uint64_t seed, std::vector<double>* epoch_loss_out = nullptr);

// Averaged-embedding softmax classifier over tokens plus hashed word-bigram
// buckets (bucket id = vocab size + fnv1a32(tok1 0x1f tok2) % buckets).
struct SupervisedEmbeddingModel {
    std::size_t dim = 0;
    std::size_t buckets = 0;
    std::size_t n_classes = 0;
    std::vector<std::string> vocab;  // sorted training tokens
    std::map<std::string, std::uint32_t> vocab_ids;
    std::vector<double> E;     // (vocab + buckets) x dim, row-major
    std::vector<double> Wout;  // dim x n_classes, row-major
};

SupervisedEmbeddingModel train_supervised_embedding(
    const std::vector<std::vector<std::string>>& sentences, const std::vector<int>& labels,
    std::size_t n_classes, std::size_t dim, int epochs, double lr, std::size_t buckets,
    std::uint64_t seed);

// Mean of embedding rows over the sentence's known tokens and bigram buckets.
std::vector<double> sentence_repr(const SupervisedEmbeddingModel& m,
                                  const std::vector<std::string>& tokens);
std::vector<double> predict_proba(const SupervisedEmbeddingModel& m,
                                  const std::vector<std::string>& tokens);

std::vector<int> predict(const LinearSVMModel& m, const SparseMatrix& X);
std::vector<int> predict(const LogRegModel& m, const SparseMatrix& X);
std::vector<int> predict(const MLPModel& m, const SparseMatrix& X);
std::vector<int> predict(const SupervisedEmbeddingModel& m,
                         const std::vector<std::vector<std::string>>& sentences);

std::vector<std::vector<double>> predict_proba(const LogRegModel& m, const SparseMatrix& X);
std::vector<std::vector<double>> predict_proba(const MLPModel& m, const SparseMatrix& X);

// Fraction of exact matches.
double evaluate(const std::vector<int>& predictions, const std::vector<int>& gold);

struct TrainReport {
    std::string classifier;
    std::map<std::string, std::string> hyperparams;
    double train_accuracy = 0;
    double test_accuracy = 0;
    double wall_seconds = 0;
};

struct ClassifierContext {
    const SparseMatrix& train;
    const SparseMatrix& test;
    const std::vector<int>& train_labels;
    const std::vector<int>& test_labels;
    std::size_t n_classes;
    const std::vector<std::vector<std::string>>& train_tokens;
    const std::vector<std::vector<std::string>>& test_tokens;
    const std::map<std::string, std::string>& params;
    std::uint64_t seed;
};

struct ClassifierEntry {
    std::string name;
    std::string params_help;
    std::function<TrainReport(const ClassifierContext&)> train;
};

class ClassifierRegistry {
public:
    static ClassifierRegistry& instance();

    void add(ClassifierEntry entry);  // duplicate name -> std::logic_error
    const ClassifierEntry& find(const std::string& name) const;
    const std::vector<ClassifierEntry>& entries() const { return entries_; }
    std::vector<std::string> names() const;

private:
    std::vector<ClassifierEntry> entries_;
};

}  // namespace featforge
