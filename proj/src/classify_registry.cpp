#include <algorithm>
#include <charconv>
#include <chrono>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"

namespace featforge {

double evaluate(const std::vector<int>& predictions, const std::vector<int>& gold) {
    if (predictions.size() != gold.size())
        throw TrainingError("evaluate: " + std::to_string(predictions.size()) +
                            " predictions vs " + std::to_string(gold.size()) + " gold labels");
    if (gold.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (predictions[i] == gold[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

ClassifierRegistry& ClassifierRegistry::instance() {
    static ClassifierRegistry registry;
    return registry;
}

void ClassifierRegistry::add(ClassifierEntry entry) {
    for (const auto& e : entries_)
        if (e.name == entry.name)
            throw std::logic_error("classifier '" + entry.name + "' registered twice");
    entries_.push_back(std::move(entry));
    std::sort(entries_.begin(), entries_.end(),
              [](const ClassifierEntry& a, const ClassifierEntry& b) { return a.name < b.name; });
}

const ClassifierEntry& ClassifierRegistry::find(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e;
    throw TrainingError("unknown classifier '" + name + "'");
}

std::vector<std::string> ClassifierRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

namespace {

using Params = std::map<std::string, std::string>;

double param_real(const Params& p, const char* key, double fallback) {
    const auto it = p.find(key);
    if (it == p.end()) return fallback;
    double v = 0;
    const auto res = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
        throw TrainingError(std::string("parameter ") + key + ": expected a number, got '" +
                            it->second + "'");
    return v;
}

long param_int(const Params& p, const char* key, long fallback) {
    const auto it = p.find(key);
    if (it == p.end()) return fallback;
    long v = 0;
    const auto res = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
        throw TrainingError(std::string("parameter ") + key + ": expected an integer, got '" +
                            it->second + "'");
    return v;
}

std::vector<std::size_t> param_sizes(const Params& p, const char* key,
                                     std::vector<std::size_t> fallback) {
    const auto it = p.find(key);
    if (it == p.end()) return fallback;
    std::vector<std::size_t> out;
    std::size_t start = 0;
    const std::string& s = it->second;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        long v = 0;
        const auto res = std::from_chars(s.data() + start, s.data() + comma, v);
        if (res.ec != std::errc{} || res.ptr != s.data() + comma || v < 1)
            throw TrainingError(std::string("parameter ") + key +
                                ": expected comma-separated sizes, got '" + s + "'");
        out.push_back(static_cast<std::size_t>(v));
        start = comma + 1;
    }
    return out;
}

void reject_unknown(const Params& p, std::initializer_list<const char*> known,
                    const char* who) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* name : known)
            if (k == name) ok = true;
        if (!ok)
            throw TrainingError(std::string(who) + ": unknown parameter '" + k + "'");
    }
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

TrainReport train_svm_entry(const ClassifierContext& ctx) {
    reject_unknown(ctx.params, {"C", "folds", "tol", "max_epochs"}, "svm");
    const double tol = param_real(ctx.params, "tol", 1e-3);
    const int max_epochs = static_cast<int>(param_int(ctx.params, "max_epochs", 1000));
    const int folds = static_cast<int>(param_int(ctx.params, "folds", 3));

    Timer timer;
    TrainReport report;
    report.classifier = "svm";
    LinearSVMModel model;
    if (ctx.params.count("C")) {
        const double c = param_real(ctx.params, "C", 1.0);
        model = train_linear_svm(ctx.train, ctx.train_labels, c, tol, max_epochs, ctx.seed);
        report.hyperparams["C"] = format_double(c);
    } else {
        auto grid = grid_search_C(ctx.train, ctx.train_labels, folds, tol, max_epochs, ctx.seed);
        model = std::move(grid.model);
        report.hyperparams["C"] = format_double(grid.best_C);
        report.hyperparams["folds"] = std::to_string(folds);
    }
    report.hyperparams["tol"] = format_double(tol);
    report.hyperparams["max_epochs"] = std::to_string(max_epochs);
    report.train_accuracy = evaluate(predict(model, ctx.train), ctx.train_labels);
    report.test_accuracy = evaluate(predict(model, ctx.test), ctx.test_labels);
    report.wall_seconds = timer.seconds();
    return report;
}

TrainReport train_logreg_entry(const ClassifierContext& ctx) {
    reject_unknown(ctx.params, {"lr", "epochs", "batch"}, "logreg");
    const double lr = param_real(ctx.params, "lr", 0.1);
    const int epochs = static_cast<int>(param_int(ctx.params, "epochs", 50));
    const int batch = static_cast<int>(param_int(ctx.params, "batch", 256));

    Timer timer;
    const auto model = train_logreg(ctx.train, ctx.train_labels, lr, epochs, batch, ctx.seed);
    TrainReport report;
    report.classifier = "logreg";
    report.hyperparams = {{"lr", format_double(lr)},
                          {"epochs", std::to_string(epochs)},
                          {"batch", std::to_string(batch)}};
    report.train_accuracy = evaluate(predict(model, ctx.train), ctx.train_labels);
    report.test_accuracy = evaluate(predict(model, ctx.test), ctx.test_labels);
    report.wall_seconds = timer.seconds();
    return report;
}

TrainReport train_mlp_entry(const ClassifierContext& ctx) {
    reject_unknown(ctx.params, {"hidden", "lr", "dropout", "epochs", "batch"}, "mlp");
    const auto hidden = param_sizes(ctx.params, "hidden", {100});
    const double lr = param_real(ctx.params, "lr", 0.001);
    const double dropout = param_real(ctx.params, "dropout", 0.3);
    const int epochs = static_cast<int>(param_int(ctx.params, "epochs", 5));
    const int batch = static_cast<int>(param_int(ctx.params, "batch", 256));

    Timer timer;
    const auto model =
        train_mlp(ctx.train, ctx.train_labels, hidden, lr, dropout, epochs, batch, ctx.seed);
    TrainReport report;
    report.classifier = "mlp";
    std::string hidden_str;
    for (std::size_t i = 0; i < hidden.size(); ++i)
        hidden_str += (i ? "," : "") + std::to_string(hidden[i]);
    report.hyperparams = {{"hidden", hidden_str},
                          {"lr", format_double(lr)},
                          {"dropout", format_double(dropout)},
                          {"epochs", std::to_string(epochs)},
                          {"batch", std::to_string(batch)}};
    report.train_accuracy = evaluate(predict(model, ctx.train), ctx.train_labels);
    report.test_accuracy = evaluate(predict(model, ctx.test), ctx.test_labels);
    report.wall_seconds = timer.seconds();
    return report;
}

TrainReport train_embed_entry(const ClassifierContext& ctx) {
    reject_unknown(ctx.params, {"dim", "epochs", "lr", "buckets"}, "supervised-embedding");
    const auto dim = static_cast<std::size_t>(param_int(ctx.params, "dim", 10));
    const int epochs = static_cast<int>(param_int(ctx.params, "epochs", 5));
    const double lr = param_real(ctx.params, "lr", 0.1);
    const auto buckets = static_cast<std::size_t>(param_int(ctx.params, "buckets", 1000000));

    Timer timer;
    const auto model = train_supervised_embedding(ctx.train_tokens, ctx.train_labels,
                                                  ctx.n_classes, dim, epochs, lr, buckets,
                                                  ctx.seed);
    TrainReport report;
    report.classifier = "supervised-embedding";
    report.hyperparams = {{"dim", std::to_string(dim)},
                          {"epochs", std::to_string(epochs)},
                          {"lr", format_double(lr)},
                          {"buckets", std::to_string(buckets)}};
    report.train_accuracy = evaluate(predict(model, ctx.train_tokens), ctx.train_labels);
    report.test_accuracy = evaluate(predict(model, ctx.test_tokens), ctx.test_labels);
    report.wall_seconds = timer.seconds();
    return report;
}

const bool registered = [] {
    auto& r = ClassifierRegistry::instance();
    r.add({"svm", "C folds tol max_epochs (grid search over C when C is omitted)",
           train_svm_entry});
    r.add({"logreg", "lr epochs batch", train_logreg_entry});
    r.add({"mlp", "hidden lr dropout epochs batch", train_mlp_entry});
    r.add({"supervised-embedding", "dim epochs lr buckets", train_embed_entry});
    return true;
}();

}  // namespace

}  // namespace featforge
