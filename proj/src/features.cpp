#include "featforge/features.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "featforge/common.hpp"

namespace featforge {

ExtractorRegistry& ExtractorRegistry::instance() {
    static ExtractorRegistry registry;
    return registry;
}

void ExtractorRegistry::add(ExtractorEntry entry) {
    for (const auto& e : entries_)
        if (e.feature_id == entry.feature_id)
            throw std::logic_error("feature id " + std::to_string(entry.feature_id) +
                                   " registered twice (" + e.name + ", " + entry.name + ")");
    entries_.push_back(std::move(entry));
    std::sort(entries_.begin(), entries_.end(),
              [](const ExtractorEntry& a, const ExtractorEntry& b) {
                  return a.feature_id < b.feature_id;
              });
}

const ExtractorEntry& ExtractorRegistry::find(int feature_id) const {
    for (const auto& e : entries_)
        if (e.feature_id == feature_id) return e;
    throw ExtractionError("unknown feature id " + std::to_string(feature_id));
}

std::vector<int> ExtractorRegistry::ids() const {
    std::vector<int> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.feature_id);
    return out;
}

std::map<std::string, std::string> parse_args(std::string_view raw) {
    std::map<std::string, std::string> args;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i;
        if (i >= raw.size()) break;
        std::size_t j = i;
        while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t') ++j;
        const std::string_view tok = raw.substr(i, j - i);
        i = j;
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ExtractionError("feature args: expected key=value, got '" + std::string(tok) +
                                  "'");
        const std::string key{tok.substr(0, eq)};
        if (args.count(key)) throw ExtractionError("feature args: duplicate key '" + key + "'");
        args[key] = std::string(tok.substr(eq + 1));
    }
    return args;
}

ExtractionResult extract_all(const RunConfig& cfg, const Dataset& data) {
    const auto& registry = ExtractorRegistry::instance();

    struct Task {
        const ExtractorEntry* entry;
        std::map<std::string, std::string> args;
        std::string raw_args;
    };
    std::vector<Task> tasks;
    tasks.reserve(cfg.features.size());
    std::vector<PreprocessRequest> requests;
    for (const auto& req : cfg.features) {
        const auto& entry = registry.find(req.feature_id);
        try {
            Task task{&entry, parse_args(req.args), req.args};
            const auto wanted = entry.request_fn(RequestContext{task.args, cfg});
            requests.insert(requests.end(), wanted.begin(), wanted.end());
            tasks.push_back(std::move(task));
        } catch (const Error& e) {
            throw Error(e.code(), "feature '" + entry.name + "': " + e.what());
        }
    }

    ExtractionResult result;
    result.cache = fulfill(requests, cfg, data);

    std::vector<FeatureBlock> blocks(tasks.size());
    std::vector<double> seconds(tasks.size(), 0.0);
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const auto start = std::chrono::steady_clock::now();
            try {
                blocks[i] = tasks[i].entry->extract_fn(ExtractorContext{
                    result.cache, data, tasks[i].args, cfg, cfg.settings.seed});
            } catch (...) {
                errors[i] = std::current_exception();
            }
            seconds[i] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.settings.threads, 1)),
                              std::max<std::size_t>(tasks.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            throw Error(e.code(), "feature '" + tasks[i].entry->name + "': " + e.what());
        } catch (const std::exception& e) {
            throw ExtractionError("feature '" + tasks[i].entry->name + "': " + e.what());
        }
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& b = blocks[i];
        if (b.train.n_rows != data.train_sentences.size() ||
            b.test.n_rows != data.test_sentences.size())
            throw ExtractionError("feature '" + tasks[i].entry->name + "' produced " +
                                  std::to_string(b.train.n_rows) + "/" +
                                  std::to_string(b.test.n_rows) + " rows for a " +
                                  std::to_string(data.train_sentences.size()) + "/" +
                                  std::to_string(data.test_sentences.size()) + " dataset");
        if (b.descriptor.size() != b.train.n_cols || b.train.n_cols != b.test.n_cols)
            throw ExtractionError("feature '" + tasks[i].entry->name +
                                  "': descriptor length does not match column count");
        result.timings.push_back(
            {b.feature_id, tasks[i].entry->name, tasks[i].raw_args, seconds[i], b.train.n_cols});
    }

    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return blocks[a].feature_id < blocks[b].feature_id;
    });
    std::vector<FeatureBlock> sorted;
    sorted.reserve(blocks.size());
    for (const std::size_t i : order) sorted.push_back(std::move(blocks[i]));
    result.merged = hstack(sorted);
    return result;
}

}  // namespace featforge
