// Release checklist. Each check is end-to-end, has a hard tolerance or time
// budget, and prints exactly one [PASS]/[FAIL]/[SKIP] line. The process exits
// nonzero if any check fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"
#include "featforge/controller.hpp"
#include "featforge/export.hpp"
#include "featforge/features.hpp"
#include "featforge/ngram_lm.hpp"
#include "featforge/sparse.hpp"
#include "featforge/text.hpp"
#include "kn_oracle.hpp"
#include "temp_dir.hpp"

#ifndef FEATFORGE_TEST_DATA_DIR
#error "FEATFORGE_TEST_DATA_DIR must point at the tests directory"
#endif

using namespace featforge;

namespace {

enum class Status { Pass, Fail, Skip };

struct Result {
    Status status = Status::Fail;
    std::string detail;
};

Result pass(std::string detail = "") { return {Status::Pass, std::move(detail)}; }
Result fail(std::string detail) { return {Status::Fail, std::move(detail)}; }
Result skip(std::string detail) { return {Status::Skip, std::move(detail)}; }

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double row_sum(const SparseMatrix& m, std::size_t r) {
    double sum = 0;
    for (std::size_t i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i) sum += m.values[i];
    return sum;
}

// ---------------------------------------------------------------------------
// 1. Kneser-Ney probabilities against an independent brute-force reference.

Result check_kn_reference() {
    Stopwatch watch;
    const std::vector<std::vector<std::string>> corpus = {
        {"the", "cat", "sat"},          {"the", "dog", "ran"},
        {"a", "cat", "ran", "far"},     {"the", "cat", "sat", "down"},
        {"a", "dog", "sat"},            {"the", "dog", "sat", "far"},
        {"a", "cat", "sat"},            {"the", "dog", "ran", "down"},
        {"a", "dog", "ran", "far"},     {"the", "cat", "ran", "down"},
    };
    const auto model = train_kn(corpus, 2);
    const auto oracle = kn_oracle::build_oracle(corpus, 2);

    const auto fold = [&](const std::string& t) {
        const auto& universe = oracle.unigram_universe;
        if (t == "<s>" || std::find(universe.begin(), universe.end(), t) != universe.end())
            return t;
        return std::string("<unk>");
    };

    std::vector<std::string> probes = {"the", "a",   "cat",  "dog",   "sat",   "ran",
                                       "far", "down", "<s>", "</s>",  "<unk>", "zebra"};
    double worst = 0;
    std::size_t compared = 0;
    std::vector<std::vector<std::string>> contexts = {{}};
    for (const auto& w : probes) contexts.push_back({w});
    for (const auto& ctx : contexts) {
        for (const auto& target : probes) {
            std::vector<std::string> folded_ctx;
            for (const auto& w : ctx) folded_ctx.push_back(fold(w));
            const double got = model.cond_prob(ctx, target);
            const double want = kn_oracle::oracle_prob(oracle, folded_ctx, fold(target));
            worst = std::max(worst, std::abs(got - want));
            ++compared;
        }
    }
    const double elapsed = watch.seconds();
    if (worst >= 1e-9) return fail("max abs error " + fmt(worst) + " >= 1e-9");
    if (elapsed >= 1.0) return fail("took " + fmt(elapsed) + "s, budget 1s");
    return pass(std::to_string(compared) + " probabilities, max err " + fmt(worst) + ", " +
                fmt(elapsed) + "s");
}

// ---------------------------------------------------------------------------
// 2. Conditional distributions sum to one on random corpora, orders 1-3.

Result check_kn_normalization() {
    Stopwatch watch;
    std::mt19937_64 rng(20240815);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e", "f"};
    double worst = 0;
    for (int round = 0; round < 100; ++round) {
        std::vector<std::vector<std::string>> corpus(2 + rng() % 7);
        for (auto& sent : corpus) {
            sent.resize(rng() % 8);
            for (auto& t : sent) t = alphabet[rng() % alphabet.size()];
        }
        for (int order = 1; order <= 3; ++order) {
            const auto model = train_kn(corpus, order);
            std::vector<std::vector<std::string>> contexts = {
                {}, {"a"}, {"f", "a"}, {"<unk>"}, {"b", "<unk>"}, {"<s>"}};
            for (auto ctx : contexts) {
                if (ctx.size() > static_cast<std::size_t>(order - 1))
                    ctx.erase(ctx.begin(), ctx.end() - (order - 1));
                double sum = 0;
                for (std::size_t id = 1; id < model.vocab.size(); ++id)
                    sum += model.cond_prob(ctx, model.vocab[id]);
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    const double elapsed = watch.seconds();
    if (worst >= 1e-6) return fail("worst |sum-1| " + fmt(worst) + " >= 1e-6");
    if (elapsed >= 10.0) return fail("took " + fmt(elapsed) + "s, budget 10s");
    return pass("300 models, worst |sum-1| " + fmt(worst) + ", " + fmt(elapsed) + "s");
}

// ---------------------------------------------------------------------------
// 3. Perplexity identities on random sentences.

Result check_lm_identities() {
    std::mt19937_64 rng(77);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d", "zzz"};
    std::vector<std::vector<std::string>> corpus(12);
    for (auto& sent : corpus) {
        sent.resize(1 + rng() % 6);
        for (auto& t : sent) t = alphabet[rng() % 4];
    }
    const auto model = train_kn(corpus, 3);

    double worst = 0;
    for (int round = 0; round < 50; ++round) {
        std::vector<std::string> sent(rng() % 10);
        for (auto& t : sent) t = alphabet[rng() % alphabet.size()];
        const double lp = logprob10(model, sent);
        const double ppl = perplexity(model, sent);
        const double bits = surprisal_bits(model, sent);
        const double n1 = static_cast<double>(sent.size()) + 1.0;
        worst = std::max(worst, std::abs(ppl - std::pow(2.0, bits)));
        worst = std::max(worst, std::abs(ppl - std::pow(10.0, -lp / n1)));
        if (!(lp < 0)) return fail("log probability not negative");
    }
    if (worst >= 1e-9) return fail("worst identity error " + fmt(worst) + " >= 1e-9");
    return pass("50 sentences, worst identity error " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 4. Finite differences confirm the softmax and MLP gradients.

Result check_gradients() {
    Stopwatch watch;
    std::mt19937_64 rng(5150);
    const auto random_sparse = [&](std::size_t rows, std::size_t cols) {
        std::vector<Triplet> trips;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (rand_unit(rng) < 0.7)
                    trips.push_back({r, static_cast<std::uint32_t>(c),
                                     (rand_unit(rng) * 2 - 1) * 1.5});
        return sparse_from_triplets(rows, cols, trips);
    };
    const double h = 1e-6;
    double worst = 0;
    const auto rel = [](double fd, double an) {
        return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
    };

    {  // softmax regression
        const auto X = random_sparse(12, 5);
        std::vector<int> labels(12);
        for (auto& l : labels) l = static_cast<int>(rng() % 3);
        LogRegModel m;
        m.n_features = 5;
        m.weights.assign(3, std::vector<double>(6));
        for (auto& row : m.weights)
            for (auto& w : row) w = rand_unit(rng) - 0.5;
        const auto grad = logreg_grad(m, X, labels);
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t j = 0; j < 6; ++j) {
                auto probe = m;
                probe.weights[c][j] = m.weights[c][j] + h;
                const double up = logreg_loss(probe, X, labels);
                probe.weights[c][j] = m.weights[c][j] - h;
                const double down = logreg_loss(probe, X, labels);
                worst = std::max(worst, rel((up - down) / (2 * h), grad[c][j]));
            }
    }

    {  // 5-4-3 MLP
        const auto X = random_sparse(8, 5);
        std::vector<int> labels(8);
        for (auto& l : labels) l = static_cast<int>(rng() % 3);
        const auto m = mlp_init({5, 4, 3}, 7);
        const auto grads = mlp_grad(m, X, labels);
        for (std::size_t layer = 0; layer < m.W.size(); ++layer) {
            for (std::size_t i = 0; i < m.W[layer].size(); ++i) {
                auto probe = m;
                probe.W[layer][i] = m.W[layer][i] + h;
                const double up = mlp_loss(probe, X, labels);
                probe.W[layer][i] = m.W[layer][i] - h;
                const double down = mlp_loss(probe, X, labels);
                worst = std::max(worst, rel((up - down) / (2 * h), grads.dW[layer][i]));
            }
            for (std::size_t i = 0; i < m.b[layer].size(); ++i) {
                auto probe = m;
                probe.b[layer][i] = m.b[layer][i] + h;
                const double up = mlp_loss(probe, X, labels);
                probe.b[layer][i] = m.b[layer][i] - h;
                const double down = mlp_loss(probe, X, labels);
                worst = std::max(worst, rel((up - down) / (2 * h), grads.db[layer][i]));
            }
        }
    }

    const double elapsed = watch.seconds();
    if (worst >= 1e-4) return fail("worst relative error " + fmt(worst) + " >= 1e-4");
    if (elapsed >= 5.0) return fail("took " + fmt(elapsed) + "s, budget 5s");
    return pass("worst relative error " + fmt(worst) + ", " + fmt(elapsed) + "s");
}

// ---------------------------------------------------------------------------
// 5. The SVM recovers the analytic two-point solution.

Result check_svm_analytic() {
    const auto X = sparse_from_triplets(2, 1, {{0, 0, 1.0}, {1, 0, -1.0}});
    const auto model = train_linear_svm(X, {0, 1}, 1.0, 1e-10, 2000, 42);
    if (std::abs(model.weights[0][0] - 1.0) >= 1e-3)
        return fail("w = " + fmt(model.weights[0][0]) + ", want 1.0 within 1e-3");
    for (const auto& history : model.dual_objective)
        for (std::size_t e = 1; e < history.size(); ++e)
            if (history[e] > history[e - 1] + 1e-9)
                return fail("dual objective increased at epoch " + std::to_string(e));
    return pass("w = " + fmt(model.weights[0][0]) + ", dual objective monotone");
}

// ---------------------------------------------------------------------------
// 6. The C grid is the documented 10-point lattice.

Result check_c_grid() {
    const auto grid = svm_c_grid();
    if (grid.size() != 10) return fail("grid has " + std::to_string(grid.size()) + " values");
    if (grid.front() != std::pow(2.0, -5.0) || grid.back() != std::pow(2.0, 5.0))
        return fail("endpoints are not exactly 2^-5 and 2^5");
    for (int k = 0; k < 10; ++k)
        if (grid[static_cast<std::size_t>(k)] != std::pow(2.0, -5.0 + 10.0 * k / 9.0))
            return fail("grid[" + std::to_string(k) + "] off lattice");
    return pass("10 values from 2^-5 to 2^5");
}

// ---------------------------------------------------------------------------
// 7. Feature hashing matches a frozen FNV-1a table and is thread-stable.

struct HashGolden {
    const char* display;  // space-separated n-gram
    std::uint32_t column; // hash % 97
    double sign;
};

// Computed offline with an independent FNV-1a implementation (validated
// against the published test vectors for "a" and "foobar").
constexpr HashGolden kHashGolden[] = {
    {"the", 1, -1},          {"of", 4, +1},          {"and", 33, +1},
    {"to", 10, +1},          {"in", 15, +1},         {"market", 64, -1},
    {"game", 70, +1},        {"president", 76, -1},  {"technology", 10, +1},
    {"science", 51, +1},     {"stocks", 93, +1},     {"won", 25, +1},
    {"of the", 14, -1},      {"in the", 27, +1},     {"to the", 37, -1},
    {"on monday", 52, +1},   {"new york", 35, -1},   {"wall street", 11, -1},
    {"world cup", 45, -1},   {"prime minister", 22, -1},
};

Result check_feature_hashing() {
    // Direct hash equivalence.
    for (const auto& g : kHashGolden) {
        std::string key = g.display;
        std::replace(key.begin(), key.end(), ' ', '\x1f');
        const std::uint32_t h = fnv1a32(key);
        if (h % 97 != g.column || ((h & 0x80000000u) ? -1.0 : 1.0) != g.sign)
            return fail(std::string("hash mismatch for '") + g.display + "'");
    }

    // End-to-end: one sentence per n-gram, 97 buckets, single signed hit.
    const auto run_level = [&](bool bigrams) -> std::string {
        Dataset data;
        std::vector<const HashGolden*> grams;
        for (const auto& g : kHashGolden)
            if ((std::string(g.display).find(' ') != std::string::npos) == bigrams)
                grams.push_back(&g);
        for (const auto* g : grams) data.train_sentences.push_back(g->display);
        data.test_sentences = {grams.front()->display};
        data.train_labels.assign(data.train_sentences.size(), 0);
        data.test_labels = {0};
        data.label_names = {"x"};
        RunConfig cfg;
        cfg.features = {{3, bigrams ? "n=2 cutoff=1 dims=97" : "n=1 cutoff=1 dims=97"}};
        const auto result = extract_all(cfg, data);
        const auto& m = result.merged.train;
        if (m.n_cols != 97) return "expected 97 columns";
        for (std::size_t r = 0; r < grams.size(); ++r) {
            if (m.row_offsets[r + 1] - m.row_offsets[r] != 1)
                return std::string("row for '") + grams[r]->display + "' not a single hit";
            if (m.at(r, grams[r]->column) != grams[r]->sign)
                return std::string("wrong cell for '") + grams[r]->display + "'";
        }
        return "";
    };
    if (const auto err = run_level(false); !err.empty()) return fail("unigrams: " + err);
    if (const auto err = run_level(true); !err.empty()) return fail("bigrams: " + err);

    // Thread-count stability across the whole extractor lineup.
    TempDir tmp;
    RunConfig cfg;
    Dataset data;
    data.train_sentences = {"the cat sat", "a dog ran", "the dog sat down", "a cat ran far"};
    data.test_sentences = {"the cat ran", "a dog sat"};
    data.train_labels = {0, 1, 0, 1};
    data.test_labels = {0, 1};
    data.label_names = {"neg", "pos"};
    std::string tagged;
    for (int i = 0; i < 4; ++i)
        tagged += "the_DT cat_NN sat_VB\na_DT dog_NN ran_VB\ndown_RB far_RB\n";
    cfg.input.tagged_corpus = tmp.write("tagged.txt", tagged);
    cfg.input.lm_corpus = tmp.write("lm.txt", "the cat sat\na dog ran\nthe dog sat\n");
    cfg.input.embeddings = tmp.write("emb.txt", "cat 1 0\ndog 0 1\nsat 1 1\n");
    cfg.features = {{1, ""},
                    {2, "n=1 cutoff=1"},
                    {3, "n=2 cutoff=1 dims=97"},
                    {4, "order=2"},
                    {5, "n=1 cutoff=1"},
                    {6, ""},
                    {7, "dim=4 epochs=2"}};
    cfg.settings.threads = 1;
    const auto serial = extract_all(cfg, data);
    cfg.settings.threads = 4;
    const auto parallel = extract_all(cfg, data);
    if (!(serial.merged.train == parallel.merged.train) ||
        !(serial.merged.test == parallel.merged.test) ||
        !(serial.merged.descriptor == parallel.merged.descriptor))
        return fail("4-thread extraction differs from serial");

    return pass("20 frozen hashes, single-hit rows, threads=4 == serial");
}

// ---------------------------------------------------------------------------
// 8. Synthetic two-class run through the CLI pipeline reaches 95%.

Result check_synthetic_separation() {
    Stopwatch watch;
    TempDir tmp;
    std::mt19937_64 rng(991);
    const auto word = [](const char* prefix, std::uint64_t i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%s%02d", prefix, static_cast<int>(i));
        return std::string(buf);
    };
    const auto sentence = [&](int label) {
        std::string out;
        const std::size_t len = 5 + rng() % 8;
        for (std::size_t i = 0; i < len; ++i) {
            if (i) out += ' ';
            out += word(label == 0 ? "red" : "blu", rng() % 50);
        }
        return out;
    };

    std::string train_text, train_labels, test_text, test_labels;
    for (int i = 0; i < 2000; ++i) {
        const int label = i % 2;
        train_text += sentence(label) + "\n";
        train_labels += (label == 0 ? "crimson\n" : "azure\n");
    }
    for (int i = 0; i < 500; ++i) {
        const int label = i % 2;
        test_text += sentence(label) + "\n";
        test_labels += (label == 0 ? "crimson\n" : "azure\n");
    }
    tmp.write("train.txt", train_text);
    tmp.write("train.labels", train_labels);
    tmp.write("test.txt", test_text);
    tmp.write("test.labels", test_labels);
    const auto cfg = tmp.write(
        "run.ini",
        "[input]\ntrain_text = train.txt\ntrain_labels = train.labels\n"
        "test_text = test.txt\ntest_labels = test.labels\n"
        "[output]\ndir = out\nformats =\n"
        "[settings]\nthreads = 2\nseed = 42\nlog_level = error\n"
        "[features]\n2: n=1 cutoff=3\n2: n=2 cutoff=5\n"
        "[classifiers]\nsvm: C=1\n");

    if (featforge::run(cfg) != 0) return fail("pipeline exited nonzero");
    const auto report =
        nlohmann::json::parse(read_file((tmp.path() / "out" / "report.json").string()));
    const double acc = report.at("classifiers").at(0).at("test_accuracy").get<double>();
    const double elapsed = watch.seconds();
    if (acc < 0.95) return fail("test accuracy " + fmt(acc) + " < 0.95");
    if (elapsed >= 60.0) return fail("took " + fmt(elapsed) + "s, budget 60s");
    return pass("test accuracy " + fmt(acc) + ", " + fmt(elapsed) + "s");
}

// ---------------------------------------------------------------------------
// 9. Export formats round-trip and match the committed goldens.

Result check_exports() {
    // svmlight round-trip on random matrices.
    TempDir tmp;
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 100; ++round) {
        const std::size_t rows = 1 + rng() % 8;
        const std::size_t cols = 1 + rng() % 12;
        std::vector<Triplet> trips;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (rand_unit(rng) < 0.4)
                    trips.push_back({r, static_cast<std::uint32_t>(c),
                                     (rand_unit(rng) * 2 - 1) *
                                         std::pow(10.0, static_cast<double>(rng() % 7) - 3.0)});
        FeatureBlock block;
        block.feature_id = 1;
        block.train = sparse_from_triplets(rows, cols, trips);
        block.test = SparseMatrix(0, cols);
        block.descriptor.column_names.assign(cols, "c");
        block.descriptor.source_feature_id.assign(cols, 1);
        std::vector<int> labels(rows);
        for (auto& l : labels) l = static_cast<int>(rng() % 3);
        const std::vector<int> no_labels;
        const std::vector<std::string> names = {"a", "b", "c"};
        const std::string dir = (tmp.path() / std::to_string(round)).string();
        write_svmlight(ExportJob{block, labels, no_labels, names, dir});
        const auto rt = read_svmlight(dir + "/train.svm", cols);
        if (!(rt.matrix == block.train) || rt.labels != labels)
            return fail("round-trip mismatch in round " + std::to_string(round));
    }

    // Byte-exact comparison against the committed goldens.
    FeatureBlock block;
    block.feature_id = 2;
    block.descriptor.column_names = {"ngram1:a", "a,b", "odd name"};
    block.descriptor.source_feature_id = {2, 2, 2};
    block.train = sparse_from_triplets(2, 3, {{0, 0, 1.5}, {0, 2, -2.0}});
    block.test = sparse_from_triplets(1, 3, {{0, 1, 0.25}});
    const std::vector<int> train_labels = {0, 1};
    const std::vector<int> test_labels = {0};
    const std::vector<std::string> label_names = {"neg", "pos,ish"};
    const std::string out = (tmp.path() / "golden").string();
    write_exports(ExportJob{block, train_labels, test_labels, label_names, out},
                  {"csv", "svmlight", "arff"});

    const std::filesystem::path golden = std::filesystem::path(FEATFORGE_TEST_DATA_DIR) / "golden";
    for (const char* name : {"train.csv", "test.csv", "train.svm", "test.svm", "labels.txt",
                             "train.arff", "test.arff"}) {
        const auto produced = read_file((std::filesystem::path(out) / name).string());
        const auto expected = read_file((golden / name).string());
        if (produced != expected) return fail(std::string("bytes differ for ") + name);
    }
    return pass("100 round-trips, 7 golden files byte-identical");
}

// ---------------------------------------------------------------------------
// 10. AG News benchmark (skipped when the dataset is not present).

// Minimal quoted-CSV record parser; tolerates both doubled and
// backslash-escaped quotes as found in the common distributions.
std::vector<std::string> parse_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '\\' && i + 1 < line.size() &&
                (line[i + 1] == '"' || line[i + 1] == '\\')) {
                cur += line[++i];
            } else if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

Result check_ag_news() {
    std::filesystem::path dir;
    if (const char* env = std::getenv("FEATFORGE_AGNEWS_DIR"); env && *env) {
        dir = env;
    } else {
        dir = std::filesystem::path(FEATFORGE_TEST_DATA_DIR) / "data" / "ag_news";
    }
    if (!std::filesystem::exists(dir / "train.csv") || !std::filesystem::exists(dir / "test.csv"))
        return skip("dataset not found under " + dir.string() +
                    " (set FEATFORGE_AGNEWS_DIR to run)");

    Stopwatch watch;
    const auto load = [](const std::filesystem::path& path) {
        std::vector<std::pair<int, std::string>> rows;
        for (const auto& line : split_lines(read_file(path.string()))) {
            if (line.empty()) continue;
            const auto fields = parse_csv_record(line);
            if (fields.size() < 3) throw DataError("bad record in " + path.string());
            const int cls = std::stoi(fields[0]);
            rows.emplace_back(cls - 1, fields[1] + " " + fields[2]);
        }
        return rows;
    };
    const auto train_all = load(dir / "train.csv");
    const auto test_all = load(dir / "test.csv");

    // 3000 docs per class, deterministic subsample.
    std::vector<std::size_t> by_class[4];
    for (std::size_t i = 0; i < train_all.size(); ++i)
        by_class[train_all[i].first].push_back(i);
    std::vector<std::size_t> chosen;
    for (int c = 0; c < 4; ++c) {
        std::mt19937_64 rng(2024 + static_cast<std::uint64_t>(c));
        fy_shuffle(by_class[c], rng);
        for (std::size_t i = 0; i < 3000 && i < by_class[c].size(); ++i)
            chosen.push_back(by_class[c][i]);
    }

    TempDir tmp;
    std::string train_text, train_labels, test_text, test_labels;
    for (const auto idx : chosen) {
        std::string text = train_all[idx].second;
        std::replace(text.begin(), text.end(), '\n', ' ');
        train_text += text + "\n";
        train_labels += std::to_string(train_all[idx].first + 1) + "\n";
    }
    for (const auto& [cls, doc] : test_all) {
        std::string text = doc;
        std::replace(text.begin(), text.end(), '\n', ' ');
        test_text += text + "\n";
        test_labels += std::to_string(cls + 1) + "\n";
    }
    tmp.write("train.txt", train_text);
    tmp.write("train.labels", train_labels);
    tmp.write("test.txt", test_text);
    tmp.write("test.labels", test_labels);
    const auto cfg = tmp.write(
        "run.ini",
        "[input]\ntrain_text = train.txt\ntrain_labels = train.labels\n"
        "test_text = test.txt\ntest_labels = test.labels\n"
        "[output]\ndir = out\nformats =\n"
        "[settings]\nthreads = 4\nseed = 42\nlog_level = error\n"
        "[features]\n2: n=1 cutoff=3\n2: n=2 cutoff=5\n"
        "[classifiers]\nsvm:\n");

    if (featforge::run(cfg) != 0) return fail("pipeline exited nonzero");
    const auto report =
        nlohmann::json::parse(read_file((tmp.path() / "out" / "report.json").string()));
    const double acc = report.at("classifiers").at(0).at("test_accuracy").get<double>();
    const double elapsed = watch.seconds();
    if (acc < 0.85) return fail("test accuracy " + fmt(acc) + " < 0.85");
    if (elapsed >= 600.0) return fail("took " + fmt(elapsed) + "s, budget 600s");
    return pass("test accuracy " + fmt(acc) + " on " + std::to_string(test_all.size()) +
                " docs, " + fmt(elapsed) + "s");
}

// ---------------------------------------------------------------------------
// 11. Quantile rows are unit-normalized (or zero) on random sentences.

Result check_quantile_normalization() {
    std::mt19937_64 rng(4242);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e",
                                               "f", "g", "h", "i", "j"};
    const auto random_sentence = [&](std::size_t max_len, bool with_oov) {
        std::string out;
        const std::size_t len = rng() % (max_len + 1);
        for (std::size_t i = 0; i < len; ++i) {
            if (i) out += ' ';
            if (with_oov && rand_unit(rng) < 0.1)
                out += (rng() % 2 ? "qq" : "zz");
            else
                out += alphabet[rng() % alphabet.size()];
        }
        return out;
    };

    Dataset data;
    for (int i = 0; i < 40; ++i)
        data.train_sentences.push_back(random_sentence(8, false));
    for (int i = 0; i < 1000; ++i)
        data.test_sentences.push_back(random_sentence(12, true));
    data.train_labels.assign(40, 0);
    data.test_labels.assign(1000, 0);
    data.label_names = {"x"};

    for (const int n : {1, 2}) {
        RunConfig cfg;
        cfg.features = {{5, "n=" + std::to_string(n) + " cutoff=" + (n == 1 ? "1" : "2")}};
        const auto result = extract_all(cfg, data);
        const auto& m = result.merged.test;
        for (std::size_t r = 0; r < m.n_rows; ++r) {
            const auto toks = text::tokenize(data.test_sentences[r], true);
            const bool has_window = toks.size() >= static_cast<std::size_t>(n);
            const double sum = row_sum(m, r);
            if (has_window && std::abs(sum - 1.0) >= 1e-12)
                return fail("row " + std::to_string(r) + " sums to " + fmt(sum));
            if (!has_window && sum != 0.0)
                return fail("short row " + std::to_string(r) + " not zero");
        }
    }
    return pass("1000 sentences x orders 1-2, sums within 1e-12");
}

}  // namespace

int main() {
    log::set_level(log::Level::Error);  // keep the checklist output clean
    struct Check {
        int id;
        const char* name;
        std::function<Result()> fn;
    };
    const std::vector<Check> checks = {
        {1, "kneser-ney matches the brute-force reference", check_kn_reference},
        {2, "conditional distributions are normalized", check_kn_normalization},
        {3, "perplexity identities hold", check_lm_identities},
        {4, "finite differences confirm the gradients", check_gradients},
        {5, "svm recovers the analytic two-point solution", check_svm_analytic},
        {6, "the C grid is the 10-point power lattice", check_c_grid},
        {7, "feature hashing matches the frozen fnv table", check_feature_hashing},
        {8, "synthetic two-class pipeline reaches 95%", check_synthetic_separation},
        {9, "exports round-trip and match the goldens", check_exports},
        {10, "ag news benchmark reaches 85%", check_ag_news},
        {11, "quantile rows are unit-normalized", check_quantile_normalization},
    };

    int failures = 0;
    for (const auto& check : checks) {
        Result result;
        try {
            result = check.fn();
        } catch (const std::exception& e) {
            result = fail(std::string("exception: ") + e.what());
        }
        const char* tag = result.status == Status::Pass ? "PASS"
                          : result.status == Status::Skip ? "SKIP"
                                                          : "FAIL";
        std::cout << "[" << tag << "] " << check.id << " " << check.name;
        if (!result.detail.empty()) std::cout << ": " << result.detail;
        std::cout << "\n";
        if (result.status == Status::Fail) ++failures;
    }
    if (failures) std::cout << failures << " check(s) failed\n";
    return failures == 0 ? 0 : 1;
}
