#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "featforge/common.hpp"
#include "featforge/ngram_lm.hpp"
#include "kn_oracle.hpp"
#include "temp_dir.hpp"

using namespace featforge;

namespace {

std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng,
                                                    std::size_t max_vocab) {
    static const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h"};
    const std::size_t vocab = 2 + rng() % (max_vocab - 1);
    const std::size_t n_sents = 3 + rng() % 8;
    std::vector<std::vector<std::string>> corpus;
    for (std::size_t s = 0; s < n_sents; ++s) {
        std::vector<std::string> sent;
        const std::size_t len = 1 + rng() % 7;
        for (std::size_t i = 0; i < len; ++i) sent.push_back(pool[rng() % vocab]);
        corpus.push_back(std::move(sent));
    }
    return corpus;
}

// All contexts (token sequences over the model vocab) of the given length.
std::vector<std::vector<std::string>> contexts_of(const KNLanguageModel& m, std::size_t len) {
    std::vector<std::vector<std::string>> ctxs{{}};
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<std::vector<std::string>> next;
        for (const auto& c : ctxs)
            for (const auto& tok : m.vocab) {
                auto extended = c;
                extended.push_back(tok);
                next.push_back(std::move(extended));
            }
        ctxs = std::move(next);
    }
    return ctxs;
}

}  // namespace

TEST_CASE("hand-computed probabilities for the single sentence corpus") {
    // "a a b": b occurs once and folds to <unk>; both orders fall back to the
    // 0.75 absolute discount. Working the formulas by hand gives
    // p(a) = 0.5, p(<unk>) = p(</s>) = 0.25, p(a | a) = 0.5.
    const auto m = train_kn({{"a", "a", "b"}}, 2);
    CHECK(m.vocab == std::vector<std::string>{"<s>", "</s>", "<unk>", "a"});
    CHECK(m.discounts[0].fallback);
    CHECK(m.discounts[1].fallback);
    CHECK(m.cond_prob({}, "a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.cond_prob({}, "<unk>") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.cond_prob({}, "</s>") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.cond_prob({"a"}, "a") == doctest::Approx(0.5).epsilon(1e-12));
    // (1 - 0.75)/1 + 0.75 * 0.25 = 0.4375
    CHECK(m.cond_prob({"<unk>"}, "</s>") == doctest::Approx(0.4375).epsilon(1e-12));
}

TEST_CASE("model probabilities match the direct-formula reference") {
    const std::vector<std::vector<std::string>> corpus = {
        {"the", "cat", "sat"},          {"the", "cat", "ran"},
        {"a", "dog", "sat"},            {"a", "dog", "ran", "far"},
        {"the", "dog", "sat", "down"},  {"a", "cat", "ran", "far"},
        {"the", "cat", "sat", "down"},  {"dogs", "ran"},
        {"cats", "sat"},                {"the", "dog", "ran"},
    };
    for (int order = 1; order <= 3; ++order) {
        const auto m = train_kn(corpus, order);
        const auto oracle = kn_oracle::build_oracle(corpus, order);
        for (std::size_t len = 0; len < static_cast<std::size_t>(order); ++len) {
            for (const auto& ctx : contexts_of(m, len)) {
                for (const auto& target : m.vocab) {
                    const double got = m.cond_prob(ctx, target);
                    const double want = kn_oracle::oracle_prob(oracle, ctx, target);
                    CHECK(std::abs(got - want) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("conditional distributions are normalized") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 20; ++round) {
        const auto corpus = random_corpus(rng, 6);
        for (int order = 1; order <= 3; ++order) {
            const auto m = train_kn(corpus, order);
            for (std::size_t len = 0; len < static_cast<std::size_t>(order); ++len) {
                // A seen-ish context, an unseen one, and one with <unk>.
                std::vector<std::vector<std::string>> probes = {
                    std::vector<std::string>(len, "a"),
                    std::vector<std::string>(len, "g"),
                    std::vector<std::string>(len, "<unk>")};
                for (const auto& ctx : probes) {
                    double sum = 0;
                    for (std::size_t id = 1; id < m.vocab.size(); ++id)
                        sum += m.cond_prob(ctx, m.vocab[id]);
                    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
                }
            }
        }
    }
}

TEST_CASE("predicting <s> has probability zero") {
    const auto m = train_kn({{"a", "a"}, {"a", "b", "b"}}, 2);
    CHECK(m.cond_prob({}, "<s>") == 0.0);
    CHECK(m.cond_prob({"a"}, "<s>") == 0.0);
    CHECK(std::isinf(m.cond_log10({"a"}, "<s>")));
}

TEST_CASE("boundary literals inside sentences fold to <unk>") {
    const auto m = train_kn({{"a", "<s>", "a"}, {"a", "</s>", "a"}, {"a", "b", "a"}}, 2);
    // The literals never become vocabulary entries.
    CHECK(m.vocab_ids.count("<s>") == 1);  // reserved id 0, not a lexical entry
    CHECK(m.token_id("<s>") == 0);
    // Scoring treats an embedded literal like an unknown word.
    const std::vector<std::string> with_literal = {"a", "<s>", "a"};
    const std::vector<std::string> with_unk = {"a", "<unk>", "a"};
    CHECK(logprob10(m, with_literal) == logprob10(m, with_unk));
}

TEST_CASE("logprob10, perplexity and surprisal agree") {
    std::mt19937_64 rng(17);
    const auto corpus = random_corpus(rng, 8);
    const auto m = train_kn(corpus, 3);
    for (int round = 0; round < 50; ++round) {
        std::vector<std::string> sent;
        const std::size_t len = rng() % 6;
        static const std::vector<std::string> pool = {"a", "b", "c", "z"};
        for (std::size_t i = 0; i < len; ++i) sent.push_back(pool[rng() % pool.size()]);

        const double lp = logprob10(m, sent);
        const double positions = static_cast<double>(len + 1);
        const double perp = perplexity(m, sent);
        const double bits = surprisal_bits(m, sent);
        CHECK(perp == doctest::Approx(std::pow(10.0, -lp / positions)).epsilon(1e-12));
        CHECK(perp == doctest::Approx(std::pow(2.0, bits)).epsilon(1e-12));
        CHECK(lp < 0);
    }
}

TEST_CASE("an empty sentence scores only </s>") {
    const auto m = train_kn({{"a", "a"}}, 2);
    const double lp = logprob10(m, {});
    CHECK(lp == doctest::Approx(m.cond_log10({"<s>"}, "</s>")).epsilon(1e-12));
    CHECK(perplexity(m, {}) == doctest::Approx(std::pow(10.0, -lp)).epsilon(1e-12));
}

TEST_CASE("training rejects bad inputs") {
    CHECK_THROWS_AS(train_kn({}, 2), TrainingError);
    CHECK_THROWS_AS(train_kn({{"a"}}, 0), TrainingError);
}

TEST_CASE("save and load round-trip the model exactly") {
    TempDir tmp;
    const auto m = train_kn({{"a", "a", "b"}, {"b", "a", "c", "c"}, {"a", "c"}}, 3);
    const auto path = (tmp.path() / "model.knlm").string();
    save_model(m, path);
    const auto loaded = load_model(path);
    CHECK(loaded == m);
}

TEST_CASE("load_model rejects corrupt files") {
    TempDir tmp;
    const auto m = train_kn({{"a", "a", "b"}}, 2);
    const auto path = (tmp.path() / "model.knlm").string();
    save_model(m, path);

    SUBCASE("wrong magic") {
        const auto bad = tmp.write("bad.knlm", "NOPE rest of file");
        CHECK_THROWS_AS(load_model(bad), DataError);
    }
    SUBCASE("truncated") {
        const auto full = read_file(path);
        const auto bad = tmp.write("trunc.knlm", full.substr(0, full.size() / 2));
        try {
            load_model(bad);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("truncated") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_model((tmp.path() / "nope.knlm").string()), DataError);
    }
}

TEST_CASE("training is deterministic") {
    std::mt19937_64 rng(23);
    const auto corpus = random_corpus(rng, 7);
    CHECK(train_kn(corpus, 3) == train_kn(corpus, 3));
}
