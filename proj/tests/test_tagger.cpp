#include <doctest.h>

#include "featforge/common.hpp"
#include "featforge/tagger.hpp"

using namespace featforge;

namespace {

// Small corpus with an unambiguous tag per word plus one ambiguous word
// ("fast") disambiguated by its left context.
const char* kCorpus =
    "the_DT cat_NN runs_VB fast_RB\n"
    "the_DT dog_NN runs_VB\n"
    "a_DT fast_JJ cat_NN runs_VB\n"
    "a_DT fast_JJ dog_NN sleeps_VB\n"
    "the_DT cat_NN sleeps_VB\n"
    "dogs_NN run_VB fast_RB\n";

}  // namespace

TEST_CASE("parse_tagged_corpus splits on the last underscore") {
    const auto corpus = parse_tagged_corpus("the_DT under_score_NN\n");
    REQUIRE(corpus.size() == 1);
    CHECK(corpus[0].tokens == std::vector<std::string>{"the", "under_score"});
    CHECK(corpus[0].tags == std::vector<std::string>{"DT", "NN"});
}

TEST_CASE("parse_tagged_corpus rejects malformed entries with a line number") {
    for (const char* bad : {"ok_DT broken\n", "_DT\n", "word_\n"}) {
        try {
            parse_tagged_corpus(bad);
            FAIL("expected DataError for: " << bad);
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("1") != std::string::npos);
        }
    }
    CHECK(parse_tagged_corpus("").empty());
    CHECK(parse_tagged_corpus("\n\n").empty());
}

TEST_CASE("trained tagger fits its training corpus") {
    const auto corpus = parse_tagged_corpus(kCorpus);
    const auto model = train_tagger(corpus, 5, 42);
    CHECK(model.tagset == std::vector<std::string>{"DT", "JJ", "NN", "RB", "VB"});
    for (const auto& sent : corpus) CHECK(tag(sent.tokens, model) == sent.tags);
}

TEST_CASE("tagger uses context for ambiguous words") {
    const auto model = train_tagger(parse_tagged_corpus(kCorpus), 5, 42);
    // "fast" after a determiner was always JJ; after a verb always RB.
    CHECK(tag({"a", "fast", "cat"}, model) == std::vector<std::string>{"DT", "JJ", "NN"});
    CHECK(tag({"the", "dog", "runs", "fast"}, model) ==
          std::vector<std::string>{"DT", "NN", "VB", "RB"});
}

TEST_CASE("tagger handles unseen words and empty input") {
    const auto model = train_tagger(parse_tagged_corpus(kCorpus), 5, 42);
    const auto tags = tag({"zebra", "gallops"}, model);
    REQUIRE(tags.size() == 2);
    for (const auto& t : tags)
        CHECK(std::find(model.tagset.begin(), model.tagset.end(), t) != model.tagset.end());
    CHECK(tag({}, model).empty());
}

TEST_CASE("tagger training is deterministic") {
    const auto corpus = parse_tagged_corpus(kCorpus);
    const auto a = train_tagger(corpus, 3, 7);
    const auto b = train_tagger(corpus, 3, 7);
    CHECK(a == b);
    const auto c = train_tagger(corpus, 3, 8);  // different shuffle order
    CHECK(c.tagset == a.tagset);
}

TEST_CASE("train_tagger rejects an empty corpus") {
    CHECK_THROWS_AS(train_tagger({}, 5, 42), DataError);
}
