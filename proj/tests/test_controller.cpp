#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "featforge/common.hpp"
#include "featforge/controller.hpp"
#include "temp_dir.hpp"

using namespace featforge;
using nlohmann::json;

namespace {

// A runnable workspace: input files plus a config whose sections can be
// overridden per test.
struct Workspace {
    TempDir tmp;

    Workspace() {
        tmp.write("train.txt",
                  "aa bb cc\ndd ee ff\naa cc bb\nee dd ff\nbb aa aa\nff ee dd\ncc cc aa\n"
                  "dd ff ee\n");
        tmp.write("train.labels", "spam\nham\nspam\nham\nspam\nham\nspam\nham\n");
        tmp.write("test.txt", "aa bb\ndd ee\n");
        tmp.write("test.labels", "spam\nham\n");
        std::string tagged;
        for (int i = 0; i < 4; ++i)
            tagged += "aa_NN bb_VB cc_JJ\ndd_NN ee_VB ff_RB\n";
        tmp.write("tagged.txt", tagged);
        tmp.write("lm.txt", "aa bb cc\ndd ee ff\n");
        tmp.write("emb.txt", "aa 1 0\ndd 0 1\n");
    }

    std::string config(const std::string& features, const std::string& classifiers,
                       const std::string& extra_input = "",
                       const std::string& out_dir = "out",
                       const std::string& formats = "csv svmlight arff") {
        const std::string body = "[input]\ntrain_text = train.txt\ntrain_labels = train.labels\n"
                                 "test_text = test.txt\ntest_labels = test.labels\n"
                                 "tagged_corpus = tagged.txt\n" +
                                 extra_input + "\n[output]\ndir = " + out_dir +
                                 "\nformats = " + formats +
                                 "\n[settings]\nthreads = 2\nseed = 7\n[features]\n" + features +
                                 "\n[classifiers]\n" + classifiers + "\n";
        return tmp.write("run.ini", body);
    }

    std::filesystem::path out() const { return tmp.path() / "out"; }
};

json load_report(const std::filesystem::path& out_dir) {
    return json::parse(read_file((out_dir / "report.json").string()));
}

}  // namespace

TEST_CASE("run executes the full pipeline") {
    Workspace ws;
    const auto cfg = ws.config("1:\n2: n=1 cutoff=1", "svm: C=1");
    CHECK(featforge::run(cfg) == 0);

    for (const char* name : {"train.csv", "test.csv", "train.svm", "test.svm", "labels.txt",
                             "train.arff", "test.arff", "report.json", "report.txt"})
        CHECK(std::filesystem::exists(ws.out() / name));

    const auto report = load_report(ws.out());
    CHECK(report.at("config_path").get<std::string>() == cfg);
    CHECK(report.at("config").get<std::string>().find("train_text") != std::string::npos);
    CHECK(report.at("dataset").at("train_rows") == 8);
    CHECK(report.at("dataset").at("test_rows") == 2);
    CHECK(report.at("dataset").at("classes") == json::array({"ham", "spam"}));
    REQUIRE(report.at("features").size() == 2);
    CHECK(report.at("features")[0].at("feature_id") == 1);
    CHECK(report.at("features")[0].at("name") == "surface");
    CHECK(report.at("features")[1].at("columns").get<int>() == 6);  // aa..ff unigrams
    const auto& merged = report.at("merged");
    CHECK(merged.at("columns").get<int>() == 13);
    CHECK(merged.at("train_rows") == 8);
    CHECK(merged.at("train_nnz").get<int>() > 0);
    REQUIRE(report.at("classifiers").size() == 1);
    const auto& clf = report.at("classifiers")[0];
    CHECK(clf.at("classifier") == "svm");
    CHECK(clf.at("train_accuracy").get<double>() == doctest::Approx(1.0));
    CHECK(clf.at("test_accuracy").get<double>() == doctest::Approx(1.0));
    CHECK(clf.at("wall_seconds").get<double>() >= 0.0);
    CHECK(report.at("total_seconds").get<double>() >= 0.0);

    // Human-readable twin mentions the same pieces.
    const auto text = read_file((ws.out() / "report.txt").string());
    CHECK(text.find("svm") != std::string::npos);
    CHECK(text.find("surface") != std::string::npos);
}

TEST_CASE("run without classifiers only extracts and exports") {
    Workspace ws;
    CHECK(featforge::run(ws.config("2: n=1 cutoff=1", "")) == 0);
    CHECK(std::filesystem::exists(ws.out() / "train.csv"));
    CHECK(load_report(ws.out()).at("classifiers").empty());
}

TEST_CASE("run without formats writes no exports but still reports") {
    Workspace ws;
    CHECK(featforge::run(ws.config("2: n=1 cutoff=1", "", "", "out", "")) == 0);
    CHECK(std::filesystem::exists(ws.out() / "report.json"));
    CHECK(!std::filesystem::exists(ws.out() / "train.csv"));
    CHECK(!std::filesystem::exists(ws.out() / "train.svm"));
}

TEST_CASE("exit codes distinguish failure stages") {
    Workspace ws;

    SUBCASE("missing config file") { CHECK(featforge::run("/nonexistent/run.ini") == 2); }
    SUBCASE("malformed config") {
        CHECK(featforge::run(ws.tmp.write("bad.ini", "not a config\n")) == 2);
    }
    SUBCASE("missing input file") {
        const auto cfg = ws.config("2: n=1 cutoff=1", "");
        std::filesystem::remove(ws.tmp.path() / "test.txt");
        CHECK(featforge::run(cfg) == 2);
    }
    SUBCASE("label count mismatch") {
        ws.tmp.write("train.labels", "spam\nham\n");  // 2 labels for 8 rows
        CHECK(featforge::run(ws.config("2: n=1 cutoff=1", "")) == 3);
    }
    SUBCASE("feature needs an input the config does not provide") {
        CHECK(featforge::run(ws.config("6:", "")) == 4);  // embeddings unset
    }
    SUBCASE("bad extractor args surface as extraction failures") {
        CHECK(featforge::run(ws.config("2: n=0", "")) == 4);
    }
    SUBCASE("classifier failure") {
        CHECK(featforge::run(ws.config("2: n=1 cutoff=1", "svm: bogus=1")) == 5);
    }
}

TEST_CASE("thread count env override lands in the echoed config") {
    Workspace ws;
    ::setenv("FEATFORGE_THREADS", "3", 1);
    const int rc = featforge::run(ws.config("2: n=1 cutoff=1", ""));
    ::unsetenv("FEATFORGE_THREADS");
    CHECK(rc == 0);
    const auto echoed = load_report(ws.out()).at("config").get<std::string>();
    CHECK(echoed.find("threads = 3") != std::string::npos);

    ::setenv("FEATFORGE_THREADS", "zero", 1);
    const int bad = featforge::run(ws.config("2: n=1 cutoff=1", ""));
    ::unsetenv("FEATFORGE_THREADS");
    CHECK(bad == 2);
}

TEST_CASE("repeat runs produce byte-identical exports") {
    Workspace ws;
    const auto cfg =
        ws.config("1:\n2: n=1 cutoff=1\n7: dim=4 epochs=2", "svm: C=1");
    REQUIRE(featforge::run(cfg) == 0);
    std::vector<std::string> first;
    for (const char* name : {"train.csv", "test.csv", "train.svm", "train.arff"})
        first.push_back(read_file((ws.out() / name).string()));
    REQUIRE(featforge::run(cfg) == 0);
    std::size_t i = 0;
    for (const char* name : {"train.csv", "test.csv", "train.svm", "train.arff"})
        CHECK(read_file((ws.out() / name).string()) == first[i++]);
}

TEST_CASE("cli subcommands run and validate arguments") {
    Workspace ws;
    const auto cfg = ws.config("2: n=1 cutoff=1", "");
    {
        const char* argv[] = {"featforge", "run", cfg.c_str()};
        CHECK(featforge::run_cli(3, const_cast<char**>(argv)) == 0);
    }
    {
        const char* argv[] = {"featforge", "list-features"};
        CHECK(featforge::run_cli(2, const_cast<char**>(argv)) == 0);
    }
    {
        const char* argv[] = {"featforge", "list-classifiers"};
        CHECK(featforge::run_cli(2, const_cast<char**>(argv)) == 0);
    }
    {
        const char* argv[] = {"featforge"};
        CHECK(featforge::run_cli(1, const_cast<char**>(argv)) != 0);
    }
}
