#include "featforge/controller.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "featforge/classify.hpp"
#include "featforge/common.hpp"
#include "featforge/config.hpp"
#include "featforge/export.hpp"
#include "featforge/features.hpp"
#include "featforge/preprocess.hpp"
#include "featforge/text.hpp"

namespace featforge {
namespace {

log::Level level_from_name(const std::string& name) {
    if (name == "error") return log::Level::Error;
    if (name == "debug") return log::Level::Debug;
    return log::Level::Info;
}

void apply_thread_env(RunConfig& cfg) {
    const char* env = std::getenv("FEATFORGE_THREADS");
    if (env == nullptr || *env == '\0') return;
    int threads = 0;
    const std::string_view sv(env);
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), threads);
    if (ec != std::errc{} || ptr != sv.data() + sv.size() || threads < 1)
        throw ConfigError("FEATFORGE_THREADS must be a positive integer, got '" +
                          std::string(sv) + "'");
    cfg.settings.threads = threads;
}

std::vector<std::vector<std::string>> tokenize_all(const std::vector<std::string>& sentences,
                                                   bool lowercase) {
    std::vector<std::vector<std::string>> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(text::tokenize(s, lowercase));
    return out;
}

std::string seconds_str(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", s);
    return buf;
}

void write_report(const RunConfig& cfg, const std::string& config_path, const Dataset& data,
                  const ExtractionResult& extraction, const std::vector<TrainReport>& reports,
                  double total_seconds) {
    nlohmann::ordered_json j;
    j["config_path"] = config_path;
    j["config"] = to_ini(cfg);
    j["dataset"] = {{"train_rows", data.train_sentences.size()},
                    {"test_rows", data.test_sentences.size()},
                    {"classes", data.label_names}};
    j["features"] = nlohmann::ordered_json::array();
    for (const auto& t : extraction.timings)
        j["features"].push_back({{"feature_id", t.feature_id},
                                 {"name", t.name},
                                 {"args", t.args},
                                 {"columns", t.n_cols},
                                 {"seconds", t.seconds}});
    j["merged"] = {{"train_rows", extraction.merged.train.n_rows},
                   {"test_rows", extraction.merged.test.n_rows},
                   {"columns", extraction.merged.train.n_cols},
                   {"train_nnz", extraction.merged.train.nnz()},
                   {"test_nnz", extraction.merged.test.nnz()}};
    j["classifiers"] = nlohmann::ordered_json::array();
    for (const auto& r : reports)
        j["classifiers"].push_back({{"classifier", r.classifier},
                                    {"hyperparams", r.hyperparams},
                                    {"train_accuracy", r.train_accuracy},
                                    {"test_accuracy", r.test_accuracy},
                                    {"wall_seconds", r.wall_seconds}});
    j["total_seconds"] = total_seconds;

    const std::filesystem::path dir(cfg.output.dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        if (!out) throw DataError("cannot write " + (dir / "report.json").string());
        out << j.dump(2) << '\n';
    }

    std::ofstream out(dir / "report.txt", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "report.txt").string());
    out << "featforge run: " << config_path << "\n\n";
    out << "dataset: " << data.train_sentences.size() << " train / "
        << data.test_sentences.size() << " test sentences, " << data.label_names.size()
        << " classes\n\nfeatures:\n";
    for (const auto& t : extraction.timings) {
        out << "  [" << t.feature_id << "] " << t.name;
        if (!t.args.empty()) out << " (" << t.args << ")";
        out << ": " << t.n_cols << " columns, " << seconds_str(t.seconds) << " s\n";
    }
    out << "merged: " << extraction.merged.train.n_rows << " x "
        << extraction.merged.train.n_cols << " train, " << extraction.merged.test.n_rows
        << " x " << extraction.merged.test.n_cols << " test\n";
    if (!reports.empty()) {
        out << "\nclassifiers:\n";
        for (const auto& r : reports) {
            out << "  " << r.classifier << ": train " << format_double(r.train_accuracy)
                << ", test " << format_double(r.test_accuracy);
            if (!r.hyperparams.empty()) {
                out << " (";
                bool first = true;
                for (const auto& [k, v] : r.hyperparams) {
                    if (!first) out << ", ";
                    first = false;
                    out << k << "=" << v;
                }
                out << ")";
            }
            out << ", " << seconds_str(r.wall_seconds) << " s\n";
        }
    }
    out << "\ntotal: " << seconds_str(total_seconds) << " s\n";
}

int run_guarded(const std::string& config_path) {
    const auto run_start = std::chrono::steady_clock::now();

    std::string config_text;
    try {
        config_text = read_file(config_path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    RunConfig cfg = parse_config(config_text, ExtractorRegistry::instance().ids(),
                                 ClassifierRegistry::instance().names());
    const auto base_dir = std::filesystem::absolute(config_path).parent_path();
    resolve_paths(cfg, base_dir.string());
    apply_thread_env(cfg);
    log::set_level(level_from_name(cfg.settings.log_level));
    if (const auto problems = validate_paths(cfg); !problems.empty()) {
        std::string msg = "input problems:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }

    const Dataset data = load_dataset(cfg);
    log::info("loaded " + std::to_string(data.train_sentences.size()) + " train / " +
              std::to_string(data.test_sentences.size()) + " test sentences, " +
              std::to_string(data.label_names.size()) + " classes");

    ExtractionResult extraction = extract_all(cfg, data);
    log::info("merged feature block: " + std::to_string(extraction.merged.train.n_cols) +
              " columns");

    if (!cfg.output.formats.empty()) {
        const ExportJob job{extraction.merged, data.train_labels, data.test_labels,
                            data.label_names, cfg.output.dir};
        write_exports(job, cfg.output.formats);
        std::string names;
        for (const auto& f : cfg.output.formats) names += (names.empty() ? "" : ", ") + f;
        log::info("wrote exports (" + names + ") to " + cfg.output.dir);
    }

    std::vector<TrainReport> reports;
    if (!cfg.classifiers.empty()) {
        const auto train_tokens = tokenize_all(data.train_sentences, cfg.settings.lowercase);
        const auto test_tokens = tokenize_all(data.test_sentences, cfg.settings.lowercase);
        for (const auto& request : cfg.classifiers) {
            const auto& entry = ClassifierRegistry::instance().find(request.name);
            const ClassifierContext ctx{extraction.merged.train,
                                        extraction.merged.test,
                                        data.train_labels,
                                        data.test_labels,
                                        data.label_names.size(),
                                        train_tokens,
                                        test_tokens,
                                        request.params,
                                        cfg.settings.seed};
            reports.push_back(entry.train(ctx));
            const auto& r = reports.back();
            log::info(r.classifier + ": train accuracy " + format_double(r.train_accuracy) +
                      ", test accuracy " + format_double(r.test_accuracy));
        }
    }

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    write_report(cfg, config_path, data, extraction, reports, total);
    return static_cast<int>(ExitCode::Ok);
}

}  // namespace

int run(const std::string& config_path) {
    try {
        return run_guarded(config_path);
    } catch (const Error& e) {
        log::error(e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        log::error(e.what());
        return static_cast<int>(ExitCode::Failure);
    }
}

void list_features() {
    for (const auto& e : ExtractorRegistry::instance().entries())
        std::cout << e.feature_id << "  " << e.name << "  " << e.args_help << "\n";
}

void list_classifiers() {
    for (const auto& e : ClassifierRegistry::instance().entries())
        std::cout << e.name << "  " << e.params_help << "\n";
}

int run_cli(int argc, char** argv) {
    CLI::App app{"feature extraction workbench for text classification"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute a run described by a config file");
    run_cmd->add_option("config", config_path, "path to the INI config")->required();
    auto* lf_cmd = app.add_subcommand("list-features", "list registered feature extractors");
    auto* lc_cmd = app.add_subcommand("list-classifiers", "list registered classifiers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (run_cmd->parsed()) return run(config_path);
    if (lf_cmd->parsed()) list_features();
    if (lc_cmd->parsed()) list_classifiers();
    return static_cast<int>(ExitCode::Ok);
}

}  // namespace featforge
