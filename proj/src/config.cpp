#include "featforge/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "featforge/common.hpp"

namespace featforge {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
}

long parse_int(std::string_view v, std::size_t line_no, const char* key) {
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        fail(line_no, std::string(key) + " expects an integer, got '" + std::string(v) + "'");
    return out;
}

double parse_real(std::string_view v, std::size_t line_no, const char* key) {
    double out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        fail(line_no, std::string(key) + " expects a number, got '" + std::string(v) + "'");
    return out;
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::string item;
    for (const char c : v) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(std::move(item));
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(std::move(item));
    return out;
}

// Whitespace-separated key=value pairs; values may contain commas (size
// lists), so this does not reuse the comma-splitting list parser.
std::vector<std::string> split_ws(std::string_view v) {
    std::vector<std::string> out;
    std::string item;
    for (const char c : v) {
        if (c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(std::move(item));
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(std::move(item));
    return out;
}

std::map<std::string, std::string> parse_params(std::string_view text, std::size_t line_no) {
    std::map<std::string, std::string> params;
    for (const auto& tok : split_ws(text)) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(line_no, "expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        if (params.count(key)) fail(line_no, "duplicate parameter '" + key + "'");
        params[key] = tok.substr(eq + 1);
    }
    return params;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::vector<int>& known_feature_ids,
                       const std::vector<std::string>& known_classifier_names) {
    RunConfig cfg;
    cfg.output.formats.clear();

    enum class Section { None, Input, Output, Settings, Features, Classifiers };
    Section section = Section::None;
    bool seen[5] = {false, false, false, false, false};
    std::map<std::string, std::string> seen_keys;  // "<section>.<key>" for duplicate detection
    bool formats_given = false;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view raw = text.substr(start, nl == std::string_view::npos ? text.size() - start
                                                                               : nl - start);
        start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            const std::string_view name = line.substr(1, line.size() - 2);
            if (name == "input") section = Section::Input;
            else if (name == "output") section = Section::Output;
            else if (name == "settings") section = Section::Settings;
            else if (name == "features") section = Section::Features;
            else if (name == "classifiers") section = Section::Classifiers;
            else fail(line_no, "unknown section [" + std::string(name) + "]");
            const auto idx = static_cast<std::size_t>(section) - 1;
            if (seen[idx]) fail(line_no, "duplicate section [" + std::string(name) + "]");
            seen[idx] = true;
            continue;
        }
        if (section == Section::None) fail(line_no, "content before any section header");

        if (section == Section::Features) {
            const auto colon = line.find(':');
            if (colon == std::string_view::npos)
                fail(line_no, "feature request must be '<id>: <args>'");
            const std::string_view id_part = trim(line.substr(0, colon));
            FeatureRequest req;
            req.feature_id = static_cast<int>(parse_int(id_part, line_no, "feature id"));
            req.args = std::string(trim(line.substr(colon + 1)));
            if (!std::count(known_feature_ids.begin(), known_feature_ids.end(), req.feature_id)) {
                std::ostringstream known;
                for (std::size_t i = 0; i < known_feature_ids.size(); ++i)
                    known << (i ? ", " : "") << known_feature_ids[i];
                fail(line_no, "unknown feature id " + std::to_string(req.feature_id) +
                                  " (known ids: " + known.str() + ")");
            }
            cfg.features.push_back(std::move(req));
            continue;
        }

        if (section == Section::Classifiers) {
            const auto colon = line.find(':');
            ClassifierRequest req;
            req.name = std::string(trim(colon == std::string_view::npos ? line
                                                                        : line.substr(0, colon)));
            if (req.name.empty()) fail(line_no, "classifier request must be '<name>: <params>'");
            if (colon != std::string_view::npos)
                req.params = parse_params(trim(line.substr(colon + 1)), line_no);
            if (!std::count(known_classifier_names.begin(), known_classifier_names.end(),
                            req.name)) {
                std::ostringstream known;
                for (std::size_t i = 0; i < known_classifier_names.size(); ++i)
                    known << (i ? ", " : "") << known_classifier_names[i];
                fail(line_no, "unknown classifier '" + req.name + "' (known: " + known.str() + ")");
            }
            cfg.classifiers.push_back(std::move(req));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty()) fail(line_no, "empty key");

        const char* section_name = section == Section::Input     ? "input"
                                   : section == Section::Output  ? "output"
                                                                 : "settings";
        const std::string qualified = std::string(section_name) + "." + key;
        if (seen_keys.count(qualified)) fail(line_no, "duplicate key '" + key + "'");
        seen_keys[qualified] = value;

        if (section == Section::Input) {
            if (key == "train_text") cfg.input.train_text = value;
            else if (key == "train_labels") cfg.input.train_labels = value;
            else if (key == "test_text") cfg.input.test_text = value;
            else if (key == "test_labels") cfg.input.test_labels = value;
            else if (key == "tagged_corpus") cfg.input.tagged_corpus = value;
            else if (key == "embeddings") cfg.input.embeddings = value;
            else if (key == "lm_corpus") cfg.input.lm_corpus = value;
            else fail(line_no, "unknown [input] key '" + key + "'");
        } else if (section == Section::Output) {
            if (key == "dir") cfg.output.dir = value;
            else if (key == "formats") {
                formats_given = true;
                for (const auto& f : split_list(value)) {
                    if (f != "csv" && f != "svmlight" && f != "arff")
                        fail(line_no, "unknown export format '" + f + "'");
                    if (!std::count(cfg.output.formats.begin(), cfg.output.formats.end(), f))
                        cfg.output.formats.push_back(f);
                }
            } else fail(line_no, "unknown [output] key '" + key + "'");
        } else {
            if (key == "threads") {
                cfg.settings.threads = static_cast<int>(parse_int(value, line_no, "threads"));
                if (cfg.settings.threads < 1) fail(line_no, "threads must be >= 1");
            } else if (key == "seed") {
                cfg.settings.seed =
                    static_cast<std::uint64_t>(parse_int(value, line_no, "seed"));
            } else if (key == "lowercase") {
                if (value == "true") cfg.settings.lowercase = true;
                else if (value == "false") cfg.settings.lowercase = false;
                else fail(line_no, "lowercase expects true or false");
            } else if (key == "log_level") {
                if (value != "error" && value != "info" && value != "debug")
                    fail(line_no, "log_level must be error, info, or debug");
                cfg.settings.log_level = value;
            } else if (key == "cutoff_scale") {
                cfg.settings.cutoff_scale = parse_real(value, line_no, "cutoff_scale");
                if (cfg.settings.cutoff_scale <= 0) fail(line_no, "cutoff_scale must be > 0");
            } else fail(line_no, "unknown [settings] key '" + key + "'");
        }
    }

    const char* required[5] = {"input", "output", "settings", "features", "classifiers"};
    for (std::size_t i = 0; i < 5; ++i)
        if (!seen[i]) throw ConfigError(std::string(required[i]) + " section required");

    if (cfg.input.train_text.empty()) throw ConfigError("[input] train_text required");
    if (cfg.input.train_labels.empty()) throw ConfigError("[input] train_labels required");
    if (cfg.input.test_text.empty()) throw ConfigError("[input] test_text required");
    if (cfg.input.test_labels.empty()) throw ConfigError("[input] test_labels required");
    if (cfg.output.dir.empty()) throw ConfigError("[output] dir required");
    if (cfg.features.empty()) throw ConfigError("at least one feature request required");
    if (!formats_given) cfg.output.formats = {"csv"};
    return cfg;
}

std::string to_ini(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[input]\n";
    out << "train_text = " << cfg.input.train_text << "\n";
    out << "train_labels = " << cfg.input.train_labels << "\n";
    out << "test_text = " << cfg.input.test_text << "\n";
    out << "test_labels = " << cfg.input.test_labels << "\n";
    if (!cfg.input.tagged_corpus.empty()) out << "tagged_corpus = " << cfg.input.tagged_corpus << "\n";
    if (!cfg.input.embeddings.empty()) out << "embeddings = " << cfg.input.embeddings << "\n";
    if (!cfg.input.lm_corpus.empty()) out << "lm_corpus = " << cfg.input.lm_corpus << "\n";
    out << "\n[output]\n";
    out << "dir = " << cfg.output.dir << "\n";
    out << "formats =";
    for (std::size_t i = 0; i < cfg.output.formats.size(); ++i)
        out << (i ? "," : " ") << cfg.output.formats[i];
    out << "\n";
    out << "\n[settings]\n";
    out << "threads = " << cfg.settings.threads << "\n";
    out << "seed = " << cfg.settings.seed << "\n";
    out << "lowercase = " << (cfg.settings.lowercase ? "true" : "false") << "\n";
    out << "log_level = " << cfg.settings.log_level << "\n";
    out << "cutoff_scale = " << format_double(cfg.settings.cutoff_scale) << "\n";
    out << "\n[features]\n";
    for (const auto& f : cfg.features) {
        out << f.feature_id << ":";
        if (!f.args.empty()) out << " " << f.args;
        out << "\n";
    }
    out << "\n[classifiers]\n";
    for (const auto& c : cfg.classifiers) {
        out << c.name << ":";
        for (const auto& [k, v] : c.params) out << " " << k << "=" << v;
        out << "\n";
    }
    return out.str();
}

void resolve_paths(RunConfig& cfg, const std::string& base_dir) {
    const auto resolve = [&](std::string& p) {
        if (p.empty()) return;
        std::filesystem::path fp(p);
        if (fp.is_relative()) p = (std::filesystem::path(base_dir) / fp).lexically_normal().string();
    };
    resolve(cfg.input.train_text);
    resolve(cfg.input.train_labels);
    resolve(cfg.input.test_text);
    resolve(cfg.input.test_labels);
    resolve(cfg.input.tagged_corpus);
    resolve(cfg.input.embeddings);
    resolve(cfg.input.lm_corpus);
    resolve(cfg.output.dir);
}

std::vector<std::string> validate_paths(const RunConfig& cfg) {
    std::vector<std::string> problems;
    const auto check = [&](const std::string& path, const char* what) {
        if (path.empty()) return;
        std::ifstream f(path);
        if (!f.good()) problems.push_back(std::string(what) + " not readable: " + path);
    };
    check(cfg.input.train_text, "train_text");
    check(cfg.input.train_labels, "train_labels");
    check(cfg.input.test_text, "test_text");
    check(cfg.input.test_labels, "test_labels");
    check(cfg.input.tagged_corpus, "tagged_corpus");
    check(cfg.input.embeddings, "embeddings");
    check(cfg.input.lm_corpus, "lm_corpus");
    return problems;
}

}  // namespace featforge
