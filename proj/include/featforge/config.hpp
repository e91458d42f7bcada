#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace featforge {

struct FeatureRequest {
    int feature_id = 0;
    std::string args;  // opaque text, passed verbatim to the extractor

    bool operator==(const FeatureRequest&) const = default;
};

struct ClassifierRequest {
    std::string name;
    std::map<std::string, std::string> params;

    bool operator==(const ClassifierRequest&) const = default;
};

struct InputPaths {
    std::string train_text;
    std::string train_labels;
    std::string test_text;
    std::string test_labels;
    std::string tagged_corpus;  // optional
    std::string embeddings;     // optional
    std::string lm_corpus;      // optional

    bool operator==(const InputPaths&) const = default;
};

struct OutputOptions {
    std::string dir;
    std::vector<std::string> formats{"csv"};  // subset of {csv, svmlight, arff}

    bool operator==(const OutputOptions&) const = default;
};

struct Settings {
    int threads = 1;
    std::uint64_t seed = 42;
    bool lowercase = true;
    std::string log_level = "info";
    double cutoff_scale = 1.0;

    bool operator==(const Settings&) const = default;
};

struct RunConfig {
    InputPaths input;
    OutputOptions output;
    Settings settings;
    std::vector<FeatureRequest> features;
    std::vector<ClassifierRequest> classifiers;

    bool operator==(const RunConfig&) const = default;
};

// Parses the five-section INI document ([input], [output], [settings],
// [features], [classifiers]). Unknown feature ids / classifier names are
// rejected against the given known sets. Throws ConfigError with a line
// number for malformed lines.
RunConfig parse_config(std::string_view text, const std::vector<int>& known_feature_ids,
                       const std::vector<std::string>& known_classifier_names);

// Canonical serialization; parse_config(to_ini(cfg)) == cfg.
std::string to_ini(const RunConfig& cfg);

// Rewrites relative input paths against base_dir (typically the config
// file's directory). Absolute paths and empty optionals are untouched.
void resolve_paths(RunConfig& cfg, const std::string& base_dir);

// Checks that every referenced input file exists and is readable. Returns
// the full list of problems (empty means ok); never throws.
std::vector<std::string> validate_paths(const RunConfig& cfg);

}  // namespace featforge
