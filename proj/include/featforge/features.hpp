#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "featforge/config.hpp"
#include "featforge/preprocess.hpp"
#include "featforge/sparse.hpp"

namespace featforge {

// Phase 1: extractors see their parsed args and the run config and declare
// the resources they will need.
struct RequestContext {
    const std::map<std::string, std::string>& args;
    const RunConfig& cfg;
};

// Phase 2: extractors see the fulfilled cache; any lookup they did not
// request in phase 1 fails loudly.
struct ExtractorContext {
    const ResourceCache& cache;
    const Dataset& data;
    const std::map<std::string, std::string>& args;
    const RunConfig& cfg;
    std::uint64_t seed;
};

struct ExtractorEntry {
    int feature_id = 0;
    std::string name;
    std::string args_help;
    std::function<std::vector<PreprocessRequest>(const RequestContext&)> request_fn;
    std::function<FeatureBlock(const ExtractorContext&)> extract_fn;
};

class ExtractorRegistry {
public:
    static ExtractorRegistry& instance();

    void add(ExtractorEntry entry);  // duplicate feature_id -> std::logic_error
    const ExtractorEntry& find(int feature_id) const;
    const std::vector<ExtractorEntry>& entries() const { return entries_; }  // sorted by id
    std::vector<int> ids() const;

private:
    std::vector<ExtractorEntry> entries_;
};

// Space-separated "key=value" tokens. Malformed tokens raise ExtractionError;
// key validation is per-extractor.
std::map<std::string, std::string> parse_args(std::string_view raw);

struct FeatureTiming {
    int feature_id = 0;
    std::string name;
    std::string args;
    double seconds = 0;
    std::size_t n_cols = 0;
};

struct ExtractionResult {
    FeatureBlock merged;
    std::vector<FeatureTiming> timings;  // in request order
    ResourceCache cache;
};

// Runs phase 1 for every feature request, fulfills the resources, runs the
// extractors (parallel up to cfg threads), and merges the blocks sorted by
// (feature_id, request order). Output is identical for any thread count.
ExtractionResult extract_all(const RunConfig& cfg, const Dataset& data);

}  // namespace featforge
