#pragma once

#include <string>
#include <vector>

#include "featforge/sparse.hpp"

namespace featforge {

// One export run: the merged block plus everything needed to label its rows.
// Writers emit <out_dir>/train.<ext> and <out_dir>/test.<ext>.
struct ExportJob {
    const FeatureBlock& block;
    const std::vector<int>& train_labels;
    const std::vector<int>& test_labels;
    const std::vector<std::string>& label_names;
    std::string out_dir;
};

// RFC-4180: header "label,<names...>", one dense row per sentence, labels by
// name. Fields containing commas, quotes or newlines are quoted.
void write_csv(const ExportJob& job);

// "<label id + 1> <col+1>:<value> ..." with ascending indices and zeros
// omitted, plus a labels.txt sidecar mapping the 1-based ids to names.
void write_svmlight(const ExportJob& job);

struct SvmlightData {
    SparseMatrix matrix;
    std::vector<int> labels;  // 0-based class ids
};

// Inverse of write_svmlight on its own output. Column count is the larger of
// the hint and the highest index seen. Malformed pairs or non-ascending
// indices raise DataError with the line number.
SvmlightData read_svmlight(const std::string& path, std::size_t n_cols_hint);

// Sparse ARFF: numeric attribute per column, final nominal class attribute,
// rows as "{<col> <value>, ..., <ncols> <label>}".
void write_arff(const ExportJob& job);

// Dispatches on format names ("csv", "svmlight", "arff").
void write_exports(const ExportJob& job, const std::vector<std::string>& formats);

}  // namespace featforge
