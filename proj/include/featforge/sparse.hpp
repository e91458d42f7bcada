#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace featforge {

// Compressed sparse row matrix. Within a row, column indices are strictly
// ascending and stored values are nonzero.
struct SparseMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_offsets;  // size n_rows + 1
    std::vector<std::uint32_t> col_indices;
    std::vector<double> values;

    SparseMatrix() : row_offsets{0} {}
    SparseMatrix(std::size_t rows, std::size_t cols)
        : n_rows(rows), n_cols(cols), row_offsets(rows + 1, 0) {}

    std::size_t nnz() const { return values.size(); }
    double at(std::size_t row, std::size_t col) const;

    bool operator==(const SparseMatrix& other) const = default;
};

struct Triplet {
    std::size_t row;
    std::uint32_t col;
    double value;
};

// Duplicate (row, col) entries are summed; entries that sum to exactly zero
// are dropped. Throws std::invalid_argument on out-of-range coordinates.
SparseMatrix sparse_from_triplets(std::size_t n_rows, std::size_t n_cols,
                                  const std::vector<Triplet>& triplets);

// New matrix containing the given rows, in the given order (repeats allowed).
// Throws std::out_of_range on a bad row index.
SparseMatrix row_slice(const SparseMatrix& m, const std::vector<std::size_t>& rows);

// Column labels plus the id of the extractor that produced each column.
struct FeatureDescriptor {
    std::vector<std::string> column_names;
    std::vector<int> source_feature_id;  // same length as column_names

    std::size_t size() const { return column_names.size(); }
    bool operator==(const FeatureDescriptor& other) const = default;
};

struct FeatureBlock {
    SparseMatrix train;
    SparseMatrix test;
    FeatureDescriptor descriptor;
    int feature_id = 0;
};

// Column-wise concatenation in block order; blocks must arrive sorted by
// feature_id (ties keep input order). Row-count mismatch between blocks
// raises ExtractionError naming the offending feature_id.
FeatureBlock hstack(const std::vector<FeatureBlock>& blocks);

struct Dataset {
    std::vector<std::string> train_sentences;
    std::vector<std::string> test_sentences;
    std::vector<int> train_labels;
    std::vector<int> test_labels;
    std::vector<std::string> label_names;  // index == label id

    // Throws DataError on size mismatches or label ids outside label_names.
    void validate() const;
};

}  // namespace featforge
