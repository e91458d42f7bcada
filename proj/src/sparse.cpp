#include "featforge/sparse.hpp"

#include <algorithm>
#include <stdexcept>

#include "featforge/common.hpp"

namespace featforge {

double SparseMatrix::at(std::size_t row, std::size_t col) const {
    if (row >= n_rows) throw std::out_of_range("row index out of range");
    const auto begin = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row]);
    const auto end = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row + 1]);
    const auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(col));
    if (it == end || *it != col) return 0.0;
    return values[static_cast<std::size_t>(it - col_indices.begin())];
}

SparseMatrix sparse_from_triplets(std::size_t n_rows, std::size_t n_cols,
                                  const std::vector<Triplet>& triplets) {
    for (const auto& t : triplets) {
        if (t.row >= n_rows)
            throw std::invalid_argument("triplet row " + std::to_string(t.row) +
                                        " out of range for " + std::to_string(n_rows) + " rows");
        if (t.col >= n_cols)
            throw std::invalid_argument("triplet col " + std::to_string(t.col) +
                                        " out of range for " + std::to_string(n_cols) + " cols");
    }
    std::vector<std::size_t> order(triplets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ta = triplets[a];
        const auto& tb = triplets[b];
        if (ta.row != tb.row) return ta.row < tb.row;
        return ta.col < tb.col;
    });

    SparseMatrix m(n_rows, n_cols);
    m.col_indices.reserve(triplets.size());
    m.values.reserve(triplets.size());
    std::size_t i = 0;
    while (i < order.size()) {
        const auto& t = triplets[order[i]];
        double sum = t.value;
        std::size_t j = i + 1;
        while (j < order.size() && triplets[order[j]].row == t.row &&
               triplets[order[j]].col == t.col) {
            sum += triplets[order[j]].value;
            ++j;
        }
        if (sum != 0.0) {
            m.col_indices.push_back(t.col);
            m.values.push_back(sum);
            m.row_offsets[t.row + 1] += 1;
        }
        i = j;
    }
    for (std::size_t r = 0; r < n_rows; ++r) m.row_offsets[r + 1] += m.row_offsets[r];
    return m;
}

SparseMatrix row_slice(const SparseMatrix& m, const std::vector<std::size_t>& rows) {
    for (const auto r : rows) {
        if (r >= m.n_rows)
            throw std::out_of_range("row_slice: row " + std::to_string(r) + " out of range for " +
                                    std::to_string(m.n_rows) + " rows");
    }
    SparseMatrix out(rows.size(), m.n_cols);
    std::size_t nnz = 0;
    for (const auto r : rows) nnz += m.row_offsets[r + 1] - m.row_offsets[r];
    out.col_indices.reserve(nnz);
    out.values.reserve(nnz);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
            out.col_indices.push_back(m.col_indices[k]);
            out.values.push_back(m.values[k]);
        }
        out.row_offsets[i + 1] = out.col_indices.size();
    }
    return out;
}

namespace {

SparseMatrix concat_columns(const std::vector<const SparseMatrix*>& parts) {
    const std::size_t n_rows = parts.empty() ? 0 : parts[0]->n_rows;
    std::size_t n_cols = 0;
    std::size_t nnz = 0;
    for (const auto* p : parts) {
        n_cols += p->n_cols;
        nnz += p->nnz();
    }
    SparseMatrix m(n_rows, n_cols);
    m.col_indices.reserve(nnz);
    m.values.reserve(nnz);
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::uint32_t col_base = 0;
        for (const auto* p : parts) {
            for (std::size_t k = p->row_offsets[r]; k < p->row_offsets[r + 1]; ++k) {
                m.col_indices.push_back(col_base + p->col_indices[k]);
                m.values.push_back(p->values[k]);
            }
            col_base += static_cast<std::uint32_t>(p->n_cols);
        }
        m.row_offsets[r + 1] = m.col_indices.size();
    }
    return m;
}

}  // namespace

FeatureBlock hstack(const std::vector<FeatureBlock>& blocks) {
    if (blocks.empty()) return FeatureBlock{};
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        if (blocks[i].feature_id < blocks[i - 1].feature_id)
            throw std::invalid_argument("hstack: blocks not sorted by feature_id");
    }
    const std::size_t train_rows = blocks[0].train.n_rows;
    const std::size_t test_rows = blocks[0].test.n_rows;
    for (const auto& b : blocks) {
        if (b.train.n_rows != train_rows || b.test.n_rows != test_rows)
            throw ExtractionError("merge: feature " + std::to_string(b.feature_id) + " produced " +
                                  std::to_string(b.train.n_rows) + "/" +
                                  std::to_string(b.test.n_rows) + " rows, expected " +
                                  std::to_string(train_rows) + "/" + std::to_string(test_rows));
    }
    FeatureBlock out;
    out.feature_id = blocks[0].feature_id;
    std::vector<const SparseMatrix*> train_parts, test_parts;
    train_parts.reserve(blocks.size());
    test_parts.reserve(blocks.size());
    for (const auto& b : blocks) {
        train_parts.push_back(&b.train);
        test_parts.push_back(&b.test);
        out.descriptor.column_names.insert(out.descriptor.column_names.end(),
                                           b.descriptor.column_names.begin(),
                                           b.descriptor.column_names.end());
        out.descriptor.source_feature_id.insert(out.descriptor.source_feature_id.end(),
                                                b.descriptor.source_feature_id.begin(),
                                                b.descriptor.source_feature_id.end());
    }
    out.train = concat_columns(train_parts);
    out.test = concat_columns(test_parts);
    return out;
}

void Dataset::validate() const {
    if (train_sentences.size() != train_labels.size())
        throw DataError("dataset: " + std::to_string(train_sentences.size()) +
                        " train sentences but " + std::to_string(train_labels.size()) +
                        " train labels");
    if (test_sentences.size() != test_labels.size())
        throw DataError("dataset: " + std::to_string(test_sentences.size()) +
                        " test sentences but " + std::to_string(test_labels.size()) +
                        " test labels");
    if (train_sentences.empty()) throw DataError("dataset: no training examples");
    const int n = static_cast<int>(label_names.size());
    for (const int y : train_labels)
        if (y < 0 || y >= n)
            throw DataError("dataset: train label id " + std::to_string(y) + " out of range");
    for (const int y : test_labels)
        if (y < 0 || y >= n)
            throw DataError("dataset: test label id " + std::to_string(y) + " out of range");
}

}  // namespace featforge
