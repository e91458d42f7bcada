#include "featforge/export.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "featforge/common.hpp"

namespace featforge {
namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

const std::string& label_name(const ExportJob& job, int id) {
    if (id < 0 || static_cast<std::size_t>(id) >= job.label_names.size())
        throw DataError("label id " + std::to_string(id) + " out of range");
    return job.label_names[static_cast<std::size_t>(id)];
}

void csv_split(std::ofstream& out, const ExportJob& job, const SparseMatrix& m,
               const std::vector<int>& labels) {
    out << "label";
    for (const auto& name : job.block.descriptor.column_names) out << ',' << csv_field(name);
    out << '\n';
    std::vector<double> dense(m.n_cols);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        std::fill(dense.begin(), dense.end(), 0.0);
        for (std::size_t i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i)
            dense[m.col_indices[i]] = m.values[i];
        out << csv_field(label_name(job, labels[r]));
        for (double v : dense) out << ',' << format_double(v);
        out << '\n';
    }
}

void svmlight_split(std::ofstream& out, const SparseMatrix& m, const std::vector<int>& labels) {
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        out << labels[r] + 1;
        for (std::size_t i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i)
            out << ' ' << m.col_indices[i] + 1 << ':' << format_double(m.values[i]);
        out << '\n';
    }
}

// ARFF names need quoting when they contain anything beyond plain
// identifier-ish characters; internal quotes are backslash-escaped.
std::string arff_name(const std::string& name) {
    bool plain = !name.empty();
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' || c == ':' ||
                        c == '[' || c == ']';
        if (!ok) plain = false;
    }
    if (plain) return name;
    std::string quoted = "'";
    for (char c : name) {
        if (c == '\'' || c == '\\') quoted += '\\';
        quoted += c;
    }
    return quoted + "'";
}

void arff_split(std::ofstream& out, const ExportJob& job, const SparseMatrix& m,
                const std::vector<int>& labels) {
    out << "@RELATION featforge\n\n";
    for (const auto& name : job.block.descriptor.column_names)
        out << "@ATTRIBUTE " << arff_name(name) << " NUMERIC\n";
    out << "@ATTRIBUTE class {";
    for (std::size_t i = 0; i < job.label_names.size(); ++i) {
        if (i) out << ',';
        out << arff_name(job.label_names[i]);
    }
    out << "}\n\n@DATA\n";
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        out << '{';
        for (std::size_t i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i)
            out << m.col_indices[i] << ' ' << format_double(m.values[i]) << ", ";
        out << m.n_cols << ' ' << arff_name(label_name(job, labels[r])) << "}\n";
    }
}

}  // namespace

void write_csv(const ExportJob& job) {
    auto train = open_out(job.out_dir, "train.csv");
    csv_split(train, job, job.block.train, job.train_labels);
    auto test = open_out(job.out_dir, "test.csv");
    csv_split(test, job, job.block.test, job.test_labels);
}

void write_svmlight(const ExportJob& job) {
    auto train = open_out(job.out_dir, "train.svm");
    svmlight_split(train, job.block.train, job.train_labels);
    auto test = open_out(job.out_dir, "test.svm");
    svmlight_split(test, job.block.test, job.test_labels);
    auto names = open_out(job.out_dir, "labels.txt");
    for (std::size_t i = 0; i < job.label_names.size(); ++i)
        names << i + 1 << ' ' << job.label_names[i] << '\n';
}

SvmlightData read_svmlight(const std::string& path, std::size_t n_cols_hint) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);

    SvmlightData data;
    std::vector<Triplet> triplets;
    std::size_t max_col = 0;
    const auto fail = [&](std::size_t line_no, const std::string& msg) -> DataError {
        return DataError(path + ":" + std::to_string(line_no + 1) + ": " + msg);
    };

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& line = lines[ln];
        std::size_t pos = 0;
        const auto next_token = [&]() -> std::string_view {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            const std::size_t start = pos;
            while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
            return std::string_view(line).substr(start, pos - start);
        };

        const auto label_tok = next_token();
        if (label_tok.empty()) throw fail(ln, "missing label");
        long long label = 0;
        auto res = std::from_chars(label_tok.data(), label_tok.data() + label_tok.size(), label);
        if (res.ec != std::errc{} || res.ptr != label_tok.data() + label_tok.size() || label < 1)
            throw fail(ln, "bad label '" + std::string(label_tok) + "'");
        data.labels.push_back(static_cast<int>(label - 1));

        long long prev_index = 0;
        for (;;) {
            const auto tok = next_token();
            if (tok.empty()) break;
            const auto colon = tok.find(':');
            if (colon == std::string_view::npos || colon == 0 || colon == tok.size() - 1)
                throw fail(ln, "bad pair '" + std::string(tok) + "'");
            long long index = 0;
            res = std::from_chars(tok.data(), tok.data() + colon, index);
            if (res.ec != std::errc{} || res.ptr != tok.data() + colon || index < 1)
                throw fail(ln, "bad index in '" + std::string(tok) + "'");
            if (index <= prev_index)
                throw fail(ln, "indices not ascending at '" + std::string(tok) + "'");
            prev_index = index;
            const std::string value_str(tok.substr(colon + 1));
            double value = 0;
            try {
                std::size_t used = 0;
                value = std::stod(value_str, &used);
                if (used != value_str.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw fail(ln, "bad value in '" + std::string(tok) + "'");
            }
            const std::size_t col = static_cast<std::size_t>(index - 1);
            max_col = std::max(max_col, col + 1);
            triplets.push_back({ln, static_cast<std::uint32_t>(col), value});
        }
    }

    data.matrix =
        sparse_from_triplets(lines.size(), std::max(n_cols_hint, max_col), triplets);
    return data;
}

void write_arff(const ExportJob& job) {
    auto train = open_out(job.out_dir, "train.arff");
    arff_split(train, job, job.block.train, job.train_labels);
    auto test = open_out(job.out_dir, "test.arff");
    arff_split(test, job, job.block.test, job.test_labels);
}

void write_exports(const ExportJob& job, const std::vector<std::string>& formats) {
    for (const auto& format : formats) {
        if (format == "csv") {
            write_csv(job);
        } else if (format == "svmlight") {
            write_svmlight(job);
        } else if (format == "arff") {
            write_arff(job);
        } else {
            throw ConfigError("unknown export format: " + format);
        }
    }
}

}  // namespace featforge
