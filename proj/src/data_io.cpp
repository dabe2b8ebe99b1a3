#include "odstop/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "odstop/rng.hpp"

namespace odstop {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void cell_error(const std::filesystem::path& path, std::size_t row,
                             std::size_t col, const std::string& what) {
    throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ", column " +
                             std::to_string(col) + ": " + what);
}

double parse_cell(const std::filesystem::path& path, std::size_t row, std::size_t col,
                  const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) cell_error(path, row, col, "empty cell");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        cell_error(path, row, col, "not a number: '" + s + "'");
    if (!std::isfinite(value)) cell_error(path, row, col, "non-finite value");
    return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_csv: " + path.string() + " is empty");
    const auto header = split_line(line);
    if (header.empty() || (header.size() == 1 && trim(header[0]).empty()))
        throw std::runtime_error("load_csv: " + path.string() + " has an empty header");

    const bool labeled = trim(header.back()) == "label";
    const std::size_t d = labeled ? header.size() - 1 : header.size();
    if (d == 0) throw std::runtime_error("load_csv: " + path.string() + " has no feature columns");

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t n = 0;
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: " + path.string() + ": row " +
                                     std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        for (std::size_t c = 0; c < d; ++c)
            values.push_back(parse_cell(path, row, c + 1, cells[c]));
        if (labeled) {
            const std::string s = trim(cells.back());
            if (s == "0")
                labels.push_back(0);
            else if (s == "1")
                labels.push_back(1);
            else
                cell_error(path, row, header.size(), "label must be 0 or 1, got '" + s + "'");
        }
        ++n;
    }
    if (n == 0) throw std::runtime_error("load_csv: " + path.string() + " has no data rows");

    Dataset data;
    data.name = path.stem().string();
    data.X.rows = n;
    data.X.cols = d;
    data.X.data = std::move(values);
    data.has_labels = labeled;
    if (labeled) {
        data.labels = std::move(labels);
        double s = 0.0;
        for (int l : data.labels) s += l;
        data.outlier_ratio = s / static_cast<double>(n);
    }
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    if (data.n() == 0) throw std::invalid_argument("write_csv: empty dataset");
    if (data.has_labels && data.labels.size() != data.n())
        throw std::invalid_argument("write_csv: label count does not match rows");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());

    for (std::size_t c = 0; c < data.dim(); ++c) {
        if (c) out << ',';
        out << 'f' << c;
    }
    if (data.has_labels) out << ",label";
    out << '\n';

    char buf[40];
    for (std::size_t r = 0; r < data.n(); ++r) {
        const double* row = data.X.row(r);
        for (std::size_t c = 0; c < data.dim(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", row[c]);
            out << buf;
        }
        if (data.has_labels) out << ',' << data.labels[r];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

Dataset standardize(const Dataset& data) {
    if (data.n() == 0) throw std::invalid_argument("standardize: empty dataset");
    Dataset out = data;
    const std::size_t n = data.n(), d = data.dim();
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += data.X(r, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dx = data.X(r, c) - mean;
            var += dx * dx;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        if (sd < 1e-12) {
            for (std::size_t r = 0; r < n; ++r) out.X(r, c) = 0.0;
        } else {
            for (std::size_t r = 0; r < n; ++r) out.X(r, c) = (data.X(r, c) - mean) / sd;
        }
    }
    return out;
}

EvalSet sample_eval_set(const Dataset& data, std::size_t n_eval, std::uint64_t seed) {
    if (data.n() == 0) throw std::invalid_argument("sample_eval_set: empty dataset");
    if (n_eval == 0) throw std::invalid_argument("sample_eval_set: n_eval must be positive");
    EvalSet out;
    if (n_eval >= data.n()) {
        out.indices.resize(data.n());
        std::iota(out.indices.begin(), out.indices.end(), std::size_t{0});
    } else {
        // Partial Fisher-Yates: the first n_eval entries are a uniform sample
        // without replacement.
        std::vector<std::size_t> pool(data.n());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        Rng rng(seed);
        for (std::size_t i = 0; i < n_eval; ++i) {
            const std::size_t j = i + rng.below(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(n_eval);
        out.indices = std::move(pool);
    }
    out.features = data.X.gather_rows(out.indices);
    return out;
}

std::vector<std::vector<std::size_t>> batches(std::size_t n, std::size_t batch_size,
                                              std::uint64_t seed, std::size_t epoch) {
    if (n == 0) throw std::invalid_argument("batches: n must be positive");
    if (batch_size == 0) throw std::invalid_argument("batches: batch_size must be positive");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (batch_size >= n) return {order};

    Rng rng(mix_seed(seed, epoch));
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(start + batch_size, n);
        out.emplace_back(order.begin() + start, order.begin() + end);
    }
    return out;
}

Dataset gen_synthetic(std::size_t n_in, std::size_t n_out, std::size_t d, double spread,
                      std::uint64_t seed) {
    if (n_in == 0 || n_out == 0)
        throw std::invalid_argument("gen_synthetic: both classes need at least one sample");
    if (d == 0) throw std::invalid_argument("gen_synthetic: dimension must be positive");
    if (!(spread > 0.0)) throw std::invalid_argument("gen_synthetic: spread must be positive");

    const std::size_t n = n_in + n_out;
    Rng rng(seed);
    Matrix X(n, d);
    std::vector<int> labels(n, 0);
    for (std::size_t r = 0; r < n_in; ++r)
        for (std::size_t c = 0; c < d; ++c) X(r, c) = rng.normal();
    for (std::size_t r = n_in; r < n; ++r) {
        labels[r] = 1;
        for (std::size_t c = 0; c < d; ++c) X(r, c) = rng.uniform(-spread, spread);
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);

    Dataset data;
    data.name = "synthetic";
    data.X = X.gather_rows(perm);
    data.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) data.labels[i] = labels[perm[i]];
    data.has_labels = true;
    data.outlier_ratio = static_cast<double>(n_out) / static_cast<double>(n);
    return data;
}

}  // namespace odstop
