#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace odstop {

// Dense row-major matrix of doubles. Deliberately minimal: the training
// engine only needs construction, element access and raw row pointers.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    // Copies the given rows (in the given order) into a new matrix.
    Matrix gather_rows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= rows) throw std::out_of_range("gather_rows: row index out of range");
            const double* src = row(idx[i]);
            double* dst = out.row(i);
            for (std::size_t j = 0; j < cols; ++j) dst[j] = src[j];
        }
        return out;
    }
};

}  // namespace odstop
