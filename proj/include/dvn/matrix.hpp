#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dvn {

// Dense column-major matrix. Columns are the natural unit here: STFT frames,
// activation vectors, and probability vectors are all columns.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // column-major, rows * cols

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[c * rows + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data[c * rows + r]; }

    std::span<double> col(std::size_t c) { return {data.data() + c * rows, rows}; }
    std::span<const double> col(std::size_t c) const { return {data.data() + c * rows, rows}; }

    bool empty() const { return data.empty(); }
};

}  // namespace dvn
