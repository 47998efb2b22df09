#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "common.hpp"

namespace pcs {

// Dense row-major matrix of doubles. Everything in this project is small
// enough that value semantics and plain loops are the right tool.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }
    std::span<double> row(std::size_t r) { return {row_ptr(r), cols_}; }
    std::span<const double> row(std::size_t r) const { return {row_ptr(r), cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
    bool all_finite() const;
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// c += a * b without allocating.
void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c);

// Numerically stable softmax with an optional temperature divisor; the result
// sums to 1 and is shift-invariant. Throws on an empty input.
std::vector<double> softmax(std::span<const double> v, double temperature_divisor = 1.0);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

void ensure_finite(const Matrix& m, const char* what);

}  // namespace pcs
