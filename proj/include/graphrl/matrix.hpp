#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace graphrl {

/// Dense row-major matrix of doubles. The single numeric container used by
/// every model in the library; 64-bit floats throughout so gradient checks
/// have enough headroom.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Builds from nested brace lists: Matrix::from_rows({{1,2},{3,4}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix row_vector(const std::vector<double>& values);
    static Matrix column_vector(const std::vector<double>& values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool all_finite() const noexcept;

    /// "3x4", used in error messages.
    std::string shape_str() const;

    Matrix row(std::size_t r) const;
    Matrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Activation { Sigmoid, Tanh, Relu };

// Plain (untaped) kernels. The autodiff tape records these same operations;
// oracles and inference paths call them directly.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b); // a^T * b
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b); // a * b^T
Matrix add(const Matrix& a, const Matrix& b);                // same shape, or b a row vector
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
Matrix concat_cols(const Matrix& a, const Matrix& b);
Matrix activation(const Matrix& x, Activation kind);
double mean_squared_error(const Matrix& pred, const Matrix& target);
double sum_squares(const Matrix& a);
Matrix column_sums(const Matrix& a); // 1 x cols

} // namespace graphrl
