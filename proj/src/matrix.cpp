#include "graphrl/matrix.hpp"

#include <cmath>

#include "graphrl/errors.hpp"

namespace graphrl {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_str());
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix out(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw DimensionError("ragged row in matrix literal");
        }
        std::size_t j = 0;
        for (const double v : row) out(i, j++) = v;
        ++i;
    }
    return out;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

Matrix Matrix::row_vector(const std::vector<double>& values) {
    return Matrix(1, values.size(), values);
}

Matrix Matrix::column_vector(const std::vector<double>& values) {
    return Matrix(values.size(), 1, values);
}

bool Matrix::all_finite() const noexcept {
    for (const double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix Matrix::row(std::size_t r) const {
    Matrix out(1, cols_);
    for (std::size_t j = 0; j < cols_; ++j) out(0, j) = (*this)(r, j);
    return out;
}

Matrix Matrix::transposed() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul shape mismatch: " + a.shape_str() + " x " + b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* od = out.data().data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = ad + i * k;
        double* orow = od + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = bd + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("matmul shape mismatch: " + a.shape_str() + "^T x " + b.shape_str());
    }
    Matrix out(a.cols(), b.cols());
    const std::size_t n = a.cols(), k = a.rows(), m = b.cols();
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* od = out.data().data();
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = ad + p * n;
        const double* brow = bd + p * m;
        for (std::size_t i = 0; i < n; ++i) {
            const double av = arow[i];
            double* orow = od + i * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul shape mismatch: " + a.shape_str() + " x " + b.shape_str() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += a(i, p) * b(j, p);
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.same_shape(b)) {
        Matrix out = a;
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
        return out;
    }
    // Row-vector broadcast: the one form of broadcasting supported (bias rows).
    if (b.rows() == 1 && b.cols() == a.cols()) {
        Matrix out = a;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += b(0, j);
        }
        return out;
    }
    throw DimensionError("add shape mismatch: " + a.shape_str() + " + " + b.shape_str());
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("hadamard shape mismatch: " + a.shape_str() + " * " + b.shape_str());
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out = a;
    for (double& v : out.data()) v *= factor;
    return out;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("concat_cols row mismatch: " + a.shape_str() + " | " + b.shape_str());
    }
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
    }
    return out;
}

Matrix activation(const Matrix& x, Activation kind) {
    // Saturation is clamped to the nearest representable interior value so
    // sigmoid stays strictly in (0,1) and tanh strictly in (-1,1) even where
    // the double-precision result would round onto the boundary.
    static const double kBelowOne = std::nextafter(1.0, 0.0);
    static const double kAboveMinusOne = std::nextafter(-1.0, 0.0);
    static const double kAboveZero = std::nextafter(0.0, 1.0);
    Matrix out = x;
    switch (kind) {
        case Activation::Sigmoid:
            for (double& v : out.data()) {
                v = 1.0 / (1.0 + std::exp(-v));
                if (v >= 1.0) v = kBelowOne;
                if (v <= 0.0) v = kAboveZero;
            }
            break;
        case Activation::Tanh:
            for (double& v : out.data()) {
                v = std::tanh(v);
                if (v >= 1.0) v = kBelowOne;
                if (v <= -1.0) v = kAboveMinusOne;
            }
            break;
        case Activation::Relu:
            for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
            break;
    }
    return out;
}

double mean_squared_error(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) {
        throw DimensionError("mse shape mismatch: " + pred.shape_str() + " vs " + target.shape_str());
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred.data()[i] - target.data()[i];
        acc += e * e;
    }
    return acc / static_cast<double>(pred.size());
}

double sum_squares(const Matrix& a) {
    double acc = 0.0;
    for (const double v : a.data()) acc += v * v;
    return acc;
}

Matrix column_sums(const Matrix& a) {
    Matrix out(1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
    }
    return out;
}

} // namespace graphrl
