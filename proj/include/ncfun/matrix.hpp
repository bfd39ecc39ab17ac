#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/scalar.hpp"

namespace ncfun {

/// Dense row-major matrix over a scalar kernel. Sizes here are desk scale
/// (tensor lifts cap out at 512), so the solvers are plain Gaussian
/// elimination: exact pivoting for the rational kernel, partial pivoting on
/// magnitude for the float kernels.
template <Scalar T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw ShapeMismatch("ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
    static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix r(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] + o.data_[k];
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix r(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] - o.data_[k];
        return r;
    }
    Matrix operator-() const {
        Matrix r(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = -data_[k];
        return r;
    }
    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw ShapeMismatch("matrix product shape");
        Matrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                if (ScalarTraits<T>::is_zero(a)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }
    Matrix operator*(const T& s) const {
        Matrix r(rows_, cols_);
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] * s;
        return r;
    }
    friend Matrix operator*(const T& s, const Matrix& m) { return m * s; }

    Matrix& operator+=(const Matrix& o) { return *this = *this + o; }
    Matrix& operator-=(const Matrix& o) { return *this = *this - o; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Matrix conj_transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = ScalarTraits<T>::conj((*this)(i, j));
        return r;
    }

    T trace() const {
        if (!square()) throw ShapeMismatch("trace of non-square matrix");
        T t(0);
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const T& x) { return ScalarTraits<T>::is_zero(x); });
    }

    typename ScalarTraits<T>::Real max_abs() const {
        typename ScalarTraits<T>::Real m(0);
        for (const T& x : data_) m = std::max(m, ScalarTraits<T>::abs(x));
        return m;
    }

    Matrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
        if (i0 + r > rows_ || j0 + c > cols_) throw ShapeMismatch("block out of range");
        Matrix b(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }
    void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
        if (i0 + b.rows_ > rows_ || j0 + b.cols_ > cols_) throw ShapeMismatch("block out of range");
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

template <Scalar T>
Matrix<T> direct_sum(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> r(a.rows() + b.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), a.cols(), b);
    return r;
}

template <Scalar T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (ScalarTraits<T>::is_zero(a(i, j))) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

/// Solves A X = B by Gaussian elimination. Returns nullopt when A is singular
/// (exactly, for the rational kernel; pivot below 1e-12 relative, for float).
template <Scalar T>
std::optional<Matrix<T>> solve(Matrix<T> a, Matrix<T> b) {
    if (!a.square() || a.rows() != b.rows()) throw ShapeMismatch("solve shape");
    const std::size_t n = a.rows();
    using Real = typename ScalarTraits<T>::Real;
    Real tol(0);
    if constexpr (!ScalarTraits<T>::is_exact) {
        tol = a.max_abs() * 1e-12;
        if (tol == Real(0)) tol = Real(1e-300);
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        Real best = ScalarTraits<T>::abs(a(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            Real v = ScalarTraits<T>::abs(a(i, col));
            if (v > best) { best = v; piv = i; }
        }
        if (best <= tol) return std::nullopt;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || ScalarTraits<T>::is_zero(a(i, col))) continue;
            T f = a(i, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
        }
    }
    Matrix<T> x(n, b.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(i, j) / a(i, i);
    return x;
}

template <Scalar T>
std::optional<Matrix<T>> inverse(const Matrix<T>& a) {
    if (!a.square()) throw ShapeMismatch("inverse of non-square matrix");
    return solve(a, Matrix<T>::identity(a.rows()));
}

template <Scalar T>
T determinant(Matrix<T> a) {
    if (!a.square()) throw ShapeMismatch("determinant of non-square matrix");
    const std::size_t n = a.rows();
    T det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        auto best = ScalarTraits<T>::abs(a(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            auto v = ScalarTraits<T>::abs(a(i, col));
            if (v > best) { best = v; piv = i; }
        }
        if (ScalarTraits<T>::is_zero(a(piv, col))) return T(0);
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            if (ScalarTraits<T>::is_zero(a(i, col))) continue;
            T f = a(i, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
        }
    }
    return det;
}

} // namespace ncfun
