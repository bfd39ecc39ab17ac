#pragma once

#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/matrix.hpp"

namespace ncfun {

/// A point X in (F^d)^{n x n}: d square matrices of one common size.
template <Scalar T>
struct MatrixPoint {
    std::vector<Matrix<T>> mats;

    MatrixPoint() = default;
    explicit MatrixPoint(std::vector<Matrix<T>> ms) : mats(std::move(ms)) { validate(); }
    MatrixPoint(std::initializer_list<Matrix<T>> ms) : mats(ms) { validate(); }

    static MatrixPoint zero(std::size_t d, std::size_t n) {
        MatrixPoint p;
        p.mats.assign(d, Matrix<T>::zero(n, n));
        return p;
    }
    /// Scalar tuple (c_0,..,c_{d-1}) as 1x1 matrices.
    static MatrixPoint scalars(const std::vector<T>& cs) {
        MatrixPoint p;
        for (const T& c : cs) p.mats.push_back(Matrix<T>{{c}});
        return p;
    }

    std::size_t d() const { return mats.size(); }
    std::size_t n() const { return mats.empty() ? 0 : mats.front().rows(); }

    void validate() const {
        if (mats.empty()) throw ComponentCountMismatch("empty matrix tuple");
        const std::size_t size = mats.front().rows();
        for (const auto& m : mats)
            if (!m.square() || m.rows() != size)
                throw ShapeMismatch("tuple components must be square of one size");
        if (size == 0) throw ShapeMismatch("zero-size matrices");
    }

    bool operator==(const MatrixPoint& o) const { return mats == o.mats; }

    bool is_zero() const {
        for (const auto& m : mats)
            if (!m.is_zero()) return false;
        return true;
    }

    MatrixPoint operator+(const MatrixPoint& o) const { return zip(o, std::plus<>{}); }
    MatrixPoint operator-(const MatrixPoint& o) const { return zip(o, std::minus<>{}); }
    MatrixPoint operator*(const T& s) const {
        MatrixPoint r(*this);
        for (auto& m : r.mats) m = m * s;
        return r;
    }

    typename ScalarTraits<T>::Real max_abs() const {
        typename ScalarTraits<T>::Real v(0);
        for (const auto& m : mats) v = std::max(v, m.max_abs());
        return v;
    }

private:
    template <class Op>
    MatrixPoint zip(const MatrixPoint& o, Op op) const {
        if (d() != o.d()) throw ComponentCountMismatch("tuple component counts differ");
        MatrixPoint r;
        r.mats.reserve(d());
        for (std::size_t i = 0; i < d(); ++i) r.mats.push_back(op(mats[i], o.mats[i]));
        return r;
    }
};

/// Center of a TT expansion / nilpotent neighborhood: a point of block size s.
template <Scalar T>
struct CenterPoint {
    MatrixPoint<T> point;

    CenterPoint() = default;
    explicit CenterPoint(MatrixPoint<T> p) : point(std::move(p)) {}
    static CenterPoint scalars(const std::vector<T>& cs) {
        return CenterPoint(MatrixPoint<T>::scalars(cs));
    }

    std::size_t s() const { return point.n(); }
    std::size_t d() const { return point.d(); }
    bool scalar() const { return s() == 1; }
    /// Scalar value of component i (requires s = 1).
    const T& scalar_value(std::size_t i) const {
        if (!scalar()) throw NonScalarCenter("scalar center required");
        return point.mats[i](0, 0);
    }
};

/// A direction tuple Z in (F^d)^{n x m}; components may be rectangular but
/// share one shape.
template <Scalar T>
struct Direction {
    std::vector<Matrix<T>> mats;

    Direction() = default;
    explicit Direction(std::vector<Matrix<T>> ms) : mats(std::move(ms)) { validate(); }
    Direction(std::initializer_list<Matrix<T>> ms) : mats(ms) { validate(); }
    explicit Direction(const MatrixPoint<T>& p) : mats(p.mats) {}

    static Direction zero(std::size_t d, std::size_t rows, std::size_t cols) {
        Direction z;
        z.mats.assign(d, Matrix<T>::zero(rows, cols));
        return z;
    }

    std::size_t d() const { return mats.size(); }
    std::size_t rows() const { return mats.empty() ? 0 : mats.front().rows(); }
    std::size_t cols() const { return mats.empty() ? 0 : mats.front().cols(); }

    void validate() const {
        if (mats.empty()) throw ComponentCountMismatch("empty direction tuple");
        for (const auto& m : mats)
            if (m.rows() != mats.front().rows() || m.cols() != mats.front().cols())
                throw ShapeMismatch("direction components must share one shape");
    }

    Direction operator+(const Direction& o) const {
        if (d() != o.d()) throw ComponentCountMismatch("direction component counts differ");
        Direction r;
        for (std::size_t i = 0; i < d(); ++i) r.mats.push_back(mats[i] + o.mats[i]);
        return r;
    }
    Direction operator-(const Direction& o) const {
        if (d() != o.d()) throw ComponentCountMismatch("direction component counts differ");
        Direction r;
        for (std::size_t i = 0; i < d(); ++i) r.mats.push_back(mats[i] - o.mats[i]);
        return r;
    }
    Direction operator*(const T& s) const {
        Direction r(*this);
        for (auto& m : r.mats) m = m * s;
        return r;
    }
};

} // namespace ncfun
