#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/matrix.hpp"

namespace ncfun {

/// A linear map L : (F^{s x s})^b -> (F^{s x s})^c stored as a dense
/// (c s^2) x (b s^2) matrix. Vectorization is row-major within each s x s
/// block, component-major across the tuple. The ampliation L^(m) acts
/// blockwise on m x m grids of s x s blocks.
template <Scalar T>
struct LinearBlockMap {
    std::size_t s = 1, b = 0, c = 0;
    Matrix<T> mat; // (c s^2) x (b s^2)

    LinearBlockMap() = default;
    LinearBlockMap(std::size_t s_, std::size_t b_, std::size_t c_)
        : s(s_), b(b_), c(c_), mat(c_ * s_ * s_, b_ * s_ * s_) {}

    static LinearBlockMap identity(std::size_t s, std::size_t b) {
        LinearBlockMap l(s, b, b);
        l.mat = Matrix<T>::identity(b * s * s);
        return l;
    }

    /// Assembles the matrix by applying `fn` to every matrix-unit direction.
    static LinearBlockMap
    from_function(std::size_t s, std::size_t b, std::size_t c,
                  const std::function<std::vector<Matrix<T>>(const std::vector<Matrix<T>>&)>& fn) {
        LinearBlockMap l(s, b, c);
        std::vector<Matrix<T>> unit(b, Matrix<T>::zero(s, s));
        for (std::size_t k = 0; k < b; ++k)
            for (std::size_t al = 0; al < s; ++al)
                for (std::size_t be = 0; be < s; ++be) {
                    unit[k](al, be) = T(1);
                    auto out = fn(unit);
                    unit[k](al, be) = T(0);
                    if (out.size() != c) throw ComponentCountMismatch("map output arity");
                    const std::size_t col = (k * s + al) * s + be;
                    for (std::size_t j = 0; j < c; ++j)
                        for (std::size_t r1 = 0; r1 < s; ++r1)
                            for (std::size_t r2 = 0; r2 < s; ++r2)
                                l.mat((j * s + r1) * s + r2, col) = out[j](r1, r2);
                }
        return l;
    }

    std::vector<Matrix<T>> apply(const std::vector<Matrix<T>>& blocks) const {
        if (blocks.size() != b) throw ComponentCountMismatch("map input arity");
        Matrix<T> v(b * s * s, 1);
        for (std::size_t k = 0; k < b; ++k) {
            if (blocks[k].rows() != s || blocks[k].cols() != s)
                throw ShapeMismatch("block size mismatch");
            for (std::size_t i = 0; i < s; ++i)
                for (std::size_t j = 0; j < s; ++j) v((k * s + i) * s + j, 0) = blocks[k](i, j);
        }
        Matrix<T> w = mat * v;
        std::vector<Matrix<T>> out(c, Matrix<T>::zero(s, s));
        for (std::size_t k = 0; k < c; ++k)
            for (std::size_t i = 0; i < s; ++i)
                for (std::size_t j = 0; j < s; ++j) out[k](i, j) = w((k * s + i) * s + j, 0);
        return out;
    }

    /// Applies L^(m) to a b-tuple of (s m) x (s m) matrices.
    std::vector<Matrix<T>> apply_ampliated(const std::vector<Matrix<T>>& comps) const {
        if (comps.size() != b) throw ComponentCountMismatch("map input arity");
        const std::size_t n = comps.front().rows();
        if (n % s != 0) throw SizeMismatch("size not a multiple of the block size");
        const std::size_t m = n / s;
        std::vector<Matrix<T>> out(c, Matrix<T>::zero(n, n));
        std::vector<Matrix<T>> cell(b);
        for (std::size_t gi = 0; gi < m; ++gi)
            for (std::size_t gj = 0; gj < m; ++gj) {
                for (std::size_t k = 0; k < b; ++k) cell[k] = comps[k].block(gi * s, gj * s, s, s);
                auto res = apply(cell);
                for (std::size_t k = 0; k < c; ++k) out[k].set_block(gi * s, gj * s, res[k]);
            }
        return out;
    }

    /// Explicit matrix of the ampliation L^(m): a LinearBlockMap at block
    /// size s*m.
    LinearBlockMap ampliated(std::size_t m) const {
        return from_function(s * m, b, c, [this](const std::vector<Matrix<T>>& in) {
            return apply_ampliated(in);
        });
    }

    std::optional<LinearBlockMap> inverted() const {
        if (b != c) throw NotSquare("only square block maps invert");
        auto inv = inverse(mat);
        if (!inv) return std::nullopt;
        LinearBlockMap l(s, c, b);
        l.mat = std::move(*inv);
        return l;
    }

    LinearBlockMap operator*(const LinearBlockMap& o) const {
        if (s != o.s || b != o.c) throw ShapeMismatch("block map composition");
        LinearBlockMap l(s, o.b, c);
        l.mat = mat * o.mat;
        return l;
    }
    LinearBlockMap operator+(const LinearBlockMap& o) const {
        LinearBlockMap l(s, b, c);
        l.mat = mat + o.mat;
        return l;
    }
    LinearBlockMap operator-(const LinearBlockMap& o) const {
        LinearBlockMap l(s, b, c);
        l.mat = mat - o.mat;
        return l;
    }
};

} // namespace ncfun
