#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncfun/ncalg.hpp"
#include "ncfun/rng.hpp"

namespace ncfun {

/// Deterministic description of a randomized case batch.
struct CaseSpec {
    std::uint64_t seed = kDefaultSeed;
    std::uint32_t d_max = 3;
    std::uint32_t deg_max = 4;
    std::size_t n_max = 3;
    std::string kernel = "exact"; // "exact" | "float"
    int count = 50;
};

namespace gen {

/// Numerators uniform in [-9, 9], denominators in [1, 9]; keeps exact
/// arithmetic sizes bounded through degree-5 words.
inline Rational rational(Rng& rng) {
    return Rational(rng.uniform_int(-9, 9), rng.uniform_int(1, 9));
}

inline double real(Rng& rng) { return static_cast<double>(rng.uniform_int(-9, 9)) / 4.0; }

template <Scalar T>
T scalar(Rng& rng) {
    if constexpr (ScalarTraits<T>::is_exact)
        return rational(rng);
    else
        return T(real(rng));
}

template <Scalar T>
Matrix<T> matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix<T> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = scalar<T>(rng);
    return m;
}

template <Scalar T>
MatrixPoint<T> point(Rng& rng, std::size_t d, std::size_t n) {
    MatrixPoint<T> p;
    for (std::size_t i = 0; i < d; ++i) p.mats.push_back(matrix<T>(rng, n, n));
    return p;
}

template <Scalar T>
Direction<T> direction(Rng& rng, std::size_t d, std::size_t rows, std::size_t cols) {
    Direction<T> z;
    for (std::size_t i = 0; i < d; ++i) z.mats.push_back(matrix<T>(rng, rows, cols));
    return z;
}

template <Scalar T>
Matrix<T> invertible(Rng& rng, std::size_t n) {
    for (;;) {
        Matrix<T> s = matrix<T>(rng, n, n);
        if (!ScalarTraits<T>::is_zero(determinant(s))) return s;
    }
}

/// Strictly upper triangular tuple: always nilpotent about zero of rank <= n.
template <Scalar T>
MatrixPoint<T> nilpotent_point(Rng& rng, std::size_t d, std::size_t n) {
    MatrixPoint<T> p = MatrixPoint<T>::zero(d, n);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) p.mats[k](i, j) = scalar<T>(rng);
    return p;
}

template <Scalar T>
NcPoly<T> poly(Rng& rng, std::uint32_t d, std::uint32_t deg_max, int terms = 5) {
    NcPoly<T> p(d);
    for (int t = 0; t < terms; ++t) {
        NcWord w;
        const auto len = static_cast<std::size_t>(rng.uniform_int(0, deg_max));
        for (std::size_t i = 0; i < len; ++i)
            w.letters.push_back(static_cast<std::uint32_t>(rng.uniform_int(0, d - 1)));
        p.add_term(w, scalar<T>(rng));
    }
    return p;
}

} // namespace gen
} // namespace ncfun
