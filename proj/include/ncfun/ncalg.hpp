#pragma once

#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/matrix.hpp"
#include "ncfun/point.hpp"
#include "ncfun/poly.hpp"

namespace ncfun {

/// Evaluates p at X: sum over words w of c_w * X_{w_1} ... X_{w_k}, with the
/// empty word contributing c * I.
template <Scalar T>
Matrix<T> eval_poly(const NcPoly<T>& p, const MatrixPoint<T>& X) {
    if (p.num_letters() != X.d())
        throw LetterCountMismatch("polynomial letters and tuple components differ");
    const std::size_t n = X.n();
    Matrix<T> acc(n, n);
    for (const auto& [w, c] : p.terms()) {
        if (w.empty()) {
            for (std::size_t i = 0; i < n; ++i) acc(i, i) += c;
            continue;
        }
        Matrix<T> prod = X.mats[w.letters.front()];
        for (std::size_t k = 1; k < w.letters.size(); ++k) prod = prod * X.mats[w.letters[k]];
        acc += prod * c;
    }
    return acc;
}

/// Componentwise block-diagonal stacking P (+) Q.
template <Scalar T>
MatrixPoint<T> direct_sum(const MatrixPoint<T>& P, const MatrixPoint<T>& Q) {
    if (P.d() != Q.d()) throw ComponentCountMismatch("direct sum of unequal tuples");
    MatrixPoint<T> r;
    r.mats.reserve(P.d());
    for (std::size_t i = 0; i < P.d(); ++i) r.mats.push_back(direct_sum(P.mats[i], Q.mats[i]));
    return r;
}

/// m-fold direct sum Y^(m) = I_m (x) Y.
template <Scalar T>
MatrixPoint<T> ampliate(const MatrixPoint<T>& Y, std::size_t m) {
    if (m < 1) throw SizeMismatch("ampliation order must be >= 1");
    MatrixPoint<T> r;
    r.mats.reserve(Y.d());
    const std::size_t n = Y.n();
    for (const auto& mat : Y.mats) {
        Matrix<T> big(n * m, n * m);
        for (std::size_t k = 0; k < m; ++k) big.set_block(k * n, k * n, mat);
        r.mats.push_back(std::move(big));
    }
    return r;
}

/// Componentwise conjugation S X S^{-1}. For float kernels the inverse must
/// also pass a crude condition estimate (||S|| ||S^{-1}|| in max-entry scale).
template <Scalar T>
MatrixPoint<T> similarity(const MatrixPoint<T>& X, const Matrix<T>& S) {
    if (!S.square() || S.rows() != X.n()) throw ShapeMismatch("similarity size");
    auto inv = inverse(S);
    if (!inv) throw SingularSimilarity("similarity matrix not invertible");
    if constexpr (!ScalarTraits<T>::is_exact) {
        const double cond = ScalarTraits<T>::to_double(S.max_abs()) *
                            ScalarTraits<T>::to_double(inv->max_abs()) * S.rows();
        if (cond > 1e12) throw SingularSimilarity("similarity matrix too ill-conditioned");
    }
    MatrixPoint<T> r;
    r.mats.reserve(X.d());
    for (const auto& m : X.mats) r.mats.push_back(S * m * (*inv));
    return r;
}

/// Recenters p at a scalar center: returns q with q(U) = p(c*I + U). The
/// homogeneous parts of q are the TT coefficients of p at c.
template <Scalar T>
NcPoly<T> shift_poly(const NcPoly<T>& p, const CenterPoint<T>& c) {
    if (!c.scalar()) throw NonScalarCenter("shift_poly needs a scalar center");
    if (c.d() != p.num_letters())
        throw LetterCountMismatch("center arity and polynomial letters differ");
    const std::uint32_t d = p.num_letters();
    std::vector<NcPoly<T>> subs;
    subs.reserve(d);
    for (std::uint32_t i = 0; i < d; ++i)
        subs.push_back(NcPoly<T>::constant(d, c.scalar_value(i)) + NcPoly<T>::letter(d, i));
    return p.compose(subs);
}

/// Evaluates every component of F at a joint point (d = split + y letters).
template <Scalar T>
std::vector<Matrix<T>> eval_map(const NcPolyMap<T>& F, const MatrixPoint<T>& XY) {
    if (F.num_letters() != XY.d())
        throw LetterCountMismatch("map letters and tuple components differ");
    std::vector<Matrix<T>> out;
    out.reserve(F.num_components());
    for (const auto& p : F.components) out.push_back(eval_poly(p, XY));
    return out;
}

template <Scalar T>
bool all_zero(const std::vector<Matrix<T>>& ms) {
    for (const auto& m : ms)
        if (!m.is_zero()) return false;
    return true;
}

/// Concatenates an a-tuple and a b-tuple at one size into an (a+b)-tuple.
template <Scalar T>
MatrixPoint<T> concat_tuples(const MatrixPoint<T>& X, const MatrixPoint<T>& Y) {
    if (X.n() != Y.n()) throw ShapeMismatch("tuple sizes differ");
    MatrixPoint<T> r;
    r.mats = X.mats;
    r.mats.insert(r.mats.end(), Y.mats.begin(), Y.mats.end());
    return r;
}

template <Scalar T>
MatrixPoint<T> x_part(const MatrixPoint<T>& XY, std::uint32_t split) {
    MatrixPoint<T> r;
    r.mats.assign(XY.mats.begin(), XY.mats.begin() + split);
    return r;
}

template <Scalar T>
MatrixPoint<T> y_part(const MatrixPoint<T>& XY, std::uint32_t split) {
    MatrixPoint<T> r;
    r.mats.assign(XY.mats.begin() + split, XY.mats.end());
    return r;
}

} // namespace ncfun
