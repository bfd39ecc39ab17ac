#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/ncalg.hpp"

namespace ncfun {

/// First difference-differential of p at (X, Y) in direction Z, computed by
/// evaluating p on the 2x2 block upper triangular point [[X,Z],[0,Y]] and
/// reading the (1,2) block. Linear in Z.
template <Scalar T>
Matrix<T> delta_r_block(const NcPoly<T>& p, const MatrixPoint<T>& X, const MatrixPoint<T>& Y,
                        const Direction<T>& Z) {
    if (X.d() != Y.d() || X.d() != Z.d() || p.num_letters() != X.d())
        throw ShapeMismatch("delta_r operand arity");
    const std::size_t n = X.n(), m = Y.n();
    if (Z.rows() != n || Z.cols() != m) throw ShapeMismatch("direction shape");
    MatrixPoint<T> big;
    big.mats.reserve(X.d());
    for (std::size_t i = 0; i < X.d(); ++i) {
        Matrix<T> b(n + m, n + m);
        b.set_block(0, 0, X.mats[i]);
        b.set_block(0, n, Z.mats[i]);
        b.set_block(n, n, Y.mats[i]);
        big.mats.push_back(std::move(b));
    }
    return eval_poly(p, big).block(0, n, n, m);
}

/// Same value by the word expansion: each word contributes the sum over
/// positions j of X_{w_1}..X_{w_{j-1}} Z_{w_j} Y_{w_{j+1}}..Y_{w_k}.
template <Scalar T>
Matrix<T> delta_r_sym(const NcPoly<T>& p, const MatrixPoint<T>& X, const MatrixPoint<T>& Y,
                      const Direction<T>& Z) {
    if (X.d() != Y.d() || X.d() != Z.d() || p.num_letters() != X.d())
        throw ShapeMismatch("delta_r operand arity");
    const std::size_t n = X.n(), m = Y.n();
    if (Z.rows() != n || Z.cols() != m) throw ShapeMismatch("direction shape");
    Matrix<T> acc(n, m);
    for (const auto& [w, c] : p.terms()) {
        const std::size_t k = w.length();
        if (k == 0) continue;
        // prefix[j] = X_{w_1}..X_{w_j}, suffix[j] = Y_{w_{j+1}}..Y_{w_k}
        std::vector<Matrix<T>> prefix(k + 1), suffix(k + 1);
        prefix[0] = Matrix<T>::identity(n);
        for (std::size_t j = 0; j < k; ++j) prefix[j + 1] = prefix[j] * X.mats[w.letters[j]];
        suffix[k] = Matrix<T>::identity(m);
        for (std::size_t j = k; j-- > 0;) suffix[j] = Y.mats[w.letters[j]] * suffix[j + 1];
        for (std::size_t j = 0; j < k; ++j)
            acc += (prefix[j] * Z.mats[w.letters[j]] * suffix[j + 1]) * c;
    }
    return acc;
}

/// Order-l operator: the (1, l+1) block of p on the (l+1)x(l+1) block upper
/// bidiagonal point built from `points` and `dirs`. Multilinear in the
/// directions.
template <Scalar T>
Matrix<T> delta_r_higher(const NcPoly<T>& p, const std::vector<MatrixPoint<T>>& points,
                         const std::vector<Direction<T>>& dirs) {
    if (points.empty() || dirs.size() + 1 != points.size())
        throw ShapeMismatch("need l+1 points and l directions");
    const std::size_t d = points.front().d();
    if (p.num_letters() != d) throw ShapeMismatch("delta_r operand arity");
    std::vector<std::size_t> offsets{0};
    for (const auto& pt : points) {
        if (pt.d() != d) throw ComponentCountMismatch("point arity");
        offsets.push_back(offsets.back() + pt.n());
    }
    for (std::size_t k = 0; k < dirs.size(); ++k)
        if (dirs[k].d() != d || dirs[k].rows() != points[k].n() ||
            dirs[k].cols() != points[k + 1].n())
            throw ShapeMismatch("direction chain shape");
    const std::size_t total = offsets.back();
    MatrixPoint<T> big;
    big.mats.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        Matrix<T> b(total, total);
        for (std::size_t k = 0; k < points.size(); ++k)
            b.set_block(offsets[k], offsets[k], points[k].mats[i]);
        for (std::size_t k = 0; k < dirs.size(); ++k)
            b.set_block(offsets[k], offsets[k + 1], dirs[k].mats[i]);
        big.mats.push_back(std::move(b));
    }
    return eval_poly(p, big).block(0, offsets[points.size() - 1], points.front().n(),
                                   points.back().n());
}

/// TT series of a polynomial at a scalar center: part l is the homogeneous
/// degree-l component in the shifted letters, so part l applied to l copies
/// of (X - c*I) is the order-l TT term.
template <Scalar T>
struct TTSeries {
    CenterPoint<T> center;
    std::vector<NcPoly<T>> parts; // parts[l] homogeneous of degree l
};

template <Scalar T>
TTSeries<T> tt_coefficients(const NcPoly<T>& p, const CenterPoint<T>& c) {
    if (!c.scalar()) throw NonScalarCenter("TT coefficients need a scalar center");
    NcPoly<T> shifted = shift_poly(p, c);
    TTSeries<T> tt;
    tt.center = c;
    const std::size_t deg = shifted.is_zero() ? 0 : shifted.degree();
    for (std::size_t l = 0; l <= deg; ++l) tt.parts.push_back(shifted.homogeneous_part(l));
    return tt;
}

/// Partial TT sum: sum_{l <= up_to} part_l(X - c*I).
template <Scalar T>
Matrix<T> tt_evaluate(const TTSeries<T>& tt, const MatrixPoint<T>& X, std::size_t up_to) {
    if (X.d() != tt.center.d()) throw LetterCountMismatch("point arity and center differ");
    MatrixPoint<T> U = X;
    for (std::size_t i = 0; i < U.d(); ++i) {
        const T& c = tt.center.scalar_value(i);
        for (std::size_t k = 0; k < U.n(); ++k) U.mats[i](k, k) -= c;
    }
    const std::size_t n = X.n();
    Matrix<T> acc(n, n);
    for (std::size_t l = 0; l < tt.parts.size() && l <= up_to; ++l)
        acc += eval_poly(tt.parts[l], U);
    return acc;
}

/// Residual of the first-order intertwining identity
///   p(X) S - S p(Y) = Delta_R p(X, Y)(X S - S Y),   S in F^{n x m},
/// which is exactly zero for every polynomial in the rational kernel.
template <Scalar T>
Matrix<T> first_order_identity_residual(const NcPoly<T>& p, const MatrixPoint<T>& X,
                                        const MatrixPoint<T>& Y, const Matrix<T>& S) {
    if (S.rows() != X.n() || S.cols() != Y.n()) throw ShapeMismatch("S shape");
    Direction<T> Z;
    Z.mats.reserve(X.d());
    for (std::size_t i = 0; i < X.d(); ++i) Z.mats.push_back(X.mats[i] * S - S * Y.mats[i]);
    return eval_poly(p, X) * S - S * eval_poly(p, Y) - delta_r_block(p, X, Y, Z);
}

/// Componentwise Delta_R of a polynomial map.
template <Scalar T>
std::vector<Matrix<T>> delta_r_map(const NcPolyMap<T>& F, const MatrixPoint<T>& P,
                                   const MatrixPoint<T>& Q, const Direction<T>& Z) {
    std::vector<Matrix<T>> out;
    out.reserve(F.num_components());
    for (const auto& p : F.components) out.push_back(delta_r_block(p, P, Q, Z));
    return out;
}

/// Delta_R^Y: direction confined to the Y block ((0, Z) in the split).
template <Scalar T>
std::vector<Matrix<T>> delta_ry_map(const NcPolyMap<T>& F, const MatrixPoint<T>& P,
                                    const MatrixPoint<T>& Q, const Direction<T>& Zy) {
    Direction<T> Z = Direction<T>::zero(F.num_letters(), Zy.rows(), Zy.cols());
    for (std::uint32_t j = 0; j < F.y_letters(); ++j) Z.mats[F.split + j] = Zy.mats[j];
    return delta_r_map(F, P, Q, Z);
}

/// Delta_R^X: direction confined to the X block ((Z, 0) in the split).
template <Scalar T>
std::vector<Matrix<T>> delta_rx_map(const NcPolyMap<T>& F, const MatrixPoint<T>& P,
                                    const MatrixPoint<T>& Q, const Direction<T>& Zx) {
    Direction<T> Z = Direction<T>::zero(F.num_letters(), Zx.rows(), Zx.cols());
    for (std::uint32_t i = 0; i < F.split; ++i) Z.mats[i] = Zx.mats[i];
    return delta_r_map(F, P, Q, Z);
}

} // namespace ncfun
