#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/linmap.hpp"
#include "ncfun/ncdiff.hpp"

namespace ncfun {

/// Hard cap on Kronecker-lifted sizes when certifying about centers with
/// s > 1; tensor powers grow as s^l * m.
inline constexpr std::size_t kNilpLiftCap = 512;

/// Block tensor product of an m x m grid of p x p blocks with an m x m grid
/// of q x q blocks; the (i,j) cell is sum_k A_ik (x) B_kj. At p = q = 1 this
/// is the ordinary matrix product.
template <Scalar T>
Matrix<T> odot(const Matrix<T>& A, const Matrix<T>& B, std::size_t m) {
    if (A.rows() % m != 0 || B.rows() % m != 0) throw SizeMismatch("grid does not divide size");
    const std::size_t p = A.rows() / m, q = B.rows() / m;
    Matrix<T> r(p * q * m, p * q * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Matrix<T> cell(p * q, p * q);
            for (std::size_t k = 0; k < m; ++k)
                cell += kron(A.block(i * p, k * p, p, p), B.block(k * q, j * q, q, q));
            r.set_block(i * p * q, j * p * q, cell);
        }
    return r;
}

/// Certificate that `point` is nilpotent about `center` of rank `kappa`:
/// every length-kappa word in the shifted components vanishes (as an odot_s
/// product) and some word of length kappa-1 does not.
template <Scalar T>
struct NilpCertificate {
    CenterPoint<T> center;
    MatrixPoint<T> point;
    std::size_t kappa = 0;
    std::size_t s = 1;
    std::size_t m = 1;
};

template <Scalar T>
NilpCertificate<T> certify_nilpotent(const MatrixPoint<T>& P, const CenterPoint<T>& c,
                                     std::size_t kappa_max) {
    if (P.d() != c.d()) throw ComponentCountMismatch("point and center arity differ");
    const std::size_t s = c.s();
    if (P.n() % s != 0) throw SizeMismatch("point size not a multiple of the center size");
    const std::size_t m = P.n() / s;

    MatrixPoint<T> shift = P - ampliate(c.point, m);
    // Nonzero words of the current length; extending a zero word stays zero.
    std::vector<Matrix<T>> level;
    for (const auto& mtx : shift.mats)
        if (!mtx.is_zero()) level.push_back(mtx);

    std::size_t kappa = 1;
    while (!level.empty()) {
        if (kappa >= kappa_max)
            throw NotNilpotent("no nilpotency rank <= kappa_max certifies the point");
        if (s > 1 && level.front().rows() * s > kNilpLiftCap)
            throw SizeMismatch("Kronecker lift exceeds the size cap");
        std::vector<Matrix<T>> next;
        for (const auto& w : level)
            for (const auto& d : shift.mats) {
                Matrix<T> prod = (s == 1) ? w * d : odot(w, d, m);
                if (!prod.is_zero()) next.push_back(std::move(prod));
            }
        level = std::move(next);
        ++kappa;
    }
    return NilpCertificate<T>{c, P, kappa, s, m};
}

/// The chord differential at the center: Z |-> Delta_R F((X0,Y0),(X0,Y0))(0,Z)
/// as a block map on (F^{s x s})^b. Requires as many components as Y letters
/// and exact invertibility.
template <Scalar T>
LinearBlockMap<T> delta_ry_center(const NcPolyMap<T>& F, const CenterPoint<T>& center) {
    F.validate();
    if (center.d() != F.num_letters())
        throw LetterCountMismatch("center arity and map letters differ");
    const std::size_t b = F.y_letters(), c = F.num_components(), s = center.s();
    if (b != c) throw NotSquare("component count must equal the Y letter count");
    auto L = LinearBlockMap<T>::from_function(
        s, b, c, [&](const std::vector<Matrix<T>>& blocks) {
            return delta_ry_map(F, center.point, center.point, Direction<T>(blocks));
        });
    if (!L.inverted()) throw SingularDifferential("center differential is singular");
    return L;
}

template <Scalar T>
struct NilpSolveResult {
    MatrixPoint<T> Y;
    std::size_t iterations = 0;
    std::size_t kappa = 0;           // certified rank of the input X
    std::size_t max_joint_kappa = 0; // largest joint rank observed along the run
    std::vector<MatrixPoint<T>> iterates;
};

/// Solves F(X, Y) = 0 exactly by the chord iteration
///   Y <- Y - L^{-1(m)} F(X, Y),  L = Delta_R^Y F(center, center),
/// seeded at the ampliated center (or `seed`). Terminates within the
/// certified rank; every arithmetic step is exact in the rational kernel.
template <Scalar T>
NilpSolveResult<T> implicit_solve_nilp(const NcPolyMap<T>& F, const CenterPoint<T>& center,
                                       const MatrixPoint<T>& X, const NilpCertificate<T>& cert,
                                       bool record_iterates = false,
                                       const MatrixPoint<T>* seed = nullptr) {
    F.validate();
    const std::size_t a = F.x_letters(), b = F.y_letters(), s = center.s();
    if (X.d() != a) throw ComponentCountMismatch("X must have one component per X letter");
    if (center.d() != F.num_letters())
        throw LetterCountMismatch("center arity and map letters differ");
    if (!all_zero(eval_map(F, center.point)))
        throw CenterResidualNonzero("F does not vanish at the center");
    if (cert.point.mats != X.mats || cert.s != s)
        throw SizeMismatch("certificate does not match the input point");

    LinearBlockMap<T> L = delta_ry_center(F, center);
    LinearBlockMap<T> Linv = *L.inverted();

    const std::size_t m = X.n() / s;
    CenterPoint<T> y0(y_part(center.point, F.split));
    MatrixPoint<T> Y = seed ? *seed : ampliate(y0.point, m);
    if (Y.d() != b || Y.n() != X.n()) throw ShapeMismatch("seed shape");

    const std::size_t joint_cap = 2 * cert.kappa + 4;
    NilpSolveResult<T> result;
    result.kappa = cert.kappa;

    // Joint rank of (X, Y^[k]) about the center, tracked per iterate.
    auto joint_kappa = [&](const MatrixPoint<T>& Yk) {
        return certify_nilpotent(concat_tuples(X, Yk), center, joint_cap).kappa;
    };

    std::size_t budget = 2 * joint_kappa(Y) + 2;
    for (std::size_t k = 0; k <= budget; ++k) {
        result.max_joint_kappa = std::max(result.max_joint_kappa, joint_kappa(Y));
        if (record_iterates) result.iterates.push_back(Y);
        auto residual = eval_map(F, concat_tuples(X, Y));
        if (all_zero(residual)) {
            result.iterations = k;
            result.Y = std::move(Y);
            return result;
        }
        auto update = Linv.apply_ampliated(residual);
        for (std::size_t j = 0; j < b; ++j) Y.mats[j] -= update[j];
    }
    throw IterationBudgetExceeded("residual did not vanish within the certified rank budget");
}

/// Raises letters of p into a larger alphabet at `offset`.
template <Scalar T>
NcPoly<T> embed_letters(const NcPoly<T>& p, std::uint32_t new_d, std::uint32_t offset) {
    NcPoly<T> r(new_d);
    for (const auto& [w, c] : p.terms()) {
        NcWord shifted;
        shifted.letters.reserve(w.length());
        for (auto l : w.letters) shifted.letters.push_back(l + offset);
        r.add_term(shifted, c);
    }
    return r;
}

/// F(X, Y) = g(Y) - X for an inverse problem: b fresh X letters in front of
/// g's Y letters.
template <Scalar T>
NcPolyMap<T> inverse_problem_map(const NcPolyMap<T>& g) {
    g.validate();
    if (g.split != 0) throw LetterCountMismatch("g must use Y letters only");
    const std::uint32_t board = g.num_letters();
    if (g.num_components() != board) throw NotSquare("g must have one component per letter");
    std::vector<NcPoly<T>> comps;
    comps.reserve(board);
    for (std::uint32_t k = 0; k < board; ++k)
        comps.push_back(embed_letters(g.components[k], 2 * board, board) -
                        NcPoly<T>::letter(2 * board, k));
    return NcPolyMap<T>(std::move(comps), board);
}

/// Solves g(Y) = X exactly for X nilpotent about g(Y0), via the implicit
/// solver on F(X, Y) = g(Y) - X.
template <Scalar T>
NilpSolveResult<T> inverse_solve_nilp(const NcPolyMap<T>& g, const CenterPoint<T>& Y0,
                                      const MatrixPoint<T>& X, std::size_t kappa_max) {
    NcPolyMap<T> F = inverse_problem_map(g);
    MatrixPoint<T> X0{eval_map(g, Y0.point)};
    CenterPoint<T> center(concat_tuples(X0, Y0.point));
    auto cert = certify_nilpotent(X, CenterPoint<T>(X0), kappa_max);
    return implicit_solve_nilp(F, center, X, cert);
}

/// The chord operator decomposition of Lemma-style invertibility:
/// Delta_R^Y F(P1, P2) = L^(m) (id + N) with N nilpotent; carries the
/// explicit Neumann inverse of id + N.
template <Scalar T>
struct ChordOperator {
    LinearBlockMap<T> N;
    std::size_t gamma = 0;
    LinearBlockMap<T> neumann_inverse; // (id + N)^{-1} = sum_{j<gamma} (-N)^j
};

template <Scalar T>
ChordOperator<T> chord_operator_nilpotency(const NcPolyMap<T>& F, const CenterPoint<T>& center,
                                           const MatrixPoint<T>& P1, const MatrixPoint<T>& P2,
                                           std::size_t kappa_max = 16) {
    F.validate();
    const std::size_t s = center.s(), b = F.y_letters();
    if (P1.n() != P2.n() || P1.d() != F.num_letters() || P2.d() != F.num_letters())
        throw ShapeMismatch("points must match the map arity at one size");
    const std::size_t m = P1.n() / s;
    auto k1 = certify_nilpotent(P1, center, kappa_max).kappa;
    auto k2 = certify_nilpotent(P2, center, kappa_max).kappa;
    const std::size_t gamma_cap = k1 + k2 - 1;

    LinearBlockMap<T> L = delta_ry_center(F, center);
    LinearBlockMap<T> Lamp = L.ampliated(m);
    LinearBlockMap<T> full = LinearBlockMap<T>::from_function(
        s * m, b, b, [&](const std::vector<Matrix<T>>& blocks) {
            return delta_ry_map(F, P1, P2, Direction<T>(blocks));
        });

    ChordOperator<T> op;
    op.N = (*Lamp.inverted()) * full - LinearBlockMap<T>::identity(s * m, b);

    Matrix<T> power = Matrix<T>::identity(op.N.mat.rows());
    Matrix<T> inv_acc(op.N.mat.rows(), op.N.mat.rows());
    std::size_t gamma = 0;
    bool sign_minus = false;
    while (!power.is_zero()) {
        if (gamma >= gamma_cap)
            throw NotNilpotentOperator("chord operator not nilpotent within the certified bound");
        inv_acc += sign_minus ? -power : power;
        power = power * op.N.mat;
        sign_minus = !sign_minus;
        ++gamma;
    }
    op.gamma = gamma;
    op.neumann_inverse = LinearBlockMap<T>::identity(s * m, b);
    op.neumann_inverse.mat = std::move(inv_acc);
    return op;
}

/// Derivative of the implicit function at a solved point:
///   Delta_R f(X, X)(Z) = -(Delta_R^Y F)^{-1} Delta_R^X F (Z) at ((X,Y),(X,Y)).
template <Scalar T>
Direction<T> implicit_derivative_nilp(const NcPolyMap<T>& F, const CenterPoint<T>& center,
                                      const MatrixPoint<T>& X, const MatrixPoint<T>& Y,
                                      const Direction<T>& Z) {
    F.validate();
    const std::size_t s = center.s(), b = F.y_letters();
    MatrixPoint<T> P = concat_tuples(X, Y);
    const std::size_t m = P.n() / s;
    auto rhs = delta_rx_map(F, P, P, Z);
    LinearBlockMap<T> full = LinearBlockMap<T>::from_function(
        s * m, b, b, [&](const std::vector<Matrix<T>>& blocks) {
            return delta_ry_map(F, P, P, Direction<T>(blocks));
        });
    auto inv = full.inverted();
    if (!inv) throw SingularDifferential("Y differential singular at the solved point");
    for (auto& r : rhs) r = -r;
    return Direction<T>(inv->apply(rhs));
}

} // namespace ncfun
