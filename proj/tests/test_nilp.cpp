#include "doctest.h"

#include "ncfun/generators.hpp"
#include "ncfun/nilp.hpp"

using namespace ncfun;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

Matrix<Rational> jordan(std::size_t n) {
    Matrix<Rational> j(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) j(i, i + 1) = q(1);
    return j;
}

/// F(x, y) = y - x - x y  (letters: x = 0, y = 1).
NcPolyMap<Rational> geometric_F() {
    NcPoly<Rational> f(2);
    f.add_term(NcWord{1}, q(1));
    f.add_term(NcWord{0}, q(-1));
    f.add_term(NcWord{0, 1}, q(-1));
    return NcPolyMap<Rational>({f}, 1);
}

CenterPoint<Rational> zero_center(std::size_t d) {
    return CenterPoint<Rational>(MatrixPoint<Rational>::zero(d, 1));
}

/// Independent oracle for F = y - x - x y: the geometric series
/// Y = sum_{k>=1} X^k, truncated by nilpotency.
Matrix<Rational> geometric_series(const Matrix<Rational>& X) {
    Matrix<Rational> acc(X.rows(), X.cols());
    Matrix<Rational> power = X;
    while (!power.is_zero()) {
        acc += power;
        power = power * X;
    }
    return acc;
}

/// Truncated scalar power series c[0] + c[1] t + ... with rational
/// coefficients; enough arithmetic for reversion.
using Series = std::vector<Rational>;

Series series_mul(const Series& a, const Series& b, std::size_t K) {
    Series r(K + 1, q(0));
    for (std::size_t i = 0; i <= K; ++i)
        for (std::size_t j = 0; i + j <= K && j <= K; ++j)
            if (i < a.size() && j < b.size()) r[i + j] += a[i] * b[j];
    return r;
}

/// Compositional inverse of g(t) = sum_{k>=1} a_k t^k with a_1 invertible,
/// by the fixed-point recursion f = (t - sum_{k>=2} a_k f^k) / a_1.
Series series_reversion(const Series& a, std::size_t K) {
    Series f(K + 1, q(0));
    for (std::size_t round = 0; round <= K; ++round) {
        Series acc(K + 1, q(0));
        acc[1] = q(1);
        Series fpow = f;
        for (std::size_t k = 2; k < a.size() && k <= K; ++k) {
            fpow = series_mul(fpow, f, K);
            for (std::size_t i = 0; i <= K; ++i) acc[i] -= a[k] * fpow[i];
        }
        for (std::size_t i = 0; i <= K; ++i) f[i] = acc[i] / a[1];
    }
    return f;
}

Matrix<Rational> series_at_nilpotent(const Series& c, const Matrix<Rational>& X) {
    Matrix<Rational> acc(X.rows(), X.cols());
    Matrix<Rational> power = Matrix<Rational>::identity(X.rows());
    for (std::size_t k = 1; k < c.size(); ++k) {
        power = power * X;
        if (power.is_zero()) break;
        acc += power * c[k];
    }
    return acc;
}

/// g(y) = y + y^2 as a one-letter map.
NcPolyMap<Rational> quadratic_g() {
    NcPoly<Rational> g(1);
    g.add_term(NcWord{0}, q(1));
    g.add_term(NcWord{0, 0}, q(1));
    return NcPolyMap<Rational>({g}, 0);
}

} // namespace

TEST_CASE("certify_nilpotent on Jordan blocks and trivial shifts") {
    auto cert = certify_nilpotent(MatrixPoint<Rational>{jordan(3)}, zero_center(1), 10);
    CHECK(cert.kappa == 3);
    CHECK(cert.m == 3);

    // center shift of an ampliated center has rank 1
    CenterPoint<Rational> c(MatrixPoint<Rational>{Matrix<Rational>{{q(7)}}});
    auto cert1 = certify_nilpotent(ampliate(c.point, 4), c, 5);
    CHECK(cert1.kappa == 1);
}

TEST_CASE("certify_nilpotent rejects the matrix-unit pair") {
    Matrix<Rational> e12(2, 2), e21(2, 2);
    e12(0, 1) = q(1);
    e21(1, 0) = q(1);
    MatrixPoint<Rational> P{e12, e21};
    CHECK_THROWS_AS(certify_nilpotent(P, zero_center(2), 6), NotNilpotent);
}

TEST_CASE("certify_nilpotent divisibility error") {
    CenterPoint<Rational> c(MatrixPoint<Rational>::zero(1, 2));
    MatrixPoint<Rational> P{jordan(3)};
    CHECK_THROWS_AS(certify_nilpotent(P, c, 5), SizeMismatch);
}

TEST_CASE("odot reduces to the matrix product at block size 1") {
    Rng rng(3);
    auto a = gen::matrix<Rational>(rng, 3, 3);
    auto b = gen::matrix<Rational>(rng, 3, 3);
    CHECK(odot(a, b, 3) == a * b);
}

TEST_CASE("block-center certification via Kronecker lifts") {
    // Grid point [[J2, E],[0, J2]] about the s=2 center J2: the shift is the
    // strictly upper grid cell, so every length-2 odot word vanishes.
    CenterPoint<Rational> c(MatrixPoint<Rational>{jordan(2)});
    Matrix<Rational> P(4, 4);
    P.set_block(0, 0, jordan(2));
    P.set_block(2, 2, jordan(2));
    Matrix<Rational> E{{q(1), q(2)}, {q(3), q(4)}};
    P.set_block(0, 2, E);
    auto cert = certify_nilpotent(MatrixPoint<Rational>{P}, c, 6);
    CHECK(cert.kappa == 2);
    CHECK(cert.s == 2);
    CHECK(cert.m == 2);
}

TEST_CASE("delta_ry_center values") {
    auto L = delta_ry_center(geometric_F(), zero_center(2));
    CHECK(L.mat == Matrix<Rational>{{q(1)}});

    NcPoly<Rational> f2(2);
    f2.add_term(NcWord{1}, q(2));
    f2.add_term(NcWord{0}, q(-1));
    auto L2 = delta_ry_center(NcPolyMap<Rational>({f2}, 1), zero_center(2));
    CHECK(L2.mat == Matrix<Rational>{{q(2)}});
    CHECK(L2.inverted()->mat == Matrix<Rational>{{q(1, 2)}});

    // y - x y at center (1, 0): the y-coefficient 1 - x vanishes.
    NcPoly<Rational> f3(2);
    f3.add_term(NcWord{1}, q(1));
    f3.add_term(NcWord{0, 1}, q(-1));
    CenterPoint<Rational> c10 = CenterPoint<Rational>::scalars({q(1), q(0)});
    CHECK_THROWS_AS(delta_ry_center(NcPolyMap<Rational>({f3}, 1), c10), SingularDifferential);
}

TEST_CASE("delta_ry_center requires a square problem") {
    NcPoly<Rational> f(2);
    f.add_term(NcWord{1}, q(1));
    NcPolyMap<Rational> F({f, f}, 1);
    CHECK_THROWS_AS(delta_ry_center(F, zero_center(2)), NotSquare);
}

TEST_CASE("implicit solve against the geometric-series oracle") {
    auto F = geometric_F();
    auto center = zero_center(2);
    for (std::size_t n : {2u, 3u, 4u}) {
        MatrixPoint<Rational> X{jordan(n)};
        auto cert = certify_nilpotent(X, zero_center(1), 10);
        CHECK(cert.kappa == n);
        auto res = implicit_solve_nilp(F, center, X, cert);
        CHECK(res.Y.mats[0] == geometric_series(jordan(n)));
        CHECK(res.iterations <= cert.kappa);
        CHECK(all_zero(eval_map(F, concat_tuples(X, res.Y))));
    }

    MatrixPoint<Rational> Z = MatrixPoint<Rational>::zero(1, 3);
    auto certz = certify_nilpotent(Z, zero_center(1), 5);
    CHECK(certz.kappa == 1);
    auto resz = implicit_solve_nilp(F, center, Z, certz);
    CHECK(resz.Y.mats[0].is_zero());
    CHECK(resz.iterations == 0);
}

TEST_CASE("implicit solve on random nilpotent inputs is exact") {
    auto F = geometric_F();
    auto center = zero_center(2);
    Rng rng(42);
    for (int t = 0; t < 15; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 2));
        auto X = gen::nilpotent_point<Rational>(rng, 1, n);
        auto cert = certify_nilpotent(X, zero_center(1), 10);
        auto res = implicit_solve_nilp(F, center, X, cert);
        CHECK(all_zero(eval_map(F, concat_tuples(X, res.Y))));
        CHECK(res.Y.mats[0] == geometric_series(X.mats[0]));
        CHECK(res.iterations <= cert.kappa);
    }
}

TEST_CASE("center residual precondition") {
    auto F = geometric_F();
    CenterPoint<Rational> bad = CenterPoint<Rational>::scalars({q(1), q(1)});
    MatrixPoint<Rational> X{Matrix<Rational>::identity(2) + jordan(2)};
    auto cert = certify_nilpotent(X, CenterPoint<Rational>::scalars({q(1)}), 5);
    CHECK_THROWS_AS(implicit_solve_nilp(F, bad, X, cert), CenterResidualNonzero);
}

TEST_CASE("degree growth of the iteration steps") {
    auto F = geometric_F();
    auto center = zero_center(2);
    MatrixPoint<Rational> X{jordan(5)};
    auto cert = certify_nilpotent(X, zero_center(1), 10);
    auto res = implicit_solve_nilp(F, center, X, cert, true);
    REQUIRE(res.iterates.size() >= 2);
    for (std::size_t k = 0; k + 1 < res.iterates.size(); ++k) {
        MatrixPoint<Rational> step{res.iterates[k + 1].mats[0] - res.iterates[k].mats[0]};
        if (step.is_zero()) continue;
        auto sc = certify_nilpotent(step, zero_center(1), 12);
        const std::size_t bound = (cert.kappa + k) / (k + 1); // ceil(kappa/(k+1))
        CHECK(sc.kappa <= bound);
    }
}

TEST_CASE("uniqueness under a perturbed nilpotent seed") {
    auto F = geometric_F();
    auto center = zero_center(2);
    MatrixPoint<Rational> X{jordan(3)};
    auto cert = certify_nilpotent(X, zero_center(1), 10);
    auto base = implicit_solve_nilp(F, center, X, cert);

    Matrix<Rational> pert(3, 3);
    pert(0, 2) = q(5, 3);
    pert(0, 1) = q(-2);
    MatrixPoint<Rational> seed{pert};
    auto other = implicit_solve_nilp(F, center, X, cert, false, &seed);
    CHECK(other.Y.mats[0] == base.Y.mats[0]);
}

TEST_CASE("solved implicit function respects direct sums and intertwinings") {
    auto F = geometric_F();
    auto center = zero_center(2);
    Rng rng(99);
    auto X1 = gen::nilpotent_point<Rational>(rng, 1, 2);
    auto X2 = gen::nilpotent_point<Rational>(rng, 1, 3);
    auto c1 = certify_nilpotent(X1, zero_center(1), 10);
    auto c2 = certify_nilpotent(X2, zero_center(1), 10);
    auto Xsum = direct_sum(X1, X2);
    auto cs = certify_nilpotent(Xsum, zero_center(1), 10);

    auto f1 = implicit_solve_nilp(F, center, X1, c1).Y;
    auto f2 = implicit_solve_nilp(F, center, X2, c2).Y;
    auto fsum = implicit_solve_nilp(F, center, Xsum, cs).Y;
    CHECK(fsum.mats[0] == direct_sum(f1, f2).mats[0]);

    // inclusion T with X1 T = T (X1 (+) X2)
    Matrix<Rational> T(2, 5);
    T.set_block(0, 0, Matrix<Rational>::identity(2));
    CHECK(f1.mats[0] * T == T * fsum.mats[0]);
}

TEST_CASE("inverse solve against the reversion oracle") {
    auto g = quadratic_g();
    auto Y0 = zero_center(1);
    Series a{q(0), q(1), q(1)}; // y + y^2
    auto rev = series_reversion(a, 8);
    // signed Catalan numbers
    CHECK(rev[1] == q(1));
    CHECK(rev[2] == q(-1));
    CHECK(rev[3] == q(2));
    CHECK(rev[4] == q(-5));

    for (std::size_t n : {3u, 4u}) {
        MatrixPoint<Rational> X{jordan(n)};
        auto res = inverse_solve_nilp(g, Y0, X, 10);
        CHECK(res.Y.mats[0] == series_at_nilpotent(rev, jordan(n)));
        CHECK(eval_map(g, res.Y)[0] == X.mats[0]);
    }

    MatrixPoint<Rational> Z = MatrixPoint<Rational>::zero(1, 2);
    CHECK(inverse_solve_nilp(g, Y0, Z, 5).Y.mats[0].is_zero());
}

TEST_CASE("inverse round trips g(f(X)) = X and f(g(Y)) = Y exactly") {
    auto g = quadratic_g();
    auto Y0 = zero_center(1);
    Rng rng(123);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 3));
        auto X = gen::nilpotent_point<Rational>(rng, 1, n);
        auto f = inverse_solve_nilp(g, Y0, X, 10);
        CHECK(eval_map(g, f.Y)[0] == X.mats[0]);

        auto Y = gen::nilpotent_point<Rational>(rng, 1, n);
        MatrixPoint<Rational> gY{eval_map(g, Y)[0]};
        auto back = inverse_solve_nilp(g, Y0, gY, 10);
        CHECK(back.Y.mats[0] == Y.mats[0]);
    }
}

TEST_CASE("chord operator nilpotency and the Neumann inverse") {
    auto F = geometric_F();
    auto center = zero_center(2);

    MatrixPoint<Rational> centerAmp = ampliate(center.point, 2);
    auto trivial = chord_operator_nilpotency(F, center, centerAmp, centerAmp);
    CHECK(trivial.gamma == 1);
    CHECK(trivial.N.mat.is_zero());

    MatrixPoint<Rational> X{jordan(2)};
    auto cert = certify_nilpotent(X, zero_center(1), 10);
    auto fX = implicit_solve_nilp(F, center, X, cert).Y;
    auto P = concat_tuples(X, fX);
    auto op = chord_operator_nilpotency(F, center, P, P);
    CHECK(op.gamma <= 2);
    CHECK((op.N.mat * op.N.mat).is_zero());

    auto idmat = Matrix<Rational>::identity(op.N.mat.rows());
    CHECK(((idmat + op.N.mat) * op.neumann_inverse.mat) == idmat);
}

TEST_CASE("implicit derivative: identity, series, and linear maps") {
    auto center = zero_center(2);

    // F = y - x: f = id, derivative is the identity on directions.
    NcPoly<Rational> lin(2);
    lin.add_term(NcWord{1}, q(1));
    lin.add_term(NcWord{0}, q(-1));
    NcPolyMap<Rational> Fid({lin}, 1);
    Rng rng(7);
    auto X = gen::nilpotent_point<Rational>(rng, 1, 3);
    Direction<Rational> Z{gen::matrix<Rational>(rng, 3, 3)};
    auto dz = implicit_derivative_nilp(Fid, center, X, X, Z);
    CHECK(dz.mats[0] == Z.mats[0]);

    // F = y - x - x y at X = 0 (1x1): f'(0) = 1.
    auto F = geometric_F();
    MatrixPoint<Rational> x0 = MatrixPoint<Rational>::zero(1, 1);
    Direction<Rational> one{Matrix<Rational>{{q(1)}}};
    auto d0 = implicit_derivative_nilp(F, center, x0, x0, one);
    CHECK(d0.mats[0] == Matrix<Rational>{{q(1)}});

    // F = 2y - x: f = x/2.
    NcPoly<Rational> half(2);
    half.add_term(NcWord{1}, q(2));
    half.add_term(NcWord{0}, q(-1));
    NcPolyMap<Rational> Fh({half}, 1);
    Direction<Rational> six{Matrix<Rational>{{q(6)}}};
    auto dh = implicit_derivative_nilp(Fh, center, x0, x0, six);
    CHECK(dh.mats[0] == Matrix<Rational>{{q(3)}});
}

TEST_CASE("implicit derivative cross-checked by the doubled-point block") {
    auto F = geometric_F();
    auto center = zero_center(2);
    Rng rng(31);
    auto X = gen::nilpotent_point<Rational>(rng, 1, 3);
    auto cert = certify_nilpotent(X, zero_center(1), 10);
    auto fX = implicit_solve_nilp(F, center, X, cert).Y;
    Direction<Rational> Z{gen::matrix<Rational>(rng, 3, 3)};

    auto deriv = implicit_derivative_nilp(F, center, X, fX, Z);

    Matrix<Rational> doubled(6, 6);
    doubled.set_block(0, 0, X.mats[0]);
    doubled.set_block(3, 3, X.mats[0]);
    doubled.set_block(0, 3, Z.mats[0]);
    MatrixPoint<Rational> Xd{doubled};
    auto certd = certify_nilpotent(Xd, zero_center(1), 12);
    auto fXd = implicit_solve_nilp(F, center, Xd, certd).Y;
    CHECK(fXd.mats[0].block(0, 0, 3, 3) == fX.mats[0]);
    CHECK(fXd.mats[0].block(0, 3, 3, 3) == deriv.mats[0]);
}

TEST_CASE("derivative reciprocity of the inverse pair") {
    auto g = quadratic_g();
    auto Y0 = zero_center(1);
    auto F = inverse_problem_map(g);
    MatrixPoint<Rational> X0{eval_map(g, Y0.point)};
    CenterPoint<Rational> center(concat_tuples(X0, Y0.point));

    Rng rng(17);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 2));
        auto X = gen::nilpotent_point<Rational>(rng, 1, n);
        auto fX = inverse_solve_nilp(g, Y0, X, 10).Y;
        Direction<Rational> Z{gen::matrix<Rational>(rng, n, n)};
        // Delta_R g(f(X), f(X))(Z), then Delta_R f(X, X) of that: identity.
        Direction<Rational> W{delta_r_block(g.components[0], fX, fX, Z)};
        auto back = implicit_derivative_nilp(F, center, X, fX, W);
        CHECK(back.mats[0] == Z.mats[0]);
    }
}
