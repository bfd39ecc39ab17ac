#include "doctest.h"

#include "ncfun/generators.hpp"
#include "ncfun/ncalg.hpp"

using namespace ncfun;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

NcPoly<Rational> poly_x0x1_plus_2x0() {
    NcPoly<Rational> p(2);
    p.add_term(NcWord{0, 1}, q(1));
    p.add_term(NcWord{0}, q(2));
    return p;
}

} // namespace

TEST_CASE("eval_poly on the two-letter example") {
    auto p = poly_x0x1_plus_2x0();
    MatrixPoint<Rational> X{Matrix<Rational>{{q(0), q(1)}, {q(0), q(0)}},
                            Matrix<Rational>{{q(1), q(0)}, {q(0), q(2)}}};
    CHECK(eval_poly(p, X) == Matrix<Rational>{{q(0), q(4)}, {q(0), q(0)}});
}

TEST_CASE("eval_poly unit word and nilpotent square") {
    NcPoly<Rational> unit = NcPoly<Rational>::constant(1, q(1));
    MatrixPoint<Rational> X{Matrix<Rational>::identity(3) * q(5)};
    CHECK(eval_poly(unit, X) == Matrix<Rational>::identity(3));

    NcPoly<Rational> sq(1);
    sq.add_term(NcWord{0, 0}, q(1));
    MatrixPoint<Rational> J{Matrix<Rational>{{q(0), q(1)}, {q(0), q(0)}}};
    CHECK(eval_poly(sq, J).is_zero());
}

TEST_CASE("eval_poly arity errors") {
    auto p = poly_x0x1_plus_2x0();
    MatrixPoint<Rational> X{Matrix<Rational>{{q(1)}}};
    CHECK_THROWS_AS(eval_poly(p, X), LetterCountMismatch);
}

TEST_CASE("direct_sum basics and eval respect") {
    MatrixPoint<Rational> P{Matrix<Rational>{{q(1)}}};
    MatrixPoint<Rational> Q{Matrix<Rational>{{q(2)}}};
    auto S = direct_sum(P, Q);
    CHECK(S.mats[0] == Matrix<Rational>{{q(1), q(0)}, {q(0), q(2)}});

    NcPoly<Rational> sq(1);
    sq.add_term(NcWord{0, 0}, q(1));
    MatrixPoint<Rational> P2{Matrix<Rational>{{q(2)}}}, Q2{Matrix<Rational>{{q(3)}}};
    CHECK(eval_poly(sq, direct_sum(P2, Q2)) == Matrix<Rational>{{q(4), q(0)}, {q(0), q(9)}});
}

TEST_CASE("direct sum commutes up to the canonical permutation") {
    Rng rng(11);
    auto P = gen::point<Rational>(rng, 2, 2);
    auto Q = gen::point<Rational>(rng, 2, 1);
    auto PQ = direct_sum(P, Q), QP = direct_sum(Q, P);
    // permutation sending the Q block first
    Matrix<Rational> perm(3, 3);
    perm(0, 2) = q(1);
    perm(1, 0) = q(1);
    perm(2, 1) = q(1);
    auto conj = similarity(PQ, perm);
    CHECK(conj.mats == QP.mats);
}

TEST_CASE("ampliate") {
    MatrixPoint<Rational> Y{Matrix<Rational>{{q(1), q(2)}, {q(3), q(4)}}};
    auto Y2 = ampliate(Y, 2);
    CHECK(Y2.n() == 4);
    CHECK(Y2.mats[0].block(2, 2, 2, 2) == Y.mats[0]);
    CHECK(Y2.mats[0].block(0, 2, 2, 2).is_zero());
    CHECK(ampliate(Y, 1) == Y);

    NcPoly<Rational> p(1);
    p.add_term(NcWord{0}, q(1));
    p.add_term(NcWord{}, q(1));
    MatrixPoint<Rational> five{Matrix<Rational>{{q(5)}}};
    CHECK(eval_poly(p, ampliate(five, 3)) == Matrix<Rational>::identity(3) * q(6));
}

TEST_CASE("similarity identity and Jordan example") {
    MatrixPoint<Rational> X{Matrix<Rational>{{q(0), q(1)}, {q(0), q(0)}}};
    CHECK(similarity(X, Matrix<Rational>::identity(2)) == X);
    Matrix<Rational> S{{q(1), q(0)}, {q(0), q(2)}};
    CHECK(similarity(X, S).mats[0] == Matrix<Rational>{{q(0), q(1, 2)}, {q(0), q(0)}});
    Matrix<Rational> sing{{q(1), q(1)}, {q(1), q(1)}};
    CHECK_THROWS_AS(similarity(X, sing), SingularSimilarity);
}

TEST_CASE("polynomials are nc functions: direct sums, similarity, intertwining") {
    Rng rng(23);
    for (int t = 0; t < 30; ++t) {
        auto p = gen::poly<Rational>(rng, 2, 4);
        auto P = gen::point<Rational>(rng, 2, 2);
        auto Q = gen::point<Rational>(rng, 2, 3);
        CHECK(eval_poly(p, direct_sum(P, Q)) ==
              direct_sum(eval_poly(p, P), eval_poly(p, Q)));

        auto S = gen::invertible<Rational>(rng, 2);
        CHECK(eval_poly(p, similarity(P, S)) ==
              S * eval_poly(p, P) * *inverse(S));

        // T from the direct-sum inclusion: P * T = T * (P (+) Q)
        Matrix<Rational> T(2, 5);
        T.set_block(0, 0, Matrix<Rational>::identity(2));
        auto PQ = direct_sum(P, Q);
        for (std::size_t i = 0; i < 2; ++i) REQUIRE(P.mats[i] * T == T * PQ.mats[i]);
        CHECK(eval_poly(p, P) * T == T * eval_poly(p, PQ));
    }
}

TEST_CASE("shift_poly scalar-center expansions") {
    NcPoly<Rational> sq(1);
    sq.add_term(NcWord{0, 0}, q(1));

    auto c1 = CenterPoint<Rational>::scalars({q(1)});
    auto shifted = shift_poly(sq, c1);
    NcPoly<Rational> expect(1);
    expect.add_term(NcWord{}, q(1));
    expect.add_term(NcWord{0}, q(2));
    expect.add_term(NcWord{0, 0}, q(1));
    CHECK(shifted == expect);

    auto c2 = CenterPoint<Rational>::scalars({q(2)});
    auto shifted2 = shift_poly(sq, c2);
    NcPoly<Rational> expect2(1);
    expect2.add_term(NcWord{}, q(4));
    expect2.add_term(NcWord{0}, q(4));
    expect2.add_term(NcWord{0, 0}, q(1));
    CHECK(shifted2 == expect2);

    NcPoly<Rational> xy(2);
    xy.add_term(NcWord{0, 1}, q(1));
    CHECK(shift_poly(xy, CenterPoint<Rational>::scalars({q(0), q(0)})) == xy);
}

TEST_CASE("shift_poly round trip and evaluation identity") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        auto p = gen::poly<Rational>(rng, 2, 4);
        std::vector<Rational> cs{gen::rational(rng), gen::rational(rng)};
        auto c = CenterPoint<Rational>::scalars(cs);
        auto mc = CenterPoint<Rational>::scalars({-cs[0], -cs[1]});
        CHECK(shift_poly(shift_poly(p, c), mc) == p);

        auto X = gen::point<Rational>(rng, 2, 2);
        MatrixPoint<Rational> shiftedX = X;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) shiftedX.mats[i](k, k) -= cs[i];
        CHECK(eval_poly(shift_poly(p, c), shiftedX) == eval_poly(p, X));
    }
}

TEST_CASE("shift_poly rejects non-scalar centers") {
    NcPoly<Rational> p(1);
    p.add_term(NcWord{0}, q(1));
    CenterPoint<Rational> c(MatrixPoint<Rational>{Matrix<Rational>::identity(2)});
    CHECK_THROWS_AS(shift_poly(p, c), NonScalarCenter);
}
