#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/linmap.hpp"
#include "ncfun/ncdiff.hpp"
#include "ncfun/nilp.hpp"
#include "ncfun/rng.hpp"

namespace ncfun {

/// Spectral norm by power iteration on A^T A: 30 iterations or 1e-12 relative
/// stagnation.
inline double spectral_norm(const Matrix<double>& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const Matrix<double> b = a.conj_transpose() * a;
    const std::size_t n = b.rows();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-4 * static_cast<double>(i + 1);
    double lambda = 0.0;
    for (int iter = 0; iter < 30; ++iter) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += b(i, j) * v[j];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        const double prev = lambda;
        lambda = norm;
        if (iter > 0 && std::abs(lambda - prev) <= 1e-12 * std::abs(lambda)) break;
    }
    return std::sqrt(lambda);
}

/// The operator-space norm on tuples: max over components of the spectral
/// norm. Direct sums land on the max of the summands by construction.
inline double ns_norm(const std::vector<Matrix<double>>& mats) {
    double v = 0.0;
    for (const auto& m : mats) v = std::max(v, spectral_norm(m));
    return v;
}
inline double ns_norm(const MatrixPoint<double>& p) { return ns_norm(p.mats); }
inline double ns_norm(const Direction<double>& z) { return ns_norm(z.mats); }

namespace detail {

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix. Returns
/// eigenvalues and the orthogonal V with A = V diag(w) V^T.
inline void jacobi_eigen(Matrix<double> a, std::vector<double>& w, Matrix<double>& v) {
    const std::size_t n = a.rows();
    v = Matrix<double>::identity(n);
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = a(i, i);
}

/// Nearest partial isometry to G (the polar factor), the maximizer of
/// <G, Z> over the spectral unit ball.
inline Matrix<double> polar_factor(const Matrix<double>& g) {
    const Matrix<double> gram = g.conj_transpose() * g;
    std::vector<double> w;
    Matrix<double> v;
    jacobi_eigen(gram, w, v);
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, x);
    if (wmax <= 0.0) return Matrix<double>::identity(g.rows()).block(0, 0, g.rows(), g.cols());
    Matrix<double> isqrt(v.rows(), v.rows());
    for (std::size_t i = 0; i < v.rows(); ++i)
        for (std::size_t j = 0; j < v.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < v.rows(); ++k) {
                const double lam = w[k];
                if (lam > 1e-14 * wmax) acc += v(i, k) * v(j, k) / std::sqrt(lam);
            }
            isqrt(i, j) = acc;
        }
    Matrix<double> z = g * isqrt;
    const double sn = spectral_norm(z);
    if (sn > 1.0) z = z * (1.0 / sn);
    return z;
}

/// Top singular pair of W via the Gram matrix.
inline void top_singular_pair(const Matrix<double>& wm, Matrix<double>& u, Matrix<double>& v) {
    std::vector<double> w;
    Matrix<double> vecs;
    jacobi_eigen(wm.conj_transpose() * wm, w, vecs);
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] > w[best]) best = i;
    v = Matrix<double>(wm.cols(), 1);
    for (std::size_t i = 0; i < wm.cols(); ++i) v(i, 0) = vecs(i, best);
    u = wm * v;
    const double un = std::sqrt((u.conj_transpose() * u)(0, 0));
    if (un > 0) u = u * (1.0 / un);
}

inline Matrix<double> random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix<double> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    return m;
}

inline std::vector<Matrix<double>> random_tuple(Rng& rng, std::size_t d, std::size_t n) {
    std::vector<Matrix<double>> t;
    t.reserve(d);
    for (std::size_t k = 0; k < d; ++k) t.push_back(random_matrix(rng, n, n));
    return t;
}

/// Scales a tuple to ns_norm exactly `target`.
inline void rescale_tuple(std::vector<Matrix<double>>& t, double target) {
    const double n = ns_norm(t);
    if (n <= 0.0) return;
    for (auto& m : t) m = m * (target / n);
}

/// Lower-bound estimate of the operator norm of a block map with respect to
/// the max-of-spectral tuple norms, by alternating polar ascent from random
/// and structured starts. Never exceeds the true norm beyond roundoff.
inline double op_norm_lower_bound(const LinearBlockMap<double>& map, Rng& rng, int trials,
                                  std::vector<std::vector<Matrix<double>>> seeds = {}) {
    const std::size_t S = map.s, b = map.b, c = map.c;
    double best = 0.0;
    std::vector<std::vector<Matrix<double>>> starts = std::move(seeds);
    starts.push_back(std::vector<Matrix<double>>(b, Matrix<double>::identity(S)));
    for (int t = 0; t < trials; ++t) starts.push_back(random_tuple(rng, b, S));

    const LinearBlockMap<double> adjoint = [&] {
        LinearBlockMap<double> a(S, c, b);
        a.mat = map.mat.conj_transpose();
        return a;
    }();

    for (auto& z : starts) {
        rescale_tuple(z, 1.0);
        if (ns_norm(z) == 0.0) continue;
        for (int iter = 0; iter < 8; ++iter) {
            auto w = map.apply(z);
            std::size_t jstar = 0;
            double val = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                const double nj = spectral_norm(w[j]);
                if (nj > val) { val = nj; jstar = j; }
            }
            best = std::max(best, val / std::max(ns_norm(z), 1e-300));
            if (val <= 0.0) break;
            Matrix<double> u, v;
            top_singular_pair(w[jstar], u, v);
            std::vector<Matrix<double>> e(c, Matrix<double>::zero(S, S));
            e[jstar] = u * v.conj_transpose();
            auto g = adjoint.apply(e);
            for (std::size_t k = 0; k < b; ++k) z[k] = polar_factor(g[k]);
            if (ns_norm(z) == 0.0) break;
        }
    }
    return best;
}

} // namespace detail

/// Sampled completely-bounded norm estimate: max over levels m <= m_used of
/// the ascent lower bound for ||L^(m)||. A lower bound, never a certificate.
struct CbEstimate {
    double value = 0.0;
    std::size_t m_used = 0;
    struct Witness {
        std::size_t m;
        std::vector<Matrix<double>> input;
        double attained;
    };
    std::vector<Witness> witnesses;
};

inline CbEstimate cb_norm_estimate(const LinearBlockMap<double>& L, std::size_t m_max,
                                   int trials, std::uint64_t seed = kDefaultSeed) {
    if (m_max < 1) throw SizeMismatch("m_max must be >= 1");
    Rng rng(seed);
    CbEstimate est;
    for (std::size_t m = 1; m <= m_max; ++m) {
        LinearBlockMap<double> lm = (m == 1) ? L : L.ampliated(m);
        // Structured entangled start: grid cell (i,j) holds the matrix unit
        // E_ji; at m = s this is the canonical transpose witness.
        std::vector<std::vector<Matrix<double>>> seeds;
        {
            const std::size_t s = L.s;
            std::vector<Matrix<double>> z(L.b, Matrix<double>::zero(s * m, s * m));
            for (std::size_t k = 0; k < L.b; ++k)
                for (std::size_t i = 0; i < std::min(m, s); ++i)
                    for (std::size_t j = 0; j < std::min(m, s); ++j) z[k](i * s + j, j * s + i) = 1.0;
            if (ns_norm(z) > 0) seeds.push_back(std::move(z));
        }
        const double val = detail::op_norm_lower_bound(lm, rng, trials, seeds);
        est.witnesses.push_back({m, {}, val});
        est.value = std::max(est.value, val);
        est.m_used = m;
    }
    return est;
}

/// Certified-by-sampling contraction region for the chord map of F at the
/// center: gamma bounds the differential drift, beta the invariant ball,
/// alpha the input ball.
struct ContractionReport {
    double gamma = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double observed_coeff = 0.0;
    double cb_inverse_estimate = 0.0; // inflated M used for the 1/(2M) bound
    std::size_t m_probe = 1;
};

inline ContractionReport contraction_search(const NcPolyMap<double>& F,
                                            const CenterPoint<double>& center,
                                            std::size_t m_probe, int samples,
                                            std::uint64_t seed = kDefaultSeed) {
    F.validate();
    const std::size_t s = center.s(), a = F.x_letters(), b = F.y_letters();
    LinearBlockMap<double> L = delta_ry_center(F, center);
    LinearBlockMap<double> Linv = *L.inverted();
    Rng rng(seed);
    // Sampled lower bound, inflated by a 1.25 safety factor before use.
    const double M =
        1.25 * std::max(cb_norm_estimate(Linv, std::min<std::size_t>(m_probe, 3), 6, seed).value,
                        1e-12);

    ContractionReport rep;
    rep.m_probe = m_probe;
    rep.cb_inverse_estimate = M;

    auto worst_drift = [&](double gamma) {
        double worst = 0.0;
        for (std::size_t m = 1; m <= m_probe; ++m) {
            MatrixPoint<double> centerAmp = ampliate(center.point, m);
            LinearBlockMap<double> Lm = L.ampliated(m);
            for (int t = 0; t < samples; ++t) {
                auto pert = detail::random_tuple(rng, a + b, s * m);
                detail::rescale_tuple(pert, gamma * (0.05 + 0.94 * rng.uniform()));
                MatrixPoint<double> P = centerAmp;
                for (std::size_t i = 0; i < P.d(); ++i) P.mats[i] += pert[i];
                auto diff = LinearBlockMap<double>::from_function(
                    s * m, b, b, [&](const std::vector<Matrix<double>>& blocks) {
                        return delta_ry_map(F, P, P, Direction<double>(blocks));
                    });
                worst = std::max(worst, detail::op_norm_lower_bound(diff - Lm, rng, 2));
            }
        }
        return worst;
    };

    double gamma = 1.0;
    while (worst_drift(gamma) > 1.0 / (2.0 * M)) {
        gamma /= 2.0;
        if (gamma < 1e-8) throw NoContractionFound("no contraction radius above 1e-8");
    }
    rep.gamma = gamma;
    rep.beta = gamma / 2.0;

    auto worst_center_residual = [&](double alpha) {
        double worst = 0.0;
        for (std::size_t m = 1; m <= m_probe; ++m) {
            MatrixPoint<double> x0 = ampliate(x_part(center.point, F.split), m);
            MatrixPoint<double> y0 = ampliate(y_part(center.point, F.split), m);
            for (int t = 0; t < samples; ++t) {
                auto pert = detail::random_tuple(rng, a, s * m);
                detail::rescale_tuple(pert, alpha * (0.05 + 0.94 * rng.uniform()));
                MatrixPoint<double> X = x0;
                for (std::size_t i = 0; i < a; ++i) X.mats[i] += pert[i];
                worst = std::max(worst, ns_norm(eval_map(F, concat_tuples(X, y0))));
            }
        }
        return worst;
    };

    double alpha = gamma;
    while (worst_center_residual(alpha) >= rep.beta / (2.0 * M)) {
        alpha /= 2.0;
        if (alpha < 1e-8) throw NoContractionFound("no input radius above 1e-8");
    }
    rep.alpha = alpha;

    // Worst chord-step ratio over sampled pairs inside the certified region.
    double coeff = 0.0;
    for (std::size_t m = 1; m <= m_probe; ++m) {
        MatrixPoint<double> x0 = ampliate(x_part(center.point, F.split), m);
        MatrixPoint<double> y0 = ampliate(y_part(center.point, F.split), m);
        LinearBlockMap<double> LinvM = *L.ampliated(m).inverted();
        auto chord = [&](const MatrixPoint<double>& X, const MatrixPoint<double>& Y) {
            auto r = eval_map(F, concat_tuples(X, Y));
            auto upd = LinvM.apply(r);
            MatrixPoint<double> out = Y;
            for (std::size_t j = 0; j < b; ++j) out.mats[j] -= upd[j];
            return out;
        };
        for (int t = 0; t < samples; ++t) {
            auto px = detail::random_tuple(rng, a, s * m);
            detail::rescale_tuple(px, alpha * (0.05 + 0.94 * rng.uniform()));
            MatrixPoint<double> X = x0;
            for (std::size_t i = 0; i < a; ++i) X.mats[i] += px[i];
            auto mk_y = [&] {
                auto py = detail::random_tuple(rng, b, s * m);
                detail::rescale_tuple(py, rep.beta * (0.05 + 0.94 * rng.uniform()));
                MatrixPoint<double> Y = y0;
                for (std::size_t j = 0; j < b; ++j) Y.mats[j] += py[j];
                return Y;
            };
            MatrixPoint<double> Y1 = mk_y(), Y2 = mk_y();
            const double den = ns_norm(Y1 - Y2);
            if (den < 1e-12) continue;
            coeff = std::max(coeff, ns_norm(chord(X, Y1) - chord(X, Y2)) / den);
        }
    }
    rep.observed_coeff = coeff;
    return rep;
}

/// Iteration trace of a numeric solve.
struct SolveReport {
    std::vector<double> residuals;
    std::size_t iterations = 0;
    double contraction = 0.0; // max ratio of consecutive step norms
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double derivative_check = std::numeric_limits<double>::quiet_NaN();
    std::string termination;
};

/// Chord iteration with the differential frozen at the center, seeded at the
/// ampliated center, until ||F(X, Y)|| <= tol.
inline std::pair<MatrixPoint<double>, SolveReport>
implicit_solve_num(const NcPolyMap<double>& F, const CenterPoint<double>& center,
                   const MatrixPoint<double>& X, double tol, std::size_t max_iter,
                   const ContractionReport* region = nullptr) {
    F.validate();
    if (tol <= 0) throw SizeMismatch("tolerance must be positive");
    const std::size_t s = center.s(), b = F.y_letters();
    if (X.d() != F.x_letters()) throw ComponentCountMismatch("X arity");
    if (X.n() % s != 0) throw SizeMismatch("X size not a multiple of the center size");
    const std::size_t m = X.n() / s;

    LinearBlockMap<double> L = delta_ry_center(F, center);
    LinearBlockMap<double> Linv = *L.inverted();
    MatrixPoint<double> x0 = ampliate(x_part(center.point, F.split), m);
    MatrixPoint<double> y0 = ampliate(y_part(center.point, F.split), m);

    SolveReport report;
    if (region) {
        report.alpha = region->alpha;
        report.beta = region->beta;
        report.gamma = region->gamma;
        if (ns_norm(X - x0) >= region->alpha)
            throw DomainEscape("input outside the certified alpha ball");
    }

    MatrixPoint<double> Y = y0;
    double prev_step = -1.0;
    for (std::size_t k = 0;; ++k) {
        auto residual = eval_map(F, concat_tuples(X, Y));
        const double r = ns_norm(residual);
        report.residuals.push_back(r);
        if (r <= tol) {
            report.iterations = k;
            report.termination = "converged";
            return {Y, report};
        }
        if (k >= max_iter) throw MaxIterationsExceeded("residual above tolerance at max_iter");
        auto update = Linv.apply_ampliated(residual);
        const double step = ns_norm(update);
        if (prev_step > 1e-14) report.contraction = std::max(report.contraction, step / prev_step);
        prev_step = step;
        for (std::size_t j = 0; j < b; ++j) Y.mats[j] -= update[j];
        const double dist = ns_norm(Y - y0);
        if (region && dist > region->beta)
            throw DomainEscape("iterate left the certified beta ball");
        if (!region && dist > 1e8) throw DomainEscape("iterate diverged");
    }
}

/// Solves g(Y) = X near Y0 by the implicit solver on g(Y) - X; the report
/// carries a check of the inverse-derivative identity at the computed point.
inline std::pair<MatrixPoint<double>, SolveReport>
inverse_solve_num(const NcPolyMap<double>& g, const CenterPoint<double>& Y0,
                  const MatrixPoint<double>& X, double tol, std::size_t max_iter,
                  const ContractionReport* region = nullptr,
                  std::uint64_t seed = kDefaultSeed) {
    NcPolyMap<double> F = inverse_problem_map(g);
    MatrixPoint<double> X0{eval_map(g, Y0.point)};
    CenterPoint<double> center(concat_tuples(X0, Y0.point));
    auto [Y, report] = implicit_solve_num(F, center, X, tol, max_iter, region);

    // delta f(X) o delta g(f(X)) = id, with delta f from the implicit formula.
    const std::size_t b = g.num_letters(), n = Y.n();
    auto Dg = LinearBlockMap<double>::from_function(
        n, b, b, [&](const std::vector<Matrix<double>>& blocks) {
            return delta_r_map(g, Y, Y, Direction<double>(blocks));
        });
    auto DgInv = Dg.inverted();
    if (!DgInv) throw SingularDifferential("derivative of g singular at the solution");
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        auto Z = detail::random_tuple(rng, b, n);
        detail::rescale_tuple(Z, 1.0);
        auto back = DgInv->apply(Dg.apply(Z));
        std::vector<Matrix<double>> diff(b);
        for (std::size_t j = 0; j < b; ++j) diff[j] = back[j] - Z[j];
        worst = std::max(worst, ns_norm(diff));
    }
    report.derivative_check = worst;
    return {Y, report};
}

} // namespace ncfun
