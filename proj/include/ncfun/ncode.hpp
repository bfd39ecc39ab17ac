#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ncfun/errors.hpp"
#include "ncfun/ncdiff.hpp"
#include "ncfun/opspace.hpp"

namespace ncfun {

/// Right-hand side g(t, Y): a Y-letter polynomial map whose coefficients are
/// polynomials in t, so g(t, .) is a polynomial nc map for every fixed t.
struct TimePoly {
    struct Term {
        NcWord word;
        std::vector<double> coeff_poly; // c_0 + c_1 t + ...
    };
    std::vector<std::vector<Term>> components; // one term list per output

    std::size_t dim() const { return components.size(); }

    double coeff_at(const std::vector<double>& cp, double t) const {
        double acc = 0.0, power = 1.0;
        for (double c : cp) {
            acc += c * power;
            power *= t;
        }
        return acc;
    }

    /// Collapses to a plain polynomial map at fixed t.
    NcPolyMap<double> at(double t) const {
        const auto d = static_cast<std::uint32_t>(dim());
        std::vector<NcPoly<double>> comps;
        comps.reserve(d);
        for (const auto& terms : components) {
            NcPoly<double> p(d);
            for (const auto& term : terms) p.add_term(term.word, coeff_at(term.coeff_poly, t));
            comps.push_back(std::move(p));
        }
        return NcPolyMap<double>(std::move(comps), 0);
    }

    std::vector<Matrix<double>> eval(double t, const MatrixPoint<double>& Y) const {
        return eval_map(at(t), Y);
    }
};

/// A solved trajectory on the symmetric window [t0 - delta, t0 + delta]:
/// uniform grid, values, and the sampled derivative g(t_k, Y(t_k)).
struct Trajectory {
    double t0 = 0.0;
    double delta = 0.0;
    std::vector<double> times;
    std::vector<MatrixPoint<double>> values;
    std::vector<MatrixPoint<double>> derivatives;

    std::size_t node_of(double t) const {
        if (times.empty()) throw ShapeMismatch("empty trajectory");
        const double h = times.size() > 1 ? times[1] - times[0] : 1.0;
        const double pos = (t - times.front()) / h;
        const auto k = static_cast<std::ptrdiff_t>(std::llround(pos));
        if (k < 0 || static_cast<std::size_t>(k) >= times.size() ||
            std::abs(times[static_cast<std::size_t>(k)] - t) > 1e-9 * (1.0 + std::abs(t)))
            throw ShapeMismatch("time not on the trajectory grid");
        return static_cast<std::size_t>(k);
    }
    const MatrixPoint<double>& at(double t) const { return values[node_of(t)]; }

    /// Grid-sampled C^1 norm max(||Y||_inf, ||Ydot||_inf).
    double c1_norm() const {
        double v = 0.0;
        for (const auto& y : values) v = std::max(v, ns_norm(y));
        for (const auto& d : derivatives) v = std::max(v, ns_norm(d));
        return v;
    }
};

namespace detail {

inline MatrixPoint<double> rhs_point(const TimePoly& g, double t, const MatrixPoint<double>& Y) {
    return MatrixPoint<double>{g.eval(t, Y)};
}

} // namespace detail

/// Classical RK4 on the symmetric window around t0; `steps` RK4 steps on each
/// side, local error O(h^5).
inline Trajectory integrate_ivp(const TimePoly& g, double t0, const MatrixPoint<double>& X,
                                double delta, std::size_t steps) {
    if (steps < 16) throw SizeMismatch("steps must be >= 16");
    if (g.dim() != X.d()) throw ComponentCountMismatch("right-hand side arity");
    if (delta <= 0) throw SizeMismatch("window half-width must be positive");

    const double h = delta / static_cast<double>(steps);
    const std::size_t total = 2 * steps + 1;
    Trajectory traj;
    traj.t0 = t0;
    traj.delta = delta;
    traj.times.resize(total);
    traj.values.resize(total);

    auto step_rk4 = [&](double t, const MatrixPoint<double>& y, double dir) {
        const double hh = dir * h;
        auto k1 = detail::rhs_point(g, t, y);
        auto k2 = detail::rhs_point(g, t + hh / 2, y + k1 * (hh / 2));
        auto k3 = detail::rhs_point(g, t + hh / 2, y + k2 * (hh / 2));
        auto k4 = detail::rhs_point(g, t + hh, y + k3 * hh);
        return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (hh / 6.0);
    };

    traj.times[steps] = t0;
    traj.values[steps] = X;
    for (std::size_t k = 0; k < steps; ++k) {
        // forward leg
        const double tf = t0 + static_cast<double>(k) * h;
        traj.values[steps + k + 1] = step_rk4(tf, traj.values[steps + k], +1.0);
        traj.times[steps + k + 1] = t0 + static_cast<double>(k + 1) * h;
        // backward leg
        const double tb = t0 - static_cast<double>(k) * h;
        traj.values[steps - k - 1] = step_rk4(tb, traj.values[steps - k], -1.0);
        traj.times[steps - k - 1] = t0 - static_cast<double>(k + 1) * h;
        if (traj.values[steps + k + 1].max_abs() > 1e8 ||
            traj.values[steps - k - 1].max_abs() > 1e8)
            throw BlowupDetected("trajectory norm exceeded 1e8");
    }
    traj.derivatives.reserve(total);
    for (std::size_t k = 0; k < total; ++k)
        traj.derivatives.push_back(detail::rhs_point(g, traj.times[k], traj.values[k]));
    return traj;
}

/// Max over grid nodes of || Y(t) - X - int_{t0}^{t} g(tau, Y(tau)) dtau ||.
/// Quadrature: composite Simpson on node pairs; an odd tail is closed with
/// the three-point end rule h/12 (-f_{k-2} + 8 f_{k-1} + 5 f_k), which keeps
/// the cumulative integral O(h^4) at every node.
inline double ivp_residual(const TimePoly&, double t0, const MatrixPoint<double>& X,
                           const Trajectory& traj) {
    const std::size_t center = traj.node_of(t0);
    const double h = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;
    const auto total = static_cast<std::ptrdiff_t>(traj.times.size());

    auto scan = [&](int dir) {
        double worst = 0.0;
        MatrixPoint<double> integral = MatrixPoint<double>::zero(X.d(), X.n());
        std::size_t prev = center; // last even node where `integral` is current
        for (std::size_t i = 1;; ++i) {
            const std::ptrdiff_t idx =
                static_cast<std::ptrdiff_t>(center) + dir * static_cast<std::ptrdiff_t>(i);
            if (idx < 0 || idx >= total) break;
            const auto k = static_cast<std::size_t>(idx);
            MatrixPoint<double> upto = integral;
            if (i % 2 == 0) {
                const std::size_t mid = (prev + k) / 2;
                upto = upto + (traj.derivatives[prev] + traj.derivatives[mid] * 4.0 +
                               traj.derivatives[k]) *
                                  (dir * h / 3.0);
                integral = upto;
                prev = k;
            } else {
                const std::ptrdiff_t back2 = idx - 2 * dir;
                const auto mid = static_cast<std::size_t>(idx - dir);
                if (back2 >= 0 && back2 < total) {
                    upto = upto + (traj.derivatives[static_cast<std::size_t>(back2)] * (-1.0) +
                                   traj.derivatives[mid] * 8.0 + traj.derivatives[k] * 5.0) *
                                      (dir * h / 12.0);
                } else {
                    upto = upto +
                           (traj.derivatives[mid] + traj.derivatives[k]) * (dir * h / 2.0);
                }
            }
            worst = std::max(worst, ns_norm(traj.values[k] - X - upto));
        }
        return worst;
    };
    return std::max({scan(+1), scan(-1), ns_norm(traj.values[center] - X)});
}

/// Report of the window constants along a trajectory: kappa is the sampled
/// max of ||delta^Y g(t, Y(t))||; when kappa*delta < 1 the chord-inverse
/// bound (1 - kd + k)/(1 - kd) applies.
struct OdeWindowReport {
    double kappa = 0.0;
    double kappa_delta = 0.0;
    bool contraction_ok = false;
    double cb_bound = std::numeric_limits<double>::infinity();
    double c1_norm_grid_sampled = 0.0;
};

inline OdeWindowReport ode_window_report(const TimePoly& g, const Trajectory& traj) {
    OdeWindowReport rep;
    const std::size_t d = traj.values.front().d();
    const std::size_t n = traj.values.front().n();
    for (std::size_t k = 0; k < traj.times.size(); k += std::max<std::size_t>(1, traj.times.size() / 32)) {
        auto Fk = LinearBlockMap<double>::from_function(
            n, d, d, [&](const std::vector<Matrix<double>>& blocks) {
                return delta_r_map(g.at(traj.times[k]), traj.values[k], traj.values[k],
                                   Direction<double>(blocks));
            });
        Rng rng(kDefaultSeed ^ k);
        rep.kappa = std::max(rep.kappa, detail::op_norm_lower_bound(Fk, rng, 3));
    }
    rep.kappa_delta = rep.kappa * traj.delta;
    rep.contraction_ok = rep.kappa_delta < 1.0;
    if (rep.contraction_ok)
        rep.cb_bound = (1.0 - rep.kappa_delta + rep.kappa) / (1.0 - rep.kappa_delta);
    rep.c1_norm_grid_sampled = traj.c1_norm();
    return rep;
}

/// Sensitivity of the flow to the initial data: integrates the variational
/// linear system Zdot = delta^Y g(t, Y(t))(Z) + Gdot(t), Z(t0) = G(t0),
/// jointly with Y by RK4 on the trajectory's grid (the Y stages reproduce the
/// stored trajectory exactly). Constant G == H covers the initial-data
/// derivative; a general G is accepted for completeness.
inline MatrixPoint<double> flow_sensitivity(
    const TimePoly& g, const Trajectory& traj, const MatrixPoint<double>& H,
    const std::function<MatrixPoint<double>(double)>* Gdot = nullptr) {
    const std::size_t center = traj.node_of(traj.t0);
    const MatrixPoint<double>& X = traj.values[center];
    if (H.d() != X.d() || H.n() != X.n()) throw ShapeMismatch("sensitivity seed shape");
    const double h = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0;

    auto dg = [&](double t, const MatrixPoint<double>& Y, const MatrixPoint<double>& Z) {
        MatrixPoint<double> out{delta_r_map(g.at(t), Y, Y, Direction<double>(Z))};
        if (Gdot) out = out + (*Gdot)(t);
        return out;
    };
    auto rhs = [&](double t, const MatrixPoint<double>& Y) { return detail::rhs_point(g, t, Y); };

    MatrixPoint<double> Y = X, Z = H;
    for (std::size_t k = center; k + 1 < traj.times.size(); ++k) {
        const double t = traj.times[k];
        auto k1y = rhs(t, Y);
        auto k1z = dg(t, Y, Z);
        auto k2y = rhs(t + h / 2, Y + k1y * (h / 2));
        auto k2z = dg(t + h / 2, Y + k1y * (h / 2), Z + k1z * (h / 2));
        auto k3y = rhs(t + h / 2, Y + k2y * (h / 2));
        auto k3z = dg(t + h / 2, Y + k2y * (h / 2), Z + k2z * (h / 2));
        auto k4y = rhs(t + h, Y + k3y * h);
        auto k4z = dg(t + h, Y + k3y * h, Z + k3z * h);
        Y = Y + (k1y + k2y * 2.0 + k3y * 2.0 + k4y) * (h / 6.0);
        Z = Z + (k1z + k2z * 2.0 + k3z * 2.0 + k4z) * (h / 6.0);
    }
    return Z;
}

/// Randomized check that the flow map is a nc function: direct sums split
/// exactly under RK4, similarities conjugate within roundoff growth.
struct FlowNcReport {
    double direct_sum_defect = 0.0;
    double similarity_defect = 0.0; // already scaled by 1/cond(S)
    bool passed = false;
};

inline FlowNcReport flow_nc_check(const TimePoly& g, double t0, double delta, int samples,
                                  std::size_t steps = 64, std::uint64_t seed = kDefaultSeed) {
    Rng rng(seed);
    FlowNcReport rep;
    const std::size_t d = g.dim();
    for (int t = 0; t < samples; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 1));
        auto mk = [&](std::size_t size) {
            auto X = detail::random_tuple(rng, d, size);
            detail::rescale_tuple(X, 0.4);
            return MatrixPoint<double>{X};
        };
        MatrixPoint<double> X1 = mk(n), X2 = mk(n + 1);
        auto f1 = integrate_ivp(g, t0, X1, delta, steps);
        auto f2 = integrate_ivp(g, t0, X2, delta, steps);
        auto fsum = integrate_ivp(g, t0, direct_sum(X1, X2), delta, steps);
        const double endt = t0 + delta;
        rep.direct_sum_defect =
            std::max(rep.direct_sum_defect,
                     ns_norm(fsum.at(endt) - direct_sum(f1.at(endt), f2.at(endt))));

        Matrix<double> S = Matrix<double>::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) S(i, j) = 0.5 * rng.gaussian();
        auto Sinv = *inverse(S);
        const double cond = spectral_norm(S) * spectral_norm(Sinv);
        auto fc = integrate_ivp(g, t0, similarity(X1, S), delta, steps);
        MatrixPoint<double> conj;
        for (const auto& m : f1.at(endt).mats) conj.mats.push_back(S * m * Sinv);
        rep.similarity_defect =
            std::max(rep.similarity_defect, ns_norm(fc.at(endt) - conj) / cond);
    }
    rep.passed = rep.direct_sum_defect <= 1e-9 && rep.similarity_defect <= 1e-6;
    return rep;
}

} // namespace ncfun
