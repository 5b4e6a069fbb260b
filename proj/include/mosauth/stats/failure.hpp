/*
   Copyright 2026 The mosauth Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Authentication failure of threshold tests on Gaussian authentication
// characteristics, single and multiple.
//
//   A_F = P(C) P(Pass|C) + P(A) (1 - P(Pass|A))
//
// With MixtureRole::all_chips, f_AC describes every chip and P(Pass|C) comes
// from the total-probability split (P(Pass) - P(A) P(Pass|A)) / P(C); a result
// outside [0, 1] means f_AC cannot be such a mixture and is reported instead of
// clamped. With MixtureRole::counterfeit, f_AC is taken as the counterfeit
// population itself.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/numeric.hpp"
#include "mosauth/rng.hpp"

namespace mosauth {

struct Gaussian {
    double mean = 0.0;
    double stddev = 1.0;
};

enum class MixtureRole { all_chips, counterfeit };

struct AcDistribution {
    Gaussian f_ac;
    Gaussian f_ac_given_a;
    double p_a = 0.5;
    MixtureRole role = MixtureRole::all_chips;
    double p_c() const noexcept { return 1.0 - p_a; }
};

struct ThresholdPair {
    double t_l = -std::numeric_limits<double>::infinity();
    double t_u = std::numeric_limits<double>::infinity();
};

inline void validate(const Gaussian& g)
{
    detail::require(std::isfinite(g.mean) && g.stddev > 0 && std::isfinite(g.stddev),
                    "Gaussian: stddev must be > 0");
}

inline void validate(const AcDistribution& d)
{
    validate(d.f_ac);
    validate(d.f_ac_given_a);
    detail::require(d.p_a > 0 && d.p_a < 1, "AcDistribution: p_a must be in (0, 1)");
}

inline double pass_probability(const Gaussian& g, const ThresholdPair& t)
{
    validate(g);
    detail::require(!(t.t_l > t.t_u), "pass_probability: t_l must be <= t_u");
    if (t.t_l == t.t_u)
        return 0.0;
    return normal_cdf((t.t_u - g.mean) / g.stddev) - normal_cdf((t.t_l - g.mean) / g.stddev);
}

struct FailureRate {
    double a_f = 0.0;
    double p_pass = 0.0;
    double p_pass_given_a = 0.0;
    double p_pass_given_c = 0.0;
};

namespace detail {
inline double counterfeit_pass(double p_all, double p_auth, double p_a, MixtureRole role)
{
    if (role == MixtureRole::counterfeit)
        return p_all;
    const double p_c = (p_all - p_a * p_auth) / (1.0 - p_a);
    constexpr double slack = 1e-12;
    if (p_c < -slack || p_c > 1.0 + slack)
        throw InconsistentMixture("P(Pass|C) = " + std::to_string(p_c) +
                                  " lies outside [0, 1]; f_AC is not a mixture containing P(A) f_AC|A");
    return std::clamp(p_c, 0.0, 1.0);
}
} // namespace detail

inline FailureRate failure_rate(const AcDistribution& d, const ThresholdPair& t)
{
    validate(d);
    FailureRate r;
    r.p_pass = pass_probability(d.f_ac, t);
    r.p_pass_given_a = pass_probability(d.f_ac_given_a, t);
    r.p_pass_given_c = detail::counterfeit_pass(r.p_pass, r.p_pass_given_a, d.p_a, d.role);
    r.a_f = d.p_c() * r.p_pass_given_c + d.p_a * (1.0 - r.p_pass_given_a);
    return r;
}

struct ThresholdSearch {
    int grid = 400;
    double envelope_sigmas = 5.0;
};

struct OptimalThresholds {
    ThresholdPair t;
    double a_f_min = 0.0;
};

namespace detail {

/// Grid search over t_l <= t_u on [lo, hi] plus the full-range and empty
/// windows, then a compass search that only ever accepts improvements.
template <class Objective>
OptimalThresholds minimize_thresholds(Objective&& objective, double lo, double hi, int grid)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    OptimalThresholds best{{-inf, inf}, objective(ThresholdPair{-inf, inf})};
    auto consider = [&](ThresholdPair t) {
        const double v = objective(t);
        if (v < best.a_f_min) {
            best.a_f_min = v;
            best.t = t;
        }
    };
    consider({lo, lo});
    const double step = (hi - lo) / (grid - 1);
    for (int i = 0; i < grid; ++i)
        for (int k = i; k < grid; ++k)
            consider({lo + i * step, lo + k * step});

    if (!std::isfinite(best.t.t_l) || !std::isfinite(best.t.t_u))
        return best;
    double h = step;
    while (h > 1e-10 * std::max(1.0, hi - lo)) {
        bool improved = false;
        const ThresholdPair c = best.t;
        const ThresholdPair moves[] = {{c.t_l - h, c.t_u}, {c.t_l + h, c.t_u}, {c.t_l, c.t_u - h},
                                       {c.t_l, c.t_u + h}, {c.t_l - h, c.t_u + h}, {c.t_l + h, c.t_u - h}};
        for (const auto& m : moves) {
            if (m.t_l > m.t_u)
                continue;
            const double before = best.a_f_min;
            consider(m);
            improved = improved || best.a_f_min < before;
        }
        if (!improved)
            h *= 0.5;
    }
    return best;
}

inline std::pair<double, double> envelope(std::initializer_list<Gaussian> gs, double k)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& g : gs) {
        lo = std::min(lo, g.mean - k * g.stddev);
        hi = std::max(hi, g.mean + k * g.stddev);
    }
    return {lo, hi};
}

} // namespace detail

inline OptimalThresholds optimize_thresholds(const AcDistribution& d, const ThresholdSearch& search = {})
{
    validate(d);
    detail::require(search.grid >= 2, "optimize_thresholds: grid must be >= 2");
    const auto [lo, hi] = detail::envelope({d.f_ac, d.f_ac_given_a}, search.envelope_sigmas);
    return detail::minimize_thresholds([&](const ThresholdPair& t) { return failure_rate(d, t).a_f; },
                                       lo, hi, search.grid);
}

// --- several ACs ---

/// Per-AC marginals with one pairwise correlation shared by every pair of
/// ACs, within the authentic and within the f_AC population.
struct MultiAcDistribution {
    std::vector<Gaussian> f_ac;
    std::vector<Gaussian> f_ac_given_a;
    double p_a = 0.5;
    double rho = 0.0;
    MixtureRole role = MixtureRole::all_chips;

    static MultiAcDistribution replicate(const AcDistribution& d, std::size_t n, double rho)
    {
        return {std::vector<Gaussian>(n, d.f_ac), std::vector<Gaussian>(n, d.f_ac_given_a), d.p_a, rho,
                d.role};
    }
    std::size_t size() const noexcept { return f_ac.size(); }
};

/// Accept when at least `m` of the `n` ACs pass.
struct MOfN {
    std::size_t m = 1;
    std::size_t n = 2;
};

struct MultiAcFailure {
    double a_f = 0.0;
    double p_accept = 0.0;
    double p_accept_given_a = 0.0;
    double p_accept_given_c = 0.0;
    double standard_error = 0.0; ///< 0 for the quadrature path
};

/// P(a1 < X1 <= b1, a2 < X2 <= b2) for a standard bivariate normal with
/// correlation rho: one-dimensional integral of the conditional,
///   int_a1^b1 phi(x) [Phi((b2 - rho x)/s) - Phi((a2 - rho x)/s)] dx,  s = sqrt(1 - rho^2),
/// by composite 64-point Gauss-Legendre on unit-width panels over [-9, 9].
inline double bivariate_rectangle(double a1, double b1, double a2, double b2, double rho)
{
    detail::require(std::abs(rho) < 1, "bivariate_rectangle: |rho| must be < 1");
    if (!(b1 > a1) || !(b2 > a2))
        return 0.0;
    static const QuadratureRule rule = gauss_legendre(64);
    const double lo = std::max(a1, -9.0);
    const double hi = std::min(b1, 9.0);
    if (!(hi > lo))
        return 0.0;
    const double s = std::sqrt(1.0 - rho * rho);
    const int panels = std::max(1, static_cast<int>(std::ceil(hi - lo)));
    return integrate(
        [&](double x) {
            return normal_pdf(x) * (normal_cdf((b2 - rho * x) / s) - normal_cdf((a2 - rho * x) / s));
        },
        lo, hi, rule, panels);
}

namespace detail {

inline double standardized(double t, const Gaussian& g) { return (t - g.mean) / g.stddev; }

inline double accept_two(const std::vector<Gaussian>& g, double rho, const std::vector<ThresholdPair>& t,
                         std::size_t m)
{
    const double p1 = pass_probability(g[0], t[0]);
    const double p2 = pass_probability(g[1], t[1]);
    const double both = bivariate_rectangle(standardized(t[0].t_l, g[0]), standardized(t[0].t_u, g[0]),
                                            standardized(t[1].t_l, g[1]), standardized(t[1].t_u, g[1]), rho);
    switch (m) {
    case 0: return 1.0;
    case 1: return p1 + p2 - both;
    default: return both;
    }
}

/// Fraction of equicorrelated Gaussian draws with at least m passes.
inline std::pair<double, double> accept_monte_carlo(const std::vector<Gaussian>& g, double rho,
                                                    const std::vector<ThresholdPair>& t, std::size_t m,
                                                    std::size_t samples, std::uint64_t seed,
                                                    std::uint32_t stream)
{
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(n, n, rho);
    corr.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw DomainError("multi_ac_failure: correlation matrix is not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();
    const CounterRng rng(seed);
    Eigen::VectorXd z(n);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index k = 0; k < n; k += 2) {
            const auto pair = rng.normal_pair(RngDomain::monte_carlo, stream, lo32(s),
                                              static_cast<std::uint32_t>(k / 2));
            z[k] = pair[0];
            if (k + 1 < n)
                z[k + 1] = pair[1];
        }
        const Eigen::VectorXd x = l * z;
        std::size_t passes = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double v = g[k].mean + g[k].stddev * x[k];
            passes += v > t[k].t_l && v <= t[k].t_u;
        }
        hits += passes >= m;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

} // namespace detail

struct MonteCarloOptions {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
};

/// Failure of an m-of-n rule. n = 2 is integrated; n > 2 is sampled and the
/// standard error reported.
inline MultiAcFailure multi_ac_failure(const MultiAcDistribution& d, const MOfN& rule,
                                       const std::vector<ThresholdPair>& thresholds,
                                       const MonteCarloOptions& mc = {})
{
    detail::require(std::abs(d.rho) < 1, "multi_ac_failure: |rho| must be < 1");
    detail::require(d.p_a > 0 && d.p_a < 1, "multi_ac_failure: p_a must be in (0, 1)");
    detail::require(d.size() >= 2 && d.f_ac_given_a.size() == d.size() && thresholds.size() == d.size(),
                    "multi_ac_failure: need matching per-AC marginals and thresholds (n >= 2)");
    detail::require(rule.n == d.size() && rule.m <= rule.n, "multi_ac_failure: rule does not match n");
    for (std::size_t k = 0; k < d.size(); ++k) {
        validate(d.f_ac[k]);
        validate(d.f_ac_given_a[k]);
        detail::require(!(thresholds[k].t_l > thresholds[k].t_u), "multi_ac_failure: t_l must be <= t_u");
    }

    MultiAcFailure r;
    if (d.size() == 2) {
        r.p_accept = detail::accept_two(d.f_ac, d.rho, thresholds, rule.m);
        r.p_accept_given_a = detail::accept_two(d.f_ac_given_a, d.rho, thresholds, rule.m);
    } else {
        const auto [pa, sa] = detail::accept_monte_carlo(d.f_ac, d.rho, thresholds, rule.m, mc.samples, mc.seed, 0);
        const auto [pb, sb] =
            detail::accept_monte_carlo(d.f_ac_given_a, d.rho, thresholds, rule.m, mc.samples, mc.seed, 1);
        r.p_accept = pa;
        r.p_accept_given_a = pb;
        const double p_c = 1.0 - d.p_a;
        const double sc = d.role == MixtureRole::counterfeit ? sa : std::hypot(sa, d.p_a * sb) / p_c;
        r.standard_error = std::hypot(p_c * sc, d.p_a * sb);
    }
    r.p_accept_given_c = detail::counterfeit_pass(r.p_accept, r.p_accept_given_a, d.p_a, d.role);
    r.a_f = (1.0 - d.p_a) * r.p_accept_given_c + d.p_a * (1.0 - r.p_accept_given_a);
    return r;
}

/// Minimal A_F|mult with one threshold pair shared by every AC.
inline OptimalThresholds optimize_multi_thresholds(const MultiAcDistribution& d, const MOfN& rule,
                                                   const ThresholdSearch& search = {200, 5.0})
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto [l, h] = detail::envelope({d.f_ac[k], d.f_ac_given_a[k]}, search.envelope_sigmas);
        lo = std::min(lo, l);
        hi = std::max(hi, h);
    }
    return detail::minimize_thresholds(
        [&](const ThresholdPair& t) {
            return multi_ac_failure(d, rule, std::vector<ThresholdPair>(d.size(), t)).a_f;
        },
        lo, hi, search.grid);
}

} // namespace mosauth
