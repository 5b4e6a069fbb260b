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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "mosauth/error.hpp"

namespace mosauth {

/// Standard normal CDF. std::erfc is accurate to a few ulp, well inside the
/// 1e-7 budget the failure-rate math needs, and keeps far tails exact.
inline double normal_cdf(double x)
{
    if (x == std::numeric_limits<double>::infinity())
        return 1.0;
    if (x == -std::numeric_limits<double>::infinity())
        return 0.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Welford accumulator. Identical inputs give exactly zero variance.
class RunningStats {
  public:
    void push(double x) noexcept
    {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Population variance (divide by n).
    double variance() const noexcept { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }
    double sample_variance() const noexcept
    {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double stddev() const noexcept { return std::sqrt(variance()); }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

inline double mean_of(std::span<const double> xs)
{
    RunningStats s;
    for (double x : xs)
        s.push(x);
    return s.mean();
}

inline double variance_of(std::span<const double> xs)
{
    RunningStats s;
    for (double x : xs)
        s.push(x);
    return s.variance();
}

/// Nearest-rank empirical quantile: the ceil(q n)-th smallest value.
inline double empirical_quantile(std::vector<double> xs, double q)
{
    detail::require(!xs.empty(), "empirical_quantile: empty sample");
    detail::require(q > 0.0 && q <= 1.0, "empirical_quantile: q must be in (0, 1]");
    std::sort(xs.begin(), xs.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
    rank = std::clamp<std::size_t>(rank, 1, xs.size());
    return xs[rank - 1];
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n)
{
    detail::require(n >= 1, "gauss_legendre: n >= 1");
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Composite Gauss-Legendre over [a, b] split into `panels` equal pieces.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureRule& rule, int panels)
{
    if (!(b > a))
        return 0.0;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            acc += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        total += 0.5 * h * acc;
    }
    return total;
}

} // namespace mosauth
