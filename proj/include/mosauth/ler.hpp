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

// Line-edge-roughness model of a MOM finger pair.
//
// The two facing edges are samples of one isotropic Gaussian roughness field
// with covariance sigma^2 exp(-r / eta), taken at (x_i, 0) and (x_i, S). Along
// an edge this is the usual exponential autocorrelation; across the gap the
// edges correlate as exp(-S / eta), so a long correlation length makes the
// edges move together. The local gap g(x) = S - e1(x) + e2(x) feeds a
// per-segment parallel-plate sum. Fringe and corner terms are left out.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/numeric.hpp"
#include "mosauth/parallel.hpp"
#include "mosauth/process.hpp"
#include "mosauth/rng.hpp"

namespace mosauth {

inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m
inline constexpr double kOxideRelativePermittivity = 3.9;
inline constexpr int kDefaultLerSegments = 256;

/// Caches the Cholesky factor of the two-edge field covariance so repeated
/// samples cost one triangular mat-vec each.
class LerSampler {
  public:
    LerSampler(const LineGeometry& geometry, double eta_ler, double sigma_ler,
               int segments = kDefaultLerSegments)
        : geometry_(geometry), sigma_(sigma_ler), segments_(segments)
    {
        detail::require(segments >= 16, "ler: segments must be >= 16");
        detail::require(eta_ler > 0, "ler: eta_ler must be > 0");
        detail::require(sigma_ler >= 0, "ler: sigma_ler must be >= 0");
        detail::require(geometry.spacing > 0 && geometry.thickness > 0 && geometry.line_length > 0,
                        "ler: geometry dimensions must be > 0");
        detail::require(sigma_ler < geometry.spacing / 2, "ler: sigma_ler must be < S/2");

        dx_ = geometry.line_length / segments;
        if (sigma_ler == 0.0)
            return;

        const int m = segments;
        Eigen::MatrixXd cov(2 * m, 2 * m);
        const double s2 = sigma_ler * sigma_ler;
        for (int i = 0; i < 2 * m; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double ddx = (i % m - j % m) * dx_;
                const double ddy = (i / m == j / m) ? 0.0 : geometry.spacing;
                const double v = s2 * std::exp(-std::hypot(ddx, ddy) / eta_ler);
                cov(i, j) = v;
                cov(j, i) = v;
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw DomainError("ler: roughness covariance is not positive definite");
        factor_ = llt.matrixL();
    }

    /// Smooth-edge value eps L line_length / S.
    double nominal_capacitance() const noexcept
    {
        return permittivity() * geometry_.thickness * geometry_.line_length / geometry_.spacing;
    }

    /// One rough-edge capacitance, a pure function of `seed`.
    double sample(std::uint64_t seed) const
    {
        const int m = segments_;
        double inv_gap_sum = 0.0;
        if (sigma_ == 0.0) {
            inv_gap_sum = m / geometry_.spacing;
        } else {
            const CounterRng rng(seed);
            Eigen::VectorXd z(2 * m);
            for (int k = 0; k < m; ++k) {
                const auto pair = rng.normal_pair(RngDomain::ler_field, static_cast<std::uint32_t>(k), 0, 0);
                z[2 * k] = pair[0];
                z[2 * k + 1] = pair[1];
            }
            const Eigen::VectorXd e = factor_.triangularView<Eigen::Lower>() * z;
            for (int i = 0; i < m; ++i) {
                const double gap = geometry_.spacing - e[i] + e[m + i];
                if (!(gap > 0.0))
                    throw EdgeCollision("ler: facing edges collide (local gap <= 0)");
                inv_gap_sum += 1.0 / gap;
            }
        }
        return permittivity() * geometry_.thickness * dx_ * inv_gap_sum;
    }

    static constexpr double permittivity() noexcept
    {
        return kOxideRelativePermittivity * kVacuumPermittivity;
    }

  private:
    LineGeometry geometry_;
    double sigma_;
    int segments_;
    double dx_ = 0.0;
    Eigen::MatrixXd factor_;
};

inline double ler_capacitance_sample(const LineGeometry& geometry, double eta_ler, double sigma_ler,
                                     int segments, std::uint64_t seed)
{
    return LerSampler(geometry, eta_ler, sigma_ler, segments).sample(seed);
}

/// Geometry of an area-scaled structure: S -> k S so that S x W scales by k.
inline LineGeometry scale_area(LineGeometry g, double k)
{
    g.spacing *= k;
    return g;
}

struct VarianceRow {
    double geometry_scale = 1.0;
    double eta_ler = 0.0;   ///< m
    double sigma_ler = 0.0; ///< m
    double norm_variance = 0.0;
    double mean_capacitance = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool flagged = false;
    std::string message;
};

struct VarianceGrid {
    LineGeometry base{};
    std::vector<double> geometry_scales{1.0};
    std::vector<double> etas;
    std::vector<double> sigmas;
    std::size_t samples_per_point = 1000;
    int segments = kDefaultLerSegments;
};

/// var(C)/mean(C)^2 over a (scale, eta, sigma) grid. Every cell reuses the
/// same per-sample seeds, so neighbouring cells differ only through the
/// parameters. A failing cell is flagged and the sweep continues.
inline std::vector<VarianceRow> ler_variance_profile(const VarianceGrid& grid, std::uint64_t seed,
                                                     unsigned workers = 1)
{
    detail::require(!grid.geometry_scales.empty() && !grid.etas.empty() && !grid.sigmas.empty(),
                    "ler_variance_profile: grids must be non-empty");
    detail::require(grid.samples_per_point >= 100, "ler_variance_profile: samples_per_point >= 100");

    struct Cell {
        double k, eta, sigma;
    };
    std::vector<Cell> cells;
    for (double k : grid.geometry_scales)
        for (double eta : grid.etas)
            for (double sigma : grid.sigmas)
                cells.push_back({k, eta, sigma});

    return parallel_map(cells.size(), workers, [&](std::size_t c) {
        const Cell& cell = cells[c];
        VarianceRow row{cell.k, cell.eta, cell.sigma, 0.0, 0.0, grid.samples_per_point, seed, false, {}};
        try {
            const LerSampler sampler(scale_area(grid.base, cell.k), cell.eta, cell.sigma, grid.segments);
            RunningStats stats;
            for (std::size_t s = 0; s < grid.samples_per_point; ++s)
                stats.push(sampler.sample(splitmix64(seed + s)));
            row.mean_capacitance = stats.mean();
            row.norm_variance = stats.variance() / (stats.mean() * stats.mean());
        } catch (const std::exception& e) {
            row.flagged = true;
            row.norm_variance = std::nan("");
            row.message = e.what();
        }
        return row;
    });
}

} // namespace mosauth
