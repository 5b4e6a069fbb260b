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

// Population-level studies built on extraction: choice of N, sensitivity of
// the distance metric to sigma_cu, and drift with temperature and comparator
// offset. Every study draws its chips from named populations so that sweeps
// share random numbers wherever their labels and indices agree.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosauth/auth.hpp"
#include "mosauth/error.hpp"
#include "mosauth/frontend.hpp"
#include "mosauth/numeric.hpp"
#include "mosauth/process.hpp"
#include "mosauth/rng.hpp"
#include "mosauth/signature.hpp"

namespace mosauth {

struct ExtractionSetup {
    std::vector<double> cof_grid = default_cof_grid();
    int repeats = 1;
    double v_ref = 1.0;
    std::uint64_t global_seed = 0;
    unsigned workers = 1;
    CofBankDesign bank{};
};

/// Chip ids carry the population label in the high word so noise streams of
/// different populations never coincide.
inline std::uint64_t population_chip_id(std::string_view label, std::uint32_t index)
{
    return (std::uint64_t{lo32(fnv1a64(label))} << 32) | index;
}

struct Population {
    std::string label;
    std::vector<ChipInstance> chips;
    std::vector<SignatureTrace> traces;
};

inline std::vector<ChipInstance> population_chips(const FabProcess& process, std::size_t pairs,
                                                  std::string_view label, std::uint32_t first_index,
                                                  std::size_t count, const ExtractionSetup& setup)
{
    auto chips = sample_population(process, pairs, derive_seed(setup.global_seed, label), first_index, count,
                                   setup.bank, setup.workers);
    for (auto& c : chips)
        c.chip_id = population_chip_id(label, c.lineage.chip_index);
    return chips;
}

inline std::vector<SignatureTrace> population_traces(std::span<const ChipInstance> chips,
                                                     const FabProcess& process, const ExtractionSetup& setup)
{
    return extract_population(chips, comparator_from(process, setup.global_seed), setup.cof_grid,
                              setup.repeats, setup.v_ref, setup.workers);
}

inline Population simulate_population(const FabProcess& process, std::size_t pairs, const std::string& label,
                                      std::uint32_t first_index, std::size_t count,
                                      const ExtractionSetup& setup)
{
    Population pop{label, population_chips(process, pairs, label, first_index, count, setup), {}};
    pop.traces = population_traces(pop.chips, process, setup);
    return pop;
}

/// Standard deviation of the comparison voltage a unit-cap mismatch produces
/// between one pair of N-unit arrays at zero offset.
inline double mismatch_voltage_scale(const FabProcess& p, std::size_t pairs, double v_ref)
{
    const double n = static_cast<double>(pairs);
    return v_ref * (p.sigma_cu / p.cu_nominal) * std::sqrt(2.0 * (n - 1.0)) / std::pow(n, 1.5);
}

// --- choice of N ---

struct NCurveRow {
    std::size_t n = 0;
    double var_d[2] = {0, 0};  ///< var(|N_AC - avg|) at the two offsets
    double mean_d[2] = {0, 0};
    double mean_trace[2] = {0, 0};
    double sensitivity = 0.0; ///< |mean_trace[1] - mean_trace[0]|
    double total_var() const noexcept { return var_d[0] + var_d[1]; }
};

struct NSelection {
    std::vector<NCurveRow> rows;
    std::size_t n_opt = 0;
    bool fallback = false; ///< no candidate met both criteria; max sensitivity^2 / var chosen
};

struct NSelectionOptions {
    double var_floor_factor = 1.5;
    double sensitivity_retention = 0.5;
    std::string label = "optimize_n";
};

/// For each N one population is extracted at the two offsets. D_Auth per chip
/// and offset is |N_AC,normalized - population mean|. n_opt is the smallest N
/// whose summed variance is within var_floor_factor of the smallest one while
/// its sensitivity keeps sensitivity_retention of the largest.
inline NSelection optimize_n(const FabProcess& process, std::span<const std::size_t> n_candidates,
                             std::array<double, 2> cof_pair, std::size_t chips_per_point,
                             ExtractionSetup setup, const NSelectionOptions& opt = {})
{
    detail::require(!n_candidates.empty(), "optimize_n: no candidates");
    detail::require(std::is_sorted(n_candidates.begin(), n_candidates.end()) &&
                        std::adjacent_find(n_candidates.begin(), n_candidates.end()) == n_candidates.end(),
                    "optimize_n: candidates must be strictly ascending");
    detail::require(chips_per_point >= 50, "optimize_n: need at least 50 chips per point");
    detail::require(cof_pair[0] != cof_pair[1], "optimize_n: the two offsets must differ");
    const bool swapped = cof_pair[0] > cof_pair[1];
    setup.cof_grid = {std::min(cof_pair[0], cof_pair[1]), std::max(cof_pair[0], cof_pair[1])};

    NSelection out;
    for (std::size_t n : n_candidates) {
        const auto pop = simulate_population(process, n, opt.label, 0, chips_per_point, setup);
        NCurveRow row;
        row.n = n;
        for (int j = 0; j < 2; ++j) {
            const auto col = static_cast<std::size_t>(swapped ? 1 - j : j);
            std::vector<double> values;
            for (const auto& t : pop.traces)
                values.push_back(t.normalized[col]);
            row.mean_trace[j] = mean_of(values);
            for (double& v : values)
                v = std::abs(v - row.mean_trace[j]);
            row.mean_d[j] = mean_of(values);
            row.var_d[j] = variance_of(values);
        }
        row.sensitivity = std::abs(row.mean_trace[1] - row.mean_trace[0]);
        out.rows.push_back(row);
    }

    double var_floor = out.rows.front().total_var(), sens_max = 0.0;
    for (const auto& r : out.rows) {
        var_floor = std::min(var_floor, r.total_var());
        sens_max = std::max(sens_max, r.sensitivity);
    }
    for (const auto& r : out.rows) {
        if (r.total_var() <= opt.var_floor_factor * var_floor &&
            r.sensitivity >= opt.sensitivity_retention * sens_max) {
            out.n_opt = r.n;
            return out;
        }
    }
    out.fallback = true;
    double best = -1.0;
    for (const auto& r : out.rows) {
        const double score = r.total_var() > 0 ? r.sensitivity * r.sensitivity / r.total_var() : 0.0;
        if (score > best) {
            best = score;
            out.n_opt = r.n;
        }
    }
    return out;
}

// --- sensitivity of the distance metric to sigma_cu ---

struct SensitivityProfile {
    std::vector<double> sigma_cu;          ///< F, as requested
    std::vector<std::vector<double>> mean_point_distance; ///< [sigma][point]
    std::vector<double> slope;             ///< per point, d(mean distance)/d(sigma_cu)
    std::vector<double> mean_total_distance; ///< per sigma
    double relative_change = 0.0; ///< (last - first) / first of mean_total_distance
};

/// Mean distance of populations drawn at each sigma_cu from a reference
/// average: per point the mean |N_AC - avg|, in total the card distance
/// sqrt(sum eta_j dev_j^2) with eta uniform unless `weights` is given. Slopes
/// are least-squares over the sigma list; each sigma is a fresh population
/// under label "<label>/<sigma>", so equal sigmas give equal populations.
inline SensitivityProfile sensitivity_profile(const FabProcess& process, std::size_t pairs,
                                              const TraceSummary& reference, std::span<const double> sigma_cu,
                                              std::size_t chips, const ExtractionSetup& setup,
                                              std::span<const double> weights = {},
                                              const std::string& label = "sensitivity")
{
    detail::require(sigma_cu.size() >= 2, "sensitivity_profile: need at least two sigma values");
    detail::require(chips >= 2, "sensitivity_profile: need at least two chips");
    detail::require(reference.cof_grid == setup.cof_grid, "sensitivity_profile: reference grid differs");
    const std::size_t points = setup.cof_grid.size();
    std::vector<double> eta(points, 1.0);
    if (!weights.empty()) {
        detail::require(weights.size() == points, "sensitivity_profile: weights do not match the grid");
        eta.assign(weights.begin(), weights.end());
    }

    SensitivityProfile prof;
    prof.sigma_cu.assign(sigma_cu.begin(), sigma_cu.end());
    for (double s : sigma_cu) {
        FabProcess p = process;
        p.sigma_cu = s;
        char tag[32];
        std::snprintf(tag, sizeof tag, "%.8e", s);
        const auto pop = simulate_population(p, pairs, label + "/" + tag, 0, chips, setup);
        std::vector<double> per_point(points, 0.0);
        double total = 0.0;
        for (const auto& t : pop.traces) {
            double sq = 0.0;
            for (std::size_t j = 0; j < points; ++j) {
                const double dev = t.normalized[j] - reference.mean[j];
                per_point[j] += std::abs(dev);
                sq += eta[j] * dev * dev;
            }
            total += std::sqrt(sq);
        }
        for (double& v : per_point)
            v /= static_cast<double>(chips);
        prof.mean_point_distance.push_back(per_point);
        prof.mean_total_distance.push_back(total / static_cast<double>(chips));
    }

    const double sbar = mean_of(sigma_cu);
    double sxx = 0.0;
    for (double s : sigma_cu)
        sxx += (s - sbar) * (s - sbar);
    prof.slope.assign(points, 0.0);
    if (sxx > 0) {
        for (std::size_t j = 0; j < points; ++j) {
            double mbar = 0.0;
            for (const auto& row : prof.mean_point_distance)
                mbar += row[j];
            mbar /= static_cast<double>(sigma_cu.size());
            double sxy = 0.0;
            for (std::size_t k = 0; k < sigma_cu.size(); ++k)
                sxy += (sigma_cu[k] - sbar) * (prof.mean_point_distance[k][j] - mbar);
            prof.slope[j] = sxy / sxx;
        }
    }
    const double first = prof.mean_total_distance.front();
    prof.relative_change = first > 0 ? (prof.mean_total_distance.back() - first) / first : 0.0;
    return prof;
}

/// Weights from a sensitivity profile: negative slopes carry no information
/// about a sigma increase and get weight 0.
inline std::vector<double> sensitivity_weights(const SensitivityProfile& prof)
{
    std::vector<double> s = prof.slope;
    for (double& v : s)
        v = std::max(v, 0.0);
    return weight_assign(s);
}

// --- environmental drift ---

struct DriftSweep {
    std::vector<double> x;                        ///< temperatures or offsets
    std::vector<std::vector<double>> avg_trace;   ///< [x][point], normalized N_AC
    std::vector<std::vector<double>> avg_side_n;  ///< [x][point], C_OF on the negative input
    std::vector<std::vector<double>> avg_side_p;
    std::vector<std::vector<double>> slope;       ///< [interval][point] of avg_trace
    std::vector<std::vector<SignatureTrace>> traces; ///< [x][chip]
    double max_abs_slope = 0.0;
    bool traces_identical = false; ///< every chip's trace equal at every x (counts and seeds)
};

namespace detail {
inline void summarize_drift(DriftSweep& s, std::size_t pairs)
{
    const std::size_t points = s.traces.front().front().cof_grid.size();
    const double norm = static_cast<double>(pairs);
    for (const auto& pop : s.traces) {
        std::vector<double> avg(points, 0.0), dn(points, 0.0), dp(points, 0.0);
        for (const auto& t : pop) {
            for (std::size_t j = 0; j < points; ++j) {
                avg[j] += t.normalized[j];
                dn[j] += t.counts_offset_n[j] / norm;
                dp[j] += t.counts_offset_p[j] / norm;
            }
        }
        for (std::size_t j = 0; j < points; ++j) {
            avg[j] /= static_cast<double>(pop.size());
            dn[j] /= static_cast<double>(pop.size());
            dp[j] /= static_cast<double>(pop.size());
        }
        s.avg_trace.push_back(avg);
        s.avg_side_n.push_back(dn);
        s.avg_side_p.push_back(dp);
    }
    for (std::size_t k = 0; k + 1 < s.x.size(); ++k) {
        std::vector<double> sl(points, 0.0);
        const double dx = s.x[k + 1] - s.x[k];
        for (std::size_t j = 0; j < points; ++j) {
            sl[j] = dx != 0.0 ? (s.avg_trace[k + 1][j] - s.avg_trace[k][j]) / dx : 0.0;
            s.max_abs_slope = std::max(s.max_abs_slope, std::abs(sl[j]));
        }
        s.slope.push_back(sl);
    }
    s.traces_identical = true;
    for (const auto& pop : s.traces) {
        for (std::size_t c = 0; c < pop.size(); ++c)
            s.traces_identical = s.traces_identical && pop[c] == s.traces.front()[c];
    }
}
} // namespace detail

/// Same chips at every temperature; capacitances scaled by apply_temperature.
inline DriftSweep sensitivity_temperature(const FabProcess& process, std::size_t pairs,
                                          std::span<const double> temperatures, double t0, std::size_t chips,
                                          const ExtractionSetup& setup, const std::string& label = "temperature")
{
    detail::require(temperatures.size() >= 2, "sensitivity_temperature: need at least two temperatures");
    const auto base = population_chips(process, pairs, label, 0, chips, setup);
    DriftSweep s;
    s.x.assign(temperatures.begin(), temperatures.end());
    for (double t : temperatures) {
        std::vector<ChipInstance> hot;
        hot.reserve(base.size());
        for (const auto& c : base)
            hot.push_back(apply_temperature(c, process, t, t0));
        s.traces.push_back(population_traces(hot, process, setup));
    }
    detail::summarize_drift(s, pairs);
    return s;
}

/// Same chips at every comparator offset. A transistor threshold corner is
/// represented by the residual offset it leaves at the comparator input.
inline DriftSweep sensitivity_offset(const FabProcess& process, std::size_t pairs,
                                     std::span<const double> offsets, std::size_t chips,
                                     const ExtractionSetup& setup, const std::string& label = "offset")
{
    detail::require(offsets.size() >= 2, "sensitivity_offset: need at least two offsets");
    const auto base = population_chips(process, pairs, label, 0, chips, setup);
    DriftSweep s;
    s.x.assign(offsets.begin(), offsets.end());
    for (double v : offsets) {
        FabProcess p = process;
        p.v_offset = v;
        s.traces.push_back(population_traces(base, p, setup));
    }
    detail::summarize_drift(s, pairs);
    return s;
}

} // namespace mosauth
