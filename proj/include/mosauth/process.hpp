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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/parallel.hpp"
#include "mosauth/rng.hpp"

namespace mosauth {

/// MOM finger-pair geometry, meters.
struct LineGeometry {
    double width = 8e-9;
    double spacing = 8e-9;
    double thickness = 5.8e-9;
    double line_length = 1e-6;
};

/// Fabrication-line parameter set. SI units throughout.
struct FabProcess {
    double cu_nominal = 1e-15;   ///< F
    double sigma_cu = 1e-17;     ///< F, std dev of unit-cap mismatch
    double tc = 30e-6;           ///< 1/degC
    double eta_ler = 16e-9;      ///< m, LER correlation length
    double sigma_ler = 1e-9;     ///< m, LER amplitude
    LineGeometry geometry{};
    double sigma_n = 1.5811388300841898e-8; ///< V, sqrt(250e-18 V^2)
    double v_offset = 0.0;                  ///< V
};

inline void validate(const FabProcess& p)
{
    auto need = [](bool ok, const char* what) {
        if (!ok)
            throw DomainError(std::string("FabProcess: ") + what);
    };
    need(std::isfinite(p.cu_nominal) && p.cu_nominal > 0, "cu_nominal must be > 0");
    need(std::isfinite(p.sigma_cu) && p.sigma_cu >= 0, "sigma_cu must be >= 0");
    need(p.sigma_cu < p.cu_nominal, "sigma_cu must be < cu_nominal");
    need(std::isfinite(p.tc), "tc must be finite");
    need(std::isfinite(p.sigma_n) && p.sigma_n >= 0, "sigma_n must be >= 0");
    need(std::isfinite(p.v_offset), "v_offset must be finite");
    need(p.eta_ler > 0, "eta_ler must be > 0");
    need(p.sigma_ler >= 0, "sigma_ler must be >= 0");
    need(p.geometry.width > 0 && p.geometry.spacing > 0 && p.geometry.thickness > 0 &&
             p.geometry.line_length > 0,
         "geometry dimensions must be > 0");
}

struct SeedLineage {
    std::uint64_t global_seed = 0;
    std::uint32_t chip_index = 0;
    bool operator==(const SeedLineage&) const = default;
};

/// Offset-capacitor bank as fabricated. Ideal by default; with
/// `sample_mismatch` the series unit carries the same relative mismatch as
/// the unit capacitors.
struct CofBankDesign {
    double series_unit = 5e-17; ///< F (Cu/20 at the default Cu)
    bool sample_mismatch = false;
};

/// One fabricated device: two unit-capacitor arrays plus its offset bank.
struct ChipInstance {
    std::vector<double> cu_p;
    std::vector<double> cu_n;
    double cof_series_unit = 0.0;   ///< as fabricated, scaled by temperature
    double cof_series_design = 0.0; ///< drawn value, the offset reference
    double cu_design = 0.0;         ///< process nominal used to express C_OF grids
    std::uint64_t chip_id = 0;
    SeedLineage lineage{};
    std::uint32_t redraws = 0;

    std::size_t size() const noexcept { return cu_p.size(); }

    /// Farads of an offset requested as a fraction of the nominal unit cap.
    /// Tracks the bank's own drift, so uniform scaling of every capacitor
    /// scales the realized offset too.
    double cof_farads(double ratio_of_cu) const noexcept
    {
        return ratio_of_cu * cu_design * (cof_series_unit / cof_series_design);
    }
};

namespace detail {
inline double truncated_draw(const CounterRng& rng, RngDomain domain, std::uint32_t a,
                             std::uint32_t b, double mean, double sd, std::uint32_t& redraws)
{
    for (std::uint32_t attempt = 0;; ++attempt) {
        const double v = mean + sd * rng.normal(domain, a, b, attempt);
        if (v > 0.0)
            return v;
        ++redraws;
    }
}
} // namespace detail

/// Draws 2n unit capacitances ~ N(cu_nominal, sigma_cu^2), truncated to > 0.
/// Draw k of side s depends only on (global_seed, chip_index, s, k), so a chip
/// with more units extends, rather than reshuffles, a smaller one.
inline ChipInstance sample_chip(const FabProcess& process, std::size_t n, std::uint64_t global_seed,
                                std::uint32_t chip_index, const CofBankDesign& bank = {})
{
    detail::require(n >= 1, "sample_chip: n must be >= 1");
    detail::require(n < (1u << 31), "sample_chip: n too large");
    detail::require(bank.series_unit > 0, "sample_chip: cof series unit must be > 0");
    validate(process);

    const CounterRng rng(global_seed);
    ChipInstance chip;
    chip.cu_p.resize(n);
    chip.cu_n.resize(n);
    chip.cu_design = process.cu_nominal;
    chip.chip_id = chip_index;
    chip.lineage = {global_seed, chip_index};

    for (std::size_t side = 0; side < 2; ++side) {
        auto& arr = side == 0 ? chip.cu_p : chip.cu_n;
        for (std::size_t i = 0; i < n; ++i) {
            const auto b = static_cast<std::uint32_t>((side << 31) | i);
            arr[i] = detail::truncated_draw(rng, RngDomain::chip_capacitor, chip_index, b,
                                            process.cu_nominal, process.sigma_cu, chip.redraws);
        }
    }

    double unit = bank.series_unit;
    if (bank.sample_mismatch) {
        const double rel = process.sigma_cu / process.cu_nominal;
        unit = detail::truncated_draw(rng, RngDomain::cof_bank, chip_index, 0, bank.series_unit,
                                      rel * bank.series_unit, chip.redraws);
    }
    chip.cof_series_unit = unit;
    chip.cof_series_design = unit;
    return chip;
}

/// C(T) = C(T0) (1 + tc (T - T0)) applied uniformly to every capacitor,
/// including the offset bank. Returns a new chip.
inline ChipInstance apply_temperature(const ChipInstance& chip, const FabProcess& process, double t,
                                      double t0)
{
    const double scale = 1.0 + process.tc * (t - t0);
    detail::require(std::isfinite(scale) && scale > 0.0,
                    "apply_temperature: capacitance scale factor must be > 0");
    ChipInstance out = chip;
    if (scale == 1.0)
        return out;
    for (double& c : out.cu_p)
        c *= scale;
    for (double& c : out.cu_n)
        c *= scale;
    out.cof_series_unit *= scale;
    return out;
}

/// `count` chips with indices first_index, first_index + 1, ...
inline std::vector<ChipInstance> sample_population(const FabProcess& process, std::size_t n,
                                                   std::uint64_t seed, std::uint32_t first_index,
                                                   std::size_t count, const CofBankDesign& bank = {},
                                                   unsigned workers = 1)
{
    return parallel_map(count, workers, [&](std::size_t k) {
        return sample_chip(process, n, seed, first_index + static_cast<std::uint32_t>(k), bank);
    });
}

} // namespace mosauth
