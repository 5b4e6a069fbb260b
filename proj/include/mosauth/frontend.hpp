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
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/process.hpp"
#include "mosauth/rng.hpp"

namespace mosauth {

/// Behavioral comparator: output 1 iff v_p + v_offset + noise > v_n, with
/// noise ~ N(0, sigma_n^2). Ties resolve to 0.
///
/// Noise is addressed by (global_seed, stream_id, lane, index); the first two
/// form the key. Lane 0 is the
/// sequential cursor consumed by compare(); other lanes are indexed draws used
/// by signature extraction so that its results do not depend on evaluation
/// order.
struct ComparatorModel {
    double sigma_n = 0.0;
    double v_offset = 0.0;
    std::uint64_t global_seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t cursor = 0;

    static constexpr std::uint32_t kSequentialLane = 0;
    static constexpr std::uint32_t kExtractionLane = 1;

    double noise_at(std::uint32_t lane, std::uint64_t index) const noexcept
    {
        if (sigma_n == 0.0)
            return 0.0;
        const CounterRng rng(splitmix64(global_seed ^ splitmix64(stream_id)));
        return sigma_n * rng.normal(RngDomain::comparator_noise, lane, hi32(index), lo32(index));
    }

    double next_noise() noexcept { return noise_at(kSequentialLane, cursor++); }

    /// Same parameters, stream bound to a chip, cursor rewound.
    ComparatorModel for_chip(std::uint64_t chip_id) const noexcept
    {
        ComparatorModel m = *this;
        m.stream_id = chip_id;
        m.cursor = 0;
        return m;
    }
};

inline ComparatorModel comparator_from(const FabProcess& process, std::uint64_t global_seed)
{
    return {process.sigma_n, process.v_offset, global_seed, 0, 0};
}

inline int compare(ComparatorModel& model, double v_p, double v_n)
{
    detail::require(std::isfinite(v_p) && std::isfinite(v_n), "compare: non-finite input voltage");
    const double noise = model.next_noise();
    return v_p + model.v_offset + noise > v_n ? 1 : 0;
}

enum class BankPolarity { attached_to_p, attached_to_n, detached };

/// Programmable offset capacitance: `active_stages` equal capacitors in series.
struct OffsetCapBank {
    double series_unit = 5e-17;
    int max_stages = 10;
    int active_stages = 1;
    BankPolarity polarity = BankPolarity::attached_to_n;
};

inline double cof_value(const OffsetCapBank& bank)
{
    detail::require(bank.polarity != BankPolarity::detached, "cof_value: bank is detached");
    detail::require(bank.active_stages >= 1 && bank.active_stages <= bank.max_stages,
                    "cof_value: active stages out of range");
    detail::require(bank.series_unit > 0, "cof_value: series unit must be > 0");
    return bank.series_unit / bank.active_stages;
}

/// Every value the bank can realize, as ascending fractions of `cu`.
inline std::vector<double> bank_grid_ratios(const OffsetCapBank& bank, double cu)
{
    std::vector<double> out;
    for (int k = bank.max_stages; k >= 1; --k) {
        OffsetCapBank b = bank;
        b.active_stages = k;
        b.polarity = BankPolarity::attached_to_n;
        out.push_back(cof_value(b) / cu);
    }
    return out;
}

/// Comparator input that carries C_OF during a mismatch test.
enum class CofSide { p, n };

namespace detail {

struct PairVoltages {
    double offset_side; ///< (C_x,i + C_OF) V_REF / (sum C_x + C_OF)
    double other_side;  ///< C_y,i V_REF / sum C_y
};

inline PairVoltages pair_voltages(double c_offset_side, double sum_offset_side, double c_other,
                                  double sum_other, double cof, double v_ref) noexcept
{
    return {(c_offset_side + cof) * v_ref / (sum_offset_side + cof), c_other * v_ref / sum_other};
}

/// Counts when the offset-carrying side still sits below the other side.
/// C_OF on N: comparator sees (P, N) and the count needs output 1.
/// C_OF on P: comparator sees (P, N) and the count needs output 0; a tie does
/// not count.
inline int mismatch_bit(CofSide side, const PairVoltages& v, double input_error) noexcept
{
    if (side == CofSide::n)
        return v.other_side + input_error > v.offset_side ? 1 : 0;
    return v.offset_side + input_error < v.other_side ? 1 : 0;
}

inline double array_sum(const std::vector<double>& xs, std::size_t n) noexcept
{
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        s += xs[j];
    return s;
}

} // namespace detail

/// One mismatch test of pair i (0-based) with C_OF (farads) on `side`:
/// 1 iff (C_x,i + C_OF) V / (sum C_x + C_OF) + V_n < C_y,i V / sum C_y, x the
/// offset side. Consumes one draw of the model's sequential stream.
inline int mismatch_compare(const ChipInstance& chip, std::size_t i, double cof, CofSide side,
                            ComparatorModel& model, double v_ref)
{
    detail::require(i < chip.size(), "mismatch_compare: pair index out of range");
    detail::require(cof >= 0 && std::isfinite(cof), "mismatch_compare: cof must be >= 0");
    const double sum_p = detail::array_sum(chip.cu_p, chip.size());
    const double sum_n = detail::array_sum(chip.cu_n, chip.size());
    const auto v = side == CofSide::p
                       ? detail::pair_voltages(chip.cu_p[i], sum_p, chip.cu_n[i], sum_n, cof, v_ref)
                       : detail::pair_voltages(chip.cu_n[i], sum_n, chip.cu_p[i], sum_p, cof, v_ref);
    const double error = model.v_offset + model.next_noise();
    return detail::mismatch_bit(side, v, error);
}

} // namespace mosauth
