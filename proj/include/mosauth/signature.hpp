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

// Three-step N_AC(C_OF) extraction over the MSB unit-capacitor pairs.
//
// For every grid point and every pair both directional tests run: C_OF on the
// negative input (count on comparator output 1) and C_OF on the positive
// input (count on output 0). Each test is the majority of `repeats`
// comparisons. A pair adds at most one to N_AC at a grid point.
//
// Noise draw (grid point j, pair i, direction d, repeat r) sits at index
// ((j * pairs + i) * 2 + d) * repeats + r of the chip's extraction lane.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/frontend.hpp"
#include "mosauth/numeric.hpp"
#include "mosauth/process.hpp"
#include "mosauth/sar_adc.hpp"

namespace mosauth {

struct SignatureTrace {
    std::vector<double> cof_grid; ///< C_OF / cu_nominal, ascending
    std::vector<int> counts;
    std::vector<double> normalized; ///< counts / pairs
    std::vector<int> counts_offset_n; ///< pairs counted with C_OF on the negative input
    std::vector<int> counts_offset_p; ///< pairs counted with C_OF on the positive input
    int repeats = 1;
    std::size_t pairs = 0;
    std::uint64_t chip_id = 0;
    std::uint64_t extraction_seed = 0;

    bool operator==(const SignatureTrace&) const = default;
};

inline int majority_vote(std::span<const int> bits)
{
    detail::require(!bits.empty() && bits.size() % 2 == 1, "majority_vote: need an odd number of bits");
    std::size_t ones = 0;
    for (int b : bits)
        ones += b != 0;
    return ones > bits.size() - ones ? 1 : 0;
}

/// Ten log-spaced points over Cu/200 .. Cu/20 plus the Cu/100 and Cu/50 anchors.
inline std::vector<double> default_cof_grid()
{
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k)
        grid.push_back(std::pow(10.0, k / 9.0) / 200.0);
    grid.front() = 1.0 / 200.0;
    grid.back() = 1.0 / 20.0;
    grid.push_back(1.0 / 100.0);
    grid.push_back(1.0 / 50.0);
    std::sort(grid.begin(), grid.end());
    return grid;
}

namespace detail {

inline void check_extraction_args(std::span<const double> grid, int repeats)
{
    require(!grid.empty(), "extract_signature: empty C_OF grid");
    require(repeats >= 1 && repeats % 2 == 1, "extract_signature: repeats must be odd and >= 1");
    for (std::size_t j = 0; j < grid.size(); ++j) {
        require(grid[j] >= 0 && std::isfinite(grid[j]), "extract_signature: grid values must be >= 0");
        require(j == 0 || grid[j] > grid[j - 1], "extract_signature: grid must be ascending");
    }
}

/// Majority decision of one directional test.
inline int repeated_test(const ComparatorModel& model, CofSide side, const PairVoltages& v,
                         std::uint64_t base_index, int repeats)
{
    int ones = 0, zeros = 0;
    const int half = repeats / 2;
    for (int r = 0; r < repeats; ++r) {
        const double error =
            model.v_offset + model.noise_at(ComparatorModel::kExtractionLane, base_index + r);
        (mismatch_bit(side, v, error) ? ones : zeros)++;
        if (ones > half)
            return 1;
        if (zeros > half)
            return 0;
    }
    return ones > zeros ? 1 : 0;
}

inline SignatureTrace blank_trace(std::span<const double> grid, int repeats, std::size_t pairs,
                                  std::uint64_t chip_id, std::uint64_t seed)
{
    SignatureTrace t;
    t.cof_grid.assign(grid.begin(), grid.end());
    t.counts.assign(grid.size(), 0);
    t.normalized.assign(grid.size(), 0.0);
    t.counts_offset_n.assign(grid.size(), 0);
    t.counts_offset_p.assign(grid.size(), 0);
    t.repeats = repeats;
    t.pairs = pairs;
    t.chip_id = chip_id;
    t.extraction_seed = seed;
    return t;
}

/// `voltages(side, i, cof)` supplies the comparator inputs; `enter(side)` and
/// `select(i)` let a caller drive switch state alongside.
template <class Enter, class Select, class Voltages>
SignatureTrace run_extraction(const ChipInstance& chip, std::size_t pairs, const ComparatorModel& base,
                              std::span<const double> grid, int repeats, Enter&& enter,
                              Select&& select, Voltages&& voltages)
{
    const ComparatorModel model = base.for_chip(chip.chip_id);
    SignatureTrace t = blank_trace(grid, repeats, pairs, chip.chip_id, base.global_seed);
    std::vector<std::uint8_t> fired(pairs);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double cof = chip.cof_farads(grid[j]);
        std::fill(fired.begin(), fired.end(), 0);
        for (int d = 0; d < 2; ++d) {
            const CofSide side = d == 0 ? CofSide::n : CofSide::p;
            enter(side);
            int& directional = d == 0 ? t.counts_offset_n[j] : t.counts_offset_p[j];
            for (std::size_t i = 0; i < pairs; ++i) {
                select(i);
                const std::uint64_t base_index =
                    ((static_cast<std::uint64_t>(j) * pairs + i) * 2 + d) * repeats;
                if (repeated_test(model, side, voltages(side, i, cof), base_index, repeats)) {
                    ++directional;
                    fired[i] = 1;
                }
            }
        }
        t.counts[j] = static_cast<int>(std::count(fired.begin(), fired.end(), 1));
        t.normalized[j] = static_cast<double>(t.counts[j]) / static_cast<double>(pairs);
    }
    return t;
}

} // namespace detail

/// Extraction over every unit pair of a bare chip (N = chip.size()).
inline SignatureTrace extract_signature(const ChipInstance& chip, const ComparatorModel& model,
                                        std::span<const double> cof_grid, int repeats, double v_ref)
{
    detail::check_extraction_args(cof_grid, repeats);
    detail::require(chip.size() >= 1, "extract_signature: empty chip");
    const std::size_t n = chip.size();
    const double sum_p = detail::array_sum(chip.cu_p, n);
    const double sum_n = detail::array_sum(chip.cu_n, n);
    return detail::run_extraction(
        chip, n, model, cof_grid, repeats, [](CofSide) {}, [](std::size_t) {},
        [&](CofSide side, std::size_t i, double cof) {
            return side == CofSide::p
                       ? detail::pair_voltages(chip.cu_p[i], sum_p, chip.cu_n[i], sum_n, cof, v_ref)
                       : detail::pair_voltages(chip.cu_n[i], sum_n, chip.cu_p[i], sum_p, cof, v_ref);
        });
}

/// Extraction through the ADC's switch network on its MSB group. The ADC's
/// conversion state is saved on entry and restored on exit.
inline SignatureTrace extract_signature(SarAdc& adc, const ComparatorModel& model,
                                        std::span<const double> cof_grid, int repeats)
{
    detail::check_extraction_args(cof_grid, repeats);
    adc.begin_authentication();
    try {
        auto t = detail::run_extraction(
            adc.chip(), adc.msb_size(), model, cof_grid, repeats,
            [&](CofSide side) { adc.attach_offset(side); }, [&](std::size_t i) { adc.select_pair(i); },
            [&](CofSide, std::size_t, double cof) { return adc.selected_voltages(cof); });
        adc.end_authentication();
        return t;
    } catch (...) {
        adc.end_authentication();
        throw;
    }
}

struct TraceSummary {
    std::vector<double> cof_grid;
    std::vector<double> mean;
    std::vector<double> stddev; ///< population convention (divide by count)
    std::vector<double> lower;
    std::vector<double> upper;
    int repeats = 1;
};

/// Pointwise mean/std of normalized counts with bounds mean +- k_sigma std.
inline TraceSummary average_trace(std::span<const SignatureTrace> traces, double k_sigma)
{
    detail::require(traces.size() >= 2, "average_trace: need at least two traces");
    detail::require(k_sigma >= 0, "average_trace: k_sigma must be >= 0");
    const auto& ref = traces.front();
    for (const auto& t : traces) {
        if (t.cof_grid != ref.cof_grid)
            throw DomainError("average_trace: traces have mismatched C_OF grids");
        if (t.repeats != ref.repeats)
            throw DomainError("average_trace: traces have mismatched repeat counts");
    }
    TraceSummary s;
    s.cof_grid = ref.cof_grid;
    s.repeats = ref.repeats;
    for (std::size_t j = 0; j < ref.cof_grid.size(); ++j) {
        RunningStats st;
        for (const auto& t : traces)
            st.push(t.normalized[j]);
        s.mean.push_back(st.mean());
        s.stddev.push_back(st.stddev());
        s.lower.push_back(st.mean() - k_sigma * st.stddev());
        s.upper.push_back(st.mean() + k_sigma * st.stddev());
    }
    return s;
}

/// Extracts a whole population; output order follows input order.
inline std::vector<SignatureTrace> extract_population(std::span<const ChipInstance> chips,
                                                      const ComparatorModel& model,
                                                      std::span<const double> cof_grid, int repeats,
                                                      double v_ref, unsigned workers = 1)
{
    return parallel_map(chips.size(), workers, [&](std::size_t k) {
        return extract_signature(chips[k], model, cof_grid, repeats, v_ref);
    });
}

} // namespace mosauth
