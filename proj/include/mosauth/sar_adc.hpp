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

// Behavioral monotonic-switching SAR ADC over a mismatched CDAC.
//
// Each side of the CDAC is built from the chip's unit capacitors in binary
// groups of 2^(bits-2), ..., 2, 1 units plus one dummy unit that never
// switches, so a side holds 2^(bits-1) units and group 0 is the MSB group
// shared with signature extraction. Inputs are sampled on the top plates with
// every bottom plate at V_REF. After each decision the largest remaining
// group on the higher side drops to ground; the top-plate voltage follows
// from charge conservation over the actual capacitances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/frontend.hpp"
#include "mosauth/process.hpp"

namespace mosauth {

enum class Plate : std::uint8_t { gnd = 0, vref = 1 };

struct AdcConfig {
    int bits = 10;
    double v_ref = 1.0;
    double v_cm = 0.5;
    const ChipInstance* chip = nullptr;
};

inline std::size_t units_per_side(int bits) { return std::size_t{1} << (bits - 1); }
inline std::size_t msb_group_size(int bits) { return std::size_t{1} << (bits - 2); }

/// Bottom-plate connection of every switchable group at one decision.
struct DacState {
    std::vector<Plate> p;
    std::vector<Plate> n;
    bool operator==(const DacState&) const = default;
};

struct ConversionRecord {
    std::uint32_t code = 0;
    std::vector<DacState> dac_state_sequence;
    std::vector<int> comparator_decisions;
    std::vector<double> top_p; ///< V_P seen by each decision
    std::vector<double> top_n;
};

inline bool switching_trace_equal(const ConversionRecord& a, const ConversionRecord& b)
{
    detail::require(a.comparator_decisions.size() == b.comparator_decisions.size(),
                    "switching_trace_equal: records have different bit counts");
    return a.dac_state_sequence == b.dac_state_sequence &&
           a.comparator_decisions == b.comparator_decisions;
}

enum class DacMode { conversion, authentication };

/// Full switch state of the modified CDAC, including the offset bank.
struct DacSnapshot {
    std::vector<Plate> bottom_p;
    std::vector<Plate> bottom_n;
    DacMode mode = DacMode::conversion;
    BankPolarity bank = BankPolarity::detached;
    bool operator==(const DacSnapshot&) const = default;
};

class SarAdc {
  public:
    explicit SarAdc(const AdcConfig& cfg) : cfg_(cfg)
    {
        detail::require(cfg.bits >= 2 && cfg.bits <= 20, "SarAdc: bits must be in [2, 20]");
        detail::require(cfg.chip != nullptr, "SarAdc: config has no chip");
        detail::require(cfg.chip->size() >= units_per_side(cfg.bits),
                        "SarAdc: chip has fewer than 2^(bits-1) units per side");
        detail::require(cfg.v_ref > 0, "SarAdc: v_ref must be > 0");
        const std::size_t units = units_per_side(cfg.bits);
        state_.bottom_p.assign(units, Plate::vref);
        state_.bottom_n.assign(units, Plate::vref);

        // group g covers units [first_[g], first_[g+1]); the last group is the dummy
        std::size_t start = 0;
        for (int g = 0; g < cfg.bits - 1; ++g) {
            first_.push_back(start);
            start += std::size_t{1} << (cfg.bits - 2 - g);
        }
        first_.push_back(start);
        first_.push_back(start + 1);
        total_p_ = detail::array_sum(chip().cu_p, units);
        total_n_ = detail::array_sum(chip().cu_n, units);
        msb_sum_p_ = detail::array_sum(chip().cu_p, msb_size());
        msb_sum_n_ = detail::array_sum(chip().cu_n, msb_size());
    }

    const AdcConfig& config() const noexcept { return cfg_; }
    const ChipInstance& chip() const noexcept { return *cfg_.chip; }
    std::size_t msb_size() const noexcept { return msb_group_size(cfg_.bits); }
    const DacSnapshot& snapshot() const noexcept { return state_; }

    /// Capacitance of group g on the P (side 0) or N (side 1) array.
    double group_capacitance(int side, int g) const
    {
        const auto& arr = side == 0 ? chip().cu_p : chip().cu_n;
        double s = 0.0;
        for (std::size_t u = first_.at(g); u < first_.at(g + 1); ++u)
            s += arr[u];
        return s;
    }
    double side_capacitance(int side) const noexcept { return side == 0 ? total_p_ : total_n_; }

    /// Top-plate voltage after sampling `v_sample` with all bottoms at V_REF,
    /// given the current bottom-plate connections (charge balance).
    double top_plate_voltage(int side, double v_sample) const noexcept
    {
        const auto& arr = side == 0 ? chip().cu_p : chip().cu_n;
        const auto& bottoms = side == 0 ? state_.bottom_p : state_.bottom_n;
        double dq = 0.0;
        for (std::size_t u = 0; u < bottoms.size(); ++u)
            dq += arr[u] * ((bottoms[u] == Plate::vref ? cfg_.v_ref : 0.0) - cfg_.v_ref);
        return v_sample + dq / side_capacitance(side);
    }

    ConversionRecord convert(double v_ip, double v_in, ComparatorModel& model)
    {
        detail::require(state_.mode == DacMode::conversion, "convert: ADC is in authentication mode");
        detail::require(v_ip >= 0 && v_ip <= cfg_.v_ref && v_in >= 0 && v_in <= cfg_.v_ref,
                        "convert: inputs must lie in [0, v_ref]");
        const int bits = cfg_.bits;
        std::fill(state_.bottom_p.begin(), state_.bottom_p.end(), Plate::vref);
        std::fill(state_.bottom_n.begin(), state_.bottom_n.end(), Plate::vref);

        ConversionRecord rec;
        for (int step = 0; step < bits; ++step) {
            const double vp = top_plate_voltage(0, v_ip);
            const double vn = top_plate_voltage(1, v_in);
            rec.dac_state_sequence.push_back(group_state());
            rec.top_p.push_back(vp);
            rec.top_n.push_back(vn);
            const int d = compare(model, vp, vn);
            rec.comparator_decisions.push_back(d);
            rec.code = (rec.code << 1) | static_cast<std::uint32_t>(d);
            if (step < bits - 1)
                set_group(d == 1 ? 0 : 1, step, Plate::gnd);
        }
        return rec;
    }

    // --- authentication mode (signature extraction) ---

    void begin_authentication()
    {
        detail::require(state_.mode == DacMode::conversion, "begin_authentication: already active");
        saved_ = state_;
        state_.mode = DacMode::authentication;
        active_ = npos;
    }

    /// Step 1 and 2: offset bank onto one comparator input, every MSB unit
    /// and the bank discharged.
    void attach_offset(CofSide side)
    {
        require_auth();
        state_.bank = side == CofSide::p ? BankPolarity::attached_to_p : BankPolarity::attached_to_n;
        for (std::size_t u = 0; u < msb_size(); ++u) {
            state_.bottom_p[u] = Plate::gnd;
            state_.bottom_n[u] = Plate::gnd;
        }
        active_ = npos;
    }

    /// Step 3 for pair i: only unit i of each MSB array (and the bank) at '1'.
    void select_pair(std::size_t i)
    {
        require_auth();
        detail::require(i < msb_size(), "select_pair: index outside the MSB group");
        if (active_ != npos) {
            state_.bottom_p[active_] = Plate::gnd;
            state_.bottom_n[active_] = Plate::gnd;
        }
        state_.bottom_p[i] = Plate::vref;
        state_.bottom_n[i] = Plate::vref;
        active_ = i;
    }

    /// Comparator inputs of the selected pair with offset `cof` farads.
    detail::PairVoltages selected_voltages(double cof) const
    {
        detail::require(active_ != npos, "selected_voltages: no pair selected");
        const double cp = chip().cu_p[active_];
        const double cn = chip().cu_n[active_];
        if (state_.bank == BankPolarity::attached_to_p)
            return detail::pair_voltages(cp, msb_sum_p_, cn, msb_sum_n_, cof, cfg_.v_ref);
        return detail::pair_voltages(cn, msb_sum_n_, cp, msb_sum_p_, cof, cfg_.v_ref);
    }

    void end_authentication()
    {
        require_auth();
        state_ = saved_;
        active_ = npos;
    }

  private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void require_auth() const
    {
        detail::require(state_.mode == DacMode::authentication, "ADC is not in authentication mode");
    }

    void set_group(int side, int g, Plate plate)
    {
        auto& bottoms = side == 0 ? state_.bottom_p : state_.bottom_n;
        for (std::size_t u = first_[g]; u < first_[g + 1]; ++u)
            bottoms[u] = plate;
    }

    DacState group_state() const
    {
        DacState s;
        for (int g = 0; g < cfg_.bits - 1; ++g) {
            s.p.push_back(state_.bottom_p[first_[g]]);
            s.n.push_back(state_.bottom_n[first_[g]]);
        }
        return s;
    }

    AdcConfig cfg_;
    DacSnapshot state_;
    DacSnapshot saved_;
    std::vector<std::size_t> first_;
    double total_p_ = 0.0, total_n_ = 0.0;
    double msb_sum_p_ = 0.0, msb_sum_n_ = 0.0;
    std::size_t active_ = npos;
};

inline ConversionRecord convert(const AdcConfig& cfg, double v_ip, double v_in, ComparatorModel& model)
{
    SarAdc adc(cfg);
    return adc.convert(v_ip, v_in, model);
}

/// Ideal bits-bit quantizer of v_diff over [-v_ref, v_ref]; code c covers
/// (-v_ref + c LSB, -v_ref + (c+1) LSB], LSB = 2 v_ref / 2^bits.
inline std::uint32_t ideal_code(double v_diff, int bits, double v_ref)
{
    const double levels = std::ldexp(1.0, bits);
    const double lsb = 2.0 * v_ref / levels;
    const double c = std::ceil((v_diff + v_ref) / lsb) - 1.0;
    return static_cast<std::uint32_t>(std::clamp(c, 0.0, levels - 1.0));
}

} // namespace mosauth
