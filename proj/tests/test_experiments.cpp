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

#include <gtest/gtest.h>

#include "mosauth/stats/experiments.hpp"

using namespace mosauth;

namespace {
ExtractionSetup small_setup(std::uint64_t seed)
{
    ExtractionSetup s;
    s.global_seed = seed;
    s.repeats = 1;
    return s;
}
} // namespace

TEST(PopulationIds, LabelAndIndex)
{
    EXPECT_EQ(population_chip_id("a", 3) & 0xffffffffu, 3u);
    EXPECT_NE(population_chip_id("a", 3), population_chip_id("b", 3));
    const auto chips = population_chips(FabProcess{}, 16, "x", 5, 2, small_setup(1));
    EXPECT_EQ(chips[0].chip_id, population_chip_id("x", 5));
    EXPECT_EQ(chips[1].chip_id, population_chip_id("x", 6));
}

TEST(PopulationIds, ContinuingIndicesExtendThePopulation)
{
    const auto all = population_chips(FabProcess{}, 16, "x", 0, 4, small_setup(1));
    const auto tail = population_chips(FabProcess{}, 16, "x", 2, 2, small_setup(1));
    EXPECT_EQ(all[2].cu_p, tail[0].cu_p);
    EXPECT_EQ(all[3].cu_n, tail[1].cu_n);
}

TEST(MismatchScale, Formula)
{
    FabProcess p;
    EXPECT_NEAR(mismatch_voltage_scale(p, 256, 1.0), 55.13e-6, 0.01e-6);
}

TEST(OptimizeN, SingleCandidateIsChosen)
{
    const std::vector<std::size_t> n{64};
    const auto sel = optimize_n(FabProcess{}, n, {0.01, 0.02}, 50, small_setup(2));
    EXPECT_EQ(sel.n_opt, 64u);
    ASSERT_EQ(sel.rows.size(), 1u);
    EXPECT_GT(sel.rows[0].sensitivity, 0.0);
}

TEST(OptimizeN, RejectsSmallPopulations)
{
    const std::vector<std::size_t> n{64};
    EXPECT_THROW(optimize_n(FabProcess{}, n, {0.01, 0.02}, 49, small_setup(2)), DomainError);
}

TEST(Sensitivity, IdenticalSigmasGiveZeroSlope)
{
    const auto setup = small_setup(3);
    FabProcess p;
    p.sigma_n = 0;
    const auto ref = average_trace(simulate_population(p, 64, "ref", 0, 20, setup).traces, 3);
    const std::vector<double> sigmas{1e-17, 1e-17};
    const auto prof = sensitivity_profile(p, 64, ref, sigmas, 20, setup);
    for (double s : prof.slope)
        EXPECT_EQ(s, 0.0);
    EXPECT_EQ(prof.relative_change, 0.0);
    const std::vector<double> one{1e-17};
    EXPECT_THROW(sensitivity_profile(p, 64, ref, one, 20, setup), DomainError);
}

TEST(Temperature, NoTemperatureCoefficientMeansNoDrift)
{
    FabProcess p;
    p.tc = 0;
    p.sigma_n = 3e-5;
    const std::vector<double> temps{-20, 27, 80};
    const auto s = sensitivity_temperature(p, 64, temps, 27, 10, small_setup(4));
    EXPECT_EQ(s.max_abs_slope, 0.0);
    EXPECT_TRUE(s.traces_identical);
}

TEST(Temperature, NoiselessExtractionIsScaleInvariant)
{
    FabProcess p;
    p.sigma_n = 0;
    const std::vector<double> temps{-20, 27, 80};
    const auto s = sensitivity_temperature(p, 128, temps, 27, 10, small_setup(5));
    EXPECT_EQ(s.max_abs_slope, 0.0);
    EXPECT_TRUE(s.traces_identical);
}

TEST(Offset, EqualOffsetsGiveZeroSlope)
{
    FabProcess p;
    p.sigma_n = 2e-5;
    const std::vector<double> offsets{1e-5, 1e-5};
    const auto s = sensitivity_offset(p, 64, offsets, 10, small_setup(6));
    EXPECT_EQ(s.max_abs_slope, 0.0);
}

TEST(Offset, LargeOffsetSaturatesOneDirection)
{
    FabProcess p;
    p.sigma_n = 0;
    const std::vector<double> offsets{0.0, 0.1};
    const auto s = sensitivity_offset(p, 64, offsets, 5, small_setup(7));
    // +100 mV swamps every mismatch: the offset-on-P test never fires and
    // the offset-on-N test always does.
    for (std::size_t j = 0; j < s.avg_side_n[1].size(); ++j) {
        EXPECT_EQ(s.avg_side_p[1][j], 0.0);
        EXPECT_EQ(s.avg_side_n[1][j], 1.0);
        EXPECT_EQ(s.avg_trace[1][j], 1.0);
    }
}
