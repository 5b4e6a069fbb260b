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

#include <cmath>

#include "mosauth/ler.hpp"
#include "mosauth/numeric.hpp"
#include "mosauth/process.hpp"

using namespace mosauth;

TEST(SampleChip, ZeroSigmaGivesNominalCaps)
{
    FabProcess p;
    p.sigma_cu = 0.0;
    const auto chip = sample_chip(p, 64, 1, 0);
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_EQ(chip.cu_p[i], p.cu_nominal);
        EXPECT_EQ(chip.cu_n[i], p.cu_nominal);
    }
}

TEST(SampleChip, MomentsOverTenThousandChips)
{
    const FabProcess p; // 1 fF, 10 aF
    const auto chips = sample_population(p, 256, 5, 0, 10000);
    RunningStats s;
    for (const auto& c : chips)
        for (std::size_t i = 0; i < c.size(); ++i) {
            s.push(c.cu_p[i]);
            s.push(c.cu_n[i]);
        }
    const double n = static_cast<double>(s.count());
    EXPECT_NEAR(s.mean(), 1e-15, 3 * 1e-17 / std::sqrt(n));
    EXPECT_NEAR(s.stddev(), 1e-17, 3 * 1e-17 / std::sqrt(2 * n));
}

TEST(SampleChip, DeterministicPerIndex)
{
    const FabProcess p;
    const auto a = sample_chip(p, 32, 9, 4);
    const auto b = sample_chip(p, 32, 9, 4);
    const auto c = sample_chip(p, 32, 9, 5);
    EXPECT_EQ(a.cu_p, b.cu_p);
    EXPECT_EQ(a.cu_n, b.cu_n);
    EXPECT_NE(a.cu_p, c.cu_p);
}

TEST(SampleChip, LargerChipExtendsSmallerOne)
{
    const FabProcess p;
    const auto small = sample_chip(p, 32, 9, 4);
    const auto big = sample_chip(p, 256, 9, 4);
    for (std::size_t i = 0; i < 32; ++i) {
        EXPECT_EQ(small.cu_p[i], big.cu_p[i]);
        EXPECT_EQ(small.cu_n[i], big.cu_n[i]);
    }
}

TEST(SampleChip, RejectsEmptyChip) { EXPECT_THROW(sample_chip(FabProcess{}, 0, 1, 0), DomainError); }

TEST(SampleChip, TruncationRedrawsAreCounted)
{
    FabProcess p;
    p.sigma_cu = 0.9 * p.cu_nominal;
    const auto chip = sample_chip(p, 2000, 1, 0);
    EXPECT_GT(chip.redraws, 0u);
    for (std::size_t i = 0; i < chip.size(); ++i)
        EXPECT_GT(chip.cu_p[i], 0.0);
}

TEST(Temperature, IdentityCases)
{
    FabProcess p;
    const auto chip = sample_chip(p, 16, 1, 0);
    EXPECT_EQ(apply_temperature(chip, p, 27.0, 27.0).cu_p, chip.cu_p);
    p.tc = 0.0;
    EXPECT_EQ(apply_temperature(chip, p, 80.0, 27.0).cu_n, chip.cu_n);
}

TEST(Temperature, LinearScaling)
{
    FabProcess p;
    p.sigma_cu = 0.0;
    const auto chip = sample_chip(p, 4, 1, 0);
    const auto hot = apply_temperature(chip, p, 57.0, 27.0);
    EXPECT_NEAR(hot.cu_p[0], 1.0009e-15, 1e-27);
    EXPECT_NEAR(hot.cof_series_unit, chip.cof_series_unit * 1.0009, 1e-30);
}

TEST(Temperature, RejectsNonPositiveScale)
{
    FabProcess p;
    p.tc = 0.01;
    const auto chip = sample_chip(p, 4, 1, 0);
    EXPECT_THROW(apply_temperature(chip, p, -100.0, 0.0), DomainError);
}

TEST(Ler, FlatEdgesGiveParallelPlateValue)
{
    const LineGeometry g;
    const double c = ler_capacitance_sample(g, 16e-9, 0.0, 256, 1);
    const double expected = LerSampler::permittivity() * g.thickness * g.line_length / g.spacing;
    EXPECT_NEAR(c, expected, 1e-12 * expected);
}

TEST(Ler, VarianceRisesWithSigma)
{
    VarianceGrid grid;
    grid.base = scale_area(LineGeometry{}, 4.0);
    grid.etas = {16e-9};
    grid.sigmas = {1e-9, 2e-9, 3e-9};
    const auto rows = ler_variance_profile(grid, 3);
    EXPECT_LT(rows[0].norm_variance, rows[1].norm_variance);
    EXPECT_LT(rows[1].norm_variance, rows[2].norm_variance);
}

TEST(Ler, VarianceFallsWithEtaAndArea)
{
    VarianceGrid eta;
    eta.etas = {8e-9, 16e-9, 32e-9};
    eta.sigmas = {1e-9};
    const auto e = ler_variance_profile(eta, 3);
    EXPECT_GT(e[0].norm_variance, e[1].norm_variance);
    EXPECT_GT(e[1].norm_variance, e[2].norm_variance);

    VarianceGrid area;
    area.geometry_scales = {1, 2, 4};
    area.etas = {16e-9};
    area.sigmas = {1e-9};
    const auto a = ler_variance_profile(area, 3);
    EXPECT_GT(a[0].norm_variance, a[1].norm_variance);
    EXPECT_GT(a[1].norm_variance, a[2].norm_variance);
}

TEST(Ler, DoublingLengthHalvesVariance)
{
    VarianceGrid grid;
    grid.base = scale_area(LineGeometry{}, 4.0);
    grid.etas = {16e-9};
    grid.sigmas = {2e-9};
    grid.samples_per_point = 10000;
    const double v1 = ler_variance_profile(grid, 8).front().norm_variance;
    grid.base.line_length *= 2;
    const double v2 = ler_variance_profile(grid, 8).front().norm_variance;
    EXPECT_NEAR(v1 / v2, 2.0, 0.4);
}

TEST(Ler, ZeroSigmaCellHasZeroVariance)
{
    VarianceGrid grid;
    grid.etas = {16e-9};
    grid.sigmas = {0.0};
    EXPECT_EQ(ler_variance_profile(grid, 1).front().norm_variance, 0.0);
}

TEST(Ler, CollisionIsFlaggedNotFatal)
{
    VarianceGrid grid;
    grid.etas = {16e-9};
    grid.sigmas = {1e-9, 3.5e-9};
    grid.base.spacing = 8e-9;
    const auto rows = ler_variance_profile(grid, 1);
    EXPECT_FALSE(rows[0].flagged);
    EXPECT_TRUE(rows[1].flagged);
    EXPECT_TRUE(std::isnan(rows[1].norm_variance));
}

TEST(Ler, SameSeedSameSample)
{
    const LerSampler s(LineGeometry{}, 16e-9, 1e-9);
    EXPECT_EQ(s.sample(12), s.sample(12));
    EXPECT_NE(s.sample(12), s.sample(13));
}
