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
#include <set>

#include "mosauth/numeric.hpp"
#include "mosauth/parallel.hpp"
#include "mosauth/rng.hpp"

using namespace mosauth;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32 R=10).
TEST(Philox, KnownAnswerZero)
{
    const Counter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes)
{
    const Counter out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi)
{
    const Counter out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, UniformsStayInsideOpenInterval)
{
    const CounterRng rng(7);
    for (std::uint32_t i = 0; i < 10000; ++i) {
        const auto [a, b] = rng.uniform_pair(RngDomain::monte_carlo, i, 0, 0);
        EXPECT_GT(a, 0.0);
        EXPECT_LT(a, 1.0);
        EXPECT_GT(b, 0.0);
        EXPECT_LT(b, 1.0);
    }
}

TEST(CounterRng, NormalMomentsWithinThreeStandardErrors)
{
    const CounterRng rng(11);
    RunningStats s;
    const std::uint32_t n = 200000;
    for (std::uint32_t i = 0; i < n / 2; ++i) {
        const auto [x, y] = rng.normal_pair(RngDomain::monte_carlo, i, 1, 2);
        s.push(x);
        s.push(y);
    }
    EXPECT_NEAR(s.mean(), 0.0, 3.0 / std::sqrt(n));
    EXPECT_NEAR(s.variance(), 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(CounterRng, DomainsAreDisjoint)
{
    const CounterRng rng(3);
    EXPECT_NE(rng.raw(RngDomain::chip_capacitor, 1, 2, 3), rng.raw(RngDomain::comparator_noise, 1, 2, 3));
}

TEST(Seeds, DerivedSeedsDifferByLabel)
{
    std::set<std::uint64_t> seen;
    for (const char* label : {"authentic", "counterfeit", "sensitivity", "temperature", "offset", "ler"})
        seen.insert(derive_seed(42, label));
    EXPECT_EQ(seen.size(), 6u);
    EXPECT_EQ(derive_seed(42, "authentic"), derive_seed(42, "authentic"));
    EXPECT_NE(derive_seed(42, "authentic"), derive_seed(43, "authentic"));
}

TEST(Numeric, NormalCdfReferenceValues)
{
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
    EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316300946, 1e-17);
    EXPECT_EQ(normal_cdf(-INFINITY), 0.0);
    EXPECT_EQ(normal_cdf(INFINITY), 1.0);
}

TEST(Numeric, GaussLegendreIntegratesPolynomialsExactly)
{
    const auto rule = gauss_legendre(8);
    const double v = integrate([](double x) { return std::pow(x, 15) + 3 * x * x; }, -1.0, 2.0, rule, 1);
    EXPECT_NEAR(v, (std::pow(2.0, 16) - 1.0) / 16.0 + 9.0, 1e-9);
}

TEST(Numeric, QuantileIsNearestRank)
{
    std::vector<double> xs{5, 1, 4, 2, 3};
    EXPECT_EQ(empirical_quantile(xs, 0.2), 1.0);
    EXPECT_EQ(empirical_quantile(xs, 0.21), 2.0);
    EXPECT_EQ(empirical_quantile(xs, 1.0), 5.0);
    EXPECT_THROW(empirical_quantile({}, 0.5), DomainError);
}

TEST(Parallel, ResultsDoNotDependOnWorkers)
{
    auto f = [](std::size_t i) { return splitmix64(i); };
    EXPECT_EQ(parallel_map(1000, 1, f), parallel_map(1000, 8, f));
}

TEST(Parallel, FirstExceptionPropagates)
{
    EXPECT_THROW(parallel_map(100, 4,
                              [](std::size_t i) {
                                  if (i == 37)
                                      throw DomainError("boom");
                                  return i;
                              }),
                 DomainError);
}
