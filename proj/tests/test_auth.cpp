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

#include "mosauth/auth.hpp"
#include "mosauth/stats/experiments.hpp"

using namespace mosauth;

namespace {
SignatureTrace trace_of(std::vector<double> grid, std::vector<double> values)
{
    SignatureTrace t;
    t.cof_grid = std::move(grid);
    t.normalized = std::move(values);
    t.counts.assign(t.cof_grid.size(), 0);
    return t;
}

ACCard card_of(std::vector<double> grid, std::vector<double> avg, std::vector<double> weights)
{
    ACCard c;
    c.cof_grid = std::move(grid);
    c.avg_trace = std::move(avg);
    c.std_trace.assign(c.cof_grid.size(), 0.1);
    c.weights = std::move(weights);
    c.d_threshold = 0.5;
    return c;
}
} // namespace

TEST(WeightAssign, Normalization)
{
    const std::vector<double> flat{3.0, 3.0, 3.0};
    EXPECT_EQ(weight_assign(flat), (std::vector<double>{1.0, 1.0, 1.0}));
    const std::vector<double> lopsided{2.0, 0.0};
    EXPECT_EQ(weight_assign(lopsided), (std::vector<double>{2.0, 0.0}));
    const std::vector<double> zeros{0.0, 0.0};
    const std::vector<double> negative{1.0, -1.0};
    EXPECT_THROW(weight_assign(zeros), DomainError);
    EXPECT_THROW(weight_assign(negative), DomainError);
}

TEST(Distance, UnweightedExamples)
{
    const auto card = card_of({0.01, 0.02}, {0.5, 0.2}, {1, 1});
    EXPECT_DOUBLE_EQ(d_auth(trace_of({0.01, 0.02}, {0.5, 0.2}), card), 0.0);
    EXPECT_DOUBLE_EQ(d_auth(trace_of({0.01, 0.02}, {0.5, 0.45}), card), 0.25);
    EXPECT_NEAR(d_auth(trace_of({0.01, 0.02}, {0.8, 0.6}), card), 0.5, 1e-15);
    EXPECT_THROW(d_auth(trace_of({0.01, 0.03}, {0.5, 0.2}), card), DomainError);
}

TEST(Distance, WeightedExamples)
{
    const std::vector<double> dev{1.0, 2.0}, zero{0.0, 0.0};
    const std::vector<double> w41{4.0, 1.0}, w01{0.0, 1.0}, ones{1.0, 1.0};
    EXPECT_NEAR(weighted_distance(dev, zero, w41), std::sqrt(8.0), 1e-15);
    const std::vector<double> dev2{5.0, 2.0};
    EXPECT_DOUBLE_EQ(weighted_distance(dev2, zero, w01), 2.0);
    const auto card = card_of({0.01, 0.02}, {0.5, 0.2}, {1, 1});
    const auto t = trace_of({0.01, 0.02}, {0.1, 0.9});
    EXPECT_DOUBLE_EQ(d_auth_weighted(t, card), d_auth(t, card));
    const std::vector<double> neg{-1.0, 1.0};
    EXPECT_THROW(weighted_distance(dev, zero, neg), DomainError);
}

TEST(Authenticate, AverageTraceIsAccepted)
{
    const auto card = card_of({0.01, 0.02}, {0.5, 0.2}, {1, 1});
    const auto d = authenticate(trace_of({0.01, 0.02}, {0.5, 0.2}), card);
    EXPECT_EQ(d.verdict, Verdict::accept);
    EXPECT_EQ(d.d_auth, 0.0);
    EXPECT_EQ(d.per_point_bound_violations, 0);
    const auto far = authenticate(trace_of({0.01, 0.02}, {0.0, 0.9}), card);
    EXPECT_EQ(far.verdict, Verdict::reject);
    EXPECT_EQ(far.per_point_bound_violations, 2);
}

class EnrollFixture : public ::testing::Test {
  protected:
    static void SetUpTestSuite()
    {
        ExtractionSetup setup;
        setup.global_seed = 11;
        setup.repeats = 3;
        FabProcess p;
        p.sigma_n = 2e-5;
        traces_ = new std::vector<SignatureTrace>(simulate_population(p, 256, "enroll", 0, 100, setup).traces);
    }
    static void TearDownTestSuite() { delete traces_; }
    static std::vector<SignatureTrace>* traces_;
};
std::vector<SignatureTrace>* EnrollFixture::traces_ = nullptr;

TEST_F(EnrollFixture, QuantileThresholdReacceptsTheEnrollmentSet)
{
    const auto card = enroll(*traces_, {});
    int accepted = 0;
    for (const auto& t : *traces_)
        accepted += authenticate(t, card).verdict == Verdict::accept;
    EXPECT_GE(accepted, 99);
    EXPECT_EQ(card.enrollment_size, 100u);
    EXPECT_EQ(card.repeats, 3);
    EXPECT_FALSE(card.synthetic_only);
}

TEST_F(EnrollFixture, WeightsChangeThresholdNotAverage)
{
    EnrollOptions weighted;
    weighted.weights.resize(12);
    for (std::size_t j = 0; j < 12; ++j)
        weighted.weights[j] = static_cast<double>(j + 1);
    const auto a = enroll(*traces_, {});
    const auto b = enroll(*traces_, weighted);
    EXPECT_EQ(a.avg_trace, b.avg_trace);
    EXPECT_NE(a.d_threshold, b.d_threshold);
    double sum = 0;
    for (double w : b.weights)
        sum += w;
    EXPECT_NEAR(sum, 12.0, 1e-12);
}

TEST_F(EnrollFixture, CardJsonRoundTrip)
{
    auto card = enroll(*traces_, {});
    card.created_seed = 0xfedcba9876543210ull;
    const auto text = card_to_json(card);
    EXPECT_EQ(card_from_json(text), card);
    EXPECT_EQ(card_to_json(card_from_json(text)), text);
}

TEST(Enroll, IdenticalTracesAreFlaggedDegenerate)
{
    const std::vector<SignatureTrace> same(10, trace_of({0.01, 0.02}, {0.4, 0.1}));
    const auto card = enroll(same, {});
    EXPECT_TRUE(card.synthetic_only);
    EXPECT_EQ(card.std_trace, (std::vector<double>{0.0, 0.0}));
    EXPECT_GT(card.d_threshold, 0.0);
    EXPECT_EQ(authenticate(same.front(), card).verdict, Verdict::accept);
}

TEST(Enroll, RejectsTooFewTracesAndBadQuantile)
{
    const std::vector<SignatureTrace> few(9, trace_of({0.01}, {0.4}));
    EXPECT_THROW(enroll(few, {}), DomainError);
    const std::vector<SignatureTrace> enough(10, trace_of({0.01}, {0.4}));
    EnrollOptions bad;
    bad.threshold_quantile = 1.0;
    EXPECT_THROW(enroll(enough, bad), DomainError);
}

TEST(CardJson, RejectsMalformedCards)
{
    const auto good = card_to_json(card_of({0.01}, {0.5}, {1}));
    EXPECT_NO_THROW(card_from_json(good));
    EXPECT_THROW(card_from_json("{"), DomainError);
    EXPECT_THROW(card_from_json("[]"), DomainError);

    auto j = nlohmann::json::parse(good);
    j["extra"] = 1;
    EXPECT_THROW(card_from_json(j.dump()), DomainError);
    j = nlohmann::json::parse(good);
    j.erase("weights");
    EXPECT_THROW(card_from_json(j.dump()), DomainError);
    j = nlohmann::json::parse(good);
    j["schema_version"] = 2;
    EXPECT_THROW(card_from_json(j.dump()), DomainError);
    j = nlohmann::json::parse(good);
    j["avg_trace"] = {0.1, 0.2};
    EXPECT_THROW(card_from_json(j.dump()), DomainError);
    j = nlohmann::json::parse(good);
    j["d_threshold"] = 0.0;
    EXPECT_THROW(card_from_json(j.dump()), DomainError);
    j = nlohmann::json::parse(good);
    j["k_sigma"] = "three";
    EXPECT_THROW(card_from_json(j.dump()), DomainError);
}
