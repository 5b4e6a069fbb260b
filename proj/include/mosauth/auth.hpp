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

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mosauth/error.hpp"
#include "mosauth/numeric.hpp"
#include "mosauth/signature.hpp"

namespace mosauth {

inline constexpr int kCardSchemaVersion = 1;

/// What the vendor ships with every part: the enrollment average, bounds,
/// per-point weights and the distance threshold. Nothing in it is per-device.
struct ACCard {
    int schema_version = kCardSchemaVersion;
    std::vector<double> cof_grid;
    std::vector<double> avg_trace;
    std::vector<double> std_trace;
    double k_sigma = 3.0;
    std::vector<double> weights; ///< sum == cof_grid.size()
    double d_threshold = 0.0;
    std::size_t enrollment_size = 0;
    int repeats = 1;
    std::string process_label;
    std::uint64_t created_seed = 0;
    bool synthetic_only = false; ///< enrollment had zero spread everywhere

    bool operator==(const ACCard&) const = default;
};

enum class Verdict { accept, reject };

struct AuthDecision {
    Verdict verdict = Verdict::reject;
    double d_auth = 0.0;
    double d_auth_weighted = 0.0;
    int per_point_bound_violations = 0;
};

/// eta proportional to sensitivity, normalized so sum(eta) = number of points.
inline std::vector<double> weight_assign(std::span<const double> sensitivity)
{
    detail::require(!sensitivity.empty(), "weight_assign: empty sensitivity");
    double total = 0.0;
    for (double s : sensitivity) {
        detail::require(s >= 0 && std::isfinite(s), "weight_assign: sensitivities must be >= 0");
        total += s;
    }
    detail::require(total > 0, "weight_assign: all sensitivities are zero");
    std::vector<double> w;
    w.reserve(sensitivity.size());
    const double n = static_cast<double>(sensitivity.size());
    for (double s : sensitivity)
        w.push_back(s * n / total);
    return w;
}

namespace detail {
inline void check_grid(const SignatureTrace& trace, const ACCard& card)
{
    if (trace.cof_grid != card.cof_grid)
        throw DomainError("authentication: trace grid does not match the card grid");
}
} // namespace detail

inline double d_auth(const SignatureTrace& trace, const ACCard& card)
{
    detail::check_grid(trace, card);
    double s = 0.0;
    for (std::size_t j = 0; j < card.cof_grid.size(); ++j) {
        const double dev = trace.normalized[j] - card.avg_trace[j];
        s += dev * dev;
    }
    return std::sqrt(s);
}

inline double weighted_distance(std::span<const double> trace, std::span<const double> avg,
                                 std::span<const double> weights)
{
    detail::require(trace.size() == avg.size() && avg.size() == weights.size(),
                    "weighted distance: length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < avg.size(); ++j) {
        detail::require(weights[j] >= 0, "weighted distance: negative weight");
        const double dev = trace[j] - avg[j];
        s += weights[j] * dev * dev;
    }
    return std::sqrt(s);
}

inline double d_auth_weighted(const SignatureTrace& trace, const ACCard& card)
{
    detail::check_grid(trace, card);
    return weighted_distance(trace.normalized, card.avg_trace, card.weights);
}

inline AuthDecision authenticate(const SignatureTrace& trace, const ACCard& card)
{
    AuthDecision d;
    d.d_auth = d_auth(trace, card);
    d.d_auth_weighted = d_auth_weighted(trace, card);
    for (std::size_t j = 0; j < card.cof_grid.size(); ++j) {
        if (std::abs(trace.normalized[j] - card.avg_trace[j]) > card.k_sigma * card.std_trace[j])
            ++d.per_point_bound_violations;
    }
    d.verdict = d.d_auth_weighted <= card.d_threshold ? Verdict::accept : Verdict::reject;
    return d;
}

struct EnrollOptions {
    double k_sigma = 3.0;
    std::vector<double> weights; ///< empty: uniform
    double threshold_quantile = 0.99;
    std::string process_label = "authentic";
    std::uint64_t seed = 0;
};

/// Builds the card from an enrollment population. The threshold is the
/// `threshold_quantile` nearest-rank quantile of the enrollment traces' own
/// weighted distances from the average.
inline ACCard enroll(std::span<const SignatureTrace> traces, const EnrollOptions& opt)
{
    detail::require(traces.size() >= 10, "enroll: need at least 10 traces");
    detail::require(opt.threshold_quantile > 0.5 && opt.threshold_quantile < 1.0,
                    "enroll: threshold_quantile must be in (0.5, 1)");
    const TraceSummary summary = average_trace(traces, opt.k_sigma);
    const std::size_t points = summary.cof_grid.size();

    ACCard card;
    card.cof_grid = summary.cof_grid;
    card.avg_trace = summary.mean;
    card.std_trace = summary.stddev;
    card.k_sigma = opt.k_sigma;
    card.enrollment_size = traces.size();
    card.repeats = summary.repeats;
    card.process_label = opt.process_label;
    card.created_seed = opt.seed;
    if (opt.weights.empty()) {
        card.weights.assign(points, 1.0);
    } else {
        detail::require(opt.weights.size() == points, "enroll: weights do not match the grid");
        card.weights = weight_assign(opt.weights);
    }

    std::vector<double> distances;
    distances.reserve(traces.size());
    for (const auto& t : traces)
        distances.push_back(weighted_distance(t.normalized, card.avg_trace, card.weights));
    card.d_threshold = empirical_quantile(distances, opt.threshold_quantile);

    card.synthetic_only = std::all_of(card.std_trace.begin(), card.std_trace.end(),
                                      [](double s) { return s == 0.0; });
    if (!(card.d_threshold > 0.0))
        card.d_threshold = std::numeric_limits<double>::min();
    return card;
}

// --- card file: JSON with a fixed key order ---

inline std::string card_to_json(const ACCard& card)
{
    nlohmann::ordered_json j;
    j["schema_version"] = card.schema_version;
    j["process_label"] = card.process_label;
    j["created_seed"] = card.created_seed;
    j["enrollment_size"] = card.enrollment_size;
    j["repeats"] = card.repeats;
    j["k_sigma"] = card.k_sigma;
    j["d_threshold"] = card.d_threshold;
    j["synthetic_only"] = card.synthetic_only;
    j["cof_grid"] = card.cof_grid;
    j["avg_trace"] = card.avg_trace;
    j["std_trace"] = card.std_trace;
    j["weights"] = card.weights;
    return j.dump(2) + "\n";
}

inline ACCard card_from_json(const std::string& text)
{
    static const std::vector<std::string> kKeys = {
        "schema_version", "process_label", "created_seed", "enrollment_size",
        "repeats",        "k_sigma",       "d_threshold",  "synthetic_only",
        "cof_grid",       "avg_trace",     "std_trace",    "weights"};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("card: malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        throw DomainError("card: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end())
            throw DomainError("card: unknown field '" + it.key() + "'");
    }
    for (const auto& k : kKeys) {
        if (!j.contains(k))
            throw DomainError("card: missing field '" + k + "'");
    }
    ACCard c;
    try {
        c.schema_version = j.at("schema_version").get<int>();
        c.process_label = j.at("process_label").get<std::string>();
        c.created_seed = j.at("created_seed").get<std::uint64_t>();
        c.enrollment_size = j.at("enrollment_size").get<std::size_t>();
        c.repeats = j.at("repeats").get<int>();
        c.k_sigma = j.at("k_sigma").get<double>();
        c.d_threshold = j.at("d_threshold").get<double>();
        c.synthetic_only = j.at("synthetic_only").get<bool>();
        c.cof_grid = j.at("cof_grid").get<std::vector<double>>();
        c.avg_trace = j.at("avg_trace").get<std::vector<double>>();
        c.std_trace = j.at("std_trace").get<std::vector<double>>();
        c.weights = j.at("weights").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("card: bad field type: ") + e.what());
    }
    if (c.schema_version != kCardSchemaVersion)
        throw DomainError("card: unsupported schema_version " + std::to_string(c.schema_version));
    const std::size_t n = c.cof_grid.size();
    if (c.avg_trace.size() != n || c.std_trace.size() != n || c.weights.size() != n)
        throw DomainError("card: grid, trace and weight lengths differ");
    if (!(c.d_threshold > 0))
        throw DomainError("card: d_threshold must be > 0");
    for (double w : c.weights) {
        if (w < 0)
            throw DomainError("card: negative weight");
    }
    return c;
}

} // namespace mosauth
