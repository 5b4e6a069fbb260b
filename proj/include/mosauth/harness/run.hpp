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

// Stage pipeline: populate -> extract -> sensitivity -> enroll -> authenticate,
// plus the stand-alone analyses. Each stage writes CSVs into the output
// directory; the manifest lists every file, the seeds and per-stage wall time.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mosauth/auth.hpp"
#include "mosauth/harness/config.hpp"
#include "mosauth/harness/csv.hpp"
#include "mosauth/ler.hpp"
#include "mosauth/sar_adc.hpp"
#include "mosauth/signature.hpp"
#include "mosauth/stats/experiments.hpp"
#include "mosauth/stats/failure.hpp"

namespace mosauth::harness {

inline constexpr const char* kVersion = "0.1.0";

struct StageRecord {
    std::string name;
    double wall_seconds = 0.0;
    std::string status; ///< ok | failed
};

struct RunManifest {
    std::string version = kVersion;
    std::string config_hash;
    std::uint64_t global_seed = 0;
    std::string preset;
    std::map<std::string, std::uint64_t> seeds;
    std::vector<std::string> files;
    std::vector<StageRecord> stages;
    std::map<std::string, std::string> summary;
    std::string error;
};

/// A stage threw; the manifest on disk records what was written before it.
class StageFailure : public std::runtime_error {
  public:
    StageFailure(std::string stage, const std::string& what, RunManifest manifest)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), manifest_(std::move(manifest))
    {
    }
    const std::string& stage() const noexcept { return stage_; }
    const RunManifest& manifest() const noexcept { return manifest_; }

  private:
    std::string stage_;
    RunManifest manifest_;
};

inline const std::map<std::string, std::string>& presets()
{
    static const std::map<std::string, std::string> p = {
        {"fig2", "[run]\nstages = failure\n"},
        {"fig4", "[run]\nstages = ler\n"},
        {"fig9", "[process.authentic]\nsigma_n = 22uV\n[run]\nstages = repeats\n"},
        {"fig10", "[process.authentic]\nsigma_n = 50uV\n[extraction]\nrepeats = 1\n[run]\nstages = optimize\n"},
        {"fig11", "[run]\nstages = populate, extract, sensitivity, enroll, authenticate\n"},
        {"fig12ab", "[process.authentic]\nsigma_n = 50uV\n[run]\nstages = temperature\n"},
        {"fig12cd", "[process.authentic]\nsigma_n = 22uV\n[run]\nstages = offset\n"},
    };
    return p;
}

inline void apply_preset(ExperimentConfig& cfg, const std::string& name)
{
    const auto it = presets().find(name);
    if (it == presets().end())
        throw ConfigError("preset", "unknown preset '" + name + "'");
    apply_ini(cfg, it->second, "preset " + name);
}

/// Requested stages plus their prerequisites, in pipeline order.
inline std::vector<std::string> stage_plan(const std::vector<std::string>& requested)
{
    static const std::vector<std::string> order = {"populate", "extract", "sensitivity", "enroll", "authenticate",
                                                   "adc-verify", "failure", "repeats", "optimize", "temperature",
                                                   "offset", "ler"};
    std::set<std::string> want(requested.begin(), requested.end());
    if (want.count("authenticate"))
        want.insert("enroll");
    if (want.count("enroll"))
        want.insert("extract");
    if (want.count("extract"))
        want.insert("populate");
    std::vector<std::string> plan;
    for (const auto& s : order)
        if (want.count(s))
            plan.push_back(s);
    return plan;
}

inline std::string manifest_json(const RunManifest& m)
{
    nlohmann::ordered_json j;
    j["version"] = m.version;
    j["config_hash"] = m.config_hash;
    j["global_seed"] = m.global_seed;
    j["preset"] = m.preset;
    j["seeds"] = m.seeds;
    j["files"] = m.files;
    auto stages = nlohmann::ordered_json::array();
    for (const auto& s : m.stages)
        stages.push_back({{"name", s.name}, {"wall_seconds", s.wall_seconds}, {"status", s.status}});
    j["stages"] = stages;
    j["summary"] = m.summary;
    if (!m.error.empty())
        j["error"] = m.error;
    return j.dump(2) + "\n";
}

class Runner {
  public:
    Runner(ExperimentConfig cfg, std::string preset = {}) : cfg_(std::move(cfg))
    {
        validate(cfg_);
        manifest_.config_hash = config_hash(cfg_);
        manifest_.global_seed = cfg_.global_seed;
        manifest_.preset = std::move(preset);
        dir_ = cfg_.output_dir;
        setup_.cof_grid = cfg_.extraction.grid;
        setup_.repeats = cfg_.extraction.repeats;
        setup_.v_ref = cfg_.adc.v_ref;
        setup_.global_seed = cfg_.global_seed;
        setup_.workers = cfg_.workers;
        authentic_ = process_named(cfg_, "authentic");
    }

    /// Card used by `authenticate` instead of enrolling.
    void use_card(ACCard card) { card_ = std::move(card); }

    RunManifest run()
    {
        std::filesystem::create_directories(dir_);
        remove_previous_outputs();
        auto plan = stage_plan(cfg_.stages);
        if (card_)
            plan.erase(std::remove(plan.begin(), plan.end(), "enroll"), plan.end());
        for (const auto& stage : plan) {
            const auto start = std::chrono::steady_clock::now();
            StageRecord rec{stage, 0.0, "ok"};
            try {
                dispatch(stage);
            } catch (const std::exception& e) {
                rec.status = "failed";
                rec.wall_seconds = seconds_since(start);
                manifest_.stages.push_back(rec);
                manifest_.error = stage + ": " + e.what();
                write_manifest();
                throw StageFailure(stage, e.what(), manifest_);
            }
            rec.wall_seconds = seconds_since(start);
            manifest_.stages.push_back(rec);
        }
        write_manifest();
        return manifest_;
    }

    const ExperimentConfig& config() const noexcept { return cfg_; }

  private:
    struct PopulationRun {
        std::string label;
        FabProcess process;
        std::vector<ChipInstance> chips;
        std::vector<SignatureTrace> traces;
    };

    static double seconds_since(std::chrono::steady_clock::time_point t)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    }

    void dispatch(const std::string& stage)
    {
        if (stage == "populate") populate();
        else if (stage == "extract") extract();
        else if (stage == "sensitivity") sensitivity();
        else if (stage == "enroll") enroll_stage();
        else if (stage == "authenticate") authenticate_stage();
        else if (stage == "adc-verify") adc_verify();
        else if (stage == "failure") failure();
        else if (stage == "repeats") repeats();
        else if (stage == "optimize") optimize();
        else if (stage == "temperature") temperature();
        else if (stage == "offset") offset();
        else if (stage == "ler") ler();
        else throw ConfigError("run.stages", "unknown stage '" + stage + "'");
    }

    std::filesystem::path file(const std::string& name)
    {
        if (std::find(manifest_.files.begin(), manifest_.files.end(), name) == manifest_.files.end())
            manifest_.files.push_back(name);
        return dir_ / name;
    }

    /// Files a previous run listed in its manifest are removed so the directory
    /// never holds outputs the new manifest does not list.
    void remove_previous_outputs()
    {
        const auto old = dir_ / "manifest.json";
        if (!std::filesystem::exists(old))
            return;
        std::ifstream in(old);
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("files") || !j["files"].is_array())
            return;
        for (const auto& f : j["files"])
            if (f.is_string() && std::filesystem::path(f.get<std::string>()).filename() == f.get<std::string>())
                std::filesystem::remove(dir_ / f.get<std::string>());
    }

    void write_manifest()
    {
        if (std::find(manifest_.files.begin(), manifest_.files.end(), "manifest.json") == manifest_.files.end())
            manifest_.files.push_back("manifest.json");
        std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
        out << manifest_json(manifest_);
    }

    void write_text(const std::string& name, const std::string& text)
    {
        std::ofstream out(file(name), std::ios::binary | std::ios::trunc);
        out << text;
        if (!out)
            throw std::runtime_error("cannot write " + name);
    }

    static std::string key_number(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    void summary(const std::string& key, double v) { manifest_.summary[key] = format_number(v); }
    void summary(const std::string& key, const std::string& v) { manifest_.summary[key] = v; }

    std::vector<ChipInstance> chips_of(const FabProcess& p, const std::string& label, std::uint32_t first,
                                       std::size_t count)
    {
        manifest_.seeds[label] = derive_seed(cfg_.global_seed, label);
        return population_chips(p, cfg_.extraction.pairs, label, first, count, setup_);
    }

    // --- pipeline stages ---

    void populate()
    {
        const auto need_auth = std::find(cfg_.stages.begin(), cfg_.stages.end(), "authenticate") != cfg_.stages.end();
        populations_.clear();
        populations_.push_back({"enrollment", authentic_, chips_of(authentic_, "authentic", 0, cfg_.enrollment.size), {}});
        if (need_auth) {
            const auto first = static_cast<std::uint32_t>(cfg_.enrollment.size);
            populations_.push_back({"holdout", authentic_, chips_of(authentic_, "authentic", first, cfg_.enrollment.holdout), {}});
            const FabProcess cf = process_named(cfg_, cfg_.enrollment.counterfeit);
            populations_.push_back({"counterfeit", cf,
                                    chips_of(cf, cfg_.enrollment.counterfeit, 0, cfg_.enrollment.counterfeit_size), {}});
        }
        for (const auto& pop : populations_) {
            CsvWriter csv(file("population_" + pop.label + ".csv"), {"chip_id", "side", "index", "capacitance_f"});
            for (const auto& chip : pop.chips)
                for (std::size_t i = 0; i < chip.size(); ++i) {
                    csv.row(chip.chip_id, "p", i, chip.cu_p[i]);
                    csv.row(chip.chip_id, "n", i, chip.cu_n[i]);
                }
        }
        summary("chips", static_cast<double>(populations_.front().chips.size()));
    }

    void write_traces(const std::string& name, const std::vector<SignatureTrace>& traces)
    {
        CsvWriter csv(file(name), {"chip_id", "cof_over_cu", "n_ac", "normalized", "repeats", "seed"});
        for (const auto& t : traces)
            for (std::size_t j = 0; j < t.cof_grid.size(); ++j)
                csv.row(t.chip_id, t.cof_grid[j], t.counts[j], t.normalized[j], t.repeats, t.extraction_seed);
    }

    void extract()
    {
        for (auto& pop : populations_) {
            pop.traces = population_traces(pop.chips, pop.process, setup_);
            write_traces("traces_" + pop.label + ".csv", pop.traces);
        }
    }

    PopulationRun* population(const std::string& label)
    {
        for (auto& p : populations_)
            if (p.label == label)
                return &p;
        return nullptr;
    }

    const TraceSummary& reference()
    {
        if (!reference_) {
            const PopulationRun* enrolled = population("enrollment");
            if (enrolled && !enrolled->traces.empty()) {
                reference_ = average_trace(enrolled->traces, cfg_.enrollment.k_sigma);
            } else {
                const auto chips = chips_of(authentic_, "authentic", 0, cfg_.analysis.chips);
                reference_ = average_trace(population_traces(chips, authentic_, setup_), cfg_.enrollment.k_sigma);
            }
        }
        return *reference_;
    }

    /// Sensitivity of the mean distance to sigma_cu, uniform and weighted.
    void sensitivity()
    {
        if (profile_)
            return;
        const auto& ref = reference();
        manifest_.seeds["sensitivity"] = derive_seed(cfg_.global_seed, "sensitivity");
        const auto uniform = sensitivity_profile(authentic_, cfg_.extraction.pairs, ref, cfg_.analysis.sigma_sweep,
                                                 cfg_.analysis.chips, setup_);
        weights_ = sensitivity_weights(uniform);
        const auto weighted = sensitivity_profile(authentic_, cfg_.extraction.pairs, ref, cfg_.analysis.sigma_sweep,
                                                  cfg_.analysis.chips, setup_, *weights_);
        {
            CsvWriter csv(file("sensitivity.csv"), {"cof_over_cu", "slope_per_farad", "weight"});
            for (std::size_t j = 0; j < ref.cof_grid.size(); ++j)
                csv.row(ref.cof_grid[j], uniform.slope[j], (*weights_)[j]);
        }
        CsvWriter csv(file("sensitivity_summary.csv"),
                      {"weighting", "sigma_cu_f", "mean_distance", "relative_change"});
        for (const auto* prof : {&uniform, &weighted})
            for (std::size_t k = 0; k < prof->sigma_cu.size(); ++k)
                csv.row(prof == &uniform ? "uniform" : "sensitivity", prof->sigma_cu[k],
                        prof->mean_total_distance[k], prof->relative_change);
        summary("relative_change_uniform", uniform.relative_change);
        summary("relative_change_weighted", weighted.relative_change);
        profile_ = uniform;
    }

    void enroll_stage()
    {
        const PopulationRun* enrolled = population("enrollment");
        if (!enrolled || enrolled->traces.empty())
            throw std::runtime_error("enroll: no enrollment traces");
        EnrollOptions opt;
        opt.k_sigma = cfg_.enrollment.k_sigma;
        opt.threshold_quantile = cfg_.enrollment.quantile;
        opt.seed = cfg_.global_seed;
        if (cfg_.enrollment.weighting == "sensitivity") {
            sensitivity();
            opt.weights = *weights_;
        }
        card_ = enroll(enrolled->traces, opt);
        write_text("card.json", card_to_json(*card_));
        CsvWriter csv(file("enrollment.csv"), {"cof_over_cu", "avg", "std", "lower", "upper", "weight"});
        for (std::size_t j = 0; j < card_->cof_grid.size(); ++j) {
            const double a = card_->avg_trace[j], s = card_->std_trace[j];
            csv.row(card_->cof_grid[j], a, s, a - card_->k_sigma * s, a + card_->k_sigma * s, card_->weights[j]);
        }
        summary("d_threshold", card_->d_threshold);
    }

    void authenticate_stage()
    {
        if (!card_)
            throw std::runtime_error("authenticate: no card");
        CsvWriter csv(file("decisions.csv"),
                      {"population", "chip_id", "d_auth", "d_auth_weighted", "violations", "verdict"});
        for (const auto& label : {"holdout", "counterfeit"}) {
            const PopulationRun* pop = population(label);
            if (!pop)
                continue;
            std::size_t accepted = 0;
            for (const auto& t : pop->traces) {
                const auto d = authenticate(t, *card_);
                accepted += d.verdict == Verdict::accept;
                csv.row(std::string(label), t.chip_id, d.d_auth, d.d_auth_weighted, d.per_point_bound_violations,
                        d.verdict == Verdict::accept ? "accept" : "reject");
            }
            const double n = static_cast<double>(pop->traces.size());
            if (std::string(label) == "holdout")
                summary("accept_rate", n > 0 ? accepted / n : 0.0);
            else
                summary("reject_rate", n > 0 ? (n - accepted) / n : 0.0);
        }
    }

    // --- analyses ---

    void adc_verify()
    {
        const int bits = cfg_.adc.bits;
        ChipInstance chip;
        if (cfg_.adc.ideal) {
            chip.cu_p.assign(units_per_side(bits), authentic_.cu_nominal);
            chip.cu_n = chip.cu_p;
            chip.cu_design = authentic_.cu_nominal;
            chip.cof_series_unit = chip.cof_series_design = 5e-17;
        } else {
            chip = chips_of(authentic_, "adc", 0, 1).front();
            if (chip.size() < units_per_side(bits))
                throw std::runtime_error("adc-verify: extraction.pairs is smaller than 2^(bits-1)");
        }
        SarAdc adc({bits, cfg_.adc.v_ref, cfg_.adc.v_ref / 2, &chip});
        ComparatorModel model = comparator_from(authentic_, cfg_.global_seed).for_chip(population_chip_id("adc", 0));
        const std::size_t points = std::size_t{1} << bits;
        const double lsb = 2.0 * cfg_.adc.v_ref / static_cast<double>(points);
        CsvWriter csv(file("adc_verify.csv"), {"v_diff", "code_actual", "code_ideal", "abs_error_lsb"});
        double worst = 0.0;
        for (std::size_t k = 0; k < points; ++k) {
            const double v_diff = -cfg_.adc.v_ref + (static_cast<double>(k) + 0.5) * lsb;
            const double cm = cfg_.adc.v_ref / 2;
            const auto rec = adc.convert(cm + v_diff / 2, cm - v_diff / 2, model);
            const auto ideal = ideal_code(v_diff, bits, cfg_.adc.v_ref);
            const double err = std::abs(static_cast<double>(rec.code) - static_cast<double>(ideal));
            worst = std::max(worst, err);
            csv.row(v_diff, rec.code, ideal, err);
        }
        summary("max_abs_error_lsb", worst);
    }

    void failure()
    {
        const auto& f = cfg_.failure;
        const MixtureRole role = f.role == "counterfeit" ? MixtureRole::counterfeit : MixtureRole::all_chips;
        const Gaussian ac{f.f_ac[0], f.f_ac[1]};
        CsvWriter curve(file("failure_sigma_a.csv"), {"sigma_a", "width", "t_l", "t_u", "a_f"});
        CsvWriter best(file("failure_optimum.csv"), {"curve", "parameter", "t_l", "t_u", "a_f_min"});
        for (double sa : f.sigma_a_sweep) {
            const AcDistribution d{ac, {f.f_ac_given_a[0], sa}, f.p_a, role};
            const double w_max = 10.0 * std::max(ac.stddev, sa);
            for (std::size_t k = 0; k < f.width_points; ++k) {
                const double w = w_max * static_cast<double>(k) / static_cast<double>(f.width_points - 1);
                const ThresholdPair t{d.f_ac_given_a.mean - w / 2, d.f_ac_given_a.mean + w / 2};
                curve.row(sa, w, t.t_l, t.t_u, failure_rate(d, t).a_f);
            }
            const auto opt = optimize_thresholds(d, {f.grid, 5.0});
            best.row("sigma_a", sa, opt.t.t_l, opt.t.t_u, opt.a_f_min);
            summary("a_f_min_sigma_a_" + key_number(sa), opt.a_f_min);
        }
        CsvWriter rho_curve(file("failure_rho.csv"), {"rho", "width", "t_l", "t_u", "a_f_mult"});
        const AcDistribution base{{f.multi_f_ac[0], f.multi_f_ac[1]}, {f.multi_f_ac_given_a[0], f.multi_f_ac_given_a[1]},
                                  f.p_a, role};
        for (double rho : f.rho_sweep) {
            const auto d = MultiAcDistribution::replicate(base, 2, rho);
            const double w_max = 10.0 * std::max(base.f_ac.stddev, base.f_ac_given_a.stddev);
            for (std::size_t k = 0; k < f.width_points; ++k) {
                const double w = w_max * static_cast<double>(k) / static_cast<double>(f.width_points - 1);
                const ThresholdPair t{base.f_ac_given_a.mean - w / 2, base.f_ac_given_a.mean + w / 2};
                rho_curve.row(rho, w, t.t_l, t.t_u, multi_ac_failure(d, {1, 2}, {t, t}).a_f);
            }
            const auto opt = optimize_multi_thresholds(d, {1, 2}, {f.multi_grid, 5.0});
            best.row("rho", rho, opt.t.t_l, opt.t.t_u, opt.a_f_min);
            summary("a_f_mult_min_rho_" + key_number(rho), opt.a_f_min);
        }
    }

    void repeats()
    {
        const auto chips = chips_of(authentic_, "authentic", 0, cfg_.analysis.chips);
        std::vector<TraceSummary> sums;
        for (int r : cfg_.analysis.repeat_compare) {
            ExtractionSetup s = setup_;
            s.repeats = r;
            const auto traces = population_traces(chips, authentic_, s);
            write_traces("traces_r" + std::to_string(r) + ".csv", traces);
            sums.push_back(average_trace(traces, cfg_.enrollment.k_sigma));
        }
        CsvWriter csv(file("repeat_summary.csv"), {"repeats", "cof_over_cu", "avg", "std"});
        for (std::size_t k = 0; k < sums.size(); ++k)
            for (std::size_t j = 0; j < sums[k].cof_grid.size(); ++j)
                csv.row(cfg_.analysis.repeat_compare[k], sums[k].cof_grid[j], sums[k].mean[j], sums[k].stddev[j]);
        summary("mismatch_voltage_scale", mismatch_voltage_scale(authentic_, cfg_.extraction.pairs, cfg_.adc.v_ref));
    }

    void optimize()
    {
        std::vector<std::size_t> ns;
        for (double n : cfg_.analysis.n_candidates)
            ns.push_back(static_cast<std::size_t>(n));
        manifest_.seeds["optimize_n"] = derive_seed(cfg_.global_seed, "optimize_n");
        NSelectionOptions opt;
        opt.var_floor_factor = cfg_.analysis.var_floor_factor;
        opt.sensitivity_retention = cfg_.analysis.sensitivity_retention;
        const auto sel = optimize_n(authentic_, ns, {cfg_.analysis.cof_pair[0], cfg_.analysis.cof_pair[1]},
                                    cfg_.analysis.chips, setup_, opt);
        CsvWriter csv(file("optimize_n.csv"), {"n", "cof_a", "cof_b", "var_d_a", "var_d_b", "mean_d_a", "mean_d_b",
                                                "mean_trace_a", "mean_trace_b", "sensitivity"});
        const double lo = std::min(cfg_.analysis.cof_pair[0], cfg_.analysis.cof_pair[1]);
        const double hi = std::max(cfg_.analysis.cof_pair[0], cfg_.analysis.cof_pair[1]);
        for (const auto& r : sel.rows)
            csv.row(r.n, lo, hi, r.var_d[0], r.var_d[1], r.mean_d[0], r.mean_d[1], r.mean_trace[0], r.mean_trace[1],
                    r.sensitivity);
        summary("n_opt", std::to_string(sel.n_opt));
        summary("n_opt_fallback", sel.fallback ? "true" : "false");
    }

    void write_drift(const std::string& stem, const std::string& x_name, const DriftSweep& s)
    {
        CsvWriter csv(file(stem + ".csv"), {x_name, "cof_over_cu", "avg", "avg_offset_n", "avg_offset_p"});
        const auto& grid = setup_.cof_grid;
        for (std::size_t k = 0; k < s.x.size(); ++k)
            for (std::size_t j = 0; j < grid.size(); ++j)
                csv.row(s.x[k], grid[j], s.avg_trace[k][j], s.avg_side_n[k][j], s.avg_side_p[k][j]);
        CsvWriter sl(file(stem + "_slope.csv"), {x_name + "_from", x_name + "_to", "cof_over_cu", "slope"});
        for (std::size_t k = 0; k < s.slope.size(); ++k)
            for (std::size_t j = 0; j < grid.size(); ++j)
                sl.row(s.x[k], s.x[k + 1], grid[j], s.slope[k][j]);
        summary(stem + "_max_abs_slope", s.max_abs_slope);
        summary(stem + "_traces_identical", s.traces_identical ? "true" : "false");
    }

    void temperature()
    {
        manifest_.seeds["temperature"] = derive_seed(cfg_.global_seed, "temperature");
        const auto s = sensitivity_temperature(authentic_, cfg_.extraction.pairs, cfg_.analysis.temperatures,
                                               cfg_.analysis.t0, cfg_.analysis.chips, setup_);
        write_drift("temperature", "temperature_c", s);
    }

    void offset()
    {
        manifest_.seeds["offset"] = derive_seed(cfg_.global_seed, "offset");
        const auto s = sensitivity_offset(authentic_, cfg_.extraction.pairs, cfg_.analysis.offsets,
                                          cfg_.analysis.chips, setup_);
        write_drift("offset", "v_offset_v", s);
    }

    void ler()
    {
        const auto& a = cfg_.analysis;
        const std::uint64_t seed = derive_seed(cfg_.global_seed, "ler");
        manifest_.seeds["ler"] = seed;
        const double k_lo = *std::min_element(a.ler_scales.begin(), a.ler_scales.end());
        const double k_hi = *std::max_element(a.ler_scales.begin(), a.ler_scales.end());
        struct Sweep {
            const char* name;
            std::vector<double> scales, etas, sigmas;
        };
        const Sweep sweeps[] = {
            {"ler_sigma", {k_hi}, {authentic_.eta_ler}, a.ler_sigmas},
            {"ler_scale", a.ler_scales, {authentic_.eta_ler}, {authentic_.sigma_ler}},
            {"ler_eta", {k_lo}, a.ler_etas, {authentic_.sigma_ler}},
        };
        std::size_t flagged = 0;
        for (const auto& sw : sweeps) {
            VarianceGrid grid;
            grid.base = authentic_.geometry;
            grid.geometry_scales = sw.scales;
            grid.etas = sw.etas;
            grid.sigmas = sw.sigmas;
            grid.samples_per_point = a.ler_samples;
            grid.segments = static_cast<int>(a.ler_segments);
            const auto rows = ler_variance_profile(grid, seed, cfg_.workers);
            CsvWriter csv(file(std::string(sw.name) + ".csv"),
                          {"geometry_scale", "eta_ler_nm", "sigma_ler_nm", "norm_variance", "samples", "seed"});
            for (const auto& r : rows) {
                flagged += r.flagged;
                csv.row(r.geometry_scale, r.eta_ler * 1e9, r.sigma_ler * 1e9, r.norm_variance, r.samples, r.seed);
            }
        }
        summary("ler_flagged_cells", static_cast<double>(flagged));
    }

    ExperimentConfig cfg_;
    RunManifest manifest_;
    std::filesystem::path dir_;
    ExtractionSetup setup_;
    FabProcess authentic_;
    std::vector<PopulationRun> populations_;
    std::optional<TraceSummary> reference_;
    std::optional<SensitivityProfile> profile_;
    std::optional<std::vector<double>> weights_;
    std::optional<ACCard> card_;
};

inline RunManifest run(const ExperimentConfig& cfg, const std::string& preset = {})
{
    return Runner(cfg, preset).run();
}

} // namespace mosauth::harness
