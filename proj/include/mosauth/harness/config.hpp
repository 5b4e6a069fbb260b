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

// Experiment configuration: INI text over a fully defaulted config.
//
//   [global]              seed, output_dir, workers
//   [process.<name>]      inherits = <name> plus FabProcess keys; "authentic" is the reference
//   [adc]                 bits, v_ref, ideal
//   [extraction]          grid, repeats, pairs
//   [enrollment]          size, holdout, counterfeit, counterfeit_size, quantile, k_sigma, weighting
//   [analysis]            see AnalysisBlock
//   [failure]             see FailureBlock
//   [run]                 stages
//
// Unknown sections and keys are errors. Quantities accept a unit suffix
// (fF, nm, uV, ppm/C ...); a bare number is SI. Overlays apply in order, so a
// preset and then a user file can both refine the defaults.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mosauth/error.hpp"
#include "mosauth/process.hpp"
#include "mosauth/rng.hpp"
#include "mosauth/signature.hpp"

namespace mosauth::harness {

enum class Unit { none, capacitance, length, voltage, per_degree, temperature };

/// A process block as written: the parent plus the keys it sets itself.
struct ProcessSpec {
    std::string name;
    std::string inherits; ///< empty for the authentic block
    std::map<std::string, double> overrides;
};

struct AdcBlock {
    int bits = 10;
    double v_ref = 1.0;
    bool ideal = true; ///< adc-verify on ideal capacitors; false draws an authentic chip
};

struct ExtractionBlock {
    std::vector<double> grid = default_cof_grid(); ///< C_OF / Cu
    int repeats = 15;
    std::size_t pairs = 256;
};

struct EnrollmentBlock {
    std::size_t size = 100;
    std::size_t holdout = 200;
    std::string counterfeit = "counterfeit";
    std::size_t counterfeit_size = 200;
    double quantile = 0.99;
    double k_sigma = 3.0;
    std::string weighting = "sensitivity"; ///< or "uniform"
};

struct AnalysisBlock {
    std::size_t chips = 100;
    std::vector<int> repeat_compare{1, 15};
    std::vector<double> temperatures{-20.0, 27.0, 80.0};
    double t0 = 27.0;
    std::vector<double> offsets{-1e-4, -5e-5, 0.0, 5e-5, 1e-4};
    std::vector<double> sigma_sweep{1e-17, 1.5e-17}; ///< F
    std::vector<double> n_candidates{32, 64, 128, 256};
    std::vector<double> cof_pair{0.01, 0.02}; ///< Cu/100, Cu/50
    double var_floor_factor = 1.5;
    double sensitivity_retention = 0.5;
    std::size_t ler_samples = 1000;
    std::size_t ler_segments = 256;
    std::vector<double> ler_sigmas{1e-9, 2e-9, 3e-9};
    std::vector<double> ler_etas{8e-9, 16e-9, 32e-9};
    std::vector<double> ler_scales{1, 2, 4};
};

struct FailureBlock {
    std::vector<double> f_ac{0.5, 0.1};
    std::vector<double> f_ac_given_a{0.9, 0.05};
    double p_a = 0.5;
    std::string role = "counterfeit"; ///< or "all_chips"
    std::vector<double> sigma_a_sweep{0.025, 0.05, 0.1};
    std::vector<double> multi_f_ac{0.5, 0.25};
    std::vector<double> multi_f_ac_given_a{0.9, 0.1};
    std::vector<double> rho_sweep{0.0, 0.5};
    std::size_t width_points = 101;
    int grid = 400;
    int multi_grid = 200;
};

struct ExperimentConfig {
    std::uint64_t global_seed = 0;
    std::string output_dir = "out";
    unsigned workers = 1;
    std::vector<ProcessSpec> processes{{"authentic", "", {}}, {"counterfeit", "authentic", {{"sigma_cu", 2e-17}}}};
    AdcBlock adc;
    ExtractionBlock extraction;
    EnrollmentBlock enrollment;
    AnalysisBlock analysis;
    FailureBlock failure;
    std::vector<std::string> stages{"populate", "extract", "enroll", "authenticate"};
};

inline const std::vector<std::string>& known_stages()
{
    static const std::vector<std::string> s = {"populate", "extract", "enroll", "authenticate", "adc-verify",
                                               "failure", "repeats", "optimize", "sensitivity", "temperature",
                                               "offset", "ler"};
    return s;
}

namespace detail {

inline std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    if (out.size() == 1 && out[0].empty())
        out.clear();
    return out;
}

inline const std::map<std::string, double>& suffixes(Unit u)
{
    static const std::map<std::string, double> none{};
    static const std::map<std::string, double> cap{{"F", 1.0}, {"pF", 1e-12}, {"fF", 1e-15}, {"aF", 1e-18}};
    static const std::map<std::string, double> len{{"m", 1.0}, {"um", 1e-6}, {"nm", 1e-9}};
    static const std::map<std::string, double> volt{{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}, {"nV", 1e-9}};
    static const std::map<std::string, double> tc{{"/C", 1.0}, {"ppm/C", 1e-6}};
    static const std::map<std::string, double> temp{{"C", 1.0}};
    switch (u) {
    case Unit::capacitance: return cap;
    case Unit::length: return len;
    case Unit::voltage: return volt;
    case Unit::per_degree: return tc;
    case Unit::temperature: return temp;
    default: return none;
    }
}

inline double parse_quantity(const std::string& path, const std::string& raw, Unit unit)
{
    const std::string text = trim(raw);
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first)
        throw ConfigError(path, "expected a number, got '" + text + "'");
    const std::string suffix = trim(std::string(ptr, last));
    if (!suffix.empty()) {
        const auto& table = suffixes(unit);
        const auto it = table.find(suffix);
        if (it == table.end()) {
            std::string allowed;
            for (const auto& [k, f] : table)
                allowed += (allowed.empty() ? "" : ", ") + k;
            throw ConfigError(path, "unit suffix '" + suffix + "' not valid here" +
                                        (allowed.empty() ? " (plain number expected)" : " (use " + allowed + ")"));
        }
        v *= it->second;
    }
    if (!std::isfinite(v))
        throw ConfigError(path, "value must be finite");
    return v;
}

inline std::vector<double> parse_list(const std::string& path, const std::string& raw, Unit unit)
{
    std::vector<double> out;
    for (const auto& item : split_list(raw))
        out.push_back(parse_quantity(path, item, unit));
    return out;
}

inline std::uint64_t parse_count(const std::string& path, const std::string& raw)
{
    const std::string text = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(path, "expected a non-negative integer, got '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& path, const std::string& raw)
{
    const std::string t = trim(raw);
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError(path, "expected true or false, got '" + t + "'");
}

/// Process keys and their units.
inline const std::vector<std::pair<std::string, Unit>>& process_keys()
{
    static const std::vector<std::pair<std::string, Unit>> k = {
        {"cu_nominal", Unit::capacitance}, {"sigma_cu", Unit::capacitance}, {"tc", Unit::per_degree},
        {"eta_ler", Unit::length},         {"sigma_ler", Unit::length},     {"sigma_n", Unit::voltage},
        {"v_offset", Unit::voltage},       {"width", Unit::length},         {"spacing", Unit::length},
        {"thickness", Unit::length},       {"line_length", Unit::length}};
    return k;
}

inline void set_process_key(FabProcess& p, const std::string& key, double v)
{
    if (key == "cu_nominal") p.cu_nominal = v;
    else if (key == "sigma_cu") p.sigma_cu = v;
    else if (key == "tc") p.tc = v;
    else if (key == "eta_ler") p.eta_ler = v;
    else if (key == "sigma_ler") p.sigma_ler = v;
    else if (key == "sigma_n") p.sigma_n = v;
    else if (key == "v_offset") p.v_offset = v;
    else if (key == "width") p.geometry.width = v;
    else if (key == "spacing") p.geometry.spacing = v;
    else if (key == "thickness") p.geometry.thickness = v;
    else if (key == "line_length") p.geometry.line_length = v;
}

inline double get_process_key(const FabProcess& p, const std::string& key)
{
    if (key == "cu_nominal") return p.cu_nominal;
    if (key == "sigma_cu") return p.sigma_cu;
    if (key == "tc") return p.tc;
    if (key == "eta_ler") return p.eta_ler;
    if (key == "sigma_ler") return p.sigma_ler;
    if (key == "sigma_n") return p.sigma_n;
    if (key == "v_offset") return p.v_offset;
    if (key == "width") return p.geometry.width;
    if (key == "spacing") return p.geometry.spacing;
    if (key == "thickness") return p.geometry.thickness;
    return p.geometry.line_length;
}

/// Walks one section, handing each key to `fn`; keys `fn` declines are errors.
template <class Fn>
void each_key(const std::string& section, const boost::property_tree::ptree& tree, Fn&& fn)
{
    for (const auto& [key, node] : tree) {
        if (!node.empty())
            throw ConfigError(section + "." + key, "nested values are not allowed");
        const std::string path = section + "." + key;
        if (!fn(key, path, node.data()))
            throw ConfigError(path, "unknown key");
    }
}

} // namespace detail

/// Every process resolved through its inheritance chain.
inline std::map<std::string, FabProcess> resolve_processes(const ExperimentConfig& cfg)
{
    std::map<std::string, const ProcessSpec*> by_name;
    for (const auto& p : cfg.processes)
        by_name[p.name] = &p;
    std::map<std::string, FabProcess> out;
    for (const auto& spec : cfg.processes) {
        std::vector<const ProcessSpec*> chain;
        std::set<std::string> seen;
        for (const ProcessSpec* s = &spec; s != nullptr;) {
            if (!seen.insert(s->name).second)
                throw ConfigError("process." + spec.name + ".inherits", "inheritance cycle through '" + s->name + "'");
            chain.push_back(s);
            if (s->inherits.empty())
                break;
            const auto it = by_name.find(s->inherits);
            if (it == by_name.end())
                throw ConfigError("process." + s->name + ".inherits", "no process block '" + s->inherits + "'");
            s = it->second;
        }
        FabProcess p;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            for (const auto& [k, v] : (*it)->overrides)
                detail::set_process_key(p, k, v);
        try {
            mosauth::validate(p);
        } catch (const DomainError& e) {
            // messages read "FabProcess: <field> ..."; point at the field
            std::string msg = e.what();
            const auto colon = msg.find(": ");
            if (colon != std::string::npos)
                msg = msg.substr(colon + 2);
            const std::string field = msg.substr(0, msg.find(' '));
            throw ConfigError("process." + spec.name + "." + field, msg.substr(msg.find(' ') + 1));
        }
        out[spec.name] = p;
    }
    return out;
}

inline FabProcess process_named(const ExperimentConfig& cfg, const std::string& name)
{
    const auto all = resolve_processes(cfg);
    const auto it = all.find(name);
    if (it == all.end())
        throw ConfigError("process", "no process block '" + name + "'");
    return it->second;
}

/// Checks cross-field rules; throws ConfigError naming the key.
inline void validate(const ExperimentConfig& c)
{
    const auto need = [](bool ok, const char* path, const char* what) {
        if (!ok)
            throw ConfigError(path, what);
    };
    std::size_t authentic = 0;
    for (const auto& p : c.processes) {
        authentic += p.name == "authentic";
        if (p.name == "authentic")
            need(p.inherits.empty(), "process.authentic.inherits", "the authentic block cannot inherit");
    }
    need(authentic == 1, "process.authentic", "exactly one authentic process block is required");
    for (const auto& [name, p] : resolve_processes(c)) {
        (void)name;
        (void)p;
    }
    need(c.workers >= 1, "global.workers", "must be >= 1");
    need(c.adc.bits >= 2 && c.adc.bits <= 20, "adc.bits", "must be in [2, 20]");
    need(c.adc.v_ref > 0, "adc.v_ref", "must be > 0");
    need(!c.extraction.grid.empty(), "extraction.grid", "must not be empty");
    for (std::size_t j = 0; j < c.extraction.grid.size(); ++j) {
        need(c.extraction.grid[j] >= 0, "extraction.grid", "values must be >= 0");
        need(j == 0 || c.extraction.grid[j] > c.extraction.grid[j - 1], "extraction.grid", "must be ascending");
    }
    need(c.extraction.repeats >= 1 && c.extraction.repeats % 2 == 1, "extraction.repeats", "must be odd and >= 1");
    need(c.extraction.pairs >= 1, "extraction.pairs", "must be >= 1");
    need(c.enrollment.size >= 1, "enrollment.size", "must be >= 1");
    need(c.enrollment.quantile > 0.5 && c.enrollment.quantile < 1, "enrollment.quantile", "must be in (0.5, 1)");
    need(c.enrollment.k_sigma >= 0, "enrollment.k_sigma", "must be >= 0");
    need(c.enrollment.weighting == "uniform" || c.enrollment.weighting == "sensitivity", "enrollment.weighting",
         "must be uniform or sensitivity");
    need(std::any_of(c.processes.begin(), c.processes.end(),
                     [&](const ProcessSpec& p) { return p.name == c.enrollment.counterfeit; }),
         "enrollment.counterfeit", "names no process block");
    need(c.analysis.chips >= 2, "analysis.chips", "must be >= 2");
    for (int r : c.analysis.repeat_compare)
        need(r >= 1 && r % 2 == 1, "analysis.repeat_compare", "repeats must be odd and >= 1");
    need(c.analysis.cof_pair.size() == 2, "analysis.cof_pair", "needs exactly two values");
    for (double n : c.analysis.n_candidates)
        need(n >= 1 && n == std::floor(n), "analysis.n_candidates", "must be positive integers");
    need(c.failure.f_ac.size() == 2 && c.failure.f_ac_given_a.size() == 2, "failure.f_ac",
         "Gaussians are written as mean, stddev");
    need(c.failure.multi_f_ac.size() == 2 && c.failure.multi_f_ac_given_a.size() == 2, "failure.multi_f_ac",
         "Gaussians are written as mean, stddev");
    need(c.failure.role == "counterfeit" || c.failure.role == "all_chips", "failure.role",
         "must be counterfeit or all_chips");
    need(c.failure.p_a > 0 && c.failure.p_a < 1, "failure.p_a", "must be in (0, 1)");
    need(c.failure.width_points >= 2, "failure.width_points", "must be >= 2");
    need(c.failure.grid >= 2 && c.failure.multi_grid >= 2, "failure.grid", "must be >= 2");
    for (double r : c.failure.rho_sweep)
        need(std::abs(r) < 1, "failure.rho_sweep", "|rho| must be < 1");
    for (const auto& s : c.stages)
        need(std::find(known_stages().begin(), known_stages().end(), s) != known_stages().end(), "run.stages",
             "unknown stage");
}

/// Applies INI text on top of `cfg`.
inline void apply_ini(ExperimentConfig& cfg, const std::string& text, const std::string& source = "config")
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source, e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(section, "key outside any section");
        if (section == "global") {
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "seed") cfg.global_seed = detail::parse_count(path, v);
                else if (k == "output_dir") cfg.output_dir = detail::trim(v);
                else if (k == "workers") cfg.workers = static_cast<unsigned>(detail::parse_count(path, v));
                else return false;
                return true;
            });
        } else if (section.rfind("process.", 0) == 0) {
            const std::string name = section.substr(8);
            if (name.empty())
                throw ConfigError(section, "process block needs a name");
            auto it = std::find_if(cfg.processes.begin(), cfg.processes.end(),
                                   [&](const ProcessSpec& p) { return p.name == name; });
            if (it == cfg.processes.end()) {
                cfg.processes.push_back({name, name == "authentic" ? "" : "authentic", {}});
                it = cfg.processes.end() - 1;
            }
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "inherits") {
                    it->inherits = detail::trim(v);
                    return true;
                }
                for (const auto& [key, unit] : detail::process_keys()) {
                    if (key == k) {
                        it->overrides[k] = detail::parse_quantity(path, v, unit);
                        return true;
                    }
                }
                return false;
            });
        } else if (section == "adc") {
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "bits") cfg.adc.bits = static_cast<int>(detail::parse_count(path, v));
                else if (k == "v_ref") cfg.adc.v_ref = detail::parse_quantity(path, v, Unit::voltage);
                else if (k == "ideal") cfg.adc.ideal = detail::parse_bool(path, v);
                else return false;
                return true;
            });
        } else if (section == "extraction") {
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "grid")
                    cfg.extraction.grid = detail::trim(v) == "default" ? default_cof_grid()
                                                                       : detail::parse_list(path, v, Unit::none);
                else if (k == "repeats") cfg.extraction.repeats = static_cast<int>(detail::parse_count(path, v));
                else if (k == "pairs") cfg.extraction.pairs = detail::parse_count(path, v);
                else return false;
                return true;
            });
        } else if (section == "enrollment") {
            auto& e = cfg.enrollment;
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "size") e.size = detail::parse_count(path, v);
                else if (k == "holdout") e.holdout = detail::parse_count(path, v);
                else if (k == "counterfeit") e.counterfeit = detail::trim(v);
                else if (k == "counterfeit_size") e.counterfeit_size = detail::parse_count(path, v);
                else if (k == "quantile") e.quantile = detail::parse_quantity(path, v, Unit::none);
                else if (k == "k_sigma") e.k_sigma = detail::parse_quantity(path, v, Unit::none);
                else if (k == "weighting") e.weighting = detail::trim(v);
                else return false;
                return true;
            });
        } else if (section == "analysis") {
            auto& a = cfg.analysis;
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "chips") a.chips = detail::parse_count(path, v);
                else if (k == "repeat_compare") {
                    a.repeat_compare.clear();
                    for (const auto& item : detail::split_list(v))
                        a.repeat_compare.push_back(static_cast<int>(detail::parse_count(path, item)));
                }
                else if (k == "temperatures") a.temperatures = detail::parse_list(path, v, Unit::temperature);
                else if (k == "t0") a.t0 = detail::parse_quantity(path, v, Unit::temperature);
                else if (k == "offsets") a.offsets = detail::parse_list(path, v, Unit::voltage);
                else if (k == "sigma_sweep") a.sigma_sweep = detail::parse_list(path, v, Unit::capacitance);
                else if (k == "n_candidates") a.n_candidates = detail::parse_list(path, v, Unit::none);
                else if (k == "cof_pair") a.cof_pair = detail::parse_list(path, v, Unit::none);
                else if (k == "var_floor_factor") a.var_floor_factor = detail::parse_quantity(path, v, Unit::none);
                else if (k == "sensitivity_retention") a.sensitivity_retention = detail::parse_quantity(path, v, Unit::none);
                else if (k == "ler_samples") a.ler_samples = detail::parse_count(path, v);
                else if (k == "ler_segments") a.ler_segments = detail::parse_count(path, v);
                else if (k == "ler_sigmas") a.ler_sigmas = detail::parse_list(path, v, Unit::length);
                else if (k == "ler_etas") a.ler_etas = detail::parse_list(path, v, Unit::length);
                else if (k == "ler_scales") a.ler_scales = detail::parse_list(path, v, Unit::none);
                else return false;
                return true;
            });
        } else if (section == "failure") {
            auto& f = cfg.failure;
            detail::each_key(section, body, [&](const std::string& k, const std::string& path, const std::string& v) {
                if (k == "f_ac") f.f_ac = detail::parse_list(path, v, Unit::none);
                else if (k == "f_ac_given_a") f.f_ac_given_a = detail::parse_list(path, v, Unit::none);
                else if (k == "p_a") f.p_a = detail::parse_quantity(path, v, Unit::none);
                else if (k == "role") f.role = detail::trim(v);
                else if (k == "sigma_a_sweep") f.sigma_a_sweep = detail::parse_list(path, v, Unit::none);
                else if (k == "multi_f_ac") f.multi_f_ac = detail::parse_list(path, v, Unit::none);
                else if (k == "multi_f_ac_given_a") f.multi_f_ac_given_a = detail::parse_list(path, v, Unit::none);
                else if (k == "rho_sweep") f.rho_sweep = detail::parse_list(path, v, Unit::none);
                else if (k == "width_points") f.width_points = detail::parse_count(path, v);
                else if (k == "grid") f.grid = static_cast<int>(detail::parse_count(path, v));
                else if (k == "multi_grid") f.multi_grid = static_cast<int>(detail::parse_count(path, v));
                else return false;
                return true;
            });
        } else if (section == "run") {
            detail::each_key(section, body, [&](const std::string& k, const std::string&, const std::string& v) {
                if (k != "stages")
                    return false;
                cfg.stages = detail::split_list(v);
                return true;
            });
        } else {
            throw ConfigError(section, "unknown section");
        }
    }
}

/// One line per setting in a fixed order, numbers as %.17g; the basis of the hash.
inline std::string canonical_text(const ExperimentConfig& c)
{
    std::string out;
    const auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const auto list = [&](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += (i ? "," : "") + num(xs[i]);
        return s;
    };
    const auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };

    line("global.seed", std::to_string(c.global_seed));
    for (const auto& [name, p] : resolve_processes(c))
        for (const auto& [key, unit] : detail::process_keys()) {
            (void)unit;
            line("process." + name + "." + key, num(detail::get_process_key(p, key)));
        }
    line("adc.bits", std::to_string(c.adc.bits));
    line("adc.v_ref", num(c.adc.v_ref));
    line("adc.ideal", c.adc.ideal ? "true" : "false");
    line("extraction.grid", list(c.extraction.grid));
    line("extraction.repeats", std::to_string(c.extraction.repeats));
    line("extraction.pairs", std::to_string(c.extraction.pairs));
    const auto& e = c.enrollment;
    line("enrollment.size", std::to_string(e.size));
    line("enrollment.holdout", std::to_string(e.holdout));
    line("enrollment.counterfeit", e.counterfeit);
    line("enrollment.counterfeit_size", std::to_string(e.counterfeit_size));
    line("enrollment.quantile", num(e.quantile));
    line("enrollment.k_sigma", num(e.k_sigma));
    line("enrollment.weighting", e.weighting);
    const auto& a = c.analysis;
    std::vector<double> rc(a.repeat_compare.begin(), a.repeat_compare.end());
    line("analysis.chips", std::to_string(a.chips));
    line("analysis.repeat_compare", list(rc));
    line("analysis.temperatures", list(a.temperatures));
    line("analysis.t0", num(a.t0));
    line("analysis.offsets", list(a.offsets));
    line("analysis.sigma_sweep", list(a.sigma_sweep));
    line("analysis.n_candidates", list(a.n_candidates));
    line("analysis.cof_pair", list(a.cof_pair));
    line("analysis.var_floor_factor", num(a.var_floor_factor));
    line("analysis.sensitivity_retention", num(a.sensitivity_retention));
    line("analysis.ler_samples", std::to_string(a.ler_samples));
    line("analysis.ler_segments", std::to_string(a.ler_segments));
    line("analysis.ler_sigmas", list(a.ler_sigmas));
    line("analysis.ler_etas", list(a.ler_etas));
    line("analysis.ler_scales", list(a.ler_scales));
    const auto& f = c.failure;
    line("failure.f_ac", list(f.f_ac));
    line("failure.f_ac_given_a", list(f.f_ac_given_a));
    line("failure.p_a", num(f.p_a));
    line("failure.role", f.role);
    line("failure.sigma_a_sweep", list(f.sigma_a_sweep));
    line("failure.multi_f_ac", list(f.multi_f_ac));
    line("failure.multi_f_ac_given_a", list(f.multi_f_ac_given_a));
    line("failure.rho_sweep", list(f.rho_sweep));
    line("failure.width_points", std::to_string(f.width_points));
    line("failure.grid", std::to_string(f.grid));
    line("failure.multi_grid", std::to_string(f.multi_grid));
    std::string stages;
    for (const auto& s : c.stages)
        stages += (stages.empty() ? "" : ",") + s;
    line("run.stages", stages);
    return out;
}

/// Workers and output directory do not change results and stay out of the hash.
inline std::string config_hash(const ExperimentConfig& c)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text(c))));
    return buf;
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    apply_ini(cfg, text);
    validate(cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    ExperimentConfig cfg;
    apply_ini(cfg, read_text_file(path), path);
    validate(cfg);
    return cfg;
}

} // namespace mosauth::harness
