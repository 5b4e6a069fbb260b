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

// mosauth: command-line front end of the experiment harness.
//
// Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mosauth/harness/run.hpp"

namespace {

using mosauth::harness::ExperimentConfig;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<unsigned> workers;
    std::string preset;
    std::string card;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "INI config file");
    cmd->add_option("--seed", o.seed, "global seed (overrides the config)");
    cmd->add_option("--out", o.out, "output directory (overrides the config)");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--preset", o.preset, "preset pipeline: fig2 fig4 fig9 fig10 fig11 fig12ab fig12cd");
}

ExperimentConfig build_config(const Options& o, const std::vector<std::string>& forced_stages)
{
    ExperimentConfig cfg;
    if (!o.preset.empty())
        mosauth::harness::apply_preset(cfg, o.preset);
    if (!o.config.empty())
        mosauth::harness::apply_ini(cfg, mosauth::harness::read_text_file(o.config), o.config);
    if (o.seed)
        cfg.global_seed = *o.seed;
    if (!o.out.empty())
        cfg.output_dir = o.out;
    if (o.workers)
        cfg.workers = *o.workers;
    if (!forced_stages.empty())
        cfg.stages = forced_stages;
    mosauth::harness::validate(cfg);
    return cfg;
}

void print_summary(const char* status, const mosauth::harness::RunManifest& m)
{
    std::cout << "status=" << status << " config_hash=" << m.config_hash << " seed=" << m.global_seed
              << " files=" << m.files.size();
    for (const auto& [k, v] : m.summary)
        std::cout << ' ' << k << '=' << v;
    std::cout << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Capacitor-mismatch chip authentication experiments"};
    app.require_subcommand(1);
    Options opt;

    struct Command {
        std::vector<std::string> stages; // empty: stages from the config
        const char* help;
    };
    const std::map<std::string, Command> commands = {
        {"gen-population", {{"populate"}, "sample the enrollment population"}},
        {"extract", {{"extract"}, "sample and extract signature traces"}},
        {"enroll", {{"enroll"}, "build an AC card from the enrollment traces"}},
        {"authenticate", {{"authenticate"}, "score holdout and counterfeit chips against a card"}},
        {"adc-verify", {{"adc-verify"}, "ramp test of the SAR conversion"}},
        {"failure-analysis", {{"failure"}, "failure-rate curves and optimal thresholds"}},
        {"optimize", {{"optimize", "sensitivity"}, "array size selection and sensitivity weights"}},
        {"sweep-temperature", {{"temperature"}, "signature drift over temperature"}},
        {"run", {{}, "run the stages listed in the config or preset"}},
    };
    for (const auto& [name, command] : commands) {
        auto* cmd = app.add_subcommand(name, command.help);
        add_common(cmd, opt);
        if (name == "authenticate")
            cmd->add_option("--card", opt.card, "authenticate against this card instead of enrolling");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    ExperimentConfig cfg;
    std::optional<mosauth::ACCard> card;
    try {
        cfg = build_config(opt, commands.at(name).stages);
        if (!opt.card.empty())
            card = mosauth::card_from_json(mosauth::harness::read_text_file(opt.card));
    } catch (const mosauth::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const mosauth::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        mosauth::harness::Runner runner(cfg, opt.preset);
        if (card)
            runner.use_card(*card);
        print_summary("ok", runner.run());
        return 0;
    } catch (const mosauth::harness::StageFailure& e) {
        std::cerr << "stage failure: " << e.what() << '\n';
        print_summary("failed", e.manifest());
        return 3;
    } catch (const mosauth::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
