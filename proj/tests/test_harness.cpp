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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mosauth/harness/run.hpp"

using namespace mosauth;
using namespace mosauth::harness;
namespace fs = std::filesystem;

namespace {
// Hash of the all-defaults configuration; documented in the README.
constexpr const char* kDefaultHash = "2d82fc2e7d89ad11";

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("mosauth_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error_key(const std::string& ini)
{
    try {
        parse_config(ini);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}
} // namespace

TEST(Config, EmptyFileGivesDefaults)
{
    const auto cfg = parse_config("");
    EXPECT_EQ(config_hash(cfg), kDefaultHash);
    EXPECT_EQ(config_hash(cfg), config_hash(ExperimentConfig{}));
    EXPECT_EQ(cfg.extraction.repeats, 15);
    EXPECT_EQ(cfg.extraction.pairs, 256u);
}

TEST(Config, HashIgnoresWorkersAndOutputDir)
{
    const auto a = parse_config("[global]\nworkers = 8\noutput_dir = elsewhere\n");
    EXPECT_EQ(config_hash(a), kDefaultHash);
    const auto b = parse_config("[global]\nseed = 1\n");
    EXPECT_NE(config_hash(b), kDefaultHash);
}

TEST(Config, ValidationNamesTheKey)
{
    EXPECT_EQ(config_error_key("[process.authentic]\nsigma_cu = -1fF\n"), "process.authentic.sigma_cu");
    EXPECT_EQ(config_error_key("[adc]\nbits = 1\n"), "adc.bits");
    EXPECT_EQ(config_error_key("[extraction]\ngrid = 0.02, 0.01\n"), "extraction.grid");
}

TEST(Config, UnitSuffixes)
{
    const auto cfg = parse_config("[process.authentic]\nsigma_cu = 15aF\nsigma_n = 22uV\neta_ler = 8nm\n");
    const auto p = process_named(cfg, "authentic");
    EXPECT_DOUBLE_EQ(p.sigma_cu, 15e-18);
    EXPECT_DOUBLE_EQ(p.sigma_n, 22e-6);
    EXPECT_DOUBLE_EQ(p.eta_ler, 8e-9);
    EXPECT_EQ(config_error_key("[process.authentic]\nsigma_cu = 15nm\n"), "process.authentic.sigma_cu");
    EXPECT_EQ(config_error_key("[process.authentic]\nsigma_cu = lots\n"), "process.authentic.sigma_cu");
}

TEST(Config, UnknownKeysAndSectionsAreRejected)
{
    EXPECT_EQ(config_error_key("[adc]\nbitz = 10\n"), "adc.bitz");
    EXPECT_EQ(config_error_key("[adcc]\nbits = 10\n"), "adcc");
    EXPECT_THROW(parse_config("[run]\nstages = populate, dance\n"), ConfigError);
}

TEST(Config, InheritanceMergesOverrides)
{
    const auto cfg = parse_config("[process.authentic]\nsigma_cu = 12aF\ntc = 10ppm/C\n"
                                  "[process.counterfeit]\nsigma_cu = 20aF\n"
                                  "[process.third]\ninherits = counterfeit\neta_ler = 30nm\n");
    FabProcess expected;
    expected.sigma_cu = 20e-18;
    expected.tc = 10e-6;
    expected.eta_ler = 30e-9;
    const auto third = process_named(cfg, "third");
    EXPECT_DOUBLE_EQ(third.sigma_cu, expected.sigma_cu);
    EXPECT_DOUBLE_EQ(third.tc, expected.tc);
    EXPECT_DOUBLE_EQ(third.eta_ler, expected.eta_ler);
    EXPECT_DOUBLE_EQ(third.sigma_n, expected.sigma_n);
    EXPECT_DOUBLE_EQ(process_named(cfg, "authentic").eta_ler, FabProcess{}.eta_ler);
    EXPECT_THROW(parse_config("[process.a]\ninherits = b\n[process.b]\ninherits = a\n"), ConfigError);
}

TEST(Run, MinimalPopulateOnly)
{
    const auto dir = scratch("minimal");
    auto cfg = parse_config("[enrollment]\nsize = 2\n[run]\nstages = populate\n");
    cfg.output_dir = dir.string();
    const auto m = run(cfg);
    EXPECT_EQ(m.files, (std::vector<std::string>{"population_enrollment.csv", "manifest.json"}));
    std::size_t entries = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        ++entries;
    }
    EXPECT_EQ(entries, 2u);
    // header plus 2 chips x 256 pairs x 2 sides
    const auto body = slurp(dir / "population_enrollment.csv");
    EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 1 + 2 * 256 * 2);
    fs::remove_all(dir);
}

TEST(Run, RepeatedRunsAreByteIdentical)
{
    const auto a = scratch("twice_a"), b = scratch("twice_b");
    auto cfg = parse_config("[enrollment]\nsize = 12\nholdout = 4\ncounterfeit_size = 4\n"
                            "[extraction]\nrepeats = 3\npairs = 64\n"
                            "[analysis]\nchips = 10\n"
                            "[run]\nstages = populate, extract, sensitivity, enroll, authenticate\n");
    cfg.output_dir = a.string();
    const auto ma = run(cfg);
    cfg.output_dir = b.string();
    cfg.workers = 4;
    const auto mb = run(cfg);
    ASSERT_EQ(ma.files, mb.files);
    for (const auto& f : ma.files) {
        if (f == "manifest.json")
            continue;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_EQ(ma.config_hash, mb.config_hash);
    EXPECT_EQ(ma.summary, mb.summary);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Run, ManifestListsEveryFile)
{
    const auto dir = scratch("manifest");
    auto cfg = parse_config("[analysis]\nchips = 5\n[extraction]\npairs = 32\n[run]\nstages = offset\n");
    cfg.output_dir = dir.string();
    const auto m = run(cfg);
    std::vector<std::string> on_disk;
    for (const auto& e : fs::directory_iterator(dir))
        on_disk.push_back(e.path().filename().string());
    std::sort(on_disk.begin(), on_disk.end());
    auto listed = m.files;
    std::sort(listed.begin(), listed.end());
    EXPECT_EQ(on_disk, listed);
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(j["config_hash"], m.config_hash);
    EXPECT_EQ(j["files"].size(), m.files.size());
    fs::remove_all(dir);
}

TEST(Run, StaleOutputsFromAPreviousRunAreRemoved)
{
    const auto dir = scratch("stale");
    auto cfg = parse_config("[enrollment]\nsize = 2\n[extraction]\npairs = 8\n[run]\nstages = populate, extract\n");
    cfg.output_dir = dir.string();
    run(cfg);
    EXPECT_TRUE(fs::exists(dir / "traces_enrollment.csv"));
    cfg.stages = {"populate"};
    run(cfg);
    EXPECT_FALSE(fs::exists(dir / "traces_enrollment.csv"));
    fs::remove_all(dir);
}

TEST(Run, RepeatPresetWritesBothTraceSets)
{
    const auto dir = scratch("repeat_preset");
    ExperimentConfig cfg;
    apply_preset(cfg, "fig9");
    apply_ini(cfg, "[analysis]\nchips = 4\n[extraction]\npairs = 32\n");
    cfg.output_dir = dir.string();
    const auto m = Runner(cfg, "fig9").run();
    EXPECT_TRUE(fs::exists(dir / "traces_r1.csv"));
    EXPECT_TRUE(fs::exists(dir / "traces_r15.csv"));
    EXPECT_TRUE(fs::exists(dir / "repeat_summary.csv"));
    EXPECT_EQ(m.preset, "fig9");
    fs::remove_all(dir);
}

TEST(Run, StageFailureStillWritesTheManifest)
{
    const auto dir = scratch("failing");
    // all-chips role with the default counterfeit-shaped f_AC is not a mixture
    auto cfg = parse_config("[failure]\nrole = all_chips\n[run]\nstages = failure\n");
    cfg.output_dir = dir.string();
    try {
        run(cfg);
        ADD_FAILURE() << "expected a stage failure";
    } catch (const StageFailure& e) {
        EXPECT_EQ(e.stage(), "failure");
        const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
        EXPECT_FALSE(j["error"].get<std::string>().empty());
    }
    fs::remove_all(dir);
}

TEST(Presets, UnknownPresetIsAConfigError)
{
    ExperimentConfig cfg;
    EXPECT_THROW(apply_preset(cfg, "nope"), ConfigError);
    for (const auto& [name, text] : presets()) {
        ExperimentConfig c;
        EXPECT_NO_THROW(apply_preset(c, name)) << name;
        EXPECT_NO_THROW(validate(c)) << name;
    }
}
