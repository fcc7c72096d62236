// SPDX-License-Identifier: Apache-2.0
//
// beamhop: beamforming and illumination-pattern design for beam-hopping LEO downlinks
// Copyright (C) 2026 The beamhop authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// beamhop command line: config-driven sweeps, shipped presets, exhaustive pattern oracle.

#include "beamhop/harness.hpp"
#include "beamhop/scheme_iprs.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace beamhop;

namespace
{

enum ExitCode
{
    kOk = 0,
    kConfigError = 2,
    kPartialFailure = 3,
    kIoError = 4
};

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> out;
    int parallel = 0;
    bool record_timing = false;
};

int exit_code_for(const Error &e)
{
    switch (e.kind())
    {
    case ErrorKind::Parse:
    case ErrorKind::Validation:
        return kConfigError;
    case ErrorKind::Io:
        return kIoError;
    default:
        return kConfigError;
    }
}

int thread_count(int requested)
{
    if (const char *env = std::getenv("BEAMHOP_THREADS"))
    {
        try
        {
            const int n = std::stoi(env);
            if (n > 0)
                return n;
        }
        catch (const std::exception &)
        {
        }
        std::cerr << "warning: ignoring BEAMHOP_THREADS=" << env << "\n";
    }
    return requested;
}

fs::path preset_dir()
{
    if (const char *env = std::getenv("BEAMHOP_PRESETS"))
        return env;
    return BEAMHOP_PRESET_DIR;
}

int run_spec(ExperimentSpec spec, const Overrides &o)
{
    if (o.seed)
        spec.seed_base = *o.seed;
    if (o.trials)
    {
        if (*o.trials < 1)
        {
            std::cerr << "error: --trials must be >= 1\n";
            return kConfigError;
        }
        spec.trials = *o.trials;
    }
    if (o.out)
        spec.output_path = *o.out;

    RunOptions options;
    options.threads = thread_count(o.parallel);
    options.record_timing = o.record_timing;
    const auto result = run_experiment(spec, options);

    std::cout << summary_csv_header() << "\n";
    for (const auto &row : result.rows)
        std::cout << summary_csv_line(row, o.record_timing) << "\n";
    std::cerr << "wrote " << (fs::path(spec.output_path) / "summary.csv").string() << "\n";
    if (result.failed_trials > 0)
    {
        std::cerr << result.failed_trials << " trial(s) failed, see trials.jsonl\n";
        return kPartialFailure;
    }
    return kOk;
}

int list_presets()
{
    std::error_code ec;
    std::vector<std::string> names;
    for (const auto &entry : fs::directory_iterator(preset_dir(), ec))
        if (entry.path().extension() == ".json")
            names.push_back(entry.path().stem().string());
    if (ec)
    {
        std::cerr << "error: cannot read preset directory " << preset_dir() << ": " << ec.message() << "\n";
        return kIoError;
    }
    std::sort(names.begin(), names.end());
    for (const auto &n : names)
        std::cout << n << "\n";
    return kOk;
}

// Every ordered pattern is solved; prints the per-pattern totals and the winner.
int run_oracle(const std::string &path, const Overrides &o)
{
    ExperimentSpec spec = load_config(path);
    if (o.seed)
        spec.seed_base = *o.seed;
    const int trials = o.trials.value_or(spec.trials);
    nlohmann::json out = nlohmann::json::array();
    for (const auto &value : spec.values)
    {
        const SystemConfig config = spec.config_for(value);
        const auto count = count_ordered_patterns(config.n_s, config.k_beams, config.m_slots);
        if (count > 5000)
            throw Error(ErrorKind::Validation, "oracle needs a tiny configuration, " + std::to_string(count) +
                                                   " ordered patterns");
        const auto patterns = enumerate_patterns(config.n_s, config.k_beams, config.m_slots);
        for (int trial = 0; trial < trials; ++trial)
        {
            std::mt19937_64 rng(trial_seed(spec.seed_base, trial, 0));
            const auto channel = generate_channel(config, spec.budget, spec.paths, rng);
            const auto r = evaluate_candidates(channel, config, patterns);
            nlohmann::json j;
            j["axis"] = value.label(spec.axis);
            j["trial"] = trial;
            j["patterns"] = static_cast<std::uint64_t>(patterns.size());
            j["totals"] = std::vector<double>(r.per_candidate_totals.data(),
                                              r.per_candidate_totals.data() + r.per_candidate_totals.size());
            j["best_total"] = r.best_report.total;
            j["best_pattern"] = nlohmann::json::parse(pattern_to_json(r.best_pattern));
            j["feasible"] = r.feasible;
            out.push_back(std::move(j));
        }
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"beamhop: beam-hopping pattern and beamformer design sweeps"};
    app.require_subcommand(1);

    Overrides o;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string out;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--seed", seed, "Seed base for channel and scheme streams");
        sub->add_option("--trials", trials, "Monte-Carlo trials per sweep point");
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--parallel", o.parallel, "Worker threads (BEAMHOP_THREADS overrides)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--record-timing", o.record_timing, "Fill the wall_time_s column");
    };

    std::string config_path;
    auto *run = app.add_subcommand("run", "Run the sweep described by a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    add_common(run);

    auto *presets = app.add_subcommand("presets", "Shipped figure presets");
    presets->require_subcommand(1);
    auto *list = presets->add_subcommand("list", "List preset names");
    std::string preset_name;
    auto *prun = presets->add_subcommand("run", "Run a preset by name");
    prun->add_option("name", preset_name, "Preset name, e.g. paper_fig4")->required();
    add_common(prun);

    std::string oracle_path;
    auto *oracle = app.add_subcommand("oracle", "Brute-force every pattern of a tiny config");
    oracle->add_option("config", oracle_path, "Config file")->required();
    add_common(oracle);

    CLI11_PARSE(app, argc, argv);

    auto collect = [&](CLI::App *sub) {
        if (sub->count("--seed"))
            o.seed = seed;
        if (sub->count("--trials"))
            o.trials = trials;
        if (sub->count("--out"))
            o.out = out;
    };

    try
    {
        if (*run)
        {
            collect(run);
            return run_spec(load_config(config_path), o);
        }
        if (*list)
            return list_presets();
        if (*prun)
        {
            collect(prun);
            const fs::path file = preset_dir() / (preset_name + ".json");
            if (!fs::exists(file))
            {
                std::cerr << "error: unknown preset '" << preset_name << "'\n";
                return kConfigError;
            }
            return run_spec(load_config(file.string()), o);
        }
        if (*oracle)
        {
            collect(oracle);
            return run_oracle(oracle_path, o);
        }
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
