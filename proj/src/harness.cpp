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

#include "beamhop/harness.hpp"

#include "beamhop/hbf_am.hpp"
#include "beamhop/scheme_ipao.hpp"
#include "beamhop/scheme_iprs.hpp"

#include <json.hpp>
#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace beamhop
{

using nlohmann::json;

namespace
{

json matrix_json(const RMatrix &m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::ofstream open_output(const std::filesystem::path &path, std::ios::openmode mode)
{
    std::ofstream out(path, mode | std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    return out;
}

void check_written(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw Error(ErrorKind::Io, "write failed for " + path.string());
}

SweepRow aggregate(const std::string &axis, const std::vector<TrialRecord> &records, std::uint64_t seed_base,
                   double wall_time)
{
    SweepRow row;
    row.axis = axis;
    row.seed_base = seed_base;
    row.wall_time_s = wall_time;
    std::size_t ok = 0, bad = 0;
    double sum = 0.0, min_sum = 0.0;
    for (const auto &r : records)
    {
        if (r.failed || !r.feasible)
            ++bad;
        if (r.failed)
            continue;
        ++ok;
        sum += r.total;
        min_sum += r.per_beam.size() ? r.per_beam.minCoeff() : 0.0;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.mean_total = ok ? sum / static_cast<double>(ok) : nan;
    row.mean_per_beam_min = ok ? min_sum / static_cast<double>(ok) : nan;
    double sq = 0.0;
    for (const auto &r : records)
        if (!r.failed)
            sq += (r.total - row.mean_total) * (r.total - row.mean_total);
    row.std_total = ok > 1 ? std::sqrt(sq / static_cast<double>(ok - 1)) : (ok ? 0.0 : nan);
    row.infeasible_fraction = records.empty() ? 0.0 : static_cast<double>(bad) / static_cast<double>(records.size());
    return row;
}

} // namespace

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::uint64_t trial_seed(std::uint64_t seed_base, int trial, int stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed_base), static_cast<std::uint32_t>(seed_base >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(stream)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::string TrialRecord::to_json() const
{
    json j;
    j["axis"] = axis_label;
    j["trial"] = trial;
    j["failed"] = failed;
    if (failed)
    {
        j["error"] = error;
        return j.dump();
    }
    j["feasible"] = feasible;
    j["total"] = total;
    j["per_beam"] = std::vector<double>(per_beam.data(), per_beam.data() + per_beam.size());
    j["rates"] = matrix_json(rates);
    j["pattern"] = json::parse(pattern_to_json(pattern));
    if (!hbf_residuals.empty())
        j["hbf_residuals"] = hbf_residuals;
    return j.dump();
}

TrialRecord run_trial(const ExperimentSpec &spec, const SweepValue &value, int trial)
{
    TrialRecord rec;
    rec.axis_label = value.label(spec.axis);
    rec.trial = trial;
    const auto start = std::chrono::steady_clock::now();
    try
    {
        const SystemConfig config = spec.config_for(value);
        config.validate();
        std::mt19937_64 channel_rng(trial_seed(spec.seed_base, trial, 0));
        const ChannelSet channel = generate_channel(config, spec.budget, spec.paths, channel_rng);
        std::mt19937_64 scheme_rng(trial_seed(spec.seed_base, trial, 1));

        PrecoderSet precoders;
        if (spec.scheme == Scheme::Iprs)
        {
            auto r = run_iprs(channel, config, spec.candidates_for(config), scheme_rng);
            rec.pattern = std::move(r.best_pattern);
            precoders = std::move(r.best_precoders);
        }
        else
        {
            auto r = run_ipao(channel, config, scheme_rng);
            rec.pattern = std::move(r.pattern);
            precoders = std::move(r.precoders);
        }

        const RVector gamma = config.gamma_vector();
        RateReport report;
        FeasibilityVerdict verdict;
        if (spec.stage == Stage::Hbf)
        {
            std::mt19937_64 hbf_rng(trial_seed(spec.seed_base, trial, 2));
            auto batch = factorize_all(precoders, config, hbf_rng);
            if (!batch.errors.empty())
                throw Error(ErrorKind::Validation, batch.errors.front());
            for (const auto &h : batch.slots)
                rec.hbf_residuals.push_back(h.residual);
            report = rate_matrix(channel, effective_precoders(batch.slots), rec.pattern.weights(), config.sigma_sq,
                                 gamma);
            verdict = check_feasibility(report, rec.pattern, batch.slots, config);
        }
        else
        {
            report = rate_matrix(channel, precoders, rec.pattern.weights(), config.sigma_sq, gamma);
            verdict = check_feasibility(report, rec.pattern, precoders, config);
        }
        rec.total = report.total;
        rec.per_beam = report.per_beam_sum;
        rec.rates = report.rates;
        rec.feasible = verdict.feasible();
    }
    catch (const Error &e)
    {
        rec.failed = true;
        rec.error = e.what();
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::string summary_csv_header()
{
    return "axis,mean_total,std_total,mean_per_beam_min,infeasible_fraction,wall_time_s,seed_base";
}

std::string summary_csv_line(const SweepRow &row, bool with_timing)
{
    return row.axis + "," + format_double(row.mean_total) + "," + format_double(row.std_total) + "," +
           format_double(row.mean_per_beam_min) + "," + format_double(row.infeasible_fraction) + "," +
           (with_timing ? format_double(row.wall_time_s) : std::string()) + "," + std::to_string(row.seed_base);
}

ExperimentResult run_experiment(const ExperimentSpec &spec, const RunOptions &options)
{
    const auto v = spec.violations();
    if (!v.empty())
        throw Error(ErrorKind::Validation, v.front());

    namespace fs = std::filesystem;
    const fs::path dir(spec.output_path);
    const fs::path csv_path = dir / "summary.csv";
    const fs::path jsonl_path = dir / "trials.jsonl";
    std::ofstream csv, jsonl;
    if (options.write_outputs)
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
        auto cfg = open_output(dir / "resolved_config.json", std::ios::trunc);
        cfg << resolved_config_json(spec);
        check_written(cfg, dir / "resolved_config.json");
        csv = open_output(csv_path, std::ios::trunc);
        csv << summary_csv_header() << "\n";
        check_written(csv, csv_path);
        jsonl = open_output(jsonl_path, std::ios::trunc);
    }

    ExperimentResult result;
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
    for (std::size_t a = 0; a < spec.values.size(); ++a)
    {
        const auto start = std::chrono::steady_clock::now();
        std::vector<TrialRecord> records(static_cast<std::size_t>(spec.trials));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int t = 0; t < spec.trials; ++t)
            records[static_cast<std::size_t>(t)] = run_trial(spec, spec.values[a], t);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        for (auto &r : records)
        {
            r.axis_index = static_cast<int>(a);
            if (r.failed)
                ++result.failed_trials;
        }
        const SweepRow row = aggregate(spec.values[a].label(spec.axis), records, spec.seed_base, elapsed);
        if (options.write_outputs)
        {
            csv << summary_csv_line(row, options.record_timing) << "\n";
            check_written(csv, csv_path);
            for (const auto &r : records)
            {
                auto line = r.to_json();
                if (options.record_timing)
                {
                    auto j = json::parse(line);
                    j["wall_time_s"] = r.wall_time_s;
                    line = j.dump();
                }
                jsonl << line << "\n";
            }
            check_written(jsonl, jsonl_path);
        }
        result.rows.push_back(row);
        for (auto &r : records)
            result.trials.push_back(std::move(r));
    }
    return result;
}

} // namespace beamhop
