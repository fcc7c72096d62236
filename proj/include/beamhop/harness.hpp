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

#ifndef BEAMHOP_HARNESS_HPP
#define BEAMHOP_HARNESS_HPP

#include "beamhop/channel.hpp"
#include "beamhop/core_model.hpp"
#include "beamhop/pattern.hpp"
#include "beamhop/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace beamhop
{

enum class SweepAxis
{
    PTot,
    Gamma,
    NBs,
    KmPairs
};

enum class Scheme
{
    Iprs,
    Ipao
};

enum class Stage
{
    Fdbf,
    Hbf
};

const char *to_string(SweepAxis axis);
const char *to_string(Scheme scheme);
const char *to_string(Stage stage);

// One point of the sweep. `scalar` is used by p_tot, gamma and n_bs; km_pairs uses k, m, n_s.
struct SweepValue
{
    double scalar = 0.0;
    int k = 0;
    int m = 0;
    int n_s = 0;

    std::string label(SweepAxis axis) const;
};

struct ExperimentSpec
{
    std::string name;
    SystemConfig base;
    LinkBudget budget;
    PathSpec paths;
    SweepAxis axis = SweepAxis::PTot;
    std::vector<SweepValue> values;
    Scheme scheme = Scheme::Ipao;
    Stage stage = Stage::Fdbf;
    int trials = 1;
    std::uint64_t seed_base = 1;
    int iprs_candidates = 0; // 0 picks the number of distinct unordered patterns (capped)
    std::string output_path;

    // Configuration of one sweep point; throws Validation when the point is invalid.
    SystemConfig config_for(const SweepValue &value) const;
    int candidates_for(const SystemConfig &config) const;
    std::vector<std::string> violations() const;
};

// Parse and validate. `origin` names the source in diagnostics.
ExperimentSpec parse_config(const std::string &json_text, const std::string &origin = "config");
ExperimentSpec load_config(const std::string &path);
// Fully-resolved spec, every default spelled out; parse_config accepts it back.
std::string resolved_config_json(const ExperimentSpec &spec);

struct TrialRecord
{
    std::string axis_label;
    int axis_index = 0;
    int trial = 0;
    bool failed = false;
    std::string error;
    bool feasible = false;
    double total = 0.0;
    RVector per_beam;
    RMatrix rates;
    IlluminationPattern pattern;
    std::vector<double> hbf_residuals;
    double wall_time_s = 0.0;

    std::string to_json() const;
};

struct SweepRow
{
    std::string axis;
    double mean_total = 0.0;
    double std_total = 0.0;
    double mean_per_beam_min = 0.0;
    double infeasible_fraction = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t seed_base = 0;
};

struct RunOptions
{
    int threads = 0;            // 0 leaves the OpenMP default
    bool record_timing = false; // wall-clock column; off keeps CSVs byte-reproducible
    bool write_outputs = true;  // summary.csv, trials.jsonl and resolved_config.json under output_path
};

struct ExperimentResult
{
    std::vector<SweepRow> rows;
    std::vector<TrialRecord> trials; // ordered by (axis index, trial)
    int failed_trials = 0;
};

// Seeds of trial `trial`: channel, scheme and factorization streams are independent.
std::uint64_t trial_seed(std::uint64_t seed_base, int trial, int stream);

// One Monte-Carlo trial at one sweep point. Scheme errors are caught into the record.
TrialRecord run_trial(const ExperimentSpec &spec, const SweepValue &value, int trial);

ExperimentResult run_experiment(const ExperimentSpec &spec, const RunOptions &options = RunOptions());

std::string summary_csv_header();
std::string summary_csv_line(const SweepRow &row, bool with_timing);
// Shortest representation that parses back to the same double.
std::string format_double(double value);

} // namespace beamhop

#endif
