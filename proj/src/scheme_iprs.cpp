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

#include "beamhop/scheme_iprs.hpp"

#include "beamhop/fp_engine.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace beamhop
{

namespace
{

struct CandidateOutcome
{
    std::optional<FpResult> fp;
    bool feasible = false;
};

CandidateOutcome solve_candidate(const ChannelSet &channel, const SystemConfig &config,
                                 const IlluminationPattern &pattern)
{
    CandidateOutcome out;
    try
    {
        const RMatrix w = pattern.weights();
        auto fp = run_fp(channel, w, config, initial_precoders(channel, w, config), config.solver.t1,
                         config.solver.plateau_tol);
        out.feasible = fp.report.all_gamma_satisfied() && fp.status != SolveStatus::Infeasible;
        out.fp = std::move(fp);
    }
    catch (const Error &)
    {
        out.fp.reset();
    }
    return out;
}

IprsResult reduce(const std::vector<IlluminationPattern> &candidates, std::vector<CandidateOutcome> &outcomes)
{
    IprsResult result;
    const auto count = static_cast<Eigen::Index>(candidates.size());
    result.candidates_evaluated = static_cast<int>(count);
    result.per_candidate_totals = RVector::Constant(count, -std::numeric_limits<double>::infinity());
    int best_feasible = -1;
    int best_any = -1;
    for (Eigen::Index i = 0; i < count; ++i)
    {
        const auto &o = outcomes[static_cast<std::size_t>(i)];
        if (!o.fp)
        {
            ++result.candidates_infeasible;
            continue;
        }
        const double total = o.fp->report.total;
        result.per_candidate_totals[i] = total;
        if (!o.feasible)
            ++result.candidates_infeasible;
        else if (best_feasible < 0 || total > result.per_candidate_totals[best_feasible])
            best_feasible = static_cast<int>(i);
        if (best_any < 0 || total > result.per_candidate_totals[best_any])
            best_any = static_cast<int>(i);
    }
    if (best_any < 0)
        throw Error(ErrorKind::NoCandidates, "every candidate failed to solve");
    const int best = best_feasible >= 0 ? best_feasible : best_any;
    result.feasible = best_feasible >= 0;
    result.best_pattern = candidates[static_cast<std::size_t>(best)];
    result.best_precoders = std::move(outcomes[static_cast<std::size_t>(best)].fp->precoders);
    result.best_report = std::move(outcomes[static_cast<std::size_t>(best)].fp->report);
    return result;
}

void check_inputs(const SystemConfig &config, const std::vector<IlluminationPattern> &candidates)
{
    config.validate();
    if (candidates.empty())
        throw Error(ErrorKind::NoCandidates, "no candidate patterns");
}

std::vector<IlluminationPattern> draw(const SystemConfig &config, int i_candidates, std::mt19937_64 &rng)
{
    if (i_candidates < 1)
        throw Error(ErrorKind::NoCandidates, "at least one candidate is required");
    std::vector<IlluminationPattern> drawn;
    drawn.reserve(static_cast<std::size_t>(i_candidates));
    for (int i = 0; i < i_candidates; ++i)
        drawn.push_back(random_pattern(config.n_s, config.k_beams, config.m_slots, rng));
    return drawn;
}

} // namespace

std::vector<IlluminationPattern> dedupe_candidates(const std::vector<IlluminationPattern> &candidates)
{
    std::vector<IlluminationPattern> out;
    for (const auto &c : candidates)
    {
        bool seen = false;
        for (const auto &o : out)
            if (o == c)
            {
                seen = true;
                break;
            }
        if (!seen)
            out.push_back(c);
    }
    return out;
}

IprsResult evaluate_candidates(const ChannelSet &channel, const SystemConfig &config,
                               const std::vector<IlluminationPattern> &candidates)
{
    check_inputs(config, candidates);
    std::vector<CandidateOutcome> outcomes(candidates.size());
    const auto count = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i)
        outcomes[static_cast<std::size_t>(i)] = solve_candidate(channel, config, candidates[static_cast<std::size_t>(i)]);
    return reduce(candidates, outcomes);
}

IprsResult evaluate_candidates_serial(const ChannelSet &channel, const SystemConfig &config,
                                      const std::vector<IlluminationPattern> &candidates)
{
    check_inputs(config, candidates);
    std::vector<CandidateOutcome> outcomes;
    outcomes.reserve(candidates.size());
    for (const auto &c : candidates)
        outcomes.push_back(solve_candidate(channel, config, c));
    return reduce(candidates, outcomes);
}

IprsResult run_iprs(const ChannelSet &channel, const SystemConfig &config, int i_candidates, std::mt19937_64 &rng)
{
    const auto drawn = draw(config, i_candidates, rng);
    auto result = evaluate_candidates(channel, config, dedupe_candidates(drawn));
    result.candidates_drawn = i_candidates;
    return result;
}

IprsResult run_iprs_serial(const ChannelSet &channel, const SystemConfig &config, int i_candidates,
                           std::mt19937_64 &rng)
{
    const auto drawn = draw(config, i_candidates, rng);
    auto result = evaluate_candidates_serial(channel, config, dedupe_candidates(drawn));
    result.candidates_drawn = i_candidates;
    return result;
}

} // namespace beamhop
