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

#ifndef BEAMHOP_SCHEME_IPRS_HPP
#define BEAMHOP_SCHEME_IPRS_HPP

#include "beamhop/core_model.hpp"
#include "beamhop/pattern.hpp"
#include "beamhop/types.hpp"

#include <random>
#include <vector>

namespace beamhop
{

struct IprsResult
{
    IlluminationPattern best_pattern;
    PrecoderSet best_precoders;
    RateReport best_report;
    RVector per_candidate_totals; // one entry per evaluated (deduplicated) candidate
    int candidates_drawn = 0;     // before deduplication
    int candidates_evaluated = 0;
    int candidates_infeasible = 0;
    bool feasible = true; // false when no candidate met every gamma
};

// Order-preserving removal of exact duplicates.
std::vector<IlluminationPattern> dedupe_candidates(const std::vector<IlluminationPattern> &candidates);

// Solves the fixed-pattern beamforming problem for every candidate and keeps the best
// one that meets every gamma (ties to the lowest index). Candidates run in parallel.
IprsResult evaluate_candidates(const ChannelSet &channel, const SystemConfig &config,
                               const std::vector<IlluminationPattern> &candidates);
IprsResult evaluate_candidates_serial(const ChannelSet &channel, const SystemConfig &config,
                                      const std::vector<IlluminationPattern> &candidates);

// Draws `i_candidates` random patterns, dedupes them, and evaluates the rest.
IprsResult run_iprs(const ChannelSet &channel, const SystemConfig &config, int i_candidates, std::mt19937_64 &rng);
IprsResult run_iprs_serial(const ChannelSet &channel, const SystemConfig &config, int i_candidates,
                           std::mt19937_64 &rng);

} // namespace beamhop

#endif
