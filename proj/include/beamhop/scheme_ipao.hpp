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

#ifndef BEAMHOP_SCHEME_IPAO_HPP
#define BEAMHOP_SCHEME_IPAO_HPP

#include "beamhop/core_model.hpp"
#include "beamhop/pattern.hpp"
#include "beamhop/types.hpp"

#include <random>
#include <utility>
#include <vector>

namespace beamhop
{

struct IpaoResult
{
    IlluminationPattern pattern;
    PrecoderSet precoders;
    RateReport report;
    std::vector<std::pair<int, double>> outer_trace; // (outer iteration, relaxed objective); entry 0 is the start
    RelaxedPattern relaxed;                          // last relaxed pattern before quantization
    double quantization_delta = 0.0;                 // relaxed objective minus final binary total
    SolveStatus status = SolveStatus::Optimal;       // worst status seen in any subproblem
    bool feasible = true;                            // final pair meets every gamma
};

// Sum over (n, t) of the rate with continuous pattern weights.
double relaxed_objective(const ChannelSet &channel, const PrecoderSet &precoders, const RelaxedPattern &relaxed,
                         double sigma_sq);

// Relax, alternate beamformer and pattern updates, quantize, repair coverage, and
// re-solve the beamformers at the binary pattern. `rng` seeds the per-slot starting
// precoders.
IpaoResult run_ipao(const ChannelSet &channel, const SystemConfig &config, std::mt19937_64 &rng);

} // namespace beamhop

#endif
