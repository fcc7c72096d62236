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

#ifndef BEAMHOP_CORE_MODEL_HPP
#define BEAMHOP_CORE_MODEL_HPP

#include "beamhop/pattern.hpp"
#include "beamhop/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace beamhop
{

struct RateReport
{
    RMatrix rates;        // N_s x M, bit/s/Hz
    RVector per_beam_sum; // sum over slots
    double total = 0.0;
    std::vector<bool> gamma_satisfied;

    double min_per_beam() const { return per_beam_sum.size() ? per_beam_sum.minCoeff() : 0.0; }
    bool all_gamma_satisfied() const;
};

// Analog/digital pair of one slot. Effective precoder is f * q.
struct HybridPrecoder
{
    CMatrix f; // N_BS x N_RF, unit modulus
    CMatrix q; // N_RF x N_s
    double residual = 0.0;              // ||P - F Q||_F / ||P||_F before power normalization
    std::vector<double> residual_trace; // relative residual after each alternation
    bool ridge_used = false;

    CMatrix effective() const { return f * q; }
};

std::vector<CMatrix> effective_precoders(const std::vector<HybridPrecoder> &hybrid);

// Per-beam, per-slot achievable rate with binary or relaxed illumination weights.
// The OpenMP kernel splits the work over slots; rate_matrix_serial is the reference
// loop the parallel kernel is tested against.
RateReport rate_matrix(const ChannelSet &channel, const std::vector<CMatrix> &precoders,
                       const RMatrix &weights, double sigma_sq, const RVector &gamma = RVector());
RateReport rate_matrix(const ChannelSet &channel, const PrecoderSet &precoders,
                       const RMatrix &weights, double sigma_sq, const RVector &gamma = RVector());
RateReport rate_matrix_serial(const ChannelSet &channel, const std::vector<CMatrix> &precoders,
                              const RMatrix &weights, double sigma_sq, const RVector &gamma = RVector());

struct FeasibilityVerdict
{
    std::vector<int> gamma_violations;        // beams
    std::vector<int> power_violations;        // slots
    std::vector<int> unit_modulus_violations; // slots
    std::vector<int> beam_count_violations;   // slots
    bool non_binary = false;

    bool feasible() const
    {
        return gamma_violations.empty() && power_violations.empty() && unit_modulus_violations.empty() &&
               beam_count_violations.empty() && !non_binary;
    }
    std::vector<std::string> describe() const;
};

inline constexpr double kFeasibilitySlack = 1e-9;

// Fully-digital constraint set.
FeasibilityVerdict check_feasibility(const RateReport &report, const IlluminationPattern &pattern,
                                     const PrecoderSet &precoders, const SystemConfig &config);
// Hybrid constraint set: power is measured on F_t Q_t and F_t must be unit modulus.
FeasibilityVerdict check_feasibility(const RateReport &report, const IlluminationPattern &pattern,
                                     const std::vector<HybridPrecoder> &hybrid, const SystemConfig &config);

} // namespace beamhop

#endif
