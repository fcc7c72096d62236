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

#ifndef BEAMHOP_FP_ENGINE_HPP
#define BEAMHOP_FP_ENGINE_HPP

#include "beamhop/core_model.hpp"
#include "beamhop/pattern.hpp"
#include "beamhop/types.hpp"

#include <vector>

namespace beamhop
{

enum class AuxRole
{
    Mu,   // fixed-pattern beamforming
    Zeta, // beamforming at a relaxed pattern
    Xi    // pattern update at fixed beamformers
};

// One complex auxiliary per (beam, slot); zero wherever the pattern weight is zero.
struct AuxiliaryVars
{
    CMatrix values; // N_s x M
    AuxRole role = AuxRole::Mu;
};

// Quadratic-transform auxiliaries at their stationary value:
//   aux(n,t) = sqrt(x(n,t)) h_n p_n^t / (sum_{k!=n} x(k,t) |h_n p_k^t|^2 + sigma^2)
AuxiliaryVars update_mu(const ChannelSet &channel, const PrecoderSet &precoders, const RMatrix &weights,
                        double sigma_sq, AuxRole role = AuxRole::Mu);
AuxiliaryVars update_xi(const ChannelSet &channel, const PrecoderSet &precoders, const RelaxedPattern &relaxed,
                        double sigma_sq);

// Surrogate rate per (beam, slot):
//   log2(1 + 2 Re{sqrt(x) conj(aux) h_n p_n} - |aux|^2 (interference + sigma^2))
// Throws NonPositiveLogArgument when the log argument is not positive.
RMatrix surrogate_f(const ChannelSet &channel, const PrecoderSet &precoders, const RMatrix &weights,
                    const AuxiliaryVars &aux, double sigma_sq);

// Linearization of the pattern subproblem in the stacked relaxed variable. For the
// (n, t) entry (stacked index n + N_s t):
//   v[i] holds 2 Re{conj(xi) h_n p_n^t} at index i and zero elsewhere,
//   d[i] holds |h_n p_k^t|^2 at index k + N_s t for k != n and zero elsewhere.
struct IpVectorization
{
    int n_s = 0;
    int m_slots = 0;
    double sigma_sq = 1.0;
    CMatrix xi;              // N_s x M
    std::vector<RVector> v;  // one length-(M N_s) vector per stacked index
    std::vector<RVector> d;  // one length-(M N_s) vector per stacked index
    RMatrix a_matrix;        // [I, I, ..., I], N_s x (M N_s)

    int index(int n, int t) const { return n + n_s * t; }

    // g(n,t) = log2(1 + sqrt(x)^T v - |xi|^2 (x^T d + sigma^2)) for every stacked index.
    RVector evaluate(const RVector &x) const;
};

IpVectorization build_ip_vectorization(const ChannelSet &channel, const PrecoderSet &precoders,
                                       const AuxiliaryVars &aux_xi, double sigma_sq);

// Matched filters with the slot budget split evenly across lit beams: each lit beam gets
// P_tot / max(K, lit count), so a slot with exactly K lit beams uses the full budget.
PrecoderSet initial_precoders(const ChannelSet &channel, const RMatrix &weights, const SystemConfig &config);

struct BeamformerSolution
{
    PrecoderSet precoders;
    SolveStatus status = SolveStatus::Optimal;
    double objective = 0.0;  // sum of surrogate rates at the returned point
    double gap_bound = 0.0;  // duality-gap bound of the barrier path
    double min_gamma_slack = 0.0;
    int newton_steps = 0;
};

// Concave surrogate problem at fixed auxiliaries: maximize sum f subject to per-beam
// surrogate sums >= gamma and per-slot power <= P_tot. Solved in the row space of H
// (precoder components orthogonal to every h_n only spend power), by log barrier.
// `warm_start` must be the point the auxiliaries were computed at, or close to it.
BeamformerSolution solve_beamformer_subproblem(const ChannelSet &channel, const RMatrix &weights,
                                               const AuxiliaryVars &aux, const SystemConfig &config,
                                               const PrecoderSet *warm_start = nullptr);

struct IpSolution
{
    RelaxedPattern pattern;
    SolveStatus status = SolveStatus::Optimal;
    double objective = 0.0;
    double gap_bound = 0.0;
    int newton_steps = 0;
};

inline constexpr double kRelaxedFloor = 1e-8;

// Concave relaxed-pattern problem: maximize sum g subject to per-beam sums >= gamma,
// slot sums <= K, beam sums >= 1 and floor <= x <= 1. When K*M == N_s the slot and beam
// constraints can only hold with equality, so the solve runs on that affine set.
IpSolution solve_ip_subproblem(const IpVectorization &vectorization, const RVector &gamma, int k,
                               const SystemConfig &config, const RelaxedPattern *warm_start = nullptr);

struct FpResult
{
    PrecoderSet precoders;
    RateReport report;
    std::vector<double> trace; // total rate after each iteration, trace[0] is the start point
    SolveStatus status = SolveStatus::Optimal;
    int iterations = 0;
};

// Alternates auxiliary updates and subproblem solves. Stops after `max_iterations` or
// once the relative change of the total rate drops below `plateau_tol` (0 disables).
FpResult run_fp(const ChannelSet &channel, const RMatrix &weights, const SystemConfig &config, PrecoderSet start,
                int max_iterations, double plateau_tol, AuxRole role = AuxRole::Mu);

} // namespace beamhop

#endif
