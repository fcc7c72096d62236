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

#ifndef BEAMHOP_BARRIER_HPP
#define BEAMHOP_BARRIER_HPP

#include "beamhop/types.hpp"

#include <vector>

namespace beamhop::barrier
{

struct Evaluation
{
    double objective = 0.0;
    RVector gradient;    // d objective / dz
    RVector constraints; // g_i(z), feasible when > 0
    RMatrix jacobian;    // row i is d g_i / dz
};

// maximize f(z) subject to g_i(z) >= 0 with f and every g_i concave and twice differentiable.
class ConcaveProgram
{
public:
    virtual ~ConcaveProgram() = default;

    virtual Eigen::Index dim() const = 0;
    virtual Eigen::Index num_constraints() const = 0;

    // Returns false when z lies outside the domain of f or of some g_i.
    virtual bool evaluate(const RVector &z, Evaluation &out, bool derivatives) const = 0;

    // hessian += objective_weight * D^2 f(z) + sum_i weights[i] * D^2 g_i(z)
    virtual void add_curvature(const RVector &z, double objective_weight, const RVector &weights,
                               RMatrix &hessian) const = 0;

    // Consecutive variable blocks the curvature never couples. Constraints spanning several
    // blocks are allowed.
    virtual std::vector<Eigen::Index> block_sizes() const { return {dim()}; }
};

struct Options
{
    double tau_initial = 1.0;
    double tau_factor = 0.2;
    double gap_tolerance = 1e-6; // stop once num_constraints * tau drops below this
    double newton_tolerance = 1e-10;
    int max_newton_steps = 2000;
};

struct Result
{
    RVector z;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Optimal;
    double gap_bound = 0.0;  // num_constraints * final tau
    double min_slack = 0.0;  // smallest phase-one constraint value at z
    int newton_steps = 0;
};

// Log-barrier path following with damped Newton steps.
//
// Constraints flagged in `needs_phase_one` may be violated at z0; a phase-one problem
// (maximize s subject to g_i - s >= 0) first searches for a strictly feasible point. If
// none exists the phase-one maximizer is returned with status Infeasible. All other
// constraints must hold strictly at z0.
Result maximize(const ConcaveProgram &problem, const RVector &z0, const std::vector<bool> &needs_phase_one,
                const Options &options);

} // namespace beamhop::barrier

#endif
