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

#include "beamhop/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace beamhop::barrier
{

namespace
{

// maximize s over (z, s) with flagged constraints shifted by s.
class PhaseOne final : public ConcaveProgram
{
public:
    PhaseOne(const ConcaveProgram &inner, const std::vector<bool> &mask) : inner_(inner), mask_(mask) {}

    Eigen::Index dim() const override { return inner_.dim() + 1; }
    Eigen::Index num_constraints() const override { return inner_.num_constraints(); }

    bool evaluate(const RVector &z, Evaluation &out, bool derivatives) const override
    {
        const Eigen::Index n = inner_.dim();
        Evaluation ev;
        if (!inner_.evaluate(z.head(n), ev, derivatives))
            return false;
        const double s = z[n];
        out.objective = s;
        out.constraints = ev.constraints;
        for (Eigen::Index i = 0; i < ev.constraints.size(); ++i)
            if (mask_[static_cast<std::size_t>(i)])
                out.constraints[i] -= s;
        if (derivatives)
        {
            out.gradient = RVector::Zero(n + 1);
            out.gradient[n] = 1.0;
            out.jacobian = RMatrix::Zero(ev.constraints.size(), n + 1);
            out.jacobian.leftCols(n) = ev.jacobian;
            for (Eigen::Index i = 0; i < ev.constraints.size(); ++i)
                if (mask_[static_cast<std::size_t>(i)])
                    out.jacobian(i, n) = -1.0;
        }
        return true;
    }

    void add_curvature(const RVector &z, double, const RVector &weights, RMatrix &hessian) const override
    {
        const Eigen::Index n = inner_.dim();
        RMatrix block = hessian.topLeftCorner(n, n);
        inner_.add_curvature(z.head(n), 0.0, weights, block);
        hessian.topLeftCorner(n, n) = block;
    }

    std::vector<Eigen::Index> block_sizes() const override
    {
        auto sizes = inner_.block_sizes();
        sizes.push_back(1);
        return sizes;
    }

private:
    const ConcaveProgram &inner_;
    const std::vector<bool> &mask_;
};

// Flagged constraints loosened by `shift`, used for best-effort solves after phase one fails.
class Shifted final : public ConcaveProgram
{
public:
    Shifted(const ConcaveProgram &inner, const std::vector<bool> &mask, double shift)
        : inner_(inner), mask_(mask), shift_(shift)
    {
    }

    Eigen::Index dim() const override { return inner_.dim(); }
    Eigen::Index num_constraints() const override { return inner_.num_constraints(); }

    bool evaluate(const RVector &z, Evaluation &out, bool derivatives) const override
    {
        if (!inner_.evaluate(z, out, derivatives))
            return false;
        for (Eigen::Index i = 0; i < out.constraints.size(); ++i)
            if (mask_[static_cast<std::size_t>(i)])
                out.constraints[i] += shift_;
        return true;
    }

    void add_curvature(const RVector &z, double objective_weight, const RVector &weights,
                       RMatrix &hessian) const override
    {
        inner_.add_curvature(z, objective_weight, weights, hessian);
    }

    std::vector<Eigen::Index> block_sizes() const override { return inner_.block_sizes(); }

private:
    const ConcaveProgram &inner_;
    const std::vector<bool> &mask_;
    double shift_;
};

struct PathResult
{
    RVector z;
    SolveStatus status = SolveStatus::Optimal;
    double tau = 0.0;
    int newton_steps = 0;
    bool stopped_early = false;
};

double barrier_value(const Evaluation &ev, double tau)
{
    double phi = ev.objective;
    for (Eigen::Index i = 0; i < ev.constraints.size(); ++i)
        phi += tau * std::log(ev.constraints[i]);
    return phi;
}

bool strictly_feasible(const Evaluation &ev)
{
    for (Eigen::Index i = 0; i < ev.constraints.size(); ++i)
        if (!(ev.constraints[i] > 0.0) || !std::isfinite(ev.constraints[i]))
            return false;
    return std::isfinite(ev.objective);
}

// Cholesky factor of `a + shift I` with the smallest tried shift (possibly 0) that makes it
// numerically positive definite.
Eigen::LLT<RMatrix> robust_llt(const RMatrix &a, double &shift)
{
    shift = 0.0;
    Eigen::LLT<RMatrix> llt(a);
    if (llt.info() == Eigen::Success)
        return llt;
    const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    RMatrix shifted = a;
    for (double delta = 1e-12 * scale; delta < 1e6 * scale; delta *= 10.0)
    {
        shifted.diagonal() = a.diagonal().array() + delta;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success)
        {
            shift = delta;
            return llt;
        }
    }
    shift = scale;
    shifted = RMatrix::Identity(a.rows(), a.cols()) * scale;
    llt.compute(shifted);
    return llt;
}

RVector dense_direction(RMatrix neg_hessian, const RVector &grad)
{
    double shift = 0.0;
    return robust_llt(neg_hessian, shift).solve(grad);
}

// Solves (-H) dz = grad where -H = A + sum_i w_i j_i j_i^T. A (the negated curvature) is
// block diagonal over `blocks`; constraint rows confined to one block are folded into it and
// the rest go through the Woodbury identity. A block that needs a diagonal shift to factor
// gets the shift removed again as extra low-rank terms.
RVector newton_direction(RMatrix neg_curvature, const RMatrix &jacobian, const RVector &weights,
                         const std::vector<Eigen::Index> &blocks, const RVector &grad)
{
    const Eigen::Index dim = grad.size();
    const Eigen::Index m = weights.size();
    if (blocks.size() <= 1)
    {
        if (m > 0)
            neg_curvature.noalias() += jacobian.transpose() * weights.asDiagonal() * jacobian;
        return dense_direction(std::move(neg_curvature), grad);
    }
    const RMatrix full = neg_curvature;

    std::vector<Eigen::Index> offsets(blocks.size() + 1, 0);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        offsets[b + 1] = offsets[b] + blocks[b];
    std::vector<Eigen::Index> global_rows;
    for (Eigen::Index i = 0; i < m; ++i)
    {
        Eigen::Index first = -1, last = -1;
        for (Eigen::Index c = 0; c < dim; ++c)
            if (jacobian(i, c) != 0.0)
            {
                if (first < 0)
                    first = c;
                last = c;
            }
        if (first < 0)
            continue;
        const auto block = std::upper_bound(offsets.begin(), offsets.end(), first) - offsets.begin() - 1;
        if (last < offsets[static_cast<std::size_t>(block) + 1])
        {
            const Eigen::Index off = offsets[static_cast<std::size_t>(block)];
            const Eigen::Index len = blocks[static_cast<std::size_t>(block)];
            const RVector seg = jacobian.row(i).segment(off, len).transpose();
            neg_curvature.block(off, off, len, len).noalias() += weights[i] * seg * seg.transpose();
        }
        else
        {
            global_rows.push_back(i);
        }
    }

    std::vector<Eigen::LLT<RMatrix>> factors;
    std::vector<std::pair<Eigen::Index, double>> corrections; // (variable, -shift)
    factors.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b)
    {
        double shift = 0.0;
        factors.push_back(robust_llt(neg_curvature.block(offsets[b], offsets[b], blocks[b], blocks[b]), shift));
        if (shift > 0.0)
            for (Eigen::Index i = offsets[b]; i < offsets[b + 1]; ++i)
                corrections.emplace_back(i, -shift);
    }
    auto solve_a = [&](const RMatrix &rhs) {
        RMatrix out(rhs.rows(), rhs.cols());
        for (std::size_t b = 0; b < blocks.size(); ++b)
            out.middleRows(offsets[b], blocks[b]) = factors[b].solve(rhs.middleRows(offsets[b], blocks[b]));
        return out;
    };

    const RVector x0 = solve_a(grad);
    const auto k = static_cast<Eigen::Index>(global_rows.size() + corrections.size());
    if (k == 0)
        return x0;
    RMatrix g = RMatrix::Zero(k, dim);
    RVector inv_w(k);
    for (std::size_t r = 0; r < global_rows.size(); ++r)
    {
        g.row(static_cast<Eigen::Index>(r)) = jacobian.row(global_rows[r]);
        inv_w[static_cast<Eigen::Index>(r)] = 1.0 / weights[global_rows[r]];
    }
    for (std::size_t c = 0; c < corrections.size(); ++c)
    {
        const auto r = static_cast<Eigen::Index>(global_rows.size() + c);
        g(r, corrections[c].first) = 1.0;
        inv_w[r] = 1.0 / corrections[c].second;
    }
    const RMatrix y = solve_a(g.transpose());
    RMatrix schur = g * y;
    schur.diagonal() += inv_w;
    RVector dz;
    if (corrections.empty())
        dz = x0 - y * schur.ldlt().solve(g * x0);
    else
        dz = x0 - y * schur.fullPivLu().solve(g * x0);
    if (dz.allFinite())
        return dz;
    RMatrix dense = full;
    if (m > 0)
        dense.noalias() += jacobian.transpose() * weights.asDiagonal() * jacobian;
    return dense_direction(std::move(dense), grad);
}

// stop_when(ev, tau, centered) ends the path early; `centered` marks the end of a centering stage.
using StopRule = std::function<bool(const Evaluation &, double, bool)>;

PathResult follow_path(const ConcaveProgram &problem, RVector z, const Options &options, int step_budget,
                       const StopRule &stop_when)
{
    PathResult result;
    const Eigen::Index m = problem.num_constraints();
    const Eigen::Index dim = problem.dim();
    const auto blocks = problem.block_sizes();
    double tau = options.tau_initial;
    Evaluation ev;
    Evaluation trial;
    const double armijo = 0.01;

    while (true)
    {
        // Centering at the current tau.
        while (true)
        {
            if (!problem.evaluate(z, ev, true) || !strictly_feasible(ev))
            {
                result.status = SolveStatus::MaxIterations;
                result.z = z;
                result.tau = tau;
                return result;
            }
            if (stop_when && stop_when(ev, tau, false))
            {
                result.z = z;
                result.tau = tau;
                result.stopped_early = true;
                return result;
            }
            if (result.newton_steps >= step_budget)
            {
                result.status = SolveStatus::MaxIterations;
                result.z = z;
                result.tau = tau;
                return result;
            }

            const RVector inv_g = ev.constraints.cwiseInverse();
            RVector grad = ev.gradient;
            if (m > 0)
                grad.noalias() += ev.jacobian.transpose() * (tau * inv_g);
            RMatrix hessian = RMatrix::Zero(dim, dim);
            problem.add_curvature(z, 1.0, tau * inv_g, hessian);
            const RVector dz =
                newton_direction(-hessian, ev.jacobian, tau * inv_g.cwiseAbs2(), blocks, grad);
            const double decrement = grad.dot(dz);
            ++result.newton_steps;
            if (!(decrement > 2.0 * std::max(options.newton_tolerance, 1e-4 * static_cast<double>(m) * tau)))
                break;

            const double phi = barrier_value(ev, tau);
            double step = 1.0;
            bool accepted = false;
            while (step > 1e-16)
            {
                const RVector candidate = z + step * dz;
                if (problem.evaluate(candidate, trial, false) && strictly_feasible(trial) &&
                    barrier_value(trial, tau) >= phi + armijo * step * decrement)
                {
                    z = candidate;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                break;
        }

        if (stop_when && problem.evaluate(z, ev, false) && stop_when(ev, tau, true))
        {
            result.stopped_early = true;
            break;
        }
        if (static_cast<double>(m) * tau < options.gap_tolerance || m == 0)
            break;
        tau *= options.tau_factor;
    }
    result.z = z;
    result.tau = tau;
    return result;
}

} // namespace

Result maximize(const ConcaveProgram &problem, const RVector &z0, const std::vector<bool> &needs_phase_one,
                const Options &options)
{
    Result result;
    const Eigen::Index m = problem.num_constraints();
    if (static_cast<Eigen::Index>(needs_phase_one.size()) != m)
        throw Error(ErrorKind::DimensionMismatch, "phase-one mask must have one flag per constraint");

    Evaluation ev;
    if (!problem.evaluate(z0, ev, false))
        throw Error(ErrorKind::Validation, "barrier start point lies outside the problem domain");

    auto min_flagged = [&](const Evaluation &e) {
        double lo = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i)
            if (needs_phase_one[static_cast<std::size_t>(i)])
                lo = std::min(lo, e.constraints[i]);
        return lo;
    };
    for (Eigen::Index i = 0; i < m; ++i)
        if (!needs_phase_one[static_cast<std::size_t>(i)] && !(ev.constraints[i] > 0.0))
            throw Error(ErrorKind::Validation, "barrier start point violates a constraint that has no phase one");

    RVector z = z0;
    int budget = options.max_newton_steps;
    if (min_flagged(ev) <= 0.0)
    {
        PhaseOne phase_one(problem, needs_phase_one);
        RVector zs(z0.size() + 1);
        zs.head(z0.size()) = z0;
        zs[z0.size()] = min_flagged(ev) - 1.0;
        // Stop once s > 0, or once s + m * tau < 0 certifies that no feasible point exists.
        const auto p1 = follow_path(phase_one, zs, options, budget, [m](const Evaluation &e, double tau, bool centered) {
            return e.objective > 0.0 || (centered && e.objective + static_cast<double>(m) * tau < 0.0);
        });
        result.newton_steps += p1.newton_steps;
        budget -= p1.newton_steps;
        z = p1.z.head(z0.size());
        problem.evaluate(z, ev, false);
        if (!p1.stopped_early || min_flagged(ev) <= 0.0)
        {
            // No strictly feasible point: maximize the objective with the flagged
            // constraints loosened just past the best slack reached.
            const double slack = min_flagged(ev);
            const double shift = -slack + 1e-3 * std::abs(slack) + 1e-12;
            Shifted loosened(problem, needs_phase_one, shift);
            const auto p2 = follow_path(loosened, z, options, std::max(budget, 1), StopRule());
            result.z = p2.z;
            result.newton_steps += p2.newton_steps;
            problem.evaluate(result.z, ev, false);
            result.objective = ev.objective;
            result.status = SolveStatus::Infeasible;
            result.min_slack = min_flagged(ev);
            result.gap_bound = static_cast<double>(m) * p2.tau;
            return result;
        }
    }

    const auto p2 = follow_path(problem, z, options, std::max(budget, 1), StopRule());
    result.z = p2.z;
    result.newton_steps += p2.newton_steps;
    result.status = p2.status;
    result.gap_bound = static_cast<double>(m) * p2.tau;
    problem.evaluate(result.z, ev, false);
    result.objective = ev.objective;
    result.min_slack = m > 0 ? min_flagged(ev) : 0.0;
    return result;
}

} // namespace beamhop::barrier
