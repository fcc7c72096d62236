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
#include "beamhop/fp_engine.hpp"

#include <cmath>
#include <numbers>

namespace beamhop
{

namespace
{

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

// x = origin + basis * y. The inequality mode uses the identity map.
class IpProgram final : public barrier::ConcaveProgram
{
public:
    IpProgram(const IpVectorization &vec, const RVector &gamma, int k, RVector origin, RMatrix basis,
              bool affine)
        : vec_(vec), origin_(std::move(origin)), basis_(std::move(basis)), k_(k), affine_(affine)
    {
        total_ = vec.n_s * vec.m_slots;
        for (int n = 0; n < vec.n_s; ++n)
            if (gamma.size() > n && gamma[n] > 0.0)
            {
                gamma_beams_.push_back(n);
                gamma_.push_back(gamma[n]);
            }
        num_constraints_ = 2 * total_ + static_cast<int>(gamma_beams_.size());
        if (!affine_)
            num_constraints_ += vec.m_slots + vec.n_s;
    }

    Eigen::Index dim() const override { return basis_.cols(); }
    Eigen::Index num_constraints() const override { return num_constraints_; }
    int first_gamma_row() const { return num_constraints_ - static_cast<int>(gamma_beams_.size()); }

    RVector to_x(const RVector &y) const { return origin_ + basis_ * y; }

    std::vector<Eigen::Index> block_sizes() const override
    {
        if (affine_)
            return {dim()};
        return std::vector<Eigen::Index>(static_cast<std::size_t>(vec_.m_slots), vec_.n_s);
    }

    bool evaluate(const RVector &y, barrier::Evaluation &out, bool derivatives) const override
    {
        const RVector x = to_x(y);
        RVector args;
        if (!log_arguments(x, args))
            return false;
        out.objective = 0.0;
        out.constraints.resize(num_constraints_);
        RMatrix jac_x;
        RVector grad_x;
        if (derivatives)
        {
            jac_x = RMatrix::Zero(num_constraints_, total_);
            grad_x = RVector::Zero(total_);
        }
        int row = 0;
        for (int i = 0; i < total_; ++i)
        {
            out.constraints[row] = x[i] - kRelaxedFloor;
            if (derivatives)
                jac_x(row, i) = 1.0;
            ++row;
            out.constraints[row] = 1.0 - x[i];
            if (derivatives)
                jac_x(row, i) = -1.0;
            ++row;
        }
        if (!affine_)
        {
            for (int t = 0; t < vec_.m_slots; ++t)
            {
                out.constraints[row] = k_ - x.segment(vec_.n_s * t, vec_.n_s).sum();
                if (derivatives)
                    jac_x.row(row).segment(vec_.n_s * t, vec_.n_s).setConstant(-1.0);
                ++row;
            }
            for (int n = 0; n < vec_.n_s; ++n)
            {
                double sum = -1.0;
                for (int t = 0; t < vec_.m_slots; ++t)
                {
                    sum += x[vec_.index(n, t)];
                    if (derivatives)
                        jac_x(row, vec_.index(n, t)) = 1.0;
                }
                out.constraints[row] = sum;
                ++row;
            }
        }
        RVector beam_sum = RVector::Zero(vec_.n_s);
        for (int i = 0; i < total_; ++i)
        {
            if (!active(i))
                continue;
            const double g = std::log(args[i]) * kInvLn2;
            out.objective += g;
            beam_sum[i % vec_.n_s] += g;
            if (derivatives)
            {
                const RVector grad_g = arg_gradient(x, i) * (kInvLn2 / args[i]);
                grad_x += grad_g;
                const int c = gamma_row(i % vec_.n_s);
                if (c >= 0)
                    jac_x.row(c) += grad_g.transpose();
            }
        }
        for (std::size_t j = 0; j < gamma_beams_.size(); ++j)
            out.constraints[row + static_cast<int>(j)] = beam_sum[gamma_beams_[j]] - gamma_[j];
        if (derivatives)
        {
            out.gradient = basis_.transpose() * grad_x;
            out.jacobian = jac_x * basis_;
        }
        return std::isfinite(out.objective);
    }

    void add_curvature(const RVector &y, double objective_weight, const RVector &weights,
                       RMatrix &hessian) const override
    {
        const RVector x = to_x(y);
        RVector args;
        if (!log_arguments(x, args))
            return;
        RMatrix h = RMatrix::Zero(total_, total_);
        for (int i = 0; i < total_; ++i)
        {
            if (!active(i))
                continue;
            double coeff = objective_weight;
            const int c = gamma_row(i % vec_.n_s);
            if (c >= 0)
                coeff += weights[c];
            if (coeff == 0.0)
                continue;
            const double a = args[i];
            const double scale = coeff * kInvLn2;
            const RVector grad_a = arg_gradient(x, i);
            h.noalias() -= (scale / (a * a)) * grad_a * grad_a.transpose();
            const double v = vec_.v[static_cast<std::size_t>(i)][i];
            h(i, i) -= (scale / a) * v / (4.0 * x[i] * std::sqrt(x[i]));
        }
        hessian.noalias() += basis_.transpose() * h * basis_;
    }

private:
    bool active(int i) const { return std::norm(vec_.xi.data()[i]) > 0.0; }

    int gamma_row(int n) const
    {
        for (std::size_t j = 0; j < gamma_beams_.size(); ++j)
            if (gamma_beams_[j] == n)
                return first_gamma_row() + static_cast<int>(j);
        return -1;
    }

    bool log_arguments(const RVector &x, RVector &args) const
    {
        if (!(x.minCoeff() > 0.0))
            return false;
        args = RVector::Ones(total_);
        for (int i = 0; i < total_; ++i)
        {
            if (!active(i))
                continue;
            const double xi_sq = std::norm(vec_.xi.data()[i]);
            args[i] = 1.0 + std::sqrt(x[i]) * vec_.v[static_cast<std::size_t>(i)][i] -
                      xi_sq * (x.dot(vec_.d[static_cast<std::size_t>(i)]) + vec_.sigma_sq);
            if (!(args[i] > 0.0))
                return false;
        }
        return true;
    }

    RVector arg_gradient(const RVector &x, int i) const
    {
        RVector g = -std::norm(vec_.xi.data()[i]) * vec_.d[static_cast<std::size_t>(i)];
        g[i] += vec_.v[static_cast<std::size_t>(i)][i] / (2.0 * std::sqrt(x[i]));
        return g;
    }

    const IpVectorization &vec_;
    RVector origin_;
    RMatrix basis_;
    int k_;
    bool affine_;
    int total_ = 0;
    int num_constraints_ = 0;
    std::vector<int> gamma_beams_;
    std::vector<double> gamma_;
};

bool strictly_inside(const RVector &x, double lo, double hi)
{
    return x.size() > 0 && x.minCoeff() > lo && x.maxCoeff() < hi;
}

} // namespace

IpSolution solve_ip_subproblem(const IpVectorization &vec, const RVector &gamma, int k, const SystemConfig &config,
                               const RelaxedPattern *warm_start)
{
    const int n_s = vec.n_s;
    const int m = vec.m_slots;
    const int total = n_s * m;
    if (n_s <= 0 || m <= 0 || static_cast<int>(vec.v.size()) != total || static_cast<int>(vec.d.size()) != total)
        throw Error(ErrorKind::DimensionMismatch, "pattern vectorization is inconsistent");
    if (gamma.size() != 0 && gamma.size() != n_s)
        throw Error(ErrorKind::DimensionMismatch, "gamma must have one entry per beam position");
    if (k * m < n_s)
        throw Error(ErrorKind::InvalidDimensions, "K * M must cover every beam position");

    IpSolution solution;
    solution.pattern.n_s = n_s;
    solution.pattern.m_slots = m;

    if (m == 1)
    {
        solution.pattern.x_vec = RVector::Ones(total);
        RVector g = vec.evaluate(solution.pattern.x_vec);
        solution.objective = g.sum();
        for (int n = 0; n < n_s; ++n)
            if (gamma.size() && g[n] < gamma[n])
                solution.status = SolveStatus::Infeasible;
        return solution;
    }

    const bool affine = k * m == n_s;
    RVector origin;
    RMatrix basis;
    RVector y0;
    if (affine)
    {
        // Equalities: every slot holds K, every beam sums to 1. Work in their null space.
        RMatrix a = RMatrix::Zero(m + n_s, total);
        for (int t = 0; t < m; ++t)
            a.row(t).segment(n_s * t, n_s).setOnes();
        for (int n = 0; n < n_s; ++n)
            for (int t = 0; t < m; ++t)
                a(m + n, vec.index(n, t)) = 1.0;
        Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
        svd.setThreshold(1e-10);
        const auto rank = svd.rank();
        basis = svd.matrixV().rightCols(total - rank);
        origin = RVector::Constant(total, 1.0 / m);
        y0 = RVector::Zero(basis.cols());
        if (warm_start && warm_start->x_vec.size() == total)
        {
            const RVector y = basis.transpose() * (warm_start->x_vec - origin);
            if (strictly_inside(origin + basis * y, kRelaxedFloor, 1.0) &&
                (origin + basis * y - warm_start->x_vec).norm() < 1e-8)
                y0 = y;
        }
    }
    else
    {
        basis = RMatrix::Identity(total, total);
        origin = RVector::Zero(total);
        const double c = (1.0 / m + std::min(static_cast<double>(k) / n_s, 1.0)) / 2.0;
        y0 = RVector::Constant(total, c);
        if (warm_start && warm_start->x_vec.size() == total && strictly_inside(warm_start->x_vec, kRelaxedFloor, 1.0))
        {
            const RMatrix w = warm_start->x_vec.reshaped(n_s, m);
            if ((w.colwise().sum().array() < k).all() && (w.rowwise().sum().array() > 1.0).all())
                y0 = warm_start->x_vec;
        }
    }

    IpProgram program(vec, gamma, k, origin, basis, affine);
    barrier::Evaluation probe;
    if (!program.evaluate(y0, probe, false))
        throw Error(ErrorKind::NonPositiveLogArgument, "pattern start point has a non-positive log argument");

    std::vector<bool> phase_one(static_cast<std::size_t>(program.num_constraints()), false);
    for (std::size_t i = static_cast<std::size_t>(program.first_gamma_row()); i < phase_one.size(); ++i)
        phase_one[i] = true;

    barrier::Options options;
    options.gap_tolerance = config.solver.eps2;
    options.max_newton_steps = config.solver.max_newton_steps;
    const auto res = barrier::maximize(program, y0, phase_one, options);

    solution.pattern.x_vec = program.to_x(res.z).cwiseMax(0.0).cwiseMin(1.0);
    solution.status = res.status;
    solution.objective = res.objective;
    solution.gap_bound = res.gap_bound;
    solution.newton_steps = res.newton_steps;
    return solution;
}

} // namespace beamhop
