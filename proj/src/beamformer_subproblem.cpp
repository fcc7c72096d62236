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

// Orthonormal basis U of span{h_n^H}; optimal precoders live in range(U).
struct RowSpace
{
    CMatrix basis;   // N_BS x r
    CMatrix reduced; // H U, N_s x r
};

RowSpace row_space(const ChannelSet &channel)
{
    RowSpace rs;
    Eigen::ColPivHouseholderQR<CMatrix> qr(channel.h.adjoint());
    const auto r = qr.rank();
    rs.basis = qr.householderQ() * CMatrix::Identity(channel.n_bs(), r);
    rs.reduced = channel.h * rs.basis;
    return rs;
}

// Variables: for every lit (k, t), the reduced precoder c_k^t in C^r stored as [Re; Im].
class BeamformerProgram final : public barrier::ConcaveProgram
{
public:
    BeamformerProgram(const CMatrix &reduced, const RMatrix &weights, const AuxiliaryVars &aux,
                      const SystemConfig &config)
        : weights_(weights), mu_(aux.values), sigma_sq_(config.sigma_sq), p_tot_(config.p_tot)
    {
        n_s_ = static_cast<int>(weights.rows());
        m_ = static_cast<int>(weights.cols());
        r_ = static_cast<int>(reduced.cols());
        block_ = 2 * r_;

        alpha_.resize(static_cast<std::size_t>(n_s_));
        beta_.resize(static_cast<std::size_t>(n_s_));
        outer_.resize(static_cast<std::size_t>(n_s_));
        for (int n = 0; n < n_s_; ++n)
        {
            RVector a(block_), b(block_);
            const Eigen::RowVectorXcd g = reduced.row(n);
            a << g.real().transpose(), -g.imag().transpose();
            b << g.imag().transpose(), g.real().transpose();
            outer_[static_cast<std::size_t>(n)] = a * a.transpose() + b * b.transpose();
            alpha_[static_cast<std::size_t>(n)] = std::move(a);
            beta_[static_cast<std::size_t>(n)] = std::move(b);
        }

        slot_beams_.resize(static_cast<std::size_t>(m_));
        slot_offset_.assign(static_cast<std::size_t>(m_), 0);
        local_index_ = Eigen::MatrixXi::Constant(n_s_, m_, -1);
        int offset = 0;
        for (int t = 0; t < m_; ++t)
        {
            slot_offset_[static_cast<std::size_t>(t)] = offset;
            for (int n = 0; n < n_s_; ++n)
            {
                if (weights(n, t) > 0.0)
                {
                    local_index_(n, t) = static_cast<int>(slot_beams_[static_cast<std::size_t>(t)].size());
                    slot_beams_[static_cast<std::size_t>(t)].push_back(n);
                }
            }
            offset += block_ * static_cast<int>(slot_beams_[static_cast<std::size_t>(t)].size());
            if (!slot_beams_[static_cast<std::size_t>(t)].empty())
                powered_slots_.push_back(t);
        }
        dim_ = offset;
        for (int n = 0; n < n_s_; ++n)
            if (config.gamma_of(n) > 0.0)
            {
                gamma_beams_.push_back(n);
                gamma_.push_back(config.gamma_of(n));
            }
    }

    Eigen::Index dim() const override { return dim_; }
    Eigen::Index num_constraints() const override
    {
        return static_cast<Eigen::Index>(powered_slots_.size() + gamma_beams_.size());
    }
    std::size_t num_power_constraints() const { return powered_slots_.size(); }

    std::vector<Eigen::Index> block_sizes() const override
    {
        std::vector<Eigen::Index> sizes;
        for (int t : powered_slots_)
            sizes.push_back(slot_len(t));
        return sizes;
    }

    bool evaluate(const RVector &z, barrier::Evaluation &out, bool derivatives) const override
    {
        out.objective = 0.0;
        out.constraints = RVector::Zero(num_constraints());
        if (derivatives)
        {
            out.gradient = RVector::Zero(dim_);
            out.jacobian = RMatrix::Zero(num_constraints(), dim_);
        }
        RVector beam_sum = RVector::Zero(n_s_);
        SlotTerms terms;
        for (std::size_t ps = 0; ps < powered_slots_.size(); ++ps)
        {
            const int t = powered_slots_[ps];
            const int off = slot_offset_[static_cast<std::size_t>(t)];
            const int len = slot_len(t);
            out.constraints[static_cast<Eigen::Index>(ps)] = p_tot_ - z.segment(off, len).squaredNorm();
            if (derivatives)
                out.jacobian.row(static_cast<Eigen::Index>(ps)).segment(off, len) = -2.0 * z.segment(off, len);
            if (!slot_terms(z, t, derivatives, terms))
                return false;
            const auto &beams = slot_beams_[static_cast<std::size_t>(t)];
            for (std::size_t j = 0; j < beams.size(); ++j)
            {
                const double f = std::log(terms.a[static_cast<Eigen::Index>(j)]) * kInvLn2;
                out.objective += f;
                beam_sum[beams[j]] += f;
                if (derivatives)
                {
                    const RVector grad_f = terms.grad.col(static_cast<Eigen::Index>(j)) *
                                           (kInvLn2 / terms.a[static_cast<Eigen::Index>(j)]);
                    out.gradient.segment(off, len) += grad_f;
                    const int c = gamma_row(beams[j]);
                    if (c >= 0)
                        out.jacobian.row(c).segment(off, len) += grad_f.transpose();
                }
            }
        }
        for (std::size_t i = 0; i < gamma_beams_.size(); ++i)
            out.constraints[static_cast<Eigen::Index>(powered_slots_.size() + i)] =
                beam_sum[gamma_beams_[i]] - gamma_[i];
        return std::isfinite(out.objective);
    }

    void add_curvature(const RVector &z, double objective_weight, const RVector &weights,
                       RMatrix &hessian) const override
    {
        SlotTerms terms;
        for (std::size_t ps = 0; ps < powered_slots_.size(); ++ps)
        {
            const int t = powered_slots_[ps];
            const int off = slot_offset_[static_cast<std::size_t>(t)];
            const int len = slot_len(t);
            auto block = hessian.block(off, off, len, len);
            block.diagonal().array() -= 2.0 * weights[static_cast<Eigen::Index>(ps)];
            if (!slot_terms(z, t, true, terms))
                continue;
            const auto &beams = slot_beams_[static_cast<std::size_t>(t)];
            for (std::size_t j = 0; j < beams.size(); ++j)
            {
                const int n = beams[j];
                double coeff = objective_weight;
                const int c = gamma_row(n);
                if (c >= 0)
                    coeff += weights[c];
                if (coeff == 0.0)
                    continue;
                const double a = terms.a[static_cast<Eigen::Index>(j)];
                const double scale = coeff * kInvLn2;
                // D^2 log a = D^2 a / a - grad a grad a^T / a^2, with D^2 a block diagonal.
                block.noalias() -= (scale / (a * a)) * terms.grad.col(static_cast<Eigen::Index>(j)) *
                                   terms.grad.col(static_cast<Eigen::Index>(j)).transpose();
                const double mu_sq = std::norm(mu_(n, t));
                for (std::size_t jk = 0; jk < beams.size(); ++jk)
                {
                    if (jk == j)
                        continue;
                    const int k = beams[jk];
                    const int bo = static_cast<int>(jk) * block_;
                    block.block(bo, bo, block_, block_) -=
                        (scale / a) * 2.0 * mu_sq * weights_(k, t) * outer_[static_cast<std::size_t>(n)];
                }
            }
        }
    }

    RVector start_point(const RowSpace &rs, const PrecoderSet &p) const
    {
        RVector z = RVector::Zero(dim_);
        for (int t = 0; t < m_; ++t)
        {
            const auto &beams = slot_beams_[static_cast<std::size_t>(t)];
            const int off = slot_offset_[static_cast<std::size_t>(t)];
            for (std::size_t j = 0; j < beams.size(); ++j)
            {
                const CVector c = rs.basis.adjoint() * p.slots[static_cast<std::size_t>(t)].col(beams[j]);
                const int bo = off + static_cast<int>(j) * block_;
                z.segment(bo, r_) = c.real();
                z.segment(bo + r_, r_) = c.imag();
            }
            const int len = slot_len(t);
            const double power = z.segment(off, len).squaredNorm();
            const double cap = (1.0 - 1e-4) * p_tot_;
            if (power > cap)
                z.segment(off, len) *= std::sqrt(cap / power);
        }
        return z;
    }

    PrecoderSet to_precoders(const RowSpace &rs, const RVector &z, Eigen::Index n_bs) const
    {
        PrecoderSet out;
        for (int t = 0; t < m_; ++t)
        {
            CMatrix p = CMatrix::Zero(n_bs, n_s_);
            const auto &beams = slot_beams_[static_cast<std::size_t>(t)];
            const int off = slot_offset_[static_cast<std::size_t>(t)];
            for (std::size_t j = 0; j < beams.size(); ++j)
            {
                const int bo = off + static_cast<int>(j) * block_;
                CVector c(r_);
                for (int i = 0; i < r_; ++i)
                    c[i] = cplx(z[bo + i], z[bo + r_ + i]);
                p.col(beams[j]) = rs.basis * c;
            }
            out.slots.push_back(std::move(p));
        }
        return out;
    }

private:
    struct SlotTerms
    {
        RVector a;    // log arguments of the lit beams of the slot
        RMatrix grad; // column j: gradient of a_j over the slot variables
    };

    int slot_len(int t) const { return block_ * static_cast<int>(slot_beams_[static_cast<std::size_t>(t)].size()); }

    int gamma_row(int n) const
    {
        for (std::size_t i = 0; i < gamma_beams_.size(); ++i)
            if (gamma_beams_[i] == n)
                return static_cast<int>(powered_slots_.size() + i);
        return -1;
    }

    bool slot_terms(const RVector &z, int t, bool derivatives, SlotTerms &terms) const
    {
        const auto &beams = slot_beams_[static_cast<std::size_t>(t)];
        const int off = slot_offset_[static_cast<std::size_t>(t)];
        const auto count = static_cast<Eigen::Index>(beams.size());
        terms.a.resize(count);
        if (derivatives)
            terms.grad = RMatrix::Zero(slot_len(t), count);
        // s(j, jk) = h_j c_jk as (re, im)
        RMatrix s_re(count, count), s_im(count, count);
        for (Eigen::Index j = 0; j < count; ++j)
        {
            const auto &a = alpha_[static_cast<std::size_t>(beams[static_cast<std::size_t>(j)])];
            const auto &b = beta_[static_cast<std::size_t>(beams[static_cast<std::size_t>(j)])];
            for (Eigen::Index jk = 0; jk < count; ++jk)
            {
                const auto seg = z.segment(off + jk * block_, block_);
                s_re(j, jk) = a.dot(seg);
                s_im(j, jk) = b.dot(seg);
            }
        }
        for (Eigen::Index j = 0; j < count; ++j)
        {
            const int n = beams[static_cast<std::size_t>(j)];
            const cplx mu = mu_(n, t);
            const double mu_sq = std::norm(mu);
            const cplx w = std::sqrt(weights_(n, t)) * std::conj(mu);
            double interf = 0.0;
            for (Eigen::Index jk = 0; jk < count; ++jk)
                if (jk != j)
                    interf += weights_(beams[static_cast<std::size_t>(jk)], t) *
                              (s_re(j, jk) * s_re(j, jk) + s_im(j, jk) * s_im(j, jk));
            const double a = 1.0 + 2.0 * (w.real() * s_re(j, j) - w.imag() * s_im(j, j)) -
                             mu_sq * (interf + sigma_sq_);
            if (!(a > 0.0))
                return false;
            terms.a[j] = a;
            if (!derivatives)
                continue;
            const auto &al = alpha_[static_cast<std::size_t>(n)];
            const auto &be = beta_[static_cast<std::size_t>(n)];
            terms.grad.col(j).segment(j * block_, block_) = 2.0 * (w.real() * al - w.imag() * be);
            for (Eigen::Index jk = 0; jk < count; ++jk)
            {
                if (jk == j)
                    continue;
                const double xk = weights_(beams[static_cast<std::size_t>(jk)], t);
                terms.grad.col(j).segment(jk * block_, block_) =
                    -2.0 * mu_sq * xk * (s_re(j, jk) * al + s_im(j, jk) * be);
            }
        }
        return true;
    }

    const RMatrix &weights_;
    const CMatrix &mu_;
    double sigma_sq_;
    double p_tot_;
    int n_s_ = 0;
    int m_ = 0;
    int r_ = 0;
    int block_ = 0;
    int dim_ = 0;
    std::vector<RVector> alpha_, beta_;
    std::vector<RMatrix> outer_;
    std::vector<std::vector<int>> slot_beams_;
    std::vector<int> slot_offset_;
    Eigen::MatrixXi local_index_;
    std::vector<int> powered_slots_;
    std::vector<int> gamma_beams_;
    std::vector<double> gamma_;
};

} // namespace

BeamformerSolution solve_beamformer_subproblem(const ChannelSet &channel, const RMatrix &weights,
                                               const AuxiliaryVars &aux, const SystemConfig &config,
                                               const PrecoderSet *warm_start)
{
    if (weights.rows() != channel.n_s() || aux.values.rows() != weights.rows() ||
        aux.values.cols() != weights.cols())
        throw Error(ErrorKind::DimensionMismatch, "weights and auxiliaries must be N_s x M");
    if (!aux.values.allFinite() || !weights.allFinite() || !channel.h.allFinite())
        throw Error(ErrorKind::NonFiniteInput, "beamformer subproblem inputs must be finite");

    const RowSpace rs = row_space(channel);
    BeamformerProgram program(rs.reduced, weights, aux, config);

    BeamformerSolution solution;
    if (program.dim() == 0)
    {
        solution.precoders = program.to_precoders(rs, RVector(), channel.n_bs());
        barrier::Evaluation ev;
        program.evaluate(RVector(), ev, false);
        solution.objective = ev.objective;
        for (Eigen::Index i = static_cast<Eigen::Index>(program.num_power_constraints()); i < ev.constraints.size(); ++i)
            if (ev.constraints[i] < 0.0)
                solution.status = SolveStatus::Infeasible;
        return solution;
    }

    const PrecoderSet start = warm_start ? *warm_start : initial_precoders(channel, weights, config);
    RVector z0 = program.start_point(rs, start);
    barrier::Evaluation probe;
    // The auxiliaries may not match the start point; shrink toward the origin until every
    // log argument is positive.
    int shrink = 0;
    while (!program.evaluate(z0, probe, false) && shrink < 60)
    {
        z0 *= 0.5;
        ++shrink;
    }
    if (!program.evaluate(z0, probe, false))
        throw Error(ErrorKind::NonPositiveLogArgument, "no start point with positive surrogate arguments");

    std::vector<bool> phase_one(static_cast<std::size_t>(program.num_constraints()), false);
    for (std::size_t i = program.num_power_constraints(); i < phase_one.size(); ++i)
        phase_one[i] = true;

    barrier::Options options;
    options.gap_tolerance = config.solver.eps1;
    options.max_newton_steps = config.solver.max_newton_steps;
    const auto res = barrier::maximize(program, z0, phase_one, options);

    solution.precoders = program.to_precoders(rs, res.z, channel.n_bs());
    solution.status = res.status;
    solution.objective = res.objective;
    solution.gap_bound = res.gap_bound;
    solution.min_gamma_slack = res.min_slack;
    solution.newton_steps = res.newton_steps;
    return solution;
}

} // namespace beamhop
