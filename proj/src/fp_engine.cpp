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

#include "beamhop/fp_engine.hpp"

#include <cmath>

namespace beamhop
{

namespace
{

void check_dims(const ChannelSet &channel, const PrecoderSet &precoders, const RMatrix &weights)
{
    if (weights.rows() != channel.n_s() || weights.cols() != static_cast<Eigen::Index>(precoders.m_slots()))
        throw Error(ErrorKind::DimensionMismatch, "weights must be N_s x M with one precoder per slot");
    for (const auto &p : precoders.slots)
        if (p.rows() != channel.n_bs() || p.cols() != channel.n_s())
            throw Error(ErrorKind::DimensionMismatch, "each precoder must be N_BS x N_s");
}

double interference(const CMatrix &hp, const RMatrix &weights, Eigen::Index n, Eigen::Index t)
{
    double sum = 0.0;
    for (Eigen::Index k = 0; k < hp.cols(); ++k)
        if (k != n)
            sum += weights(k, t) * std::norm(hp(n, k));
    return sum;
}

} // namespace

AuxiliaryVars update_mu(const ChannelSet &channel, const PrecoderSet &precoders, const RMatrix &weights,
                        double sigma_sq, AuxRole role)
{
    check_dims(channel, precoders, weights);
    AuxiliaryVars aux;
    aux.role = role;
    aux.values = CMatrix::Zero(channel.n_s(), weights.cols());
    for (Eigen::Index t = 0; t < weights.cols(); ++t)
    {
        const CMatrix hp = channel.h * precoders.slots[static_cast<std::size_t>(t)];
        for (Eigen::Index n = 0; n < channel.n_s(); ++n)
        {
            const double x = weights(n, t);
            if (x == 0.0)
                continue;
            aux.values(n, t) = std::sqrt(x) * hp(n, n) / (interference(hp, weights, n, t) + sigma_sq);
        }
    }
    return aux;
}

AuxiliaryVars update_xi(const ChannelSet &channel, const PrecoderSet &precoders, const RelaxedPattern &relaxed,
                        double sigma_sq)
{
    return update_mu(channel, precoders, relaxed.as_matrix(), sigma_sq, AuxRole::Xi);
}

RMatrix surrogate_f(const ChannelSet &channel, const PrecoderSet &precoders, const RMatrix &weights,
                    const AuxiliaryVars &aux, double sigma_sq)
{
    check_dims(channel, precoders, weights);
    if (aux.values.rows() != weights.rows() || aux.values.cols() != weights.cols())
        throw Error(ErrorKind::DimensionMismatch, "auxiliaries must be N_s x M");
    if (!aux.values.allFinite())
        throw Error(ErrorKind::NonFiniteInput, "auxiliaries must be finite");
    RMatrix f = RMatrix::Zero(weights.rows(), weights.cols());
    for (Eigen::Index t = 0; t < weights.cols(); ++t)
    {
        const CMatrix hp = channel.h * precoders.slots[static_cast<std::size_t>(t)];
        for (Eigen::Index n = 0; n < weights.rows(); ++n)
        {
            const cplx mu = aux.values(n, t);
            const double arg = 1.0 + 2.0 * std::real(std::sqrt(weights(n, t)) * std::conj(mu) * hp(n, n)) -
                               std::norm(mu) * (interference(hp, weights, n, t) + sigma_sq);
            if (!(arg > 0.0))
                throw Error(ErrorKind::NonPositiveLogArgument,
                            "surrogate log argument <= 0 at beam " + std::to_string(n) + ", slot " +
                                std::to_string(t));
            f(n, t) = std::log2(arg);
        }
    }
    return f;
}

RVector IpVectorization::evaluate(const RVector &x) const
{
    const int total = n_s * m_slots;
    RVector g(total);
    for (int i = 0; i < total; ++i)
    {
        const double xi_sq = std::norm(xi.data()[i]);
        const double arg = 1.0 + x.cwiseSqrt().dot(v[static_cast<std::size_t>(i)]) -
                           xi_sq * (x.dot(d[static_cast<std::size_t>(i)]) + sigma_sq);
        g[i] = std::log2(arg);
    }
    return g;
}

IpVectorization build_ip_vectorization(const ChannelSet &channel, const PrecoderSet &precoders,
                                       const AuxiliaryVars &aux_xi, double sigma_sq)
{
    const int n_s = static_cast<int>(channel.n_s());
    const int m = static_cast<int>(precoders.m_slots());
    if (aux_xi.values.rows() != n_s || aux_xi.values.cols() != m)
        throw Error(ErrorKind::DimensionMismatch, "auxiliaries must be N_s x M");
    IpVectorization vec;
    vec.n_s = n_s;
    vec.m_slots = m;
    vec.sigma_sq = sigma_sq;
    vec.xi = aux_xi.values;
    const int total = n_s * m;
    vec.v.assign(static_cast<std::size_t>(total), RVector::Zero(total));
    vec.d.assign(static_cast<std::size_t>(total), RVector::Zero(total));
    vec.a_matrix = RMatrix::Zero(n_s, total);
    for (int t = 0; t < m; ++t)
    {
        vec.a_matrix.block(0, n_s * t, n_s, n_s).setIdentity();
        const CMatrix hp = channel.h * precoders.slots[static_cast<std::size_t>(t)];
        for (int n = 0; n < n_s; ++n)
        {
            const int i = vec.index(n, t);
            // Nonnegative at the stationary xi; the clamp removes rounding noise.
            vec.v[static_cast<std::size_t>(i)][i] =
                std::max(0.0, 2.0 * std::real(std::conj(aux_xi.values(n, t)) * hp(n, n)));
            for (int k = 0; k < n_s; ++k)
                if (k != n)
                    vec.d[static_cast<std::size_t>(i)][vec.index(k, t)] = std::norm(hp(n, k));
        }
    }
    return vec;
}

PrecoderSet initial_precoders(const ChannelSet &channel, const RMatrix &weights, const SystemConfig &config)
{
    PrecoderSet out;
    for (Eigen::Index t = 0; t < weights.cols(); ++t)
    {
        CMatrix p = CMatrix::Zero(channel.n_bs(), channel.n_s());
        int lit = 0;
        for (Eigen::Index n = 0; n < weights.rows(); ++n)
            lit += weights(n, t) > 0.0 ? 1 : 0;
        const double per_beam = config.p_tot / std::max(config.k_beams, std::max(lit, 1));
        for (Eigen::Index n = 0; n < weights.rows(); ++n)
        {
            const double norm = channel.h.row(n).norm();
            if (weights(n, t) > 0.0 && norm > 0.0)
                p.col(n) = std::sqrt(per_beam) * channel.h.row(n).adjoint() / norm;
        }
        out.slots.push_back(std::move(p));
    }
    return out;
}

namespace
{

// The barrier solver stops strictly inside the power ball. Scaling a slot up raises every
// SINR in it, so each lit slot is pushed onto the boundary before the rates are measured.
void fill_power(PrecoderSet &precoders, const RMatrix &weights, double p_tot)
{
    for (std::size_t t = 0; t < precoders.slots.size(); ++t)
    {
        const double power = precoders.slots[t].squaredNorm();
        if (power > 0.0 && weights.col(static_cast<Eigen::Index>(t)).maxCoeff() > 0.0)
            precoders.slots[t] *= std::sqrt(p_tot / power);
    }
}

} // namespace

FpResult run_fp(const ChannelSet &channel, const RMatrix &weights, const SystemConfig &config, PrecoderSet start,
                int max_iterations, double plateau_tol, AuxRole role)
{
    FpResult result;
    const RVector gamma = config.gamma_vector();
    result.precoders = std::move(start);
    result.report = rate_matrix(channel, result.precoders, weights, config.sigma_sq, gamma);
    result.trace.push_back(result.report.total);
    for (int it = 0; it < max_iterations; ++it)
    {
        const auto aux = update_mu(channel, result.precoders, weights, config.sigma_sq, role);
        auto solution = solve_beamformer_subproblem(channel, weights, aux, config, &result.precoders);
        const double previous = result.report.total;
        result.precoders = std::move(solution.precoders);
        fill_power(result.precoders, weights, config.p_tot);
        result.status = solution.status;
        result.report = rate_matrix(channel, result.precoders, weights, config.sigma_sq, gamma);
        result.trace.push_back(result.report.total);
        result.iterations = it + 1;
        if (plateau_tol > 0.0 &&
            std::abs(result.report.total - previous) <= plateau_tol * std::max(std::abs(previous), 1e-300))
            break;
    }
    return result;
}

} // namespace beamhop
