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

#include "beamhop/scheme_ipao.hpp"

#include "beamhop/fp_engine.hpp"

#include <cmath>

namespace beamhop
{

namespace
{

bool plateaued(double current, double previous, double tol)
{
    return tol > 0.0 && std::abs(current - previous) <= tol * std::max(std::abs(previous), 1e-300);
}

// Random per-slot precoders at full power. Matched filters would make every slot identical
// at the uniform start, and the alternation then never leaves the uniform pattern.
PrecoderSet random_precoders(const ChannelSet &channel, int m, double p_tot, std::mt19937_64 &rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    PrecoderSet out;
    for (int t = 0; t < m; ++t)
    {
        CMatrix p(channel.n_bs(), channel.n_s());
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            for (Eigen::Index i = 0; i < p.rows(); ++i)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                p(i, j) = cplx(re, im);
            }
        p *= std::sqrt(p_tot) / p.norm();
        out.slots.push_back(std::move(p));
    }
    return out;
}

SolveStatus worse(SolveStatus a, SolveStatus b)
{
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

} // namespace

double relaxed_objective(const ChannelSet &channel, const PrecoderSet &precoders, const RelaxedPattern &relaxed,
                         double sigma_sq)
{
    return rate_matrix(channel, precoders, relaxed.as_matrix(), sigma_sq).total;
}

IpaoResult run_ipao(const ChannelSet &channel, const SystemConfig &config, std::mt19937_64 &rng)
{
    config.validate();
    if (channel.n_s() != config.n_s || channel.n_bs() != config.n_bs)
        throw Error(ErrorKind::DimensionMismatch, "channel does not match the configuration");
    const auto &s = config.solver;
    const RVector gamma = config.gamma_vector();
    IpaoResult result;

    RelaxedPattern x = RelaxedPattern::uniform(config.n_s, config.m_slots,
                                               static_cast<double>(config.k_beams) / config.n_s);
    PrecoderSet p = random_precoders(channel, config.m_slots, config.p_tot, rng);
    double objective = relaxed_objective(channel, p, x, config.sigma_sq);
    result.outer_trace.emplace_back(0, objective);

    for (int outer = 1; outer <= s.t4; ++outer)
    {
        const double outer_start = objective;
        const RMatrix w = x.as_matrix();
        for (int it = 0; it < s.t2; ++it)
        {
            const auto zeta = update_mu(channel, p, w, config.sigma_sq, AuxRole::Zeta);
            auto bf = solve_beamformer_subproblem(channel, w, zeta, config, &p);
            result.status = worse(result.status, bf.status);
            p = std::move(bf.precoders);
            const double previous = objective;
            objective = relaxed_objective(channel, p, x, config.sigma_sq);
            if (plateaued(objective, previous, s.plateau_tol))
                break;
        }
        for (int it = 0; it < s.t3; ++it)
        {
            const auto xi = update_xi(channel, p, x, config.sigma_sq);
            const auto vec = build_ip_vectorization(channel, p, xi, config.sigma_sq);
            auto ip = solve_ip_subproblem(vec, gamma, config.k_beams, config, &x);
            result.status = worse(result.status, ip.status);
            x = std::move(ip.pattern);
            const double previous = objective;
            objective = relaxed_objective(channel, p, x, config.sigma_sq);
            if (plateaued(objective, previous, s.plateau_tol))
                break;
        }
        result.outer_trace.emplace_back(outer, objective);
        if (s.outer_stop == OuterStop::Plateau && plateaued(objective, outer_start, s.plateau_tol))
            break;
    }

    result.relaxed = x;
    const auto binary = quantize(x, config.n_s, config.k_beams, config.m_slots);
    result.pattern = repair_coverage(binary, x, config.k_beams);

    // Same start and loop as a fixed-pattern candidate solve.
    const RMatrix w = result.pattern.weights();
    auto fp = run_fp(channel, w, config, initial_precoders(channel, w, config), s.t1, s.plateau_tol);
    result.status = worse(result.status, fp.status);
    result.precoders = std::move(fp.precoders);
    result.report = std::move(fp.report);
    result.feasible = result.report.all_gamma_satisfied();
    result.quantization_delta = objective - result.report.total;
    return result;
}

} // namespace beamhop
