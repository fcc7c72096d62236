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

#include "beamhop/core_model.hpp"

#include <omp.h>

#include <cmath>
#include <sstream>

namespace beamhop
{

const char *to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::InvalidSize: return "InvalidSize";
    case ErrorKind::InvalidDimensions: return "InvalidDimensions";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::Unrepairable: return "Unrepairable";
    case ErrorKind::NonPositiveLogArgument: return "NonPositiveLogArgument";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

const char *to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

std::vector<std::string> SystemConfig::violations() const
{
    std::vector<std::string> out;
    auto require = [&out](bool ok, const std::string &msg) {
        if (!ok)
            out.push_back(msg);
    };
    require(n_bs >= 1, "n_bs must be >= 1");
    require(n_s >= 1, "n_s must be >= 1");
    require(n_rf >= 1, "n_rf must be >= 1");
    require(k_beams >= 1, "k_beams must be >= 1");
    require(m_slots >= 1, "m_slots must be >= 1");
    require(static_cast<long long>(k_beams) * m_slots >= n_s,
            "k_beams * m_slots must be >= n_s so every beam position is lit at least once per period");
    require(k_beams <= n_rf, "k_beams must be <= n_rf");
    require(n_rf <= n_bs, "n_rf must be <= n_bs");
    require(std::isfinite(p_tot) && p_tot > 0.0, "p_tot must be > 0");
    require(std::isfinite(sigma_sq) && sigma_sq > 0.0, "sigma_sq must be > 0");
    require(gamma.size() <= 1 || gamma.size() == static_cast<std::size_t>(n_s),
            "gamma must be a scalar or have n_s entries");
    for (double g : gamma)
        require(std::isfinite(g) && g >= 0.0, "gamma entries must be >= 0");
    const auto &s = solver;
    require(s.t1 >= 1 && s.t2 >= 1 && s.t3 >= 1 && s.t4 >= 1 && s.t5 >= 1, "iteration caps t1..t5 must be >= 1");
    require(s.eps1 > 0.0 && s.eps2 > 0.0, "eps1 and eps2 must be > 0");
    require(s.plateau_tol >= 0.0, "plateau_tol must be >= 0");
    require(s.hbf_restarts >= 1, "hbf_restarts must be >= 1");
    require(s.riemann_max_iters >= 1, "riemann_max_iters must be >= 1");
    require(s.max_newton_steps >= 1, "max_newton_steps must be >= 1");
    return out;
}

void SystemConfig::validate() const
{
    const auto v = violations();
    if (v.empty())
        return;
    std::ostringstream msg;
    for (std::size_t i = 0; i < v.size(); ++i)
        msg << (i ? "; " : "") << v[i];
    throw Error(ErrorKind::Validation, msg.str());
}

double SystemConfig::gamma_of(int n) const
{
    if (gamma.empty())
        return 0.0;
    if (gamma.size() == 1)
        return gamma.front();
    return gamma.at(static_cast<std::size_t>(n));
}

RVector SystemConfig::gamma_vector() const
{
    RVector g(n_s);
    for (int n = 0; n < n_s; ++n)
        g[n] = gamma_of(n);
    return g;
}

bool RateReport::all_gamma_satisfied() const
{
    for (bool ok : gamma_satisfied)
        if (!ok)
            return false;
    return true;
}

std::vector<CMatrix> effective_precoders(const std::vector<HybridPrecoder> &hybrid)
{
    std::vector<CMatrix> out;
    out.reserve(hybrid.size());
    for (const auto &hp : hybrid)
        out.push_back(hp.effective());
    return out;
}

namespace
{

void check_rate_inputs(const ChannelSet &channel, const std::vector<CMatrix> &precoders, const RMatrix &weights,
                       double sigma_sq, const RVector &gamma)
{
    const auto n_s = channel.n_s();
    const auto n_bs = channel.n_bs();
    if (weights.rows() != n_s || weights.cols() != static_cast<Eigen::Index>(precoders.size()))
        throw Error(ErrorKind::DimensionMismatch, "weights must be N_s x M with one precoder per slot");
    for (const auto &p : precoders)
        if (p.rows() != n_bs || p.cols() != n_s)
            throw Error(ErrorKind::DimensionMismatch, "each precoder must be N_BS x N_s");
    if (gamma.size() != 0 && gamma.size() != n_s)
        throw Error(ErrorKind::DimensionMismatch, "gamma must have N_s entries");
    if (!channel.h.allFinite() || !weights.allFinite() || !std::isfinite(sigma_sq))
        throw Error(ErrorKind::NonFiniteInput, "channel, weights and sigma_sq must be finite");
    for (const auto &p : precoders)
        if (!p.allFinite())
            throw Error(ErrorKind::NonFiniteInput, "precoders must be finite");
    if (weights.size() > 0 && (weights.minCoeff() < 0.0 || weights.maxCoeff() > 1.0))
        throw Error(ErrorKind::Validation, "pattern weights must lie in [0, 1]");
    if (!(sigma_sq > 0.0))
        throw Error(ErrorKind::Validation, "sigma_sq must be > 0");
}

// Rates of one slot. Shared by the serial and OpenMP paths so both produce the same bits.
void slot_rates(const ChannelSet &channel, const CMatrix &precoder, const RMatrix &weights, Eigen::Index t,
                double sigma_sq, RMatrix &rates)
{
    const auto n_s = channel.n_s();
    const CMatrix hp = channel.h * precoder; // (n, k) = h_n p_k
    for (Eigen::Index n = 0; n < n_s; ++n)
    {
        const double x_n = weights(n, t);
        if (x_n == 0.0)
        {
            rates(n, t) = 0.0;
            continue;
        }
        double interference = 0.0;
        for (Eigen::Index k = 0; k < n_s; ++k)
            if (k != n)
                interference += weights(k, t) * std::norm(hp(n, k));
        const double sinr = x_n * std::norm(hp(n, n)) / (interference + sigma_sq);
        rates(n, t) = std::log2(1.0 + sinr);
    }
}

void finish_report(RateReport &report, const RVector &gamma)
{
    report.per_beam_sum = report.rates.rowwise().sum();
    report.total = report.per_beam_sum.sum();
    report.gamma_satisfied.assign(static_cast<std::size_t>(report.rates.rows()), true);
    for (Eigen::Index n = 0; n < report.rates.rows(); ++n)
    {
        const double g = gamma.size() ? gamma[n] : 0.0;
        report.gamma_satisfied[static_cast<std::size_t>(n)] = report.per_beam_sum[n] >= g;
    }
}

} // namespace

RateReport rate_matrix(const ChannelSet &channel, const std::vector<CMatrix> &precoders, const RMatrix &weights,
                       double sigma_sq, const RVector &gamma)
{
    check_rate_inputs(channel, precoders, weights, sigma_sq, gamma);
    RateReport report;
    report.rates = RMatrix::Zero(channel.n_s(), static_cast<Eigen::Index>(precoders.size()));
    const auto m = static_cast<Eigen::Index>(precoders.size());
#pragma omp parallel for schedule(static) if (m > 1 && omp_get_max_threads() > 1)
    for (Eigen::Index t = 0; t < m; ++t)
        slot_rates(channel, precoders[static_cast<std::size_t>(t)], weights, t, sigma_sq, report.rates);
    finish_report(report, gamma);
    return report;
}

RateReport rate_matrix(const ChannelSet &channel, const PrecoderSet &precoders, const RMatrix &weights,
                       double sigma_sq, const RVector &gamma)
{
    return rate_matrix(channel, precoders.slots, weights, sigma_sq, gamma);
}

RateReport rate_matrix_serial(const ChannelSet &channel, const std::vector<CMatrix> &precoders,
                              const RMatrix &weights, double sigma_sq, const RVector &gamma)
{
    check_rate_inputs(channel, precoders, weights, sigma_sq, gamma);
    RateReport report;
    report.rates = RMatrix::Zero(channel.n_s(), static_cast<Eigen::Index>(precoders.size()));
    for (std::size_t t = 0; t < precoders.size(); ++t)
        slot_rates(channel, precoders[t], weights, static_cast<Eigen::Index>(t), sigma_sq, report.rates);
    finish_report(report, gamma);
    return report;
}

std::vector<std::string> FeasibilityVerdict::describe() const
{
    std::vector<std::string> out;
    for (int n : gamma_violations)
        out.push_back("beam " + std::to_string(n) + " below its rate threshold");
    for (int t : power_violations)
        out.push_back("slot " + std::to_string(t) + " exceeds the power budget");
    for (int t : unit_modulus_violations)
        out.push_back("slot " + std::to_string(t) + " analog beamformer is not unit modulus");
    for (int t : beam_count_violations)
        out.push_back("slot " + std::to_string(t) + " lights more than K beams");
    if (non_binary)
        out.push_back("pattern is not binary");
    return out;
}

namespace
{

void check_pattern_and_rates(const RateReport &report, const IlluminationPattern &pattern,
                             const SystemConfig &config, FeasibilityVerdict &verdict)
{
    for (Eigen::Index n = 0; n < report.per_beam_sum.size(); ++n)
    {
        const double g = config.gamma_of(static_cast<int>(n));
        if (report.per_beam_sum[n] < g - kFeasibilitySlack * std::max(1.0, std::abs(g)))
            verdict.gamma_violations.push_back(static_cast<int>(n));
    }
    for (Eigen::Index t = 0; t < pattern.x.cols(); ++t)
    {
        if (pattern.x.col(t).sum() > config.k_beams)
            verdict.beam_count_violations.push_back(static_cast<int>(t));
    }
    for (Eigen::Index i = 0; i < pattern.x.size(); ++i)
    {
        const int v = pattern.x.data()[i];
        if (v != 0 && v != 1)
            verdict.non_binary = true;
    }
}

} // namespace

FeasibilityVerdict check_feasibility(const RateReport &report, const IlluminationPattern &pattern,
                                     const PrecoderSet &precoders, const SystemConfig &config)
{
    FeasibilityVerdict verdict;
    check_pattern_and_rates(report, pattern, config, verdict);
    for (std::size_t t = 0; t < precoders.slots.size(); ++t)
        if (precoders.slot_power(t) > config.p_tot * (1.0 + kFeasibilitySlack))
            verdict.power_violations.push_back(static_cast<int>(t));
    return verdict;
}

FeasibilityVerdict check_feasibility(const RateReport &report, const IlluminationPattern &pattern,
                                     const std::vector<HybridPrecoder> &hybrid, const SystemConfig &config)
{
    FeasibilityVerdict verdict;
    check_pattern_and_rates(report, pattern, config, verdict);
    for (std::size_t t = 0; t < hybrid.size(); ++t)
    {
        if (hybrid[t].effective().squaredNorm() > config.p_tot * (1.0 + kFeasibilitySlack))
            verdict.power_violations.push_back(static_cast<int>(t));
        const auto &f = hybrid[t].f;
        bool unit = true;
        for (Eigen::Index i = 0; i < f.size(); ++i)
            if (std::abs(std::abs(f.data()[i]) - 1.0) > kFeasibilitySlack)
                unit = false;
        if (!unit)
            verdict.unit_modulus_violations.push_back(static_cast<int>(t));
    }
    return verdict;
}

} // namespace beamhop
