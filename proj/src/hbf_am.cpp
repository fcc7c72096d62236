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

#include "beamhop/hbf_am.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace beamhop
{

namespace
{

constexpr double kRidge = 1e-10;

CMatrix tangent(const CMatrix &v, const CMatrix &f)
{
    return v - (v.array() * f.conjugate().array()).real().cast<cplx>().matrix().cwiseProduct(f);
}

CMatrix retract(const CMatrix &f, const CMatrix &step)
{
    CMatrix out = f - step;
    for (Eigen::Index i = 0; i < out.size(); ++i)
    {
        const double m = std::abs(out.data()[i]);
        out.data()[i] = m > 0.0 ? out.data()[i] / m : f.data()[i];
    }
    return out;
}

CMatrix random_phases(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    CMatrix f(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            f(i, j) = std::polar(1.0, phase(rng));
    return f;
}

struct Attempt
{
    CMatrix f;
    DigitalFit fit;
    std::vector<double> trace;
};

Attempt alternate(const CMatrix &p, CMatrix f, const SystemConfig &config)
{
    RiemannOptions options;
    options.max_iters = config.solver.riemann_max_iters;
    options.conjugate_gradient = config.solver.riemann_conjugate_gradient;
    Attempt a;
    a.fit = ls_digital(f, p);
    a.trace.push_back((p - f * a.fit.q).norm());
    for (int it = 0; it < config.solver.t5; ++it)
    {
        f = riemannian_analog(f, a.fit.q, p, options).f;
        auto fit = ls_digital(f, p);
        a.fit.q = std::move(fit.q);
        a.fit.ridge_used = a.fit.ridge_used || fit.ridge_used;
        const double previous = a.trace.back();
        a.trace.push_back((p - f * a.fit.q).norm());
        if (std::abs(previous - a.trace.back()) < 1e-4 * std::max(previous, 1e-300))
            break;
    }
    a.f = std::move(f);
    return a;
}

HybridPrecoder factorize_seeded(const CMatrix &p_target, const SystemConfig &config, std::uint64_t seed)
{
    if (!p_target.allFinite())
        throw Error(ErrorKind::NonFiniteInput, "target precoder must be finite");
    const double scale = p_target.norm();
    if (!(scale > 0.0))
        throw Error(ErrorKind::Validation, "target precoder must be nonzero");
    if (config.n_rf < 1 || config.n_rf > p_target.rows())
        throw Error(ErrorKind::InvalidDimensions, "N_RF must lie in [1, N_BS]");
    // The minimizer set is scale invariant; work on the unit-norm target.
    const CMatrix p = p_target / scale;
    std::mt19937_64 rng(seed);
    Attempt best;
    bool have = false;
    for (int r = 0; r < std::max(config.solver.hbf_restarts, 1); ++r)
    {
        auto a = alternate(p, random_phases(p.rows(), config.n_rf, rng), config);
        if (!have || a.trace.back() < best.trace.back())
        {
            best = std::move(a);
            have = true;
        }
    }
    HybridPrecoder out;
    out.f = std::move(best.f);
    out.ridge_used = best.fit.ridge_used;
    out.residual = best.trace.back();
    out.residual_trace = std::move(best.trace);
    const double fq = (out.f * best.fit.q).norm();
    out.q = fq > 0.0 ? CMatrix(best.fit.q * (std::sqrt(config.p_tot) / fq)) : best.fit.q;
    return out;
}

std::vector<std::uint64_t> slot_seeds(std::size_t m, std::mt19937_64 &rng)
{
    const std::uint64_t base = rng();
    std::vector<std::uint64_t> seeds(m);
    for (std::size_t t = 0; t < m; ++t)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                          static_cast<std::uint32_t>(t)};
        std::uint32_t words[2];
        seq.generate(words, words + 2);
        seeds[t] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    }
    return seeds;
}

void factorize_slot(const PrecoderSet &precoders, const SystemConfig &config, const std::vector<std::uint64_t> &seeds,
                    std::size_t t, HybridPrecoder &out, std::string &error)
{
    try
    {
        const CMatrix &p = precoders.slots[t];
        if (p.allFinite() && p.squaredNorm() == 0.0)
        {
            // Dark slot: nothing to factor.
            std::mt19937_64 rng(seeds[t]);
            out.f = random_phases(p.rows(), config.n_rf, rng);
            out.q = CMatrix::Zero(config.n_rf, p.cols());
            out.residual_trace.push_back(0.0);
            return;
        }
        out = factorize_seeded(p, config, seeds[t]);
    }
    catch (const Error &e)
    {
        error = "slot " + std::to_string(t) + ": " + e.what();
    }
}

HbfBatch collect(std::vector<HybridPrecoder> slots, const std::vector<std::string> &errors)
{
    HbfBatch batch;
    batch.slots = std::move(slots);
    for (const auto &e : errors)
        if (!e.empty())
            batch.errors.push_back(e);
    return batch;
}

} // namespace

DigitalFit ls_digital(const CMatrix &f, const CMatrix &p_target)
{
    if (f.rows() != p_target.rows())
        throw Error(ErrorKind::DimensionMismatch, "analog matrix and target must have N_BS rows");
    DigitalFit fit;
    const CMatrix gram = f.adjoint() * f;
    const CMatrix rhs = f.adjoint() * p_target;
    Eigen::LLT<CMatrix> llt(gram);
    const double diag = gram.diagonal().real().cwiseAbs().maxCoeff();
    bool ok = llt.info() == Eigen::Success;
    if (ok)
    {
        const Eigen::VectorXd l = CMatrix(llt.matrixL()).diagonal().real();
        ok = l.size() == 0 || l.minCoeff() * l.minCoeff() > 1e-14 * std::max(diag, 1e-300);
    }
    if (!ok)
    {
        fit.ridge_used = true;
        llt.compute(gram + kRidge * CMatrix::Identity(gram.rows(), gram.cols()));
    }
    fit.q = llt.solve(rhs);
    return fit;
}

RiemannResult riemannian_analog(const CMatrix &f_init, const CMatrix &q, const CMatrix &p_target,
                                const RiemannOptions &options)
{
    if (f_init.rows() != p_target.rows() || f_init.cols() != q.rows() || q.cols() != p_target.cols())
        throw Error(ErrorKind::DimensionMismatch, "F, Q and P shapes do not chain");
    RiemannResult result;
    result.f = f_init;
    auto objective = [&](const CMatrix &f) { return (p_target - f * q).squaredNorm(); };
    double value = objective(result.f);
    result.objective_trace.push_back(value);
    // Unit steps are measured against the curvature of the quadratic in F, ||Q||_2^2, so the
    // line search starts at a sensible length whatever the scale of the target.
    const double curvature = q.size() ? Eigen::JacobiSVD<CMatrix>(q).singularValues()[0] : 0.0;
    const double base_step = options.initial_step / std::max(curvature * curvature, 1e-300);
    CMatrix previous_grad;
    CMatrix direction;
    for (int it = 0; it < options.max_iters; ++it)
    {
        const CMatrix egrad = -(p_target - result.f * q) * q.adjoint();
        const CMatrix rgrad = tangent(egrad, result.f);
        const double grad_sq = rgrad.squaredNorm();
        if (std::sqrt(grad_sq) <= options.gradient_tolerance)
            break;
        if (options.conjugate_gradient && previous_grad.size() > 0)
        {
            direction = rgrad + (grad_sq / previous_grad.squaredNorm()) * tangent(direction, result.f);
            if (!(std::real(rgrad.cwiseProduct(direction.conjugate()).sum()) > 0.0))
                direction = rgrad;
        }
        else
        {
            direction = rgrad;
        }
        const double slope = 2.0 * std::real(rgrad.cwiseProduct(direction.conjugate()).sum());
        double step = base_step;
        bool accepted = false;
        while (step > 1e-20)
        {
            CMatrix candidate = retract(result.f, step * direction);
            const double v = objective(candidate);
            if (v <= value - options.sufficient_decrease * step * slope)
            {
                result.f = std::move(candidate);
                value = v;
                accepted = true;
                break;
            }
            step *= options.shrink;
        }
        if (!accepted)
            break;
        previous_grad = rgrad;
        result.objective_trace.push_back(value);
        ++result.iterations;
    }
    return result;
}

HybridPrecoder factorize(const CMatrix &p_target, const SystemConfig &config, std::mt19937_64 &rng)
{
    return factorize_seeded(p_target, config, rng());
}

HbfBatch factorize_all(const PrecoderSet &precoders, const SystemConfig &config, std::mt19937_64 &rng)
{
    const std::size_t m = precoders.m_slots();
    if (m == 0)
        return {};
    const auto seeds = slot_seeds(m, rng);
    std::vector<HybridPrecoder> slots(m);
    std::vector<std::string> errors(m);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < static_cast<long>(m); ++t)
        factorize_slot(precoders, config, seeds, static_cast<std::size_t>(t), slots[static_cast<std::size_t>(t)],
                       errors[static_cast<std::size_t>(t)]);
    return collect(std::move(slots), errors);
}

HbfBatch factorize_all_serial(const PrecoderSet &precoders, const SystemConfig &config, std::mt19937_64 &rng)
{
    const std::size_t m = precoders.m_slots();
    if (m == 0)
        return {};
    const auto seeds = slot_seeds(m, rng);
    std::vector<HybridPrecoder> slots(m);
    std::vector<std::string> errors(m);
    for (std::size_t t = 0; t < m; ++t)
        factorize_slot(precoders, config, seeds, t, slots[t], errors[t]);
    return collect(std::move(slots), errors);
}

} // namespace beamhop
