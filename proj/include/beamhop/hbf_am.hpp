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

#ifndef BEAMHOP_HBF_AM_HPP
#define BEAMHOP_HBF_AM_HPP

#include "beamhop/core_model.hpp"
#include "beamhop/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace beamhop
{

struct DigitalFit
{
    CMatrix q;
    bool ridge_used = false; // F^H F was singular and 1e-10 I was added
};

// Q = (F^H F)^{-1} F^H P.
DigitalFit ls_digital(const CMatrix &f, const CMatrix &p_target);

struct RiemannOptions
{
    int max_iters = 100;
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    double gradient_tolerance = 1e-12;
    bool conjugate_gradient = false;
};

struct RiemannResult
{
    CMatrix f;
    std::vector<double> objective_trace; // ||P - F Q||_F^2 at the start and after every accepted step
    int iterations = 0;
};

// Minimizes ||P - F Q||_F^2 over unit-modulus F by descent on the product of circles.
RiemannResult riemannian_analog(const CMatrix &f_init, const CMatrix &q, const CMatrix &p_target,
                                const RiemannOptions &options);

// Random-phase start, alternating ls_digital / riemannian_analog, best of the restarts,
// then Q scaled so that ||F Q||_F^2 = P_tot.
HybridPrecoder factorize(const CMatrix &p_target, const SystemConfig &config, std::mt19937_64 &rng);

struct HbfBatch
{
    std::vector<HybridPrecoder> slots;
    std::vector<std::string> errors; // "slot t: message", one per failed slot
};

// One factorization per slot with seeds split from a single draw of `rng`. Slots run in
// parallel; a failed slot leaves an empty entry and an error message.
HbfBatch factorize_all(const PrecoderSet &precoders, const SystemConfig &config, std::mt19937_64 &rng);
HbfBatch factorize_all_serial(const PrecoderSet &precoders, const SystemConfig &config, std::mt19937_64 &rng);

} // namespace beamhop

#endif
