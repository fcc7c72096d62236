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

#ifndef BEAMHOP_CHANNEL_HPP
#define BEAMHOP_CHANNEL_HPP

#include "beamhop/types.hpp"

#include <numbers>
#include <random>

namespace beamhop
{

struct LinkBudget
{
    double bandwidth_hz = 250e6;
    double carrier_hz = 20e9;
    double distance_m = 550e3;
    double boltzmann = 1.38e-23;
    double noise_temp_k = 293.0;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double antenna_spacing_wavelengths = 0.5; // d_0 * f_c / v_c
    double light_speed = 299792458.0;

    bool valid() const;
};

struct PathSpec
{
    int n_paths = 2;
    double rician_factor_db = 10.0;
    double angle_min_rad = -std::numbers::pi / 3.0;
    double angle_max_rad = std::numbers::pi / 3.0;

    bool valid() const;
};

// ULA response: entry i is exp(j*pi*theta*i) / sqrt(n_ants).
CVector steering_vector(int n_ants, double theta);

// Mean path power, free-space loss times array/antenna gains over thermal noise.
double path_power(const LinkBudget &budget, int n_bs);

// Rician gain with E|g|^2 = eta: LoS term with uniform phase plus CN(0,1) diffuse term.
cplx sample_path_gain(double eta, double rician_factor_db, std::mt19937_64 &rng);

// h_n = sum_l g_l v(N_BS, theta_l)^H. Draw order per beam and path: physical angle,
// LoS phase, diffuse real part, diffuse imaginary part.
ChannelSet generate_channel(const SystemConfig &config, const LinkBudget &budget, const PathSpec &paths,
                            std::mt19937_64 &rng);

} // namespace beamhop

#endif
