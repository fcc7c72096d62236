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

#include "beamhop/channel.hpp"

#include <cmath>

namespace beamhop
{

bool LinkBudget::valid() const
{
    const double fields[] = {bandwidth_hz, carrier_hz, distance_m, boltzmann, noise_temp_k,
                             tx_gain,      rx_gain,    antenna_spacing_wavelengths, light_speed};
    for (double v : fields)
        if (!std::isfinite(v) || v <= 0.0)
            return false;
    return true;
}

bool PathSpec::valid() const
{
    return n_paths >= 1 && std::isfinite(rician_factor_db) && std::isfinite(angle_min_rad) &&
           std::isfinite(angle_max_rad) && angle_min_rad <= angle_max_rad;
}

CVector steering_vector(int n_ants, double theta)
{
    if (n_ants < 1)
        throw Error(ErrorKind::InvalidSize, "steering vector needs at least one antenna");
    if (!std::isfinite(theta))
        throw Error(ErrorKind::NonFiniteInput, "steering angle must be finite");
    CVector v(n_ants);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_ants));
    for (int i = 0; i < n_ants; ++i)
        v[i] = std::polar(scale, std::numbers::pi * theta * i);
    return v;
}

double path_power(const LinkBudget &budget, int n_bs)
{
    const double loss = budget.light_speed / (4.0 * std::numbers::pi * budget.carrier_hz * budget.distance_m);
    return loss * loss * budget.rx_gain * budget.tx_gain * n_bs /
           (budget.boltzmann * budget.bandwidth_hz * budget.noise_temp_k);
}

cplx sample_path_gain(double eta, double rician_factor_db, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double chi = std::pow(10.0, rician_factor_db / 10.0);
    const cplx los = std::polar(1.0, phase(rng));
    const double re = normal(rng);
    const double im = normal(rng);
    const cplx diffuse(re, im);
    return std::sqrt(eta) * (std::sqrt(chi / (1.0 + chi)) * los + std::sqrt(1.0 / (1.0 + chi)) * diffuse);
}

ChannelSet generate_channel(const SystemConfig &config, const LinkBudget &budget, const PathSpec &paths,
                            std::mt19937_64 &rng)
{
    if (!budget.valid())
        throw Error(ErrorKind::Validation, "link budget entries must be finite and > 0");
    if (!paths.valid())
        throw Error(ErrorKind::Validation, "path spec is invalid");
    const double eta = path_power(budget, config.n_bs);
    std::uniform_real_distribution<double> angle(paths.angle_min_rad, paths.angle_max_rad);

    ChannelSet channel;
    channel.h = CMatrix::Zero(config.n_s, config.n_bs);
    for (int n = 0; n < config.n_s; ++n)
    {
        for (int l = 0; l < paths.n_paths; ++l)
        {
            const double physical = angle(rng);
            const double theta = 2.0 * budget.antenna_spacing_wavelengths * std::sin(physical);
            const cplx g = sample_path_gain(eta, paths.rician_factor_db, rng);
            channel.h.row(n) += g * steering_vector(config.n_bs, theta).adjoint();
        }
    }
    return channel;
}

} // namespace beamhop
