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

#ifndef BEAMHOP_PATTERN_HPP
#define BEAMHOP_PATTERN_HPP

#include "beamhop/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace beamhop
{

// Binary N_s x M illumination pattern; x(n, t) = 1 when beam position n is lit in slot t.
struct IlluminationPattern
{
    IMatrix x;

    IlluminationPattern() = default;
    explicit IlluminationPattern(IMatrix values) : x(std::move(values)) {}
    static IlluminationPattern zeros(int n_s, int m_slots) { return IlluminationPattern(IMatrix::Zero(n_s, m_slots)); }

    int n_s() const { return static_cast<int>(x.rows()); }
    int m_slots() const { return static_cast<int>(x.cols()); }
    RMatrix weights() const { return x.cast<double>(); }
    Eigen::VectorXi column_sums() const { return x.colwise().sum().transpose(); }
    Eigen::VectorXi row_sums() const { return x.rowwise().sum(); }

    // Same beam groups irrespective of slot order.
    IlluminationPattern canonical() const;

    bool operator==(const IlluminationPattern &other) const
    {
        return x.rows() == other.x.rows() && x.cols() == other.x.cols() && x == other.x;
    }
};

// Relaxed pattern stacked slot by slot: entry n + N_s * t holds x(n, t).
struct RelaxedPattern
{
    RVector x_vec;
    int n_s = 0;
    int m_slots = 0;

    static RelaxedPattern uniform(int n_s, int m_slots, double value);
    static RelaxedPattern embed(const IlluminationPattern &pattern);
    static RelaxedPattern from_matrix(const RMatrix &weights);

    RMatrix as_matrix() const;
    double at(int n, int t) const { return x_vec[n + n_s * t]; }
};

// Candidate generator: slots are filled with K beams drawn without replacement from
// the not-yet-lit set. When K*M > N_s the partition ends with one slot carrying the
// remainder D = N_s mod K, and any slots left after that stay dark.
IlluminationPattern random_pattern(int n_s, int k, int m, std::mt19937_64 &rng);

// Number of ordered patterns produced by exhaustive partition; saturates at UINT64_MAX.
std::uint64_t count_ordered_patterns(int n_s, int k, int m);

// All ordered partition patterns. Throws TooLarge above `limit`.
std::vector<IlluminationPattern> enumerate_patterns(int n_s, int k, int m, std::uint64_t limit = 100000);

// (1/M!) * prod_j C(N_s - jK, K). Requires K*M == N_s.
std::uint64_t count_unordered_patterns(int n_s, int k, int m);

// Round-half-up, then for any slot over capacity keep the K largest relaxed entries
// (ties to the lowest beam index).
IlluminationPattern quantize(const RelaxedPattern &relaxed, int n_s, int k, int m);

// Give every dark row at least one slot; see implementation for the displacement rule.
IlluminationPattern repair_coverage(const IlluminationPattern &pattern, const RelaxedPattern &relaxed, int k);

// Row-major array of 0/1 arrays.
std::string pattern_to_json(const IlluminationPattern &pattern);
IlluminationPattern pattern_from_json(const std::string &text);

} // namespace beamhop

#endif
