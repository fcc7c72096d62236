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

#include "beamhop/pattern.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace beamhop
{

namespace
{

// Beams lit in each slot of an exhaustive partition: K per slot, then the remainder, then dark.
std::vector<int> slot_sizes(int n_s, int k, int m)
{
    if (n_s < 1 || k < 1 || m < 1)
        throw Error(ErrorKind::InvalidDimensions, "n_s, k and m must be >= 1");
    if (static_cast<long long>(k) * m < n_s)
        throw Error(ErrorKind::InvalidDimensions, "k * m must be >= n_s");
    std::vector<int> sizes(static_cast<std::size_t>(m), 0);
    int remaining = n_s;
    for (auto &s : sizes)
    {
        s = std::min(k, remaining);
        remaining -= s;
    }
    return sizes;
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t binomial(int n, int r)
{
    if (r < 0 || r > n)
        return 0;
    r = std::min(r, n - r);
    u128 acc = 1;
    for (int i = 1; i <= r; ++i)
    {
        acc = acc * static_cast<unsigned>(n - r + i) / static_cast<unsigned>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

u128 ordered_count_wide(const std::vector<int> &sizes, int n_s)
{
    u128 acc = 1;
    const u128 cap = static_cast<u128>(std::numeric_limits<std::uint64_t>::max()) << 32;
    int remaining = n_s;
    for (int s : sizes)
    {
        const std::uint64_t b = binomial(remaining, s);
        if (b != 0 && acc > cap / b)
            return cap;
        acc *= b;
        remaining -= s;
    }
    return acc;
}

void enumerate_rec(const std::vector<int> &sizes, std::size_t slot, std::vector<int> &free_beams, IMatrix &current,
                   std::vector<IlluminationPattern> &out)
{
    if (slot == sizes.size())
    {
        out.emplace_back(current);
        return;
    }
    const int s = sizes[slot];
    const int avail = static_cast<int>(free_beams.size());
    // Lexicographic combinations of `s` positions out of the free list.
    std::vector<int> idx(static_cast<std::size_t>(s));
    std::iota(idx.begin(), idx.end(), 0);
    while (true)
    {
        std::vector<int> rest;
        rest.reserve(free_beams.size() - idx.size());
        for (int i = 0, j = 0; i < avail; ++i)
        {
            if (j < s && idx[static_cast<std::size_t>(j)] == i)
            {
                current(free_beams[static_cast<std::size_t>(i)], static_cast<Eigen::Index>(slot)) = 1;
                ++j;
            }
            else
                rest.push_back(free_beams[static_cast<std::size_t>(i)]);
        }
        enumerate_rec(sizes, slot + 1, rest, current, out);
        for (int j = 0; j < s; ++j)
            current(free_beams[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])],
                    static_cast<Eigen::Index>(slot)) = 0;

        int pos = s - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == avail - s + pos)
            --pos;
        if (pos < 0)
            break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < s; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

} // namespace

IlluminationPattern IlluminationPattern::canonical() const
{
    std::vector<Eigen::VectorXi> cols;
    for (Eigen::Index t = 0; t < x.cols(); ++t)
        cols.emplace_back(x.col(t));
    std::sort(cols.begin(), cols.end(), [](const Eigen::VectorXi &a, const Eigen::VectorXi &b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size(),
                                            std::greater<int>());
    });
    IMatrix out(x.rows(), x.cols());
    for (Eigen::Index t = 0; t < x.cols(); ++t)
        out.col(t) = cols[static_cast<std::size_t>(t)];
    return IlluminationPattern(out);
}

RelaxedPattern RelaxedPattern::uniform(int n_s, int m_slots, double value)
{
    return RelaxedPattern{RVector::Constant(static_cast<Eigen::Index>(n_s) * m_slots, value), n_s, m_slots};
}

RelaxedPattern RelaxedPattern::embed(const IlluminationPattern &pattern)
{
    return from_matrix(pattern.weights());
}

RelaxedPattern RelaxedPattern::from_matrix(const RMatrix &weights)
{
    RelaxedPattern r;
    r.n_s = static_cast<int>(weights.rows());
    r.m_slots = static_cast<int>(weights.cols());
    r.x_vec = Eigen::Map<const RVector>(weights.data(), weights.size()); // column-major == slot blocks
    return r;
}

RMatrix RelaxedPattern::as_matrix() const
{
    return Eigen::Map<const RMatrix>(x_vec.data(), n_s, m_slots);
}

IlluminationPattern random_pattern(int n_s, int k, int m, std::mt19937_64 &rng)
{
    const auto sizes = slot_sizes(n_s, k, m);
    std::vector<int> unlit(static_cast<std::size_t>(n_s));
    std::iota(unlit.begin(), unlit.end(), 0);
    auto pattern = IlluminationPattern::zeros(n_s, m);
    for (int t = 0; t < m; ++t)
    {
        const int s = sizes[static_cast<std::size_t>(t)];
        // Partial Fisher-Yates: the first s entries become the lit set of slot t.
        for (int i = 0; i < s; ++i)
        {
            std::uniform_int_distribution<int> pick(i, static_cast<int>(unlit.size()) - 1);
            std::swap(unlit[static_cast<std::size_t>(i)], unlit[static_cast<std::size_t>(pick(rng))]);
            pattern.x(unlit[static_cast<std::size_t>(i)], t) = 1;
        }
        unlit.erase(unlit.begin(), unlit.begin() + s);
    }
    return pattern;
}

std::uint64_t count_ordered_patterns(int n_s, int k, int m)
{
    const auto wide = ordered_count_wide(slot_sizes(n_s, k, m), n_s);
    if (wide > std::numeric_limits<std::uint64_t>::max())
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(wide);
}

std::vector<IlluminationPattern> enumerate_patterns(int n_s, int k, int m, std::uint64_t limit)
{
    const auto sizes = slot_sizes(n_s, k, m);
    const auto count = ordered_count_wide(sizes, n_s);
    if (count > limit)
        throw Error(ErrorKind::TooLarge, "ordered pattern count exceeds the enumeration limit");
    std::vector<IlluminationPattern> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> free_beams(static_cast<std::size_t>(n_s));
    std::iota(free_beams.begin(), free_beams.end(), 0);
    IMatrix current = IMatrix::Zero(n_s, m);
    enumerate_rec(sizes, 0, free_beams, current, out);
    return out;
}

std::uint64_t count_unordered_patterns(int n_s, int k, int m)
{
    if (n_s < 1 || k < 1 || m < 1 || static_cast<long long>(k) * m != n_s)
        throw Error(ErrorKind::InvalidDimensions, "unordered pattern count requires k * m == n_s");
    u128 ordered = ordered_count_wide(slot_sizes(n_s, k, m), n_s);
    for (int j = 2; j <= m; ++j)
        ordered /= static_cast<unsigned>(j);
    if (ordered > std::numeric_limits<std::uint64_t>::max())
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(ordered);
}

IlluminationPattern quantize(const RelaxedPattern &relaxed, int n_s, int k, int m)
{
    if (relaxed.x_vec.size() != static_cast<Eigen::Index>(n_s) * m)
        throw Error(ErrorKind::DimensionMismatch, "relaxed pattern length must be n_s * m");
    auto out = IlluminationPattern::zeros(n_s, m);
    for (int t = 0; t < m; ++t)
    {
        int lit = 0;
        for (int n = 0; n < n_s; ++n)
        {
            out.x(n, t) = static_cast<int>(std::floor(relaxed.x_vec[n + n_s * t] + 0.5));
            lit += out.x(n, t);
        }
        if (lit <= k)
            continue;
        std::vector<int> order(static_cast<std::size_t>(n_s));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return relaxed.x_vec[a + n_s * t] > relaxed.x_vec[b + n_s * t];
        });
        out.x.col(t).setZero();
        for (int i = 0; i < k; ++i)
            out.x(order[static_cast<std::size_t>(i)], t) = 1;
    }
    return out;
}

IlluminationPattern repair_coverage(const IlluminationPattern &pattern, const RelaxedPattern &relaxed, int k)
{
    const int n_s = pattern.n_s();
    const int m = pattern.m_slots();
    if (static_cast<long long>(k) * m < n_s)
        throw Error(ErrorKind::Unrepairable, "k * m < n_s: coverage cannot be restored");
    if (relaxed.n_s != n_s || relaxed.m_slots != m)
        throw Error(ErrorKind::DimensionMismatch, "relaxed pattern does not match the binary pattern");

    IlluminationPattern out = pattern;
    auto value = [&](int n, int t) { return relaxed.x_vec[n + n_s * t]; };
    // Slots in decreasing relaxed preference of beam n, ties to the lowest slot.
    auto preferred_slots = [&](int n) {
        std::vector<int> slots(static_cast<std::size_t>(m));
        std::iota(slots.begin(), slots.end(), 0);
        std::stable_sort(slots.begin(), slots.end(), [&](int a, int b) { return value(n, a) > value(n, b); });
        return slots;
    };

    for (int n = 0; n < n_s; ++n)
    {
        if (out.x.row(n).sum() > 0)
            continue;
        const auto slots = preferred_slots(n);
        bool placed = false;
        for (int t : slots)
        {
            if (out.x.col(t).sum() < k)
            {
                out.x(n, t) = 1;
                placed = true;
                break;
            }
        }
        if (placed)
            continue;
        // Every slot is full. Displace the weakest lit entry whose beam stays covered elsewhere,
        // trying slots in preference order.
        for (int t : slots)
        {
            int victim = -1;
            for (int j = 0; j < n_s; ++j)
            {
                if (out.x(j, t) != 1 || out.x.row(j).sum() < 2)
                    continue;
                if (victim < 0 || value(j, t) < value(victim, t))
                    victim = j;
            }
            if (victim >= 0)
            {
                out.x(victim, t) = 0;
                out.x(n, t) = 1;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw Error(ErrorKind::Unrepairable, "no displaceable entry found");
    }
    return out;
}

std::string pattern_to_json(const IlluminationPattern &pattern)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index n = 0; n < pattern.x.rows(); ++n)
    {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index t = 0; t < pattern.x.cols(); ++t)
            row.push_back(pattern.x(n, t));
        rows.push_back(std::move(row));
    }
    return rows.dump();
}

IlluminationPattern pattern_from_json(const std::string &text)
{
    nlohmann::json rows;
    try
    {
        rows = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw Error(ErrorKind::Parse, e.what());
    }
    if (!rows.is_array() || rows.empty() || !rows.front().is_array())
        throw Error(ErrorKind::Parse, "pattern must be a non-empty array of arrays");
    const auto n_s = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(rows.front().size());
    IMatrix x(n_s, m);
    for (Eigen::Index n = 0; n < n_s; ++n)
    {
        const auto &row = rows[static_cast<std::size_t>(n)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m)
            throw Error(ErrorKind::Parse, "pattern rows must all have the same length");
        for (Eigen::Index t = 0; t < m; ++t)
        {
            const auto &v = row[static_cast<std::size_t>(t)];
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
                throw Error(ErrorKind::Parse, "pattern entries must be 0 or 1");
            x(n, t) = v.get<int>();
        }
    }
    return IlluminationPattern(x);
}

} // namespace beamhop
