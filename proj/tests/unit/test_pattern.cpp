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
#include "beamhop/scheme_iprs.hpp"

#include <doctest.h>

#include <set>

using namespace beamhop;

namespace
{

IlluminationPattern from_rows(int rows, int cols, std::initializer_list<int> v)
{
    IMatrix x(rows, cols);
    auto it = v.begin();
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            x(i, j) = *it++;
    return IlluminationPattern(x);
}

RelaxedPattern relaxed_from_rows(int rows, int cols, std::initializer_list<double> v)
{
    RMatrix w(rows, cols);
    auto it = v.begin();
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            w(i, j) = *it++;
    return RelaxedPattern::from_matrix(w);
}

} // namespace

TEST_SUITE("pattern")
{
    TEST_CASE("random partitions respect slot capacity and cover once")
    {
        std::mt19937_64 rng(1);
        for (int i = 0; i < 50; ++i)
        {
            const auto p = random_pattern(4, 2, 2, rng);
            CHECK(p.column_sums() == Eigen::VectorXi::Constant(2, 2));
            CHECK(p.row_sums() == Eigen::VectorXi::Ones(4));
        }
        std::mt19937_64 r2(9);
        CHECK(random_pattern(2, 2, 1, r2).x == IMatrix::Ones(2, 1));

        std::mt19937_64 r3(3);
        for (int i = 0; i < 20; ++i)
        {
            const auto p = random_pattern(5, 2, 4, r3);
            CHECK(p.row_sums() == Eigen::VectorXi::Ones(5));
            CHECK(p.column_sums().maxCoeff() <= 2);
        }
    }

    TEST_CASE("seeded draw is stable")
    {
        std::mt19937_64 rng(7);
        CHECK(pattern_to_json(random_pattern(6, 2, 3, rng)) == "[[0,0,1],[0,1,0],[0,1,0],[0,0,1],[1,0,0],[1,0,0]]");
    }

    TEST_CASE("pattern counts")
    {
        CHECK(count_ordered_patterns(4, 2, 2) == 6);
        CHECK(count_ordered_patterns(2, 2, 1) == 1);
        CHECK(count_ordered_patterns(6, 2, 3) == 90);
        CHECK(count_unordered_patterns(4, 2, 2) == 3);
        CHECK(count_unordered_patterns(6, 2, 3) == 15);
        CHECK(count_unordered_patterns(2, 2, 1) == 1);
        CHECK_THROWS_AS(count_unordered_patterns(5, 2, 3), Error);
        CHECK(count_ordered_patterns(200, 2, 100) == std::numeric_limits<std::uint64_t>::max());
    }

    TEST_CASE("enumeration is complete and distinct")
    {
        const auto all = enumerate_patterns(6, 2, 3);
        CHECK(all.size() == 90);
        std::set<std::string> seen;
        for (const auto &p : all)
        {
            seen.insert(pattern_to_json(p));
            CHECK(p.column_sums() == Eigen::VectorXi::Constant(3, 2));
            CHECK(p.row_sums() == Eigen::VectorXi::Ones(6));
        }
        CHECK(seen.size() == 90);

        std::set<std::string> groups;
        for (const auto &p : all)
            groups.insert(pattern_to_json(p.canonical()));
        CHECK(groups.size() == 15);

        CHECK_THROWS_AS(enumerate_patterns(12, 2, 6, 1000), Error);
    }

    TEST_CASE("dedupe keeps first occurrences in order")
    {
        const auto a = from_rows(2, 2, {1, 0, 0, 1});
        const auto b = from_rows(2, 2, {0, 1, 1, 0});
        const auto out = dedupe_candidates({a, a, b});
        REQUIRE(out.size() == 2);
        CHECK(out[0] == a);
        CHECK(out[1] == b);
        CHECK(dedupe_candidates({a, b}).size() == 2);

        std::mt19937_64 rng(5);
        std::vector<IlluminationPattern> many;
        for (int i = 0; i < 1000; ++i)
            many.push_back(random_pattern(6, 2, 3, rng));
        CHECK(dedupe_candidates(many).size() <= 90);
    }

    TEST_CASE("quantize")
    {
        const auto bin = from_rows(4, 2, {1, 0, 0, 1, 1, 0, 0, 1});
        CHECK(quantize(RelaxedPattern::embed(bin), 4, 2, 2) == bin);

        const auto col = relaxed_from_rows(4, 1, {0.9, 0.8, 0.7, 0.1});
        CHECK(quantize(col, 4, 2, 1) == from_rows(4, 1, {1, 1, 0, 0}));

        const auto flat = RelaxedPattern::uniform(4, 2, 0.5);
        CHECK(quantize(flat, 4, 2, 2) == from_rows(4, 2, {1, 1, 1, 1, 0, 0, 0, 0}));
        CHECK_THROWS_AS(quantize(flat, 4, 2, 3), Error);
    }

    TEST_CASE("repair coverage")
    {
        const auto full = from_rows(4, 2, {1, 0, 1, 0, 0, 1, 0, 1});
        CHECK(repair_coverage(full, RelaxedPattern::embed(full), 2) == full);

        // Beam 2 dark, slot 1 has room.
        const auto gap = from_rows(3, 2, {1, 0, 1, 1, 0, 0});
        const auto relaxed = relaxed_from_rows(3, 2, {0.9, 0.1, 0.8, 0.6, 0.2, 0.4});
        CHECK(repair_coverage(gap, relaxed, 2) == from_rows(3, 2, {1, 0, 1, 1, 0, 1}));

        // Both slots full, beam 3 dark. Slot 0 is its preferred slot; beam 0 is lit only
        // there, so beam 1 (also lit in slot 1) is displaced.
        const auto crowded = from_rows(4, 2, {1, 0, 1, 1, 0, 1, 0, 0});
        const auto pref = relaxed_from_rows(4, 2, {0.9, 0.1, 0.5, 0.6, 0.1, 0.9, 0.4, 0.3});
        CHECK(repair_coverage(crowded, pref, 2) == from_rows(4, 2, {1, 0, 0, 1, 0, 1, 1, 0}));

        CHECK_THROWS_AS(repair_coverage(IlluminationPattern::zeros(5, 2), RelaxedPattern::uniform(5, 2, 0.5), 2),
                        Error);
    }

    TEST_CASE("relaxed layout and json round trip")
    {
        const auto p = from_rows(3, 2, {1, 0, 0, 1, 1, 0});
        const auto r = RelaxedPattern::embed(p);
        CHECK(r.at(1, 1) == 1.0);
        CHECK(r.x_vec[1 + 3 * 1] == 1.0);
        CHECK(r.as_matrix() == p.weights());
        CHECK(pattern_from_json(pattern_to_json(p)) == p);
        CHECK_THROWS_AS(pattern_from_json("[[1,2]]"), Error);
        CHECK_THROWS_AS(pattern_from_json("[[1],[0,1]]"), Error);
        CHECK_THROWS_AS(pattern_from_json("{"), Error);
    }
}
