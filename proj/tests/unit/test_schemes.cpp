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
#include "beamhop/scheme_ipao.hpp"
#include "beamhop/scheme_iprs.hpp"
#include "../oracles.hpp"

#include <doctest.h>

using namespace beamhop;

namespace
{

SystemConfig tiny(double gamma = 0.0)
{
    SystemConfig c;
    c.n_bs = 8;
    c.n_s = 4;
    c.n_rf = 4;
    c.k_beams = 2;
    c.m_slots = 2;
    c.p_tot = 100.0;
    c.gamma = {gamma};
    return c;
}

ChannelSet channel_for(const SystemConfig &c, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return generate_channel(c, LinkBudget(), PathSpec(), rng);
}

} // namespace

TEST_SUITE("scheme_iprs")
{
    TEST_CASE("all ordered patterns recover the brute-force optimum")
    {
        const auto config = tiny();
        const auto patterns = enumerate_patterns(4, 2, 2);
        for (std::uint64_t seed : {1u, 2u, 3u})
        {
            const auto ch = channel_for(config, seed);
            const auto bf = oracle::brute_force(ch, config, patterns);
            const auto r = evaluate_candidates(ch, config, patterns);
            REQUIRE(bf.best >= 0);
            CHECK(r.feasible);
            CHECK(r.best_pattern == patterns[static_cast<std::size_t>(bf.best)]);
            CHECK(r.best_report.total == doctest::Approx(bf.best_total).epsilon(1e-12));
            CHECK(r.candidates_evaluated == 6);
        }
    }

    TEST_CASE("reported total matches a fresh rate evaluation")
    {
        const auto config = tiny();
        const auto ch = channel_for(config, 4);
        std::mt19937_64 rng(4);
        const auto r = run_iprs(ch, config, 5, rng);
        const auto again = rate_matrix(ch, r.best_precoders, r.best_pattern.weights(), config.sigma_sq);
        CHECK(std::abs(again.total - r.best_report.total) < 1e-9);
        CHECK(r.candidates_drawn == 5);
        CHECK(r.candidates_evaluated <= 5);
    }

    TEST_CASE("unreachable thresholds flag the result")
    {
        const auto config = tiny(1e3);
        const auto ch = channel_for(config, 5);
        std::mt19937_64 rng(5);
        const auto r = run_iprs(ch, config, 4, rng);
        CHECK_FALSE(r.feasible);
        CHECK(r.candidates_infeasible == r.candidates_evaluated);
        CHECK(r.best_pattern.n_s() == 4);
    }

    TEST_CASE("seeded runs are bit identical")
    {
        const auto config = tiny();
        const auto ch = channel_for(config, 6);
        std::mt19937_64 a(6), b(6);
        const auto r1 = run_iprs(ch, config, 5, a);
        const auto r2 = run_iprs(ch, config, 5, b);
        CHECK(r1.best_pattern == r2.best_pattern);
        CHECK(r1.best_report.rates == r2.best_report.rates);
        CHECK(r1.per_candidate_totals == r2.per_candidate_totals);
        for (std::size_t t = 0; t < r1.best_precoders.slots.size(); ++t)
            CHECK(r1.best_precoders.slots[t] == r2.best_precoders.slots[t]);
    }

    TEST_CASE("no candidates")
    {
        const auto config = tiny();
        const auto ch = channel_for(config, 7);
        CHECK_THROWS_AS(evaluate_candidates(ch, config, {}), Error);
    }
}

TEST_SUITE("scheme_ipao")
{
    TEST_CASE("single slot forces the all-ones pattern")
    {
        SystemConfig c = tiny();
        c.n_s = 2;
        c.m_slots = 1;
        c.n_rf = 2;
        const auto ch = channel_for(c, 8);
        std::mt19937_64 rng(8);
        const auto r = run_ipao(ch, c, rng);
        CHECK(r.pattern.x == IMatrix::Ones(2, 1));
        const RMatrix w = RMatrix::Ones(2, 1);
        const auto direct = run_fp(ch, w, c, initial_precoders(ch, w, c), c.solver.t1, c.solver.plateau_tol);
        CHECK(r.report.total == doctest::Approx(direct.report.total).epsilon(1e-6));
    }

    TEST_CASE("close to the exhaustive oracle on tiny instances")
    {
        const auto config = tiny();
        const auto patterns = enumerate_patterns(4, 2, 2);
        double ipao = 0.0, best = 0.0;
        for (std::uint64_t seed = 100; seed < 120; ++seed)
        {
            const auto ch = channel_for(config, seed);
            std::mt19937_64 rng(seed);
            ipao += run_ipao(ch, config, rng).report.total;
            best += evaluate_candidates(ch, config, patterns).best_report.total;
        }
        CHECK(ipao >= 0.85 * best);
        CHECK(ipao <= best + 1e-6 * 20);
    }

    TEST_CASE("converged run passes the feasibility checker")
    {
        const auto config = tiny();
        const auto ch = channel_for(config, 9);
        std::mt19937_64 rng(9);
        const auto r = run_ipao(ch, config, rng);
        CHECK(check_feasibility(r.report, r.pattern, r.precoders, config).feasible());
        CHECK(r.pattern.row_sums().minCoeff() >= 1);
        CHECK(r.pattern.column_sums().maxCoeff() <= 2);
        REQUIRE(r.outer_trace.size() >= 2);
        CHECK(r.outer_trace.front().first == 0);
    }

    TEST_CASE("seeded runs are bit identical")
    {
        const auto config = tiny();
        const auto ch = channel_for(config, 10);
        std::mt19937_64 a(10), b(10);
        const auto r1 = run_ipao(ch, config, a);
        const auto r2 = run_ipao(ch, config, b);
        CHECK(r1.pattern == r2.pattern);
        CHECK(r1.report.rates == r2.report.rates);
        CHECK(r1.relaxed.x_vec == r2.relaxed.x_vec);
        CHECK(r1.outer_trace == r2.outer_trace);
    }

    TEST_CASE("relaxed objective")
    {
        const auto config = tiny();
        const auto ch = channel_for(config, 2024);
        const auto p = initial_precoders(ch, RMatrix::Ones(4, 2), config);
        CHECK(relaxed_objective(ch, p, RelaxedPattern::uniform(4, 2, 0.0), 1.0) == 0.0);

        IMatrix x(4, 2);
        x << 1, 0, 0, 1, 1, 0, 0, 1;
        const IlluminationPattern pattern(x);
        CHECK(relaxed_objective(ch, p, RelaxedPattern::embed(pattern), 1.0) ==
              rate_matrix(ch, p, pattern.weights(), 1.0).total);

        // Frozen from the first run of this configuration.
        CHECK(relaxed_objective(ch, p, RelaxedPattern::uniform(4, 2, 0.5), 1.0) ==
              doctest::Approx(0.011157241368007173).epsilon(1e-12));
    }
}
