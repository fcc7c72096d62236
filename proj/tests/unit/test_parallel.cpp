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

// The OpenMP kernels must reproduce their serial references exactly.
#include "beamhop/channel.hpp"
#include "beamhop/hbf_am.hpp"
#include "beamhop/scheme_iprs.hpp"
#include "../oracles.hpp"

#include <doctest.h>
#include <omp.h>

using namespace beamhop;

TEST_SUITE("parallel")
{
    TEST_CASE("rate matrix")
    {
        std::mt19937_64 rng(211);
        ChannelSet ch{oracle::random_complex(6, 16, rng)};
        std::vector<CMatrix> p;
        for (int t = 0; t < 5; ++t)
            p.push_back(oracle::random_complex(16, 6, rng));
        const RMatrix w = RMatrix::Ones(6, 5);
        omp_set_num_threads(4);
        const auto a = rate_matrix(ch, p, w, 1.0);
        const auto b = rate_matrix_serial(ch, p, w, 1.0);
        CHECK(a.rates == b.rates);
        CHECK(a.total == b.total);
    }

    TEST_CASE("candidate evaluation")
    {
        SystemConfig c;
        c.n_bs = 16;
        c.gamma = {0.005};
        std::mt19937_64 rng(223);
        const auto ch = generate_channel(c, LinkBudget(), PathSpec(), rng);
        std::mt19937_64 a(5), b(5);
        omp_set_num_threads(3);
        const auto r1 = run_iprs(ch, c, 6, a);
        const auto r2 = run_iprs_serial(ch, c, 6, b);
        CHECK(r1.best_pattern == r2.best_pattern);
        CHECK(r1.per_candidate_totals == r2.per_candidate_totals);
        CHECK(r1.best_report.rates == r2.best_report.rates);
        CHECK(r1.feasible == r2.feasible);
    }

    TEST_CASE("per-slot factorization")
    {
        SystemConfig c;
        std::mt19937_64 rng(227);
        PrecoderSet p;
        for (int t = 0; t < 3; ++t)
            p.slots.push_back(oracle::random_complex(c.n_bs, c.n_s, rng));
        std::mt19937_64 a(9), b(9);
        omp_set_num_threads(3);
        const auto h1 = factorize_all(p, c, a);
        const auto h2 = factorize_all_serial(p, c, b);
        REQUIRE(h1.slots.size() == h2.slots.size());
        for (std::size_t t = 0; t < h1.slots.size(); ++t)
        {
            CHECK(h1.slots[t].f == h2.slots[t].f);
            CHECK(h1.slots[t].q == h2.slots[t].q);
            CHECK(h1.slots[t].residual == h2.slots[t].residual);
        }
    }
}
