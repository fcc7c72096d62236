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

// Serial reference loops against the OpenMP kernels. Set OMP_NUM_THREADS to vary the pool.
#include "beamhop/channel.hpp"
#include "beamhop/fp_engine.hpp"
#include "beamhop/hbf_am.hpp"
#include "beamhop/scheme_ipao.hpp"
#include "beamhop/scheme_iprs.hpp"

#include <benchmark/benchmark.h>

using namespace beamhop;

namespace
{

SystemConfig bench_config(int n_bs)
{
    SystemConfig c;
    c.n_bs = n_bs;
    c.n_s = 6;
    c.n_rf = 6;
    c.k_beams = 2;
    c.m_slots = 3;
    c.p_tot = 100.0;
    c.gamma = {0.01};
    return c;
}

struct Fixture
{
    SystemConfig config;
    ChannelSet channel;
    IlluminationPattern pattern;
    PrecoderSet precoders;

    explicit Fixture(int n_bs) : config(bench_config(n_bs))
    {
        std::mt19937_64 rng(99);
        channel = generate_channel(config, LinkBudget(), PathSpec(), rng);
        pattern = random_pattern(config.n_s, config.k_beams, config.m_slots, rng);
        precoders = initial_precoders(channel, pattern.weights(), config);
    }
};

void BM_RateMatrix(benchmark::State &state, bool serial)
{
    const Fixture fx(static_cast<int>(state.range(0)));
    const RMatrix w = fx.pattern.weights();
    for (auto _ : state)
    {
        auto r = serial ? rate_matrix_serial(fx.channel, fx.precoders.slots, w, fx.config.sigma_sq)
                        : rate_matrix(fx.channel, fx.precoders.slots, w, fx.config.sigma_sq);
        benchmark::DoNotOptimize(r.total);
    }
}

void BM_Iprs(benchmark::State &state, bool serial)
{
    const Fixture fx(static_cast<int>(state.range(0)));
    for (auto _ : state)
    {
        std::mt19937_64 rng(5);
        auto r = serial ? run_iprs_serial(fx.channel, fx.config, 4, rng) : run_iprs(fx.channel, fx.config, 4, rng);
        benchmark::DoNotOptimize(r.best_report.total);
    }
}

void BM_Factorize(benchmark::State &state, bool serial)
{
    const Fixture fx(static_cast<int>(state.range(0)));
    for (auto _ : state)
    {
        std::mt19937_64 rng(5);
        auto r = serial ? factorize_all_serial(fx.precoders, fx.config, rng)
                        : factorize_all(fx.precoders, fx.config, rng);
        benchmark::DoNotOptimize(r.slots.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(BM_RateMatrix, serial, true)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(BM_RateMatrix, openmp, false)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(BM_Iprs, serial, true)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Iprs, openmp, false)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Factorize, serial, true)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Factorize, openmp, false)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
