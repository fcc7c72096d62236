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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "beamhop/channel.hpp"
#include "beamhop/fp_engine.hpp"
#include "beamhop/harness.hpp"
#include "beamhop/hbf_am.hpp"
#include "beamhop/scheme_ipao.hpp"
#include "beamhop/scheme_iprs.hpp"
#include "../oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

using namespace beamhop;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string &title, double limit_s, const std::function<Outcome()> &body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
        o = body();
    }
    catch (const std::exception &e)
    {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0.0 && secs > limit_s)
    {
        o.pass = false;
        o.detail += "; over the " + format_double(limit_s) + " s budget";
    }
    if (!o.pass)
        ++failures;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

SystemConfig make_config(int n_bs, int n_s, int k, int m, double p_tot, double gamma)
{
    SystemConfig c;
    c.n_bs = n_bs;
    c.n_s = n_s;
    c.n_rf = std::min(n_bs, std::max(k, n_s));
    c.k_beams = k;
    c.m_slots = m;
    c.p_tot = p_tot;
    c.gamma = {gamma};
    return c;
}

ChannelSet channel_for(const SystemConfig &c, std::uint64_t seed)
{
    std::mt19937_64 rng(trial_seed(seed, 0, 0));
    return generate_channel(c, LinkBudget(), PathSpec(), rng);
}

ExperimentSpec sweep_spec(const SystemConfig &base, SweepAxis axis, std::vector<SweepValue> values, Scheme scheme,
                          int trials)
{
    ExperimentSpec s;
    s.name = "acceptance";
    s.base = base;
    s.axis = axis;
    s.values = std::move(values);
    s.scheme = scheme;
    s.trials = trials;
    s.seed_base = 2026;
    return s;
}

std::vector<SweepRow> run_rows(const ExperimentSpec &spec)
{
    RunOptions o;
    o.write_outputs = false;
    return run_experiment(spec, o).rows;
}

std::string read_file(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Shared by criteria 5 and 11: IPAO at the convergence-study point, 20 seeds.
struct IpaoStudy
{
    std::vector<IpaoResult> runs;
    std::vector<ChannelSet> channels;
    SystemConfig config;
};

const IpaoStudy &ipao_study()
{
    static IpaoStudy study = [] {
        IpaoStudy s;
        s.config = make_config(32, 6, 2, 3, 100.0, 0.01);
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            s.channels.push_back(channel_for(s.config, seed));
            std::mt19937_64 rng(trial_seed(seed, 0, 1));
            s.runs.push_back(run_ipao(s.channels.back(), s.config, rng));
        }
        return s;
    }();
    return study;
}

// Criteria 3 and 4 use the same ten channels.
struct TinyStudy
{
    std::vector<ChannelSet> channels;
    std::vector<IprsResult> exhaustive;
    SystemConfig config;
};

const TinyStudy &tiny_study()
{
    static TinyStudy study = [] {
        TinyStudy s;
        s.config = make_config(4, 4, 2, 2, 100.0, 0.0);
        const auto patterns = enumerate_patterns(4, 2, 2);
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
        {
            s.channels.push_back(channel_for(s.config, seed));
            s.exhaustive.push_back(evaluate_candidates(s.channels.back(), s.config, patterns));
        }
        return s;
    }();
    return study;
}

Outcome transform_identity()
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int bs[] = {2, 4, 8}, ns[] = {2, 4}, ms[] = {1, 2};
    double worst_f = 0.0, worst_g = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const int n_bs = bs[i % 3], n_s = ns[(i / 3) % 2], m = ms[(i / 6) % 2];
        ChannelSet ch{oracle::random_complex(n_s, n_bs, rng)};
        PrecoderSet p;
        for (int t = 0; t < m; ++t)
            p.slots.push_back(oracle::random_complex(n_bs, n_s, rng));
        RMatrix binary(n_s, m), relaxed(n_s, m);
        for (int n = 0; n < n_s; ++n)
            for (int t = 0; t < m; ++t)
            {
                binary(n, t) = u(rng) < 0.6 ? 1.0 : 0.0;
                relaxed(n, t) = u(rng);
            }
        const double sigma = 0.2 + u(rng);
        const auto mu = update_mu(ch, p, binary, sigma);
        const RMatrix f = surrogate_f(ch, p, binary, mu, sigma);
        worst_f = std::max(worst_f, (f - rate_matrix(ch, p, binary, sigma).rates).cwiseAbs().maxCoeff());

        const auto x = RelaxedPattern::from_matrix(relaxed);
        const auto vec = build_ip_vectorization(ch, p, update_xi(ch, p, x, sigma), sigma);
        const RVector g = vec.evaluate(x.x_vec);
        const RMatrix r = rate_matrix(ch, p, relaxed, sigma).rates;
        for (int t = 0; t < m; ++t)
            for (int n = 0; n < n_s; ++n)
                worst_g = std::max(worst_g, std::abs(g[vec.index(n, t)] - r(n, t)));
    }
    return {worst_f < 1e-10 && worst_g < 1e-10, "max|f-R| = " + num(worst_f) + ", max|g-R| = " + num(worst_g)};
}

Outcome fp_monotone()
{
    const auto config = make_config(8, 4, 2, 2, 100.0, 0.0);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const auto ch = channel_for(config, seed);
        std::mt19937_64 rng(trial_seed(seed, 0, 1));
        const RMatrix w = random_pattern(4, 2, 2, rng).weights();
        const auto fp = run_fp(ch, w, config, initial_precoders(ch, w, config), 20, 0.0);
        for (std::size_t i = 1; i < fp.trace.size(); ++i)
            worst = std::max(worst, fp.trace[i - 1] - fp.trace[i]);
    }
    return {worst <= 1e-5, "largest decrease " + num(worst)};
}

Outcome exhaustive_oracle()
{
    const auto &s = tiny_study();
    const auto patterns = enumerate_patterns(4, 2, 2);
    int matched = 0;
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < s.channels.size(); ++i)
    {
        const auto bf = oracle::brute_force(s.channels[i], s.config, patterns);
        const auto &r = s.exhaustive[i];
        if (bf.best >= 0 && r.best_pattern == patterns[static_cast<std::size_t>(bf.best)])
            ++matched;
        worst_gap = std::max(worst_gap, std::abs(r.best_report.total - bf.best_total) / bf.best_total);
    }
    return {matched == 10 && worst_gap <= 0.01,
            std::to_string(matched) + "/10 best patterns matched, worst total gap " + num(100 * worst_gap) + "%"};
}

Outcome ipao_vs_oracle()
{
    const auto &s = tiny_study();
    double ratio = 0.0, worst_excess = -1e300;
    for (std::size_t i = 0; i < s.channels.size(); ++i)
    {
        std::mt19937_64 rng(trial_seed(i + 1, 0, 1));
        const auto r = run_ipao(s.channels[i], s.config, rng);
        const double best = s.exhaustive[i].best_report.total;
        worst_excess = std::max(worst_excess, r.report.total - best);
        ratio += r.report.total / best;
    }
    ratio /= static_cast<double>(s.channels.size());
    return {worst_excess <= 1e-6 && ratio >= 0.85,
            "mean IPAO/exhaustive " + num(ratio) + ", largest excess " + num(worst_excess)};
}

Outcome ipao_convergence()
{
    const auto &s = ipao_study();
    int fast = 0;
    for (const auto &r : s.runs)
    {
        const auto &tr = r.outer_trace;
        for (std::size_t i = 1; i < tr.size() && tr[i].first <= 10; ++i)
            if (std::abs(tr[i].second - tr[i - 1].second) < 0.01 * std::abs(tr[i - 1].second))
            {
                ++fast;
                break;
            }
    }
    return {fast >= 18, std::to_string(fast) + "/20 seeds below 1% change within 10 outer iterations"};
}

Outcome power_sweep()
{
    const auto spec = sweep_spec(make_config(32, 6, 2, 3, 100.0, 0.01), SweepAxis::PTot,
                                 {{80.0}, {100.0}, {120.0}}, Scheme::Ipao, 20);
    const auto rows = run_rows(spec);
    const double ratio = rows[2].mean_total / rows[0].mean_total;
    const bool increasing = rows[0].mean_total < rows[1].mean_total && rows[1].mean_total < rows[2].mean_total;
    return {increasing && ratio >= 1.2 && ratio <= 1.8,
            "means " + num(rows[0].mean_total) + " < " + num(rows[1].mean_total) + " < " + num(rows[2].mean_total) +
                ", 120/80 ratio " + num(ratio)};
}

Outcome threshold_trend()
{
    auto spec = load_config(std::string(BEAMHOP_PRESET_DIR) + "/paper_fig2.json");
    spec.trials = 20;
    const auto rows = run_rows(spec);
    bool ok = true;
    std::string means;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        means += (i ? ", " : "") + rows[i].axis + ": " + num(rows[i].mean_total);
        if (i > 0 && rows[i].mean_total > rows[i - 1].mean_total)
            ok = false;
    }
    return {ok, "gamma sweep " + means};
}

Outcome antenna_trend()
{
    const auto spec = sweep_spec(make_config(64, 6, 2, 3, 120.0, 0.01), SweepAxis::NBs, {{64.0}, {96.0}},
                                 Scheme::Iprs, 20);
    const auto rows = run_rows(spec);
    const double gain = rows[1].mean_total / rows[0].mean_total - 1.0;
    return {gain >= 0.15, "N_BS 96 over 64: +" + num(100 * gain) + "%"};
}

Outcome km_trend()
{
    SweepValue a, b;
    a.k = 2, a.m = 3, a.n_s = 6;
    b.k = 3, b.m = 2, b.n_s = 6;
    const auto spec = sweep_spec(make_config(32, 6, 2, 3, 100.0, 0.01), SweepAxis::KmPairs, {a, b}, Scheme::Ipao, 20);
    const auto rows = run_rows(spec);
    const double gain = rows[0].mean_total / rows[1].mean_total - 1.0;
    return {gain >= 0.10, "(2,3) over (3,2): +" + num(100 * gain) + "%"};
}

Outcome hbf_suite()
{
    double modulus = 0.0, power = 0.0, rise = 0.0;
    auto check = [&](const HybridPrecoder &h, double p_tot) {
        modulus = std::max(modulus, (h.f.cwiseAbs().array() - 1.0).abs().maxCoeff());
        power = std::max(power, std::abs((h.f * h.q).squaredNorm() - p_tot) / p_tot);
        for (std::size_t i = 1; i < h.residual_trace.size(); ++i)
            rise = std::max(rise, h.residual_trace[i] - h.residual_trace[i - 1]);
    };

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    auto phases = [&](int r, int c) {
        CMatrix f(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                f(i, j) = std::polar(1.0, phase(rng));
        return f;
    };

    // Full-size targets.
    const auto big = make_config(32, 6, 2, 3, 100.0, 0.01);
    for (int i = 0; i < 5; ++i)
        check(factorize(oracle::random_complex(32, 6, rng), big, rng), big.p_tot);

    // Planted F0 Q0 with N_RF = N_s.
    int recovered = 0, planted = 0;
    for (const auto &[n_bs, n_rf] : std::vector<std::pair<int, int>>{{8, 2}, {16, 2}, {8, 4}})
    {
        auto c = make_config(n_bs, n_rf, 1, n_rf, 10.0, 0.0);
        c.n_rf = n_rf;
        for (int i = 0; i < 10; ++i)
        {
            const auto h = factorize(phases(n_bs, n_rf) * oracle::random_complex(n_rf, n_rf, rng), c, rng);
            check(h, c.p_tot);
            ++planted;
            recovered += h.residual < 1e-3 ? 1 : 0;
        }
    }
    const bool ok = modulus < 1e-12 && power < 1e-9 && rise <= 1e-10 && recovered == planted;
    return {ok, "unit-modulus error " + num(modulus) + ", power error " + num(power) + ", largest residual rise " +
                    num(rise) + ", planted recovered " + std::to_string(recovered) + "/" + std::to_string(planted)};
}

Outcome hbf_gap()
{
    const auto &s = ipao_study();
    double fdbf = 0.0, hbf = 0.0;
    for (std::size_t i = 0; i < s.runs.size(); ++i)
    {
        const auto &r = s.runs[i];
        std::mt19937_64 rng(trial_seed(i + 1, 0, 2));
        const auto batch = factorize_all(r.precoders, s.config, rng);
        if (!batch.errors.empty())
            return {false, batch.errors.front()};
        fdbf += r.report.total;
        hbf += rate_matrix(s.channels[i], effective_precoders(batch.slots), r.pattern.weights(), s.config.sigma_sq)
                   .total;
    }
    fdbf /= 20.0;
    hbf /= 20.0;
    return {hbf <= fdbf && hbf >= 0.7 * fdbf, "mean HBF " + num(hbf) + " vs FDBF " + num(fdbf) + " (ratio " +
                                                  format_double(hbf / fdbf) + ")"};
}

Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / "beamhop_acceptance_determinism";
    fs::remove_all(root);
    int presets = 0, identical = 0;
    std::string mismatched;
    for (const auto &entry : fs::directory_iterator(BEAMHOP_PRESET_DIR))
    {
        if (entry.path().extension() != ".json")
            continue;
        auto spec = load_config(entry.path().string());
        spec.trials = 1;
        std::string csv[2];
        for (int run = 0; run < 2; ++run)
        {
            spec.output_path = (root / (spec.name + "_" + std::to_string(run))).string();
            RunOptions o;
            o.threads = run + 1;
            run_experiment(spec, o);
            csv[run] = read_file(fs::path(spec.output_path) / "summary.csv");
        }
        ++presets;
        if (!csv[0].empty() && csv[0] == csv[1])
            ++identical;
        else
            mismatched += " " + spec.name;
    }
    fs::remove_all(root);
    return {presets > 0 && identical == presets,
            std::to_string(identical) + "/" + std::to_string(presets) + " presets byte-identical (1 trial per point)" +
                (mismatched.empty() ? "" : ", differing:" + mismatched)};
}

} // namespace

int main()
{
    report(1, "quadratic-transform identity", 10, transform_identity);
    report(2, "FP monotonicity", 120, fp_monotone);
    report(3, "exhaustive-oracle equivalence", 300, exhaustive_oracle);
    report(4, "IPAO vs exhaustive oracle", 600, ipao_vs_oracle);
    report(5, "IPAO convergence speed", 1800, ipao_convergence);
    report(6, "power-sweep trend", 1800, power_sweep);
    report(7, "threshold trend", 0, threshold_trend);
    report(8, "antenna trend", 0, antenna_trend);
    report(9, "(K,M) trend", 0, km_trend);
    report(10, "HBF factorization suite", 120, hbf_suite);
    report(11, "HBF vs FDBF gap", 1800, hbf_gap);
    report(12, "determinism", 0, determinism);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
