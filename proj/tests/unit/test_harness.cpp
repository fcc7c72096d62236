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

#include "beamhop/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beamhop;
namespace fs = std::filesystem;

namespace
{

std::string read_file(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / ("beamhop_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ErrorKind kind_of(const std::string &text)
{
    try
    {
        parse_config(text);
    }
    catch (const Error &e)
    {
        return e.kind();
    }
    FAIL("config was accepted");
    return ErrorKind::Io;
}

std::string message_of(const std::string &text)
{
    try
    {
        parse_config(text, "cfg.json");
    }
    catch (const Error &e)
    {
        return e.what();
    }
    return "";
}

const char *kTiny = R"({"name":"tiny","n_bs":8,"n_s":4,"k_beams":2,"m_slots":2,"gamma":0,"trials":2,
  "scheme":"iprs","iprs_candidates":3,"sweep":{"axis":"p_tot","values":[50,100]}})";

} // namespace

TEST_SUITE("harness")
{
    TEST_CASE("minimal config takes the documented defaults")
    {
        const auto s = parse_config(R"({"n_bs":32,"n_s":6,"k_beams":2,"m_slots":3})");
        CHECK(s.base.n_rf == 6);
        CHECK(s.base.p_tot == 100.0);
        CHECK(s.base.gamma_of(0) == 0.01);
        CHECK(s.base.sigma_sq == 1.0);
        CHECK(s.trials == 1);
        CHECK(s.seed_base == 1);
        CHECK(s.scheme == Scheme::Ipao);
        CHECK(s.stage == Stage::Fdbf);
        CHECK(s.axis == SweepAxis::PTot);
        REQUIRE(s.values.size() == 1);
        CHECK(s.values[0].scalar == 100.0);
        CHECK(s.output_path == "out/run");
        CHECK(s.base.solver.t5 == 50);
        CHECK(s.base.solver.hbf_restarts == 3);
        CHECK(s.candidates_for(s.base) == 15);
    }

    TEST_CASE("coverage requirement and other violations are all reported")
    {
        const auto msg = message_of(R"({"n_bs":8,"n_s":6,"k_beams":2,"m_slots":2,"p_tot":-1})");
        CHECK(msg.find("k_beams * m_slots") != std::string::npos);
        CHECK(msg.find("p_tot") != std::string::npos);
        CHECK(kind_of(R"({"n_bs":8,"n_s":6,"k_beams":2,"m_slots":2})") == ErrorKind::Validation);
        CHECK(kind_of(R"({"n_bs":8,"n_s":4,"k_beams":2,"m_slots":2,"trials":0})") == ErrorKind::Validation);
        CHECK(kind_of(R"({"n_bs":8,"n_s":4,"k_beams":2,"m_slots":2,"sweep":{"axis":"p_tot","values":[]}})") ==
              ErrorKind::Validation);
    }

    TEST_CASE("parse diagnostics")
    {
        CHECK(kind_of(R"({"n_bs":8,"n_s":4,"k_beams":2,"m_slots":2,"colour":1})") == ErrorKind::Parse);
        CHECK(message_of(R"({"n_bs":8,"n_s":4,"k_beams":2,"m_slots":2,"solver":{"t9":1}})").find("solver.t9") !=
              std::string::npos);
        CHECK(message_of(R"({"n_bs":"8","n_s":4,"k_beams":2,"m_slots":2})").find("n_bs") != std::string::npos);
        CHECK(kind_of(R"({"n_s":4,"k_beams":2,"m_slots":2})") == ErrorKind::Parse);
        const auto syntax = message_of("{\n  \"n_bs\": 8,\n  \"n_s\": 4,,\n}");
        CHECK(syntax.find("cfg.json:3") != std::string::npos);
    }

    TEST_CASE("gamma accepts a scalar or one entry per beam")
    {
        const auto s = parse_config(R"({"n_bs":8,"n_s":3,"k_beams":2,"m_slots":2,"gamma":[0,0.01,0.02]})");
        CHECK(s.base.gamma_vector()[2] == 0.02);
        CHECK(kind_of(R"({"n_bs":8,"n_s":3,"k_beams":2,"m_slots":2,"gamma":[0,0.01]})") == ErrorKind::Validation);
    }

    TEST_CASE("sweep points")
    {
        const auto s = parse_config(
            R"({"n_bs":32,"n_s":6,"k_beams":2,"m_slots":3,"sweep":{"axis":"km_pairs","values":[[2,3],[3,2],[2,2,4]]}})");
        REQUIRE(s.values.size() == 3);
        CHECK(s.values[0].label(s.axis) == "2x3");
        CHECK(s.values[2].label(s.axis) == "2x2");
        const auto c = s.config_for(s.values[1]);
        CHECK(c.k_beams == 3);
        CHECK(c.m_slots == 2);
        CHECK(c.n_s == 6);
        CHECK(s.config_for(s.values[2]).n_s == 4);

        const auto n = parse_config(R"({"n_bs":32,"n_s":6,"k_beams":2,"m_slots":3,"sweep":{"axis":"n_bs","values":[8,64]}})");
        CHECK(n.config_for(n.values[1]).n_bs == 64);
        CHECK(n.values[1].label(n.axis) == "64");
        const auto g = parse_config(R"({"n_bs":32,"n_s":6,"k_beams":2,"m_slots":3,"sweep":{"axis":"gamma","values":[0.015]}})");
        CHECK(g.config_for(g.values[0]).gamma_of(5) == 0.015);
        CHECK(g.values[0].label(g.axis) == "0.015");
    }

    TEST_CASE("figure 4 preset")
    {
        const auto s = load_config(std::string(BEAMHOP_PRESET_DIR) + "/paper_fig4.json");
        CHECK(s.base.n_bs == 32);
        CHECK(s.base.n_s == 6);
        CHECK(s.base.k_beams == 2);
        CHECK(s.base.m_slots == 3);
        CHECK(s.base.gamma_of(0) == 0.01);
        CHECK(s.scheme == Scheme::Ipao);
        CHECK(s.axis == SweepAxis::PTot);
        CHECK(s.values.size() == 3);
        CHECK_THROWS_AS(load_config("/nonexistent/beamhop.json"), Error);
    }

    TEST_CASE("resolved config parses back to itself")
    {
        for (const auto &entry : fs::directory_iterator(BEAMHOP_PRESET_DIR))
        {
            const auto s = load_config(entry.path().string());
            const auto text = resolved_config_json(s);
            CHECK(resolved_config_json(parse_config(text)) == text);
        }
    }

    TEST_CASE("trial seeds")
    {
        CHECK(trial_seed(1, 0, 0) == trial_seed(1, 0, 0));
        CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
        CHECK(trial_seed(1, 0, 0) != trial_seed(1, 1, 0));
        CHECK(trial_seed(1, 0, 0) != trial_seed(2, 0, 0));
        CHECK(trial_seed(1ull << 32, 0, 0) != trial_seed(0, 0, 0));
    }

    TEST_CASE("shortest round-trip doubles")
    {
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(120.0) == "120");
        CHECK(format_double(1e-300) == "1e-300");
        const double v = 0.36133543160064036;
        CHECK(std::stod(format_double(v)) == v);
        CHECK(summary_csv_header() == "axis,mean_total,std_total,mean_per_beam_min,infeasible_fraction,wall_time_s,seed_base");
        SweepRow row{"80", 0.5, 0.25, 0.125, 0.0, 3.0, 7};
        CHECK(summary_csv_line(row, false) == "80,0.5,0.25,0.125,0,,7");
        CHECK(summary_csv_line(row, true) == "80,0.5,0.25,0.125,0,3,7");
    }

    TEST_CASE("reruns write identical bytes and the summary matches the records")
    {
        auto spec = parse_config(kTiny);
        const auto a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
        spec.output_path = a.string();
        const auto r1 = run_experiment(spec);
        spec.output_path = b.string();
        RunOptions two_threads;
        two_threads.threads = 2;
        run_experiment(spec, two_threads);
        CHECK(read_file(a / "summary.csv") == read_file(b / "summary.csv"));
        CHECK(read_file(a / "trials.jsonl") == read_file(b / "trials.jsonl"));
        CHECK(fs::exists(a / "resolved_config.json"));

        REQUIRE(r1.rows.size() == 2);
        std::ifstream in(a / "trials.jsonl");
        std::string line;
        std::map<std::string, std::vector<double>> totals;
        while (std::getline(in, line))
        {
            const auto j = nlohmann::json::parse(line);
            totals[j["axis"].get<std::string>()].push_back(j["total"].get<double>());
        }
        for (const auto &row : r1.rows)
        {
            const auto &t = totals[row.axis];
            REQUIRE(t.size() == 2);
            CHECK(std::abs((t[0] + t[1]) / 2.0 - row.mean_total) <= 1e-12);
            CHECK(row.std_total >= 0.0);
            CHECK(row.infeasible_fraction >= 0.0);
            CHECK(row.infeasible_fraction <= 1.0);
        }
        const auto csv = read_file(a / "summary.csv");
        CHECK(csv.find('\r') == std::string::npos);
        CHECK(csv.rfind("axis,", 0) == 0);
        fs::remove_all(a);
        fs::remove_all(b);
    }

    TEST_CASE("hybrid stage records residuals")
    {
        auto spec = parse_config(kTiny);
        spec.stage = Stage::Hbf;
        spec.trials = 1;
        RunOptions opt;
        opt.write_outputs = false;
        const auto r = run_experiment(spec, opt);
        REQUIRE(r.trials.size() == 2);
        CHECK(r.trials[0].hbf_residuals.size() == 2);
        CHECK(r.failed_trials == 0);
    }

    TEST_CASE("unwritable output directory")
    {
        auto spec = parse_config(kTiny);
        const auto blocker = scratch_dir("blocker");
        std::ofstream(blocker.string()) << "x";
        spec.output_path = (blocker / "sub").string();
        try
        {
            run_experiment(spec);
            FAIL("expected an I/O error");
        }
        catch (const Error &e)
        {
            CHECK(e.kind() == ErrorKind::Io);
        }
        fs::remove(blocker);
    }
}
