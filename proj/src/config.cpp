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

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace beamhop
{

using nlohmann::json;

namespace
{

constexpr std::uint64_t kMaxAutoCandidates = 200;

class Reader
{
public:
    Reader(const json &node, std::string path, std::string origin)
        : node_(node), path_(std::move(path)), origin_(std::move(origin))
    {
        if (!node_.is_object())
            fail(path_.empty() ? "top level" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char *> keys) const
    {
        std::set<std::string> known(keys.begin(), keys.end());
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!known.count(it.key()))
                fail(field(it.key()), "unknown key");
    }

    bool has(const char *key) const { return node_.contains(key); }
    const json &at(const char *key) const { return node_.at(key); }
    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const std::string &where, const std::string &what) const
    {
        throw Error(ErrorKind::Parse, origin_ + ": field '" + where + "': " + what);
    }

    int integer(const char *key, int fallback) const
    {
        if (!has(key))
            return fallback;
        const auto &v = at(key);
        if (!v.is_number_integer())
            fail(field(key), "expected an integer");
        const auto x = v.get<long long>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
            fail(field(key), "integer out of range");
        return static_cast<int>(x);
    }

    int required_integer(const char *key) const
    {
        if (!has(key))
            fail(field(key), "required");
        return integer(key, 0);
    }

    double number(const char *key, double fallback) const
    {
        if (!has(key))
            return fallback;
        const auto &v = at(key);
        if (!v.is_number())
            fail(field(key), "expected a number");
        return v.get<double>();
    }

    bool boolean(const char *key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const auto &v = at(key);
        if (!v.is_boolean())
            fail(field(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char *key, const std::string &fallback) const
    {
        if (!has(key))
            return fallback;
        const auto &v = at(key);
        if (!v.is_string())
            fail(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::uint64_t unsigned64(const char *key, std::uint64_t fallback) const
    {
        if (!has(key))
            return fallback;
        const auto &v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(field(key), "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    Reader child(const char *key) const { return Reader(at(key), field(key), origin_); }

    const std::string &origin() const { return origin_; }

private:
    const json &node_;
    std::string path_;
    std::string origin_;
};

std::pair<std::size_t, std::size_t> line_and_column(const std::string &text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
        {
            ++col;
        }
    }
    return {line, col};
}

SweepAxis parse_axis(const Reader &r, const std::string &name)
{
    if (name == "p_tot")
        return SweepAxis::PTot;
    if (name == "gamma")
        return SweepAxis::Gamma;
    if (name == "n_bs")
        return SweepAxis::NBs;
    if (name == "km_pairs")
        return SweepAxis::KmPairs;
    r.fail(r.field("axis"), "expected one of p_tot, gamma, n_bs, km_pairs");
}

std::vector<SweepValue> parse_values(const Reader &r, SweepAxis axis, int base_n_s)
{
    if (!r.has("values"))
        r.fail(r.field("values"), "required");
    const auto &values = r.at("values");
    if (!values.is_array())
        r.fail(r.field("values"), "expected an array");
    std::vector<SweepValue> out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const auto &v = values[i];
        const std::string where = r.field("values") + "[" + std::to_string(i) + "]";
        SweepValue sv;
        if (axis == SweepAxis::KmPairs)
        {
            if (!v.is_array() || (v.size() != 2 && v.size() != 3))
                r.fail(where, "expected [K, M] or [K, M, N_s]");
            for (const auto &e : v)
                if (!e.is_number_integer())
                    r.fail(where, "entries must be integers");
            sv.k = v[0].get<int>();
            sv.m = v[1].get<int>();
            sv.n_s = v.size() == 3 ? v[2].get<int>() : sv.k * sv.m;
            (void)base_n_s;
        }
        else if (axis == SweepAxis::NBs)
        {
            if (!v.is_number_integer())
                r.fail(where, "expected an integer");
            sv.scalar = v.get<double>();
        }
        else
        {
            if (!v.is_number())
                r.fail(where, "expected a number");
            sv.scalar = v.get<double>();
        }
        out.push_back(sv);
    }
    return out;
}

int default_n_rf(int n_bs, int n_s, int k)
{
    return std::min(n_bs, std::max(k, n_s));
}

json number_json(double v)
{
    return json(v);
}

} // namespace

const char *to_string(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::PTot:
        return "p_tot";
    case SweepAxis::Gamma:
        return "gamma";
    case SweepAxis::NBs:
        return "n_bs";
    case SweepAxis::KmPairs:
        return "km_pairs";
    }
    return "?";
}

const char *to_string(Scheme scheme)
{
    return scheme == Scheme::Iprs ? "iprs" : "ipao";
}

const char *to_string(Stage stage)
{
    return stage == Stage::Fdbf ? "fdbf" : "hbf";
}

std::string SweepValue::label(SweepAxis axis) const
{
    switch (axis)
    {
    case SweepAxis::KmPairs:
        return std::to_string(k) + "x" + std::to_string(m) + (n_s != k * m ? "x" + std::to_string(n_s) : "");
    case SweepAxis::NBs:
        return std::to_string(static_cast<long long>(scalar));
    default:
        return format_double(scalar);
    }
}

SystemConfig ExperimentSpec::config_for(const SweepValue &value) const
{
    SystemConfig c = base;
    switch (axis)
    {
    case SweepAxis::PTot:
        c.p_tot = value.scalar;
        break;
    case SweepAxis::Gamma:
        c.gamma = {value.scalar};
        break;
    case SweepAxis::NBs:
        c.n_bs = static_cast<int>(value.scalar);
        c.n_rf = std::min(c.n_rf, c.n_bs);
        break;
    case SweepAxis::KmPairs:
        c.k_beams = value.k;
        c.m_slots = value.m;
        c.n_s = value.n_s;
        c.n_rf = std::min(c.n_bs, std::max(c.n_rf, value.k));
        break;
    }
    c.rng_seed = seed_base;
    return c;
}

int ExperimentSpec::candidates_for(const SystemConfig &config) const
{
    if (iprs_candidates > 0)
        return iprs_candidates;
    if (static_cast<long long>(config.k_beams) * config.m_slots == config.n_s)
        return static_cast<int>(
            std::min(count_unordered_patterns(config.n_s, config.k_beams, config.m_slots), kMaxAutoCandidates));
    return 20;
}

std::vector<std::string> ExperimentSpec::violations() const
{
    std::vector<std::string> out;
    if (values.empty())
        out.push_back("sweep.values must not be empty");
    if (trials < 1)
        out.push_back("trials must be >= 1");
    if (iprs_candidates < 0)
        out.push_back("iprs_candidates must be >= 0");
    if (!budget.valid())
        out.push_back("link parameters must be positive and finite");
    if (!paths.valid())
        out.push_back("paths: n_paths must be >= 1 and angle_min_rad <= angle_max_rad");
    for (const auto &v : base.violations())
        out.push_back(v);
    for (const auto &value : values)
    {
        if (axis == SweepAxis::NBs && !(value.scalar >= 1.0))
        {
            out.push_back("sweep value " + value.label(axis) + ": n_bs must be >= 1");
            continue;
        }
        for (const auto &v : config_for(value).violations())
            out.push_back("sweep value " + value.label(axis) + ": " + v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExperimentSpec parse_config(const std::string &json_text, const std::string &origin)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        const auto [line, col] = line_and_column(json_text, e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                          ": malformed JSON (" + e.what() + ")");
    }

    Reader r(doc, "", origin);
    r.allow({"name", "description", "n_bs", "n_s", "n_rf", "k_beams", "m_slots", "p_tot", "gamma", "sigma_sq",
             "seed", "trials", "scheme", "stage", "iprs_candidates", "output", "sweep", "link", "paths", "solver"});

    ExperimentSpec spec;
    spec.name = r.string("name", "run");
    (void)r.string("description", "");
    auto &c = spec.base;
    c.n_bs = r.required_integer("n_bs");
    c.n_s = r.required_integer("n_s");
    c.k_beams = r.required_integer("k_beams");
    c.m_slots = r.required_integer("m_slots");
    c.n_rf = r.integer("n_rf", default_n_rf(c.n_bs, c.n_s, c.k_beams));
    c.p_tot = r.number("p_tot", 100.0);
    c.sigma_sq = r.number("sigma_sq", 1.0);
    c.gamma = {0.01};
    if (r.has("gamma"))
    {
        const auto &g = r.at("gamma");
        if (g.is_number())
            c.gamma = {g.get<double>()};
        else if (g.is_array() && std::all_of(g.begin(), g.end(), [](const json &e) { return e.is_number(); }))
            c.gamma = g.get<std::vector<double>>();
        else
            r.fail("gamma", "expected a number or an array of numbers");
    }
    spec.seed_base = r.unsigned64("seed", 1);
    c.rng_seed = spec.seed_base;
    spec.trials = r.integer("trials", 1);
    spec.iprs_candidates = r.integer("iprs_candidates", 0);
    spec.output_path = r.string("output", "out/" + spec.name);

    const auto scheme = r.string("scheme", "ipao");
    if (scheme == "iprs")
        spec.scheme = Scheme::Iprs;
    else if (scheme == "ipao")
        spec.scheme = Scheme::Ipao;
    else
        r.fail("scheme", "expected iprs or ipao");
    const auto stage = r.string("stage", "fdbf");
    if (stage == "fdbf")
        spec.stage = Stage::Fdbf;
    else if (stage == "hbf")
        spec.stage = Stage::Hbf;
    else
        r.fail("stage", "expected fdbf or hbf");

    if (r.has("link"))
    {
        const auto l = r.child("link");
        l.allow({"bandwidth_hz", "carrier_hz", "distance_m", "boltzmann", "noise_temp_k", "tx_gain", "rx_gain",
                 "antenna_spacing_wavelengths", "light_speed"});
        auto &b = spec.budget;
        b.bandwidth_hz = l.number("bandwidth_hz", b.bandwidth_hz);
        b.carrier_hz = l.number("carrier_hz", b.carrier_hz);
        b.distance_m = l.number("distance_m", b.distance_m);
        b.boltzmann = l.number("boltzmann", b.boltzmann);
        b.noise_temp_k = l.number("noise_temp_k", b.noise_temp_k);
        b.tx_gain = l.number("tx_gain", b.tx_gain);
        b.rx_gain = l.number("rx_gain", b.rx_gain);
        b.antenna_spacing_wavelengths = l.number("antenna_spacing_wavelengths", b.antenna_spacing_wavelengths);
        b.light_speed = l.number("light_speed", b.light_speed);
    }
    if (r.has("paths"))
    {
        const auto p = r.child("paths");
        p.allow({"n_paths", "rician_factor_db", "angle_min_rad", "angle_max_rad"});
        auto &ps = spec.paths;
        ps.n_paths = p.integer("n_paths", ps.n_paths);
        ps.rician_factor_db = p.number("rician_factor_db", ps.rician_factor_db);
        ps.angle_min_rad = p.number("angle_min_rad", ps.angle_min_rad);
        ps.angle_max_rad = p.number("angle_max_rad", ps.angle_max_rad);
    }
    if (r.has("solver"))
    {
        const auto s = r.child("solver");
        s.allow({"t1", "t2", "t3", "t4", "t5", "eps1", "eps2", "plateau_tol", "outer_stop", "max_newton_steps",
                 "riemann_max_iters", "hbf_restarts", "riemann_conjugate_gradient"});
        auto &o = c.solver;
        o.t1 = s.integer("t1", o.t1);
        o.t2 = s.integer("t2", o.t2);
        o.t3 = s.integer("t3", o.t3);
        o.t4 = s.integer("t4", o.t4);
        o.t5 = s.integer("t5", o.t5);
        o.eps1 = s.number("eps1", o.eps1);
        o.eps2 = s.number("eps2", o.eps2);
        o.plateau_tol = s.number("plateau_tol", o.plateau_tol);
        const auto stop = s.string("outer_stop", "plateau");
        if (stop == "plateau")
            o.outer_stop = OuterStop::Plateau;
        else if (stop == "fixed")
            o.outer_stop = OuterStop::FixedIterations;
        else
            s.fail(s.field("outer_stop"), "expected plateau or fixed");
        o.max_newton_steps = s.integer("max_newton_steps", o.max_newton_steps);
        o.riemann_max_iters = s.integer("riemann_max_iters", o.riemann_max_iters);
        o.hbf_restarts = s.integer("hbf_restarts", o.hbf_restarts);
        o.riemann_conjugate_gradient = s.boolean("riemann_conjugate_gradient", o.riemann_conjugate_gradient);
    }

    if (r.has("sweep"))
    {
        const auto s = r.child("sweep");
        s.allow({"axis", "values"});
        if (!s.has("axis"))
            s.fail(s.field("axis"), "required");
        spec.axis = parse_axis(s, s.string("axis", ""));
        spec.values = parse_values(s, spec.axis, c.n_s);
    }
    else
    {
        spec.axis = SweepAxis::PTot;
        spec.values = {SweepValue{c.p_tot, 0, 0, 0}};
    }

    const auto v = spec.violations();
    if (!v.empty())
    {
        std::ostringstream msg;
        msg << origin << ": " << v.size() << " invalid setting" << (v.size() == 1 ? "" : "s");
        for (const auto &line : v)
            msg << "\n  - " << line;
        throw Error(ErrorKind::Validation, msg.str());
    }
    return spec;
}

ExperimentSpec load_config(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string resolved_config_json(const ExperimentSpec &spec)
{
    const auto &c = spec.base;
    const auto &s = c.solver;
    json j;
    j["name"] = spec.name;
    j["n_bs"] = c.n_bs;
    j["n_s"] = c.n_s;
    j["n_rf"] = c.n_rf;
    j["k_beams"] = c.k_beams;
    j["m_slots"] = c.m_slots;
    j["p_tot"] = number_json(c.p_tot);
    if (c.gamma.size() == 1)
        j["gamma"] = number_json(c.gamma.front());
    else
        j["gamma"] = c.gamma;
    j["sigma_sq"] = number_json(c.sigma_sq);
    j["seed"] = spec.seed_base;
    j["trials"] = spec.trials;
    j["scheme"] = to_string(spec.scheme);
    j["stage"] = to_string(spec.stage);
    j["iprs_candidates"] = spec.iprs_candidates;
    j["output"] = spec.output_path;
    json values = json::array();
    for (const auto &v : spec.values)
    {
        if (spec.axis == SweepAxis::KmPairs)
            values.push_back(json::array({v.k, v.m, v.n_s}));
        else if (spec.axis == SweepAxis::NBs)
            values.push_back(static_cast<long long>(v.scalar));
        else
            values.push_back(number_json(v.scalar));
    }
    j["sweep"] = {{"axis", to_string(spec.axis)}, {"values", values}};
    const auto &b = spec.budget;
    j["link"] = {{"bandwidth_hz", b.bandwidth_hz},
                 {"carrier_hz", b.carrier_hz},
                 {"distance_m", b.distance_m},
                 {"boltzmann", b.boltzmann},
                 {"noise_temp_k", b.noise_temp_k},
                 {"tx_gain", b.tx_gain},
                 {"rx_gain", b.rx_gain},
                 {"antenna_spacing_wavelengths", b.antenna_spacing_wavelengths},
                 {"light_speed", b.light_speed}};
    const auto &p = spec.paths;
    j["paths"] = {{"n_paths", p.n_paths},
                  {"rician_factor_db", p.rician_factor_db},
                  {"angle_min_rad", p.angle_min_rad},
                  {"angle_max_rad", p.angle_max_rad}};
    j["solver"] = {{"t1", s.t1},
                   {"t2", s.t2},
                   {"t3", s.t3},
                   {"t4", s.t4},
                   {"t5", s.t5},
                   {"eps1", s.eps1},
                   {"eps2", s.eps2},
                   {"plateau_tol", s.plateau_tol},
                   {"outer_stop", s.outer_stop == OuterStop::Plateau ? "plateau" : "fixed"},
                   {"max_newton_steps", s.max_newton_steps},
                   {"riemann_max_iters", s.riemann_max_iters},
                   {"hbf_restarts", s.hbf_restarts},
                   {"riemann_conjugate_gradient", s.riemann_conjugate_gradient}};
    return j.dump(2) + "\n";
}

} // namespace beamhop
