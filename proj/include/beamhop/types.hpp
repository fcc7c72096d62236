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

#ifndef BEAMHOP_TYPES_HPP
#define BEAMHOP_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamhop
{

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using IMatrix = Eigen::MatrixXi;

enum class ErrorKind
{
    DimensionMismatch,
    NonFiniteInput,
    InvalidSize,
    InvalidDimensions,
    TooLarge,
    Unrepairable,
    NonPositiveLogArgument,
    NoCandidates,
    Parse,
    Validation,
    Io
};

const char *to_string(ErrorKind kind);

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Outcome of an iterative solve. Solvers report these instead of throwing so the
// best-effort iterate always travels with the flag.
enum class SolveStatus
{
    Optimal,
    Infeasible,
    MaxIterations
};

const char *to_string(SolveStatus status);

enum class OuterStop
{
    Plateau,
    FixedIterations
};

// Iteration caps T1..T5, solver accuracies and plateau thresholds.
struct SolverSettings
{
    int t1 = 20; // FP iterations per IPRS candidate
    int t2 = 20; // IPAO beamforming loop
    int t3 = 20; // IPAO pattern loop
    int t4 = 15; // IPAO outer alternations
    int t5 = 50; // HBF alternations
    double eps1 = 1e-6;
    double eps2 = 1e-6;
    double plateau_tol = 1e-4;
    OuterStop outer_stop = OuterStop::Plateau;
    int max_newton_steps = 2000;
    int riemann_max_iters = 100;
    int hbf_restarts = 3;
    bool riemann_conjugate_gradient = false;
};

struct SystemConfig
{
    int n_bs = 32;
    int n_s = 6;
    int n_rf = 6;
    int k_beams = 2;
    int m_slots = 3;
    double p_tot = 100.0;
    std::vector<double> gamma; // per beam position, bit/s/Hz
    double sigma_sq = 1.0;
    SolverSettings solver;
    std::uint64_t rng_seed = 1;

    // Every violated invariant, one message each. Empty when valid.
    std::vector<std::string> violations() const;
    void validate() const;

    // Threshold of beam n (a single entry broadcasts to every beam).
    double gamma_of(int n) const;
    RVector gamma_vector() const;
};

struct ChannelSet
{
    CMatrix h; // N_s x N_BS, row n is h_n

    Eigen::Index n_s() const { return h.rows(); }
    Eigen::Index n_bs() const { return h.cols(); }
};

// Fully-digital precoders, one N_BS x N_s matrix per slot (column n is p_n^t).
struct PrecoderSet
{
    std::vector<CMatrix> slots;

    std::size_t m_slots() const { return slots.size(); }
    double slot_power(std::size_t t) const { return slots[t].squaredNorm(); }
};

} // namespace beamhop

#endif
