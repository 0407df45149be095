// irsfd  simulation and optimization toolkit for IRS-assisted full-duplex links
// Copyright (C) 2026 irsfd contributors
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
//
// Joint design of reflection coefficients, BS transmit power, and uplink
// power for the single-pair single-antenna full-duplex link. Successive
// convex approximation: each iteration solves a second-order cone program
// built from bounds that are tight at the current operating point, then
// re-anchors the expansion point at the exact rates of the new iterate.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsfd/config.hpp"
#include "irsfd/convex.hpp"
#include "irsfd/metrics.hpp"
#include "irsfd/scenario.hpp"

namespace irsfd {

// Single-pair channels reduced to homogenized coefficient vectors. With
// v_hat = [v; 1] the effective links are plain inner products:
//   h_hat^H v_hat = conjugate of the effective downlink channel,
//   f_hat^H v_hat = effective uplink channel,
//   g_hat^H v_hat = effective loopback channel.
// Every coefficient is divided by the noise amplitude, so sigma_sq is 1 and
// SINRs computed from this view equal those on the raw channel set.
struct SimpleChannels {
    CVec h_hat;
    CVec f_hat;
    CVec g_hat;
    cplx q = 0.0;  // uplink-to-downlink co-channel coefficient, same scaling
    double sigma_sq = 1.0;

    int n_irs() const { return static_cast<int>(h_hat.size()) - 1; }
};

// Requires one downlink user, one uplink user, and one antenna per BS end.
SimpleChannels build_simple(const ChannelSet& ch, double noise_power);

double dl_sinr_simple(const SimpleChannels& sc, const CVec& v_hat, double p_bs,
                      double p_ul);
double ul_sinr_simple(const SimpleChannels& sc, const CVec& v_hat, double p_bs,
                      double p_ul);

// Which link directions the program carries. The reduced modes serve the
// half-duplex and single-direction designs: kDlOnly drops the uplink chain
// and the co-channel term, kUlOnly drops the downlink chain and the loopback
// constraint (the BS does not transmit).
enum class ScaMode { kFull, kDlOnly, kUlOnly };

// Expansion point of one iteration. The slack anchors are self-consistent
// with (v_r, p_bs_r, p_ul_r): the t are exact sqrt-SINRs, the beta their
// defining ratios, and psi_bs_r = beta_bs_r / p_bs_r, so the point itself is
// feasible for the program assembled around it.
struct ScaState {
    CVec v_r;              // homogenized reflection vector, last entry 1
    double p_bs_r = 0.0;   // BS transmit power, Watts
    double p_ul_r = 0.0;   // uplink transmit power, Watts
    double t_d_r = 0.0;    // sqrt downlink SINR
    double t_u_r = 0.0;    // sqrt uplink SINR
    double beta_d_r = 0.0;
    double beta_u_r = 0.0;
    double beta_bs_r = 0.0;
    double psi_bs_r = 0.0;
    int iter = 0;

    // Checks the constant last entry and the hyperbolic/loopback feasibility
    // of the anchors within 1e-9 relative slack; throws on violation.
    void validate() const;
};

// Recomputes all slack anchors exactly at (v_hat, p_bs, p_ul). Unused
// directions of a reduced mode are zeroed.
ScaState anchor_state(const SimpleChannels& sc, ScaMode mode, const CVec& v_hat,
                      double p_bs, double p_ul, int iter = 0);

// Random unit-modulus reflection vector, full power on the active links,
// slacks anchored there. Throws when a required SINR vanishes at that point.
ScaState init_state(const SimpleChannels& sc, const SystemConfig& cfg,
                    std::uint64_t seed, ScaMode mode = ScaMode::kFull);

// A point at which the bounds below are evaluated.
struct ScaQuery {
    CVec v_hat;
    double p_bs = 0.0;
    double p_ul = 0.0;
    double t_d = 0.0;
    double t_u = 0.0;
    double beta_d = 0.0;
    double beta_u = 0.0;
    double beta_bs = 0.0;
};

// Bound values around a state: gamma_lb and rho_lb lower-bound the
// quadratic-over-linear link qualities |h_hat^H v_hat|^2 / beta_d and
// |f_hat^H v_hat|^2 / beta_u, lambda_ub upper-bounds the product
// beta_bs * p_bs, and eta_lb lower-bounds 1 + t^2. All four are tight when
// the query equals the expansion point.
struct SurrogateValues {
    double gamma_lb = 0.0;
    double rho_lb = 0.0;
    double lambda_ub = 0.0;
    double eta_lb_d = 0.0;
    double eta_lb_u = 0.0;
};

SurrogateValues surrogate_bounds(const ScaState& state, const SimpleChannels& sc,
                                 const ScaQuery& query);

// Assembly options. freeze_v drops the reflection coefficients from the
// variable set and treats them as the constants stored in the state; the
// unit-modulus relaxation rows disappear with them.
struct ScaAssembly {
    ScaMode mode = ScaMode::kFull;
    bool freeze_v = false;
};

// Column indices of the assembled program; -1 marks an absent variable.
// Reflection coefficients are interleaved re/im pairs starting at v_base.
struct ScaVarMap {
    int v_base = -1;
    int p_bs = -1;
    int p_ul = -1;
    int t_d = -1;
    int t_u = -1;
    int beta_d = -1;
    int beta_u = -1;
    int beta_bs = -1;
    int kappa_d = -1;
    int kappa_u = -1;
    int u_d = -1;
    int u_u = -1;

    int v_re(int j) const { return v_base + 2 * j; }
    int v_im(int j) const { return v_base + 2 * j + 1; }
};

struct ScaProgram {
    ConicProgram prog;
    ScaVarMap vars;
    ScaAssembly opts;
};

// Convex program of one iteration around the given state. Cone blocks are
// tagged for introspection: "homogenize" pins the constant entry of v_hat,
// "modulus" holds the per-element unit-disk rows, "hyperbolic" the two
// t^2 <= beta * power cones, "surrogate" the two affine bound rows,
// "si_rotated" the loopback power cone, "lambda_ub" the power-product cap,
// "kappa_bound" the rate-slack rows, "power_box" the power intervals, and
// "objective_log" the exponential cones behind the log objective.
ScaProgram assemble_socp(const ScaState& state, const SimpleChannels& sc,
                         const SystemConfig& cfg, const ScaAssembly& opts = {});

struct ScaResult {
    PhaseVector v;
    double p_bs = 0.0;
    double p_ul = 0.0;
    RateReport report;
    std::vector<double> trace;        // exact objective after each accepted step
    std::vector<double> refit_trace;  // same, during the fixed-phase power refit
    int iters = 0;                    // total cone programs solved
    bool converged = false;
    double relaxed_objective = 0.0;   // objective before the unit-modulus projection
    std::string status = "ok";
};

// Full pipeline: iterate on the unit-disk relaxation until the objective
// gain drops below cfg.epsilon (cap 200 iterations), project each
// coefficient to the unit circle, then refit powers and slacks with the
// reflection frozen. Both traces are non-decreasing within solver tolerance.
// The loop runs once from the seeded full-power start and, in the joint
// mode, once from each lopsided power start (one side backed off 40 dB);
// the best finished design is returned, since a side whose rate slack
// starts at zero has a flat surrogate tangent and cannot re-ignite.
ScaResult run(const ChannelSet& ch, const SystemConfig& cfg, std::uint64_t seed,
              ScaMode mode = ScaMode::kFull);

// Power and slack design with the reflection held at v_fixed, any moduli
// up to 1. Serves the fixed-reflection baselines; the loop lands in trace.
ScaResult run_frozen(const ChannelSet& ch, const SystemConfig& cfg,
                     const PhaseVector& v_fixed, ScaMode mode = ScaMode::kFull);

}  // namespace irsfd
