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

// Joint design of reflection coefficients, BS transmit covariances, and
// uplink powers for the general multi-antenna, multi-user full-duplex
// system. Alternating optimization: the beamforming/power block ascends a
// concave minorant of the weighted sum rate over the semidefinite power
// region, then each reflection coefficient is updated in turn through an
// exact scalar decomposition of the objective. Every accepted step is
// guarded against the true objective, so the trace is non-decreasing.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsfd/common.hpp"
#include "irsfd/config.hpp"
#include "irsfd/metrics.hpp"
#include "irsfd/scenario.hpp"

namespace irsfd {

// Operating point of the alternating loop.
struct EwState {
    PhaseVector v;
    DlCovariances w;
    UlPowerAlloc p;
    int iter = 0;
    double last_wsr = 0.0;
};

// Difference-of-concave split of the weighted sum rate at a fixed
// reflection state: h collects the full-signal log terms, g the
// interference-only ones, and h - g equals wsr() from metrics. Both values
// are in bits and may be negative on their own.
struct DcParts {
    double h = 0.0;
    double g = 0.0;
};

DcParts dc_decomposition(const ChannelSet& ch, const PhaseVector& v,
                         const DlCovariances& w, const UlPowerAlloc& p,
                         double noise_power, double alpha_dl, double alpha_ul);

// Concave minorant of the weighted sum rate in (W, p) around an expansion
// point, at a fixed reflection state. The interference part g is replaced
// by its affine tangent g_ub, so value() = h - g_ub is concave, coincides
// with h - g at the expansion point, and lower-bounds it everywhere on the
// feasible set. Gradients follow the log-det identity and carry the
// bits-per-use scaling.
struct BeamPowerSurrogate {
    std::vector<CVec> h_bar;
    std::vector<CVec> f_bar;
    CMat g_bar;
    RMat cci_sq;  // |co-channel|^2, n_ul x n_dl
    double noise_power = 0.0;
    double alpha_dl = 0.0;
    double alpha_ul = 0.0;

    DlCovariances w_r;
    UlPowerAlloc p_r;
    RVec psi;        // per-user tangent weights of the DL interference logs
    CMat xi_pulled;  // tangent matrix of the loopback log-det, pulled to W space
    double g_r_val = 0.0;

    double h(const DlCovariances& w, const UlPowerAlloc& p) const;
    double g_upper(const DlCovariances& w, const UlPowerAlloc& p) const;
    double value(const DlCovariances& w, const UlPowerAlloc& p) const;

    // Returns value(); when dw or dp is non-null it is filled with the
    // matching gradient block. dw holds one Hermitian matrix per user with
    // the convention d value = sum_k Re tr(dw[k] dW_k); dp is elementwise.
    double value_and_grad(const DlCovariances& w, const UlPowerAlloc& p,
                          std::vector<CMat>* dw, RVec* dp) const;
};

BeamPowerSurrogate beam_power_surrogate(const ChannelSet& ch, const PhaseVector& v,
                                        const DlCovariances& w_r, const UlPowerAlloc& p_r,
                                        double noise_power, double alpha_dl,
                                        double alpha_ul);

struct BeamPowerResult {
    DlCovariances w;
    UlPowerAlloc p;
    double objective = 0.0;  // h - g at the returned point
    int rounds = 0;          // surrogate re-expansions performed
    bool converged = false;
    std::string status = "ok";
};

// Inner loop of the beamforming/power block: maximizes the current
// surrogate by projected gradient ascent over {W_k PSD, sum tr(W_k) <=
// p_bs_max, 0 <= p <= p_ul_max}, re-expands around the improved point, and
// stops when the relative gain of the true objective h - g drops below
// cfg.epsilon. The true objective is non-decreasing across rounds; on any
// failure the best iterate reached is returned.
BeamPowerResult optimize_beam_power(const ChannelSet& ch, const PhaseVector& v,
                                    const DlCovariances& w0, const UlPowerAlloc& p0,
                                    const SystemConfig& cfg);

// Dominant-eigenpair reduction of a transmit covariance to a beamforming
// vector: w = sqrt(l1) u1, loss = 1 - l1 / tr. A zero matrix reduces to the
// zero vector with zero loss. warning records loss > 0.01.
struct Rank1Extraction {
    CVec w;
    double loss = 0.0;
    bool warning = false;
};

Rank1Extraction extract_rank1(const CMat& w_cov);

enum class ElementBranch {
    kDiagonalizable,
    kNilpotent,
};

// Scalar view of the objective in one reflection coefficient v_m with all
// other variables held fixed. On the unit circle the downlink quadratic
// forms collapse to affine functions of v_m and the uplink log-dets to
// logs of real quadratics, so the split below evaluates the exact
// objective there; on the open disk it extends both parts concavely.
//
// The loopback matrix pair (a_m, b_m) drives the case split: b_m = u c^H is
// rank <= 1, and a_m^{-1} b_m is diagonalizable exactly when its trace
// lambda = c^H a_m^{-1} u is nonzero (branch kDiagonalizable); otherwise it
// is nilpotent and the interference log-det is constant in v_m on the
// circle. coupling stores kappa_g / |lambda|^2, the eigenbasis product
// entering the closed-form determinant.
struct ElementCase {
    int m = 0;
    ElementBranch branch = ElementBranch::kNilpotent;
    cplx lambda = 0.0;
    double coupling = 0.0;
    CMat a_m;  // n_rx x n_rx, positive definite
    CMat b_m;  // n_rx x n_rx, rank <= 1

    double kappa_g = 0.0;    // Gram product of the interference det quadratic
    double log_det_a = 0.0;  // log2 det a_m

    cplx mu = 0.0;           // trace of the full-signal det quadratic
    double kappa_h = 0.0;    // its Gram product
    double log_det_d0 = 0.0; // log2 det of the v-free full-signal matrix

    RMat dl_const;   // n_dl x n_dl, constant of the (k, i) quadratic form
    CMat dl_lin;     // n_dl x n_dl, linear coefficient: form = const + 2 Re(v lin)
    RVec dl_noise;   // per-user co-channel power plus noise
};

ElementCase element_decompose(const ChannelSet& ch, const PhaseVector& v,
                              const DlCovariances& w, const UlPowerAlloc& p,
                              double noise_power, int m);

// Interference log-det increment on the unit circle via the scalar closed
// form log2(1 + 2 Re(v lambda) + |v|^2 (|lambda|^2 - kappa_g)). Matches the
// direct determinant evaluation of det(I + v a^{-1} b + v* a^{-1} b^H) to
// numerical precision. Throws std::domain_error on a genuinely nilpotent
// case (nonzero b_m with vanishing trace), where the increment is constant
// in the phase and the scalar form does not apply; a zero b_m is trivially
// diagonalizable and yields 0 for every v_m.
double g_dd_closed_form(const ElementCase& ec, cplx v_m);

// Exact objective slice h(v_m) - g(v_m) at a unit-circle point, equal to
// the weighted sum rate of the full system at that reflection state.
double element_objective(const ElementCase& ec, double alpha_dl, double alpha_ul,
                         cplx v_m);

// Concave surrogate in one coefficient around the unit-circle expansion
// point v_r: the full-signal part h is kept exactly, the interference part
// g is replaced by its tangent at v_r (no lambda term on the nilpotent
// branch), and the boundary penalty 2 rho Re(v* v_r) linearizes rho |v|^2.
// Tight at v_r up to the constant penalty offset.
struct ElementSurrogate {
    ElementBranch branch = ElementBranch::kNilpotent;
    double alpha_dl = 0.0;
    double alpha_ul = 0.0;
    double rho = 0.0;
    cplx v_r = 1.0;

    RVec hc0;  // full-signal DL constants, noise included
    CVec hc1;  // full-signal DL linear coefficients
    RVec gc0;  // interference DL constants, noise included
    CVec gc1;  // interference DL linear coefficients
    cplx lambda = 0.0;
    double kappa_g = 0.0;
    cplx mu = 0.0;
    double kappa_h = 0.0;
    double log_det_a = 0.0;
    double log_det_d0 = 0.0;

    RVec gamma;         // DL tangent weights at v_r
    double eta = 0.0;   // loopback tangent weight at v_r
    double g_r_val = 0.0;

    double h(cplx v) const;
    double g(cplx v) const;        // concave disk extension of the interference part
    double g_upper(cplx v) const;  // its tangent at v_r
    double value(cplx v) const;    // h - g_upper + penalty
    double value_and_grad(cplx v, double* dx, double* dy) const;
};

ElementSurrogate element_surrogate(const ElementCase& ec, double alpha_dl,
                                   double alpha_ul, double rho, cplx v_r);

struct ElementUpdate {
    cplx v = 1.0;                  // unit-circle result
    double relaxed_modulus = 0.0;  // modulus of the disk maximizer
    double surrogate_value = 0.0;
    int iterations = 0;
};

// Maximizes the surrogate over the closed unit disk (two real variables,
// projected gradient ascent), then projects the maximizer to the circle. A
// vanishing disk maximizer falls back to the expansion point.
ElementUpdate optimize_element(const ElementCase& ec, double alpha_dl,
                               double alpha_ul, cplx v_r, double rho);

struct EwResult {
    PhaseVector v;
    DlCovariances w_cov;
    DlBeamformers w;
    UlPowerAlloc p;
    RateReport report;           // rates at the rank-one beamformers
    std::vector<double> trace;   // true WSR after each outer iteration
    RVec rank1_loss;             // per-user trace fraction lost by the reduction
    bool rank1_warning = false;  // any loss above 0.01
    int iters = 0;
    bool converged = false;
    double relaxed_wsr = 0.0;    // WSR at the covariances, before reduction
    std::string status = "ok";
};

// Full pipeline: from per-user direct-link matched beams at full budget, a
// full uplink power vector, and a seeded random unit-modulus reflection
// state, alternate optimize_beam_power with one guarded pass over all
// reflection coefficients (ascending m, or descending when
// cfg.ew_sweep_descending is set) until the WSR gain of an outer iteration
// drops below cfg.epsilon (cap 100). Element updates are accepted only when
// the exact objective slice does not decrease, so the trace is
// non-decreasing. The returned beamformers are the rank-one reductions of
// the converged covariances with their loss audit.
EwResult ew_run(const ChannelSet& ch, const SystemConfig& cfg, std::uint64_t seed);

}  // namespace irsfd
