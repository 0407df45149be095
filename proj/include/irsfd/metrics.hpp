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
// Exact rate expressions: effective channels through the reflecting surface,
// downlink SINRs under co-channel and residual self-interference, uplink
// MMSE-SIC sum rate, and the weighted sum-rate report.

#pragma once

#include <vector>

#include "irsfd/scenario.hpp"

namespace irsfd {

// Reflection coefficient vector. Strict mode requires |v_m| = 1 within 1e-9;
// relaxed mode requires |v_m| <= 1 + 1e-9 (used by continuous relaxations and
// the reflection-disabled baseline v = 0).
struct PhaseVector {
    CVec v;

    void validate_strict() const;
    void validate_relaxed() const;

    static PhaseVector random_unit(int m, std::uint64_t seed);
    static PhaseVector zeros(int m) { return PhaseVector{CVec::Zero(m)}; }
};

// Downlink transmit covariances, one n_tx x n_tx Hermitian PSD matrix per
// user; sum of traces must stay within the BS power budget.
using DlCovariances = std::vector<CMat>;

// Downlink beamformers, one n_tx vector per user.
using DlBeamformers = std::vector<CVec>;

// Uplink transmit powers, one entry per user in [0, p_ul_max].
using UlPowerAlloc = RVec;

struct RateReport {
    RVec dl_sinr;          // per downlink user
    RVec ul_sinr;          // per uplink user, MMSE-SIC decoding order
    double r_dl = 0.0;     // sum log2(1 + dl_sinr)
    double r_ul = 0.0;     // uplink sum rate
    double wsr = 0.0;      // alpha_dl * r_dl + alpha_ul * r_ul
    double residual_si_db = 0.0;
    double max_condition = 0.0;  // worst interference-matrix conditioning seen
};

// Effective channels for a given reflection state.
struct EffectiveChannels {
    std::vector<CVec> h_bar;  // K vectors, n_tx (so dl gain is h_bar^H w)
    std::vector<CVec> f_bar;  // L vectors, n_rx
    CMat g_bar;               // n_rx x n_tx combined self-interference
};

EffectiveChannels effective_channels(const ChannelSet& ch, const PhaseVector& v);

DlCovariances lift_to_covariances(const DlBeamformers& w);

// Sum of transmit covariance traces (real parts).
double total_dl_power(const DlCovariances& w);

// Per-user downlink SINRs: desired term h^H W_k h over multi-user
// interference + uplink co-channel power + noise.
RVec dl_sinr(const ChannelSet& ch, const PhaseVector& v, const DlCovariances& w,
             const UlPowerAlloc& p, double noise_power);

struct UlRateResult {
    RVec sinr;        // in user index order (not decode order)
    double r_ul = 0.0;
    double max_condition = 0.0;
};

// Uplink MMSE-SIC rates. Users are decoded in descending direct-link norm
// order; the sum rate additionally comes from the order-invariant log-det
// quotient, and the two agree to numerical precision.
UlRateResult ul_sum_rate(const ChannelSet& ch, const PhaseVector& v, const DlCovariances& w,
                         const UlPowerAlloc& p, double noise_power);

// Combined-to-raw self-interference Frobenius power ratio in dB, clamped at
// -200 dB. Throws std::domain_error when the raw LI channel is zero.
double residual_si_power(const ChannelSet& ch, const PhaseVector& v);

RateReport wsr(const ChannelSet& ch, const PhaseVector& v, const DlCovariances& w,
               const UlPowerAlloc& p, double noise_power, double alpha_dl, double alpha_ul);

RateReport wsr(const ChannelSet& ch, const PhaseVector& v, const DlBeamformers& w,
               const UlPowerAlloc& p, double noise_power, double alpha_dl, double alpha_ul);

}  // namespace irsfd
