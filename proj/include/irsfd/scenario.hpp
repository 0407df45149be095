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
// Scenario synthesis: deployment geometry, statistical channel models, and
// the per-trial channel realization bundle. All draws are pure functions of
// (config, seed) and bit-reproducible.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsfd/common.hpp"
#include "irsfd/config.hpp"

namespace irsfd {

// Antenna and element positions plus per-trial user drops. BS sub-arrays are
// half-wavelength ULAs along the x axis; the IRS is a half-wavelength grid in
// the x-y plane centered at irs_center.
struct Geometry {
    std::vector<Vec3> bs_tx;      // n_tx positions
    std::vector<Vec3> bs_rx;      // n_rx positions
    std::vector<Vec3> irs;        // n_irs positions
    std::vector<Vec3> dl_users;   // n_dl_users positions
    std::vector<Vec3> ul_users;   // n_ul_users positions
    int irs_rows = 1;
    int irs_cols = 1;
};

// One channel realization. Conventions: g_t maps BS transmit antennas to IRS
// elements (n_irs x n_tx); g_r maps IRS elements to BS receive antennas
// (n_rx x n_irs); h_d[k] / h_r[k] are the direct and IRS-side vectors of
// downlink user k; f_d[l] / f_r[l] those of uplink user l; cci(l, k) is the
// uplink-to-downlink co-channel coefficient; g_si is the BS self-interference
// matrix (n_rx x n_tx).
struct ChannelSet {
    CMat g_t;                 // n_irs x n_tx
    CMat g_r;                 // n_rx x n_irs
    std::vector<CVec> h_d;    // K vectors of length n_tx
    std::vector<CVec> h_r;    // K vectors of length n_irs
    std::vector<CVec> f_d;    // L vectors of length n_rx
    std::vector<CVec> f_r;    // L vectors of length n_irs
    CMat cci;                 // n_ul_users x n_dl_users
    CMat g_si;                // n_rx x n_tx

    int n_tx() const { return static_cast<int>(g_t.cols()); }
    int n_rx() const { return static_cast<int>(g_r.rows()); }
    int n_irs() const { return static_cast<int>(g_t.rows()); }
    int n_dl() const { return static_cast<int>(h_d.size()); }
    int n_ul() const { return static_cast<int>(f_d.size()); }
};

// Realization bundle: the channels together with the provenance needed to
// reproduce or audit them.
struct Realization {
    SystemConfig config;
    std::uint64_t seed = 0;
    std::string config_hash;
    ChannelSet channels;
    Geometry geometry;
};

// Free-space amplitude gain of one near-field hop: (c / (4*pi*f*d)) *
// exp(-j*2*pi*d/lambda). Throws std::domain_error for d <= 0.
cplx near_field_gain(double distance_m, double carrier_hz);

// Distance-based average power gain c0 * (d/d0)^(-exponent) with c0 =
// (lambda/(4*pi))^2 and d0 = 1 m. Throws std::domain_error for d <= 0.
double far_field_path_loss(double distance_m, double exponent, double carrier_hz);

// Builds arrays and drops users uniformly in their zone disks. Logs a
// warning to stderr when the BS sits beyond the IRS Fraunhofer distance
// 2*D^2/lambda (the near-field model is then questionable) but proceeds.
Geometry build_geometry(const SystemConfig& config, std::uint64_t seed);

// Near-field BS-IRS matrices: entry-wise spherical-wave gains between each
// antenna and element position.
void synth_bs_irs_channels(const SystemConfig& config, const Geometry& geom, CMat* g_t, CMat* g_r);

// Rician far-field link of the given shape. The line-of-sight component is
// the outer product of half-wavelength 1D steering vectors at uniformly drawn
// angles (a single-antenna side contributes the scalar 1).
CMat synth_rician_link(double distance_m, double exponent, double rician_k,
                       int rows, int cols, double carrier_hz, std::uint64_t seed);

// BS self-interference matrix: i.i.d. CN(mu, sigma^2/(1+K)) entries with
// mu = sqrt(sigma^2 * K / (1+K)), K the LI Rician factor.
CMat synth_li_channel(const SystemConfig& config, std::uint64_t seed);

// Composes a full realization from independent named substreams of the seed.
Realization sample_realization(const SystemConfig& config, std::uint64_t seed);

// Realization file round trip (JSON; complex entries stored as [re, im]
// pairs). See docs/realization_schema.md for the exact field layout.
std::string realization_to_json(const Realization& r);
Realization realization_from_json(const std::string& text);
void save_realization(const Realization& r, const std::string& path);
Realization load_realization(const std::string& path);

}  // namespace irsfd
