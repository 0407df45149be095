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

#pragma once

#include <cstdint>
#include <string>

#include "irsfd/common.hpp"

namespace irsfd {

// Full system description: array sizes, power and noise budgets, weights,
// statistical channel parameters, and deployment geometry. Power fields are
// stored in Watts; the JSON form accepts dBm/dBW (or Watt) keys and converts
// at parse time.
struct SystemConfig {
    int n_tx = 1;        // BS transmit antennas
    int n_rx = 1;        // BS receive antennas
    int n_dl_users = 1;  // downlink single-antenna users
    int n_ul_users = 1;  // uplink single-antenna users
    int n_irs = 16;      // reflecting elements

    double carrier_hz = 2.4e9;
    double p_bs_max = dbm_to_watts(26.0);    // BS transmit power budget
    double p_ul_max = dbm_to_watts(23.0);    // per-user uplink power cap
    double noise_power = dbm_to_watts(-80.0);
    double sigma_si_sq = dbw_to_watts(-40.0);  // per-entry LI channel power

    double alpha_dl = 0.5;  // downlink sum-rate weight
    double alpha_ul = 0.5;  // uplink sum-rate weight

    double rician_k_users = db_to_linear(3.0);  // user links
    double rician_k_li = db_to_linear(30.0);    // BS self-interference link
    double ple_irs_user = 2.2;
    double ple_bs_user = 3.6;
    double ple_user_user = 3.6;

    double penalty_rho = 100.0;  // unit-modulus penalty weight
    double epsilon = 1e-3;       // convergence threshold on objective gain

    Vec3 bs_center{0.0, 0.0, 3.0};
    Vec3 irs_center{0.0, 0.0, 5.5};
    Vec3 ul_zone_center{15.0, 0.0, 1.0};
    Vec3 dl_zone_center{25.0, 0.0, 1.0};
    double zone_radius = 5.0;
    double txrx_separation = 0.2;  // BS transmit/receive sub-array spacing

    // Element-update sweep direction for the multi-antenna algorithm.
    bool ew_sweep_descending = false;

    // Throws std::invalid_argument when a structural invariant fails
    // (non-positive counts, powers, weights outside [0,1], radius < 0, ...).
    void validate() const;

    bool is_simple() const {
        return n_tx == 1 && n_rx == 1 && n_dl_users == 1 && n_ul_users == 1;
    }

    double wavelength() const { return kSpeedOfLight / carrier_hz; }

    std::string to_json() const;
    static SystemConfig from_json(const std::string& text);

    // FNV-1a over the canonical JSON serialization; identifies the exact
    // configuration in realization files and experiment outputs.
    std::string canonical_hash() const;
};

}  // namespace irsfd
