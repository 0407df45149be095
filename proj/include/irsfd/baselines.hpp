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
// Comparison schemes: alternative reflection designs evaluated under the
// same transmission optimization as the joint design, plus the half-duplex
// reference. Each scheme fixes the reflection vector by its own rule and
// re-optimizes beamformers and uplink powers on the unmodified channels, so
// differences between schemes isolate the reflection design.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsfd/config.hpp"
#include "irsfd/metrics.hpp"
#include "irsfd/scenario.hpp"

namespace irsfd {

enum class SchemeId {
    kProposed,    // joint reflection + transmission design
    kSicOnly,     // reflection minimizes residual self-interference power
    kDlAssisted,  // reflection designed for the downlink alone
    kUlAssisted,  // reflection designed for the uplink alone
    kRandomIrs,   // seeded uniform random phases
    kNoIrs,       // reflected paths removed (relaxed v = 0)
    kHalfDuplex,  // half-duplex reference with per-slot reflection designs
};

// Stable lowercase identifier used in result rows ("proposed", "sic_only",
// "dl_assisted", "ul_assisted", "random_irs", "no_irs", "half_duplex").
const char* scheme_name(SchemeId scheme);

// Inverse of scheme_name. Throws std::invalid_argument on unknown names.
SchemeId scheme_from_name(const std::string& name);

enum class AssistMode { kDl, kUl };

// Coordinate descent on the combined self-interference Frobenius power
// ||G_SI + sum_j v_j g_rj g_tj^H||_F^2 with per-element exact minimizers,
// starting from all-ones phases. Sweeps until the relative decrease falls
// below 1e-6 or max_sweeps is reached; the objective is non-increasing
// after every single-element update. When objective_trace is given it
// receives the objective before the first sweep and after each sweep.
PhaseVector sic_phases(const ChannelSet& ch, int max_sweeps = 100,
                       std::vector<double>* objective_trace = nullptr);

// Reflection design for one link direction alone: runs the matching joint
// optimizer (the single-pair solver in its one-direction mode when the
// system is a 1x1 antenna single-pair, the general alternating loop on a
// channel set with the other direction's users removed otherwise) with
// direction weights (1, 0) or (0, 1), and returns only the phases.
PhaseVector assisted_phases(const ChannelSet& ch, const SystemConfig& cfg,
                            AssistMode mode, std::uint64_t seed);

struct SchemeResult {
    RateReport report;
    PhaseVector v;     // reflection the report was evaluated at; zeros for
                       // kNoIrs; the downlink-slot design for kHalfDuplex
    PhaseVector v_ul;  // kHalfDuplex only: the uplink-slot design
    int iters = 0;
    bool converged = true;
    std::string status = "ok";
};

// Evaluates one scheme on one channel realization. Fixed-reflection schemes
// re-optimize transmission with the main algorithm's beamforming/power
// subproblem; kHalfDuplex runs two independent one-direction designs and
// reports the time-shared rates r_dl = R_D/2, r_ul = R_U/2 with per-user
// SINRs mapped to their time-shared equivalents, no self-interference
// dependence, and residual_si_db fixed at the -200 dB floor. Inner solver
// errors propagate.
SchemeResult evaluate_scheme(SchemeId scheme, const ChannelSet& ch,
                             const SystemConfig& cfg, std::uint64_t seed);

}  // namespace irsfd
