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

#include "irsfd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "irsfd/ew_multi.hpp"
#include "irsfd/sca_single.hpp"

namespace irsfd {

namespace {

enum : std::uint64_t {
    kTagAssistPhases = 101,
    kTagRandomPhases = 102,
    kTagHdDl = 103,
    kTagHdUl = 104,
};

bool single_pair(const ChannelSet& ch) {
    return ch.n_tx() == 1 && ch.n_rx() == 1 && ch.n_dl() == 1 && ch.n_ul() == 1;
}

ChannelSet drop_ul(const ChannelSet& ch) {
    ChannelSet out = ch;
    out.f_d.clear();
    out.f_r.clear();
    out.cci = CMat::Zero(0, ch.n_dl());
    return out;
}

ChannelSet drop_dl(const ChannelSet& ch) {
    ChannelSet out = ch;
    out.h_d.clear();
    out.h_r.clear();
    out.cci = CMat::Zero(ch.n_ul(), 0);
    return out;
}

SystemConfig with_weights(const SystemConfig& cfg, double alpha_dl,
                          double alpha_ul) {
    SystemConfig out = cfg;
    out.alpha_dl = alpha_dl;
    out.alpha_ul = alpha_ul;
    return out;
}

// Transmission re-optimization at a fixed reflection, using the same power
// start portfolio as the general loop so a drowned side cannot pin the
// design; candidates compete on the rate report at extracted beamformers.
SchemeResult transmission_at(const ChannelSet& ch, const SystemConfig& cfg,
                             const PhaseVector& v) {
    SchemeResult out;
    out.v = v;
    if (single_pair(ch)) {
        ScaResult fr = run_frozen(ch, cfg, v, ScaMode::kFull);
        out.report = fr.report;
        out.iters = fr.iters;
        out.converged = fr.converged;
        out.status = fr.status;
        return out;
    }

    const int kk = ch.n_dl();
    const int ll = ch.n_ul();
    DlCovariances w_mrt(kk);
    for (int k = 0; k < kk; ++k) {
        const CVec& hd = ch.h_d[k];
        const double n2 = hd.squaredNorm();
        if (n2 > 0.0) {
            w_mrt[k] = (cfg.p_bs_max / kk) * (hd * hd.adjoint()) / n2;
        } else {
            w_mrt[k] = (cfg.p_bs_max / (kk * ch.n_tx())) *
                       CMat::Identity(ch.n_tx(), ch.n_tx());
        }
    }
    const UlPowerAlloc p_full = RVec::Constant(ll, cfg.p_ul_max);

    std::vector<std::pair<double, double>> starts{{1.0, 1.0}};
    if (kk > 0 && ll > 0) {
        starts.emplace_back(1.0, 1e-4);
        starts.emplace_back(1e-4, 1.0);
    }

    bool have_best = false;
    for (const auto& [dl_scale, ul_scale] : starts) {
        DlCovariances w0 = w_mrt;
        for (CMat& wk : w0) wk *= dl_scale;
        const UlPowerAlloc p0 = ul_scale * p_full;
        const BeamPowerResult bp = optimize_beam_power(ch, v, w0, p0, cfg);

        DlBeamformers w_vec(kk);
        for (int k = 0; k < kk; ++k) w_vec[k] = extract_rank1(bp.w[k]).w;
        RateReport rep = wsr(ch, v, w_vec, bp.p, cfg.noise_power, cfg.alpha_dl,
                             cfg.alpha_ul);
        if (!have_best || rep.wsr > out.report.wsr) {
            out.report = std::move(rep);
            out.iters = bp.rounds;
            out.converged = bp.converged;
            out.status = bp.status;
            have_best = true;
        }
    }
    return out;
}

// One-direction design: phases plus the direction's unweighted sum rate.
struct DirectionalDesign {
    PhaseVector v;
    double rate = 0.0;
    RVec sinr;
    double max_condition = 0.0;
    int iters = 0;
    bool converged = true;
    std::string status = "ok";
};

DirectionalDesign design_direction(const ChannelSet& ch, const SystemConfig& cfg,
                                   AssistMode mode, std::uint64_t seed) {
    DirectionalDesign out;
    if (single_pair(ch)) {
        const ScaMode sca_mode =
            mode == AssistMode::kDl ? ScaMode::kDlOnly : ScaMode::kUlOnly;
        const SystemConfig cfg2 = mode == AssistMode::kDl
                                      ? with_weights(cfg, 1.0, 0.0)
                                      : with_weights(cfg, 0.0, 1.0);
        const ScaResult res = run(ch, cfg2, seed, sca_mode);
        out.v = res.v;
        out.rate = mode == AssistMode::kDl ? res.report.r_dl : res.report.r_ul;
        out.sinr = mode == AssistMode::kDl ? res.report.dl_sinr : res.report.ul_sinr;
        out.max_condition = res.report.max_condition;
        out.iters = res.iters;
        out.converged = res.converged;
        out.status = res.status;
        return out;
    }
    const ChannelSet ch2 = mode == AssistMode::kDl ? drop_ul(ch) : drop_dl(ch);
    const SystemConfig cfg2 = mode == AssistMode::kDl
                                  ? with_weights(cfg, 1.0, 0.0)
                                  : with_weights(cfg, 0.0, 1.0);
    const EwResult res = ew_run(ch2, cfg2, seed);
    out.v = res.v;
    out.rate = mode == AssistMode::kDl ? res.report.r_dl : res.report.r_ul;
    out.sinr = mode == AssistMode::kDl ? res.report.dl_sinr : res.report.ul_sinr;
    out.max_condition = res.report.max_condition;
    out.iters = res.iters;
    out.converged = res.converged;
    out.status = res.status;
    return out;
}

// Rate-equivalent SINR of a time-shared link: log2(1 + g) halved equals
// log2(1 + sqrt(1 + g) - 1).
RVec half_rate_sinr(const RVec& sinr) {
    RVec out(sinr.size());
    for (int i = 0; i < sinr.size(); ++i) {
        out(i) = std::sqrt(1.0 + sinr(i)) - 1.0;
    }
    return out;
}

}  // namespace

const char* scheme_name(SchemeId scheme) {
    switch (scheme) {
        case SchemeId::kProposed: return "proposed";
        case SchemeId::kSicOnly: return "sic_only";
        case SchemeId::kDlAssisted: return "dl_assisted";
        case SchemeId::kUlAssisted: return "ul_assisted";
        case SchemeId::kRandomIrs: return "random_irs";
        case SchemeId::kNoIrs: return "no_irs";
        case SchemeId::kHalfDuplex: return "half_duplex";
    }
    throw std::invalid_argument("scheme_name: unknown scheme id");
}

SchemeId scheme_from_name(const std::string& name) {
    for (SchemeId id : {SchemeId::kProposed, SchemeId::kSicOnly,
                        SchemeId::kDlAssisted, SchemeId::kUlAssisted,
                        SchemeId::kRandomIrs, SchemeId::kNoIrs,
                        SchemeId::kHalfDuplex}) {
        if (name == scheme_name(id)) return id;
    }
    throw std::invalid_argument("scheme_from_name: unknown scheme \"" + name +
                                "\"");
}

PhaseVector sic_phases(const ChannelSet& ch, int max_sweeps,
                       std::vector<double>* objective_trace) {
    const int mm = ch.n_irs();
    CVec v = CVec::Ones(mm);

    std::vector<CMat> d(mm);
    CMat residual = ch.g_si;
    for (int m = 0; m < mm; ++m) {
        d[m] = ch.g_r.col(m) * ch.g_t.row(m);
        residual += v(m) * d[m];
    }

    double objective = residual.squaredNorm();
    if (objective_trace) objective_trace->push_back(objective);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int m = 0; m < mm; ++m) {
            const CMat excl = residual - v(m) * d[m];
            const cplx t = (excl.adjoint() * d[m]).trace();
            const double mag = std::abs(t);
            if (mag > 0.0) v(m) = -std::conj(t) / mag;
            residual = excl + v(m) * d[m];
        }
        const double next = residual.squaredNorm();
        if (objective_trace) objective_trace->push_back(next);
        const bool settled = objective - next < 1e-6 * std::max(objective, 1e-300);
        objective = next;
        if (settled) break;
    }
    return PhaseVector{v};
}

PhaseVector assisted_phases(const ChannelSet& ch, const SystemConfig& cfg,
                            AssistMode mode, std::uint64_t seed) {
    return design_direction(ch, cfg, mode, seed).v;
}

SchemeResult evaluate_scheme(SchemeId scheme, const ChannelSet& ch,
                             const SystemConfig& cfg, std::uint64_t seed) {
    switch (scheme) {
        case SchemeId::kProposed: {
            SchemeResult out;
            if (single_pair(ch)) {
                ScaResult res = run(ch, cfg, seed);
                out.report = res.report;
                out.v = res.v;
                out.iters = res.iters;
                out.converged = res.converged;
                out.status = res.status;
            } else {
                EwResult res = ew_run(ch, cfg, seed);
                out.report = res.report;
                out.v = res.v;
                out.iters = res.iters;
                out.converged = res.converged;
                out.status = res.status;
            }
            return out;
        }
        case SchemeId::kSicOnly:
            return transmission_at(ch, cfg, sic_phases(ch));
        case SchemeId::kDlAssisted:
            return transmission_at(
                ch, cfg,
                assisted_phases(ch, cfg, AssistMode::kDl,
                                mix_seed(seed, kTagAssistPhases)));
        case SchemeId::kUlAssisted:
            return transmission_at(
                ch, cfg,
                assisted_phases(ch, cfg, AssistMode::kUl,
                                mix_seed(seed, kTagAssistPhases)));
        case SchemeId::kRandomIrs:
            return transmission_at(
                ch, cfg,
                PhaseVector::random_unit(ch.n_irs(),
                                         mix_seed(seed, kTagRandomPhases)));
        case SchemeId::kNoIrs:
            return transmission_at(ch, cfg, PhaseVector::zeros(ch.n_irs()));
        case SchemeId::kHalfDuplex: {
            const DirectionalDesign dl = design_direction(
                ch, cfg, AssistMode::kDl, mix_seed(seed, kTagHdDl));
            const DirectionalDesign ul = design_direction(
                ch, cfg, AssistMode::kUl, mix_seed(seed, kTagHdUl));

            SchemeResult out;
            out.v = dl.v;
            out.v_ul = ul.v;
            out.report.r_dl = 0.5 * dl.rate;
            out.report.r_ul = 0.5 * ul.rate;
            out.report.wsr =
                cfg.alpha_dl * out.report.r_dl + cfg.alpha_ul * out.report.r_ul;
            out.report.dl_sinr = half_rate_sinr(dl.sinr);
            out.report.ul_sinr = half_rate_sinr(ul.sinr);
            out.report.residual_si_db = -200.0;
            out.report.max_condition =
                std::max(dl.max_condition, ul.max_condition);
            out.iters = dl.iters + ul.iters;
            out.converged = dl.converged && ul.converged;
            out.status = dl.status == "ok" && ul.status == "ok"
                             ? "ok"
                             : dl.status + "/" + ul.status;
            return out;
        }
    }
    throw std::invalid_argument("evaluate_scheme: unknown scheme id");
}

}  // namespace irsfd
