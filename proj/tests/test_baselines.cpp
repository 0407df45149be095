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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "irsfd/baselines.hpp"
#include "irsfd/ew_multi.hpp"
#include "irsfd/sca_single.hpp"

using namespace irsfd;

namespace {

SystemConfig desk_config(int n_irs, int n_tx, int n_rx, int n_dl, int n_ul) {
    SystemConfig cfg;
    cfg.n_irs = n_irs;
    cfg.n_tx = n_tx;
    cfg.n_rx = n_rx;
    cfg.n_dl_users = n_dl;
    cfg.n_ul_users = n_ul;
    cfg.irs_center = Vec3{0.0, 0.0, 3.5};
    return cfg;
}

ChannelSet desk_channels(const SystemConfig& cfg, std::uint64_t seed) {
    return sample_realization(cfg, seed).channels;
}

double si_objective(const ChannelSet& ch, const CVec& v) {
    CMat r = ch.g_si;
    for (int m = 0; m < ch.n_irs(); ++m) {
        r += v(m) * (ch.g_r.col(m) * ch.g_t.row(m));
    }
    return r.squaredNorm();
}

}  // namespace

TEST_CASE("scheme names round-trip and reject unknowns") {
    for (SchemeId id : {SchemeId::kProposed, SchemeId::kSicOnly,
                        SchemeId::kDlAssisted, SchemeId::kUlAssisted,
                        SchemeId::kRandomIrs, SchemeId::kNoIrs,
                        SchemeId::kHalfDuplex}) {
        CHECK(scheme_from_name(scheme_name(id)) == id);
    }
    CHECK_THROWS_AS(scheme_from_name("fullduplex"), std::invalid_argument);
}

TEST_CASE("single-element cancellable interference is cancelled exactly") {
    ChannelSet ch;
    ch.g_t = CMat(1, 1);
    ch.g_t(0, 0) = cplx(0.7, -0.3);
    ch.g_r = CMat(1, 1);
    ch.g_r(0, 0) = cplx(-0.2, 0.9);
    ch.h_d.resize(1, CVec::Ones(1));
    ch.h_r.resize(1, CVec::Zero(1));
    ch.f_d.resize(1, CVec::Ones(1));
    ch.f_r.resize(1, CVec::Zero(1));
    ch.cci = CMat::Zero(1, 1);
    const cplx v_star(std::cos(1.1), std::sin(1.1));
    ch.g_si = -v_star * (ch.g_r * ch.g_t);

    std::vector<double> trace;
    const PhaseVector v = sic_phases(ch, 100, &trace);
    CHECK(std::abs(v.v(0) - v_star) <= 1e-12);
    CHECK(si_objective(ch, v.v) <= 1e-24);
    CHECK(trace.back() <= 1e-24);
}

TEST_CASE("per-element interference minimizer matches the circle grid") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch = desk_channels(cfg, 311);
    CVec v = PhaseVector::random_unit(4, 311).v;

    for (int m = 0; m < 4; ++m) {
        const CMat d = ch.g_r.col(m) * ch.g_t.row(m);
        CMat excl = ch.g_si;
        for (int j = 0; j < 4; ++j) {
            if (j != m) excl += v(j) * (ch.g_r.col(j) * ch.g_t.row(j));
        }
        const cplx t = (excl.adjoint() * d).trace();
        REQUIRE(std::abs(t) > 0.0);
        const cplx closed = -std::conj(t) / std::abs(t);
        const double closed_obj = (excl + closed * d).squaredNorm();

        double grid_obj = std::numeric_limits<double>::infinity();
        for (int g = 0; g < 3600; ++g) {
            const double ang = 2.0 * kPi * g / 3600.0;
            const cplx q(std::cos(ang), std::sin(ang));
            grid_obj = std::min(grid_obj, (excl + q * d).squaredNorm());
        }
        CHECK(closed_obj <= grid_obj + 1e-12);
        CHECK(grid_obj - closed_obj <= 1e-6 * std::max(1.0, grid_obj));
    }
}

TEST_CASE("interference descent is monotone and unit-modulus") {
    const SystemConfig cfg = desk_config(6, 2, 2, 2, 2);
    for (std::uint64_t seed : {321ULL, 322ULL, 323ULL}) {
        const ChannelSet ch = desk_channels(cfg, seed);
        std::vector<double> trace;
        const PhaseVector v = sic_phases(ch, 100, &trace);
        REQUIRE(trace.size() >= 2);
        for (size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i] <= trace[i - 1] + 1e-12 * std::max(1.0, trace[i - 1]));
        }
        for (int m = 0; m < 6; ++m) {
            CHECK(std::abs(std::abs(v.v(m)) - 1.0) <= 1e-12);
        }
        CHECK(trace.back() == doctest::Approx(si_objective(ch, v.v)).epsilon(1e-12));
    }
}

TEST_CASE("downlink-assisted phases ignore uplink-side channels") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch = desk_channels(cfg, 331);
    const PhaseVector base = assisted_phases(ch, cfg, AssistMode::kDl, 5);

    ChannelSet tweaked = ch;
    Rng rng(77);
    for (CVec& f : tweaked.f_d) {
        for (int i = 0; i < f.size(); ++i) f(i) = rng.cgaussian();
    }
    for (CVec& f : tweaked.f_r) {
        for (int i = 0; i < f.size(); ++i) f(i) = rng.cgaussian();
    }
    for (int l = 0; l < 2; ++l) {
        for (int k = 0; k < 2; ++k) tweaked.cci(l, k) = rng.cgaussian();
    }
    tweaked.g_si *= cplx(3.7, -1.2);

    const PhaseVector moved = assisted_phases(tweaked, cfg, AssistMode::kDl, 5);
    CHECK((base.v - moved.v).norm() == 0.0);
}

TEST_CASE("downlink-assisted phases ignore uplink channels on a single pair") {
    const SystemConfig cfg = desk_config(4, 1, 1, 1, 1);
    const ChannelSet ch = desk_channels(cfg, 341);
    const PhaseVector base = assisted_phases(ch, cfg, AssistMode::kDl, 5);

    ChannelSet tweaked = ch;
    Rng rng(78);
    tweaked.f_d[0](0) = rng.cgaussian();
    tweaked.f_r[0] = CVec::NullaryExpr(4, [&](int) { return rng.cgaussian(); });
    tweaked.cci(0, 0) = rng.cgaussian();
    tweaked.g_si *= cplx(-2.5, 0.4);

    const PhaseVector moved = assisted_phases(tweaked, cfg, AssistMode::kDl, 5);
    CHECK((base.v - moved.v).norm() == 0.0);
}

TEST_CASE("uplink-assisted phases align the reflected path") {
    ChannelSet ch;
    const int mm = 3;
    Rng rng(351);
    ch.g_t = CMat::NullaryExpr(mm, 1, [&](int, int) { return rng.cgaussian(); });
    ch.g_r = CMat::NullaryExpr(1, mm, [&](int, int) { return rng.cgaussian(); });
    ch.f_d.resize(1, CVec::NullaryExpr(1, [&](int) { return rng.cgaussian(); }));
    ch.f_r.resize(1, CVec::NullaryExpr(mm, [&](int) { return rng.cgaussian(); }));
    ch.cci = CMat::Zero(1, 0);
    ch.g_si = CMat::Constant(1, 1, cplx(1e-3, 2e-4));

    SystemConfig cfg;
    cfg.n_tx = 1;
    cfg.n_rx = 1;
    cfg.n_dl_users = 1;  // structural count only; the channel set has no downlink
    cfg.n_ul_users = 1;
    cfg.n_irs = mm;
    cfg.epsilon = 1e-9;

    const PhaseVector v = assisted_phases(ch, cfg, AssistMode::kUl, 9);

    cplx reached = ch.f_d[0](0);
    double aligned = std::abs(ch.f_d[0](0));
    for (int m = 0; m < mm; ++m) {
        const cplx term = ch.f_r[0](m) * ch.g_r(0, m);
        reached += v.v(m) * term;
        aligned += std::abs(term);
    }
    CHECK(std::abs(reached) <= aligned + 1e-12);
    CHECK(std::abs(reached) >= aligned * (1.0 - 1e-4));

    const double target_phase = std::arg(ch.f_d[0](0));
    for (int m = 0; m < mm; ++m) {
        const cplx term = ch.f_r[0](m) * ch.g_r(0, m);
        const double want = target_phase - std::arg(term);
        const cplx ideal(std::cos(want), std::sin(want));
        CHECK(std::abs(v.v(m) - ideal) <= 0.05);
    }

    const PhaseVector again = assisted_phases(ch, cfg, AssistMode::kUl, 9);
    CHECK((v.v - again.v).norm() == 0.0);
}

TEST_CASE("proposed scheme reproduces the matching joint optimizer") {
    const SystemConfig cfg1 = desk_config(4, 1, 1, 1, 1);
    const ChannelSet ch1 = desk_channels(cfg1, 361);
    const SchemeResult via_scheme = evaluate_scheme(SchemeId::kProposed, ch1, cfg1, 361);
    const ScaResult direct = run(ch1, cfg1, 361);
    CHECK(via_scheme.report.wsr == direct.report.wsr);
    CHECK((via_scheme.v.v - direct.v.v).norm() == 0.0);

    const SystemConfig cfg2 = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch2 = desk_channels(cfg2, 362);
    const SchemeResult general = evaluate_scheme(SchemeId::kProposed, ch2, cfg2, 362);
    const EwResult ew = ew_run(ch2, cfg2, 362);
    CHECK(general.report.wsr == ew.report.wsr);
    CHECK((general.v.v - ew.v.v).norm() == 0.0);
}

TEST_CASE("fixed-reflection schemes are reproducible and feasible") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch = desk_channels(cfg, 371);

    for (SchemeId id : {SchemeId::kSicOnly, SchemeId::kDlAssisted,
                        SchemeId::kUlAssisted, SchemeId::kRandomIrs,
                        SchemeId::kNoIrs}) {
        const SchemeResult a = evaluate_scheme(id, ch, cfg, 371);
        const SchemeResult b = evaluate_scheme(id, ch, cfg, 371);
        CHECK(a.report.wsr == b.report.wsr);
        CHECK((a.v.v - b.v.v).norm() == 0.0);
        CHECK(std::isfinite(a.report.wsr));
        CHECK(a.report.wsr >= 0.0);
        if (id == SchemeId::kNoIrs) {
            CHECK(a.v.v.norm() == 0.0);
        } else {
            for (int m = 0; m < 4; ++m) {
                CHECK(std::abs(std::abs(a.v.v(m)) - 1.0) <= 1e-12);
            }
        }
    }

    const SchemeResult sic = evaluate_scheme(SchemeId::kSicOnly, ch, cfg, 371);
    const PhaseVector direct_sic = sic_phases(ch);
    CHECK((sic.v.v - direct_sic.v).norm() == 0.0);

    const SchemeResult r1 = evaluate_scheme(SchemeId::kRandomIrs, ch, cfg, 1);
    const SchemeResult r2 = evaluate_scheme(SchemeId::kRandomIrs, ch, cfg, 2);
    CHECK((r1.v.v - r2.v.v).norm() > 0.0);
}

TEST_CASE("zeroed reflection reports the 0 dB residual normalization") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch = desk_channels(cfg, 381);
    const SchemeResult res = evaluate_scheme(SchemeId::kNoIrs, ch, cfg, 381);
    CHECK(res.report.residual_si_db == 0.0);
}

TEST_CASE("proposed dominates random reflections on most trials") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    int wins = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed = 400 + t;
        const ChannelSet ch = desk_channels(cfg, seed);
        const SchemeResult prop = evaluate_scheme(SchemeId::kProposed, ch, cfg, seed);
        const SchemeResult rnd = evaluate_scheme(SchemeId::kRandomIrs, ch, cfg, seed);
        if (prop.report.wsr >= rnd.report.wsr - 1e-9) ++wins;
    }
    CHECK(wins >= 18);
}

TEST_CASE("half-duplex reference is invariant to the interference channel") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch = desk_channels(cfg, 391);
    const SchemeResult base = evaluate_scheme(SchemeId::kHalfDuplex, ch, cfg, 391);

    ChannelSet scaled = ch;
    scaled.g_si *= 31.6;  // +30 dB interference power
    const SchemeResult moved = evaluate_scheme(SchemeId::kHalfDuplex, scaled, cfg, 391);

    CHECK(base.report.wsr == moved.report.wsr);
    CHECK(base.report.r_dl == moved.report.r_dl);
    CHECK(base.report.r_ul == moved.report.r_ul);
    CHECK((base.report.dl_sinr - moved.report.dl_sinr).norm() == 0.0);
    CHECK((base.report.ul_sinr - moved.report.ul_sinr).norm() == 0.0);
    CHECK((base.v.v - moved.v.v).norm() == 0.0);
    CHECK((base.v_ul.v - moved.v_ul.v).norm() == 0.0);
}

TEST_CASE("half-duplex report is internally consistent") {
    const SystemConfig cfg = desk_config(4, 2, 2, 2, 2);
    const ChannelSet ch = desk_channels(cfg, 401);
    const SchemeResult res = evaluate_scheme(SchemeId::kHalfDuplex, ch, cfg, 401);

    CHECK(res.report.wsr ==
          doctest::Approx(cfg.alpha_dl * res.report.r_dl +
                          cfg.alpha_ul * res.report.r_ul)
              .epsilon(1e-12));
    double from_sinr = 0.0;
    for (int k = 0; k < res.report.dl_sinr.size(); ++k) {
        from_sinr += std::log2(1.0 + res.report.dl_sinr(k));
    }
    CHECK(from_sinr == doctest::Approx(res.report.r_dl).epsilon(1e-9));
    CHECK(res.report.residual_si_db == -200.0);
    CHECK(res.report.r_dl > 0.0);
    CHECK(res.report.r_ul > 0.0);
    for (int m = 0; m < 4; ++m) {
        CHECK(std::abs(std::abs(res.v.v(m)) - 1.0) <= 1e-12);
        CHECK(std::abs(std::abs(res.v_ul.v(m)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("half-duplex carries both slots on a single pair") {
    const SystemConfig cfg = desk_config(4, 1, 1, 1, 1);
    const ChannelSet ch = desk_channels(cfg, 411);
    const SchemeResult res = evaluate_scheme(SchemeId::kHalfDuplex, ch, cfg, 411);
    CHECK(res.report.r_dl > 0.0);
    CHECK(res.report.r_ul > 0.0);
    CHECK(res.report.residual_si_db == -200.0);
    CHECK(std::isfinite(res.report.wsr));
}
