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

#include <doctest.h>

#include <cmath>

#include "irsfd/metrics.hpp"

using namespace irsfd;

namespace {

// Minimal channel set with explicit dimensions, all zeros.
ChannelSet make_channels(int n_tx, int n_rx, int k_dl, int l_ul, int m_irs) {
    ChannelSet ch;
    ch.g_t = CMat::Zero(m_irs, n_tx);
    ch.g_r = CMat::Zero(n_rx, m_irs);
    ch.g_si = CMat::Zero(n_rx, n_tx);
    ch.cci = CMat::Zero(l_ul, k_dl);
    ch.h_d.assign(k_dl, CVec::Zero(n_tx));
    ch.h_r.assign(k_dl, CVec::Zero(m_irs));
    ch.f_d.assign(l_ul, CVec::Zero(n_rx));
    ch.f_r.assign(l_ul, CVec::Zero(m_irs));
    return ch;
}

ChannelSet random_channels(int n_tx, int n_rx, int k_dl, int l_ul, int m_irs,
                           std::uint64_t seed) {
    Rng rng(seed);
    auto fill = [&](CMat& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                m(i, j) = rng.cgaussian();
            }
        }
    };
    ChannelSet ch = make_channels(n_tx, n_rx, k_dl, l_ul, m_irs);
    fill(ch.g_t);
    fill(ch.g_r);
    fill(ch.g_si);
    fill(ch.cci);
    for (auto& v : ch.h_d) for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.cgaussian();
    for (auto& v : ch.h_r) for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.cgaussian();
    for (auto& v : ch.f_d) for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.cgaussian();
    for (auto& v : ch.f_r) for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.cgaussian();
    return ch;
}

}  // namespace

TEST_CASE("phase vector validation") {
    PhaseVector v = PhaseVector::random_unit(8, 11);
    CHECK_NOTHROW(v.validate_strict());
    CHECK_NOTHROW(v.validate_relaxed());
    v.v[3] *= 0.5;
    CHECK_THROWS_AS(v.validate_strict(), std::invalid_argument);
    CHECK_NOTHROW(v.validate_relaxed());
    v.v[3] *= 4.0;
    CHECK_THROWS_AS(v.validate_relaxed(), std::invalid_argument);
    const PhaseVector z = PhaseVector::zeros(4);
    CHECK_NOTHROW(z.validate_relaxed());
}

TEST_CASE("two-path effective channel matches the hand expansion") {
    // Single antenna, single element: h_bar^H = h_d^H + h_r^H v g_t.
    ChannelSet ch = make_channels(1, 1, 1, 0, 1);
    ch.h_d[0](0) = cplx(1.0, 0.0);
    ch.h_r[0](0) = cplx(0.0, 1.0);
    ch.g_t(0, 0) = cplx(2.0, 0.0);
    PhaseVector v{CVec::Constant(1, cplx(0.0, 1.0))};
    const EffectiveChannels eff = effective_channels(ch, v);
    // h_r^H v g_t = conj(i) * i * 2 = 2, so h_bar^H = 3.
    CHECK(std::abs(eff.h_bar[0](0) - cplx(3.0, 0.0)) < 1e-14);

    DlCovariances w{CMat::Constant(1, 1, cplx(0.25, 0.0))};
    const RVec sinr = dl_sinr(ch, v, w, RVec::Zero(0), 1e-2);
    CHECK(sinr(0) == doctest::Approx(0.25 * 9.0 / 1e-2).epsilon(1e-12));
}

TEST_CASE("downlink sinr accounts for interference and co-channel power") {
    ChannelSet ch = make_channels(2, 1, 2, 1, 1);
    ch.h_d[0] << cplx(1, 0), cplx(0, 0);
    ch.h_d[1] << cplx(0, 0), cplx(1, 0);
    ch.cci(0, 0) = cplx(0.5, 0.0);
    DlCovariances w(2);
    w[0] = CMat::Zero(2, 2);
    w[0](0, 0) = 2.0;
    w[1] = CMat::Zero(2, 2);
    w[1](1, 1) = 3.0;
    UlPowerAlloc p = RVec::Constant(1, 0.4);
    const double noise = 0.01;
    PhaseVector v = PhaseVector::zeros(1);
    const RVec sinr = dl_sinr(ch, v, w, p, noise);
    // User 0: desired 2, interference from w1 through e_0 is 0, cci 0.4*0.25.
    CHECK(sinr(0) == doctest::Approx(2.0 / (0.4 * 0.25 + noise)).epsilon(1e-12));
    CHECK(sinr(1) == doctest::Approx(3.0 / noise).epsilon(1e-12));
}

TEST_CASE("uplink sic matches an explicit two-user computation") {
    ChannelSet ch = make_channels(1, 2, 0, 2, 1);
    ch.f_d[0] << cplx(1.0, 0.0), cplx(0.5, 0.0);   // stronger user, decoded first
    ch.f_d[1] << cplx(0.3, 0.0), cplx(0.2, 0.0);
    UlPowerAlloc p(2);
    p << 0.2, 0.3;
    const double noise = 0.05;
    PhaseVector v = PhaseVector::zeros(1);
    const UlRateResult res = ul_sum_rate(ch, v, DlCovariances{}, p, noise);

    // User 0 sees user 1 plus noise; user 1 sees only noise.
    const Eigen::Matrix2cd eye = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd m1 = p(1) * ch.f_d[1] * ch.f_d[1].adjoint() + noise * eye;
    const double g0 = (p(0) * ch.f_d[0].adjoint() * m1.inverse() * ch.f_d[0]).value().real();
    const double g1 = ch.f_d[1].squaredNorm() * p(1) / noise;
    CHECK(res.sinr(0) == doctest::Approx(g0).epsilon(1e-10));
    CHECK(res.sinr(1) == doctest::Approx(g1).epsilon(1e-10));

    // Determinant quotient gives the same sum rate regardless of order.
    const Eigen::Matrix2cd full = p(0) * ch.f_d[0] * ch.f_d[0].adjoint() + m1;
    const double quotient = std::log2(std::abs((full * (noise * eye).inverse()).determinant()));
    CHECK(res.r_ul == doctest::Approx(quotient).epsilon(1e-10));
}

TEST_CASE("sic decode order follows direct-link strength, rates stay order invariant") {
    // Same system with user labels swapped must give the same sum rate.
    ChannelSet a = make_channels(1, 2, 0, 2, 1);
    a.f_d[0] << cplx(1.0, 0.2), cplx(0.5, -0.1);
    a.f_d[1] << cplx(0.2, 0.0), cplx(0.1, 0.3);
    ChannelSet b = a;
    std::swap(b.f_d[0], b.f_d[1]);
    UlPowerAlloc pa(2);
    pa << 0.2, 0.3;
    UlPowerAlloc pb(2);
    pb << 0.3, 0.2;
    PhaseVector v = PhaseVector::zeros(1);
    const UlRateResult ra = ul_sum_rate(a, v, DlCovariances{}, pa, 0.01);
    const UlRateResult rb = ul_sum_rate(b, v, DlCovariances{}, pb, 0.01);
    CHECK(ra.r_ul == doctest::Approx(rb.r_ul).epsilon(1e-9));
    CHECK(ra.sinr(0) == doctest::Approx(rb.sinr(1)).epsilon(1e-9));
    CHECK(ra.sinr(1) == doctest::Approx(rb.sinr(0)).epsilon(1e-9));
}

TEST_CASE("self-interference feeds the uplink noise floor") {
    ChannelSet ch = make_channels(1, 1, 1, 1, 1);
    ch.h_d[0](0) = 1.0;
    ch.f_d[0](0) = 1.0;
    ch.g_si(0, 0) = cplx(0.1, 0.0);
    DlCovariances w{CMat::Constant(1, 1, cplx(2.0, 0.0))};
    UlPowerAlloc p = RVec::Constant(1, 0.5);
    PhaseVector v = PhaseVector::zeros(1);
    const UlRateResult res = ul_sum_rate(ch, v, w, p, 0.01);
    // Residual SI power is |g_si|^2 * tr(W) = 0.02.
    CHECK(res.sinr(0) == doctest::Approx(0.5 / (0.01 + 0.02)).epsilon(1e-12));
}

TEST_CASE("wsr on random instances satisfies the rate identity") {
    for (int trial = 0; trial < 20; ++trial) {
        ChannelSet ch = random_channels(2, 2, 2, 2, 4, 100 + trial);
        PhaseVector v = PhaseVector::random_unit(4, 7 + trial);
        Rng rng(3 + trial);
        DlCovariances w(2);
        for (auto& wk : w) {
            CMat a(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) a(i, j) = 0.05 * rng.cgaussian();
            wk = a * a.adjoint();
        }
        UlPowerAlloc p(2);
        p << rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.2);
        const RateReport rep = wsr(ch, v, w, p, 0.01, 0.5, 0.5);
        double r_dl = 0.0;
        for (int k = 0; k < 2; ++k) r_dl += std::log2(1.0 + rep.dl_sinr(k));
        double r_ul = 0.0;
        for (int l = 0; l < 2; ++l) r_ul += std::log2(1.0 + rep.ul_sinr(l));
        CHECK(rep.r_dl == doctest::Approx(r_dl).epsilon(1e-12));
        CHECK(rep.r_ul == doctest::Approx(r_ul).epsilon(1e-9));
        CHECK(rep.wsr == doctest::Approx(0.5 * r_dl + 0.5 * r_ul).epsilon(1e-9));
    }
}

TEST_CASE("residual self-interference ratio") {
    ChannelSet ch = make_channels(1, 1, 0, 0, 1);
    ch.g_si(0, 0) = cplx(0.01, 0.0);
    ch.g_r(0, 0) = cplx(0.1, 0.0);
    ch.g_t(0, 0) = cplx(0.1, 0.0);

    // Zero reflection leaves the raw channel: 0 dB.
    CHECK(residual_si_power(ch, PhaseVector::zeros(1)) == doctest::Approx(0.0).epsilon(1e-12));

    // v = -1 cancels g_si exactly: clamped at the floor.
    PhaseVector v{CVec::Constant(1, cplx(-1.0, 0.0))};
    CHECK(residual_si_power(ch, v) == doctest::Approx(-200.0).epsilon(1e-12));

    // Doubling instead of cancelling: 20 log10(2) = 6.02 dB.
    PhaseVector vp{CVec::Constant(1, cplx(1.0, 0.0))};
    CHECK(residual_si_power(ch, vp) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));

    ch.g_si(0, 0) = 0.0;
    CHECK_THROWS_AS(residual_si_power(ch, PhaseVector::zeros(1)), std::domain_error);
}

TEST_CASE("degenerate directions yield empty rates") {
    ChannelSet ch = make_channels(1, 1, 0, 0, 2);
    ch.g_si(0, 0) = 1.0;
    PhaseVector v = PhaseVector::random_unit(2, 5);
    const RateReport rep = wsr(ch, v, DlCovariances{}, RVec::Zero(0), 1e-3, 0.5, 0.5);
    CHECK(rep.r_dl == 0.0);
    CHECK(rep.r_ul == 0.0);
    CHECK(rep.wsr == 0.0);
}
