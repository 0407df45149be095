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

#include "irsfd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace irsfd {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr double kResidualFloorDb = -200.0;
constexpr double kConditionLimit = 1e12;

double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

}  // namespace

void PhaseVector::validate_strict() const {
    for (Eigen::Index m = 0; m < v.size(); ++m) {
        if (std::abs(std::abs(v[m]) - 1.0) > kUnitTol) {
            throw std::invalid_argument("PhaseVector: coefficient off the unit circle");
        }
    }
}

void PhaseVector::validate_relaxed() const {
    for (Eigen::Index m = 0; m < v.size(); ++m) {
        if (std::abs(v[m]) > 1.0 + kUnitTol) {
            throw std::invalid_argument("PhaseVector: coefficient outside the unit disk");
        }
    }
}

PhaseVector PhaseVector::random_unit(int m, std::uint64_t seed) {
    Rng rng(seed);
    CVec v(m);
    for (int i = 0; i < m; ++i) {
        v[i] = std::polar(1.0, rng.angle());
    }
    return PhaseVector{std::move(v)};
}

EffectiveChannels effective_channels(const ChannelSet& ch, const PhaseVector& v) {
    const int k_dl = ch.n_dl();
    const int l_ul = ch.n_ul();
    const CVec& theta = v.v;
    if (theta.size() != ch.n_irs()) {
        throw std::invalid_argument("effective_channels: phase vector length mismatch");
    }

    EffectiveChannels eff;
    eff.h_bar.resize(k_dl);
    for (int k = 0; k < k_dl; ++k) {
        // Row channel is h_bar^H = h_d^H + h_r^H diag(v) G_t; the stored
        // column is its adjoint.
        eff.h_bar[k] = ch.h_d[k] + ch.g_t.adjoint() * theta.conjugate().cwiseProduct(ch.h_r[k]);
    }
    eff.f_bar.resize(l_ul);
    for (int l = 0; l < l_ul; ++l) {
        eff.f_bar[l] = ch.f_d[l] + ch.g_r * theta.cwiseProduct(ch.f_r[l]);
    }
    eff.g_bar = ch.g_si + ch.g_r * theta.asDiagonal() * ch.g_t;
    return eff;
}

DlCovariances lift_to_covariances(const DlBeamformers& w) {
    DlCovariances cov(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        cov[k] = w[k] * w[k].adjoint();
    }
    return cov;
}

double total_dl_power(const DlCovariances& w) {
    double total = 0.0;
    for (const CMat& wk : w) {
        total += wk.trace().real();
    }
    return total;
}

RVec dl_sinr(const ChannelSet& ch, const PhaseVector& v, const DlCovariances& w,
             const UlPowerAlloc& p, double noise_power) {
    const int k_dl = ch.n_dl();
    const int l_ul = ch.n_ul();
    if (static_cast<int>(w.size()) != k_dl) {
        throw std::invalid_argument("dl_sinr: covariance count mismatch");
    }
    if (p.size() != l_ul) {
        throw std::invalid_argument("dl_sinr: uplink power count mismatch");
    }
    const EffectiveChannels eff = effective_channels(ch, v);

    RVec out(k_dl);
    for (int k = 0; k < k_dl; ++k) {
        const CVec& h = eff.h_bar[k];
        double desired = 0.0;
        double interference = 0.0;
        for (int i = 0; i < k_dl; ++i) {
            const double quad = (h.adjoint() * w[i] * h).value().real();
            if (i == k) {
                desired = quad;
            } else {
                interference += quad;
            }
        }
        double cci = 0.0;
        for (int l = 0; l < l_ul; ++l) {
            cci += p[l] * std::norm(ch.cci(l, k));
        }
        out[k] = std::max(desired, 0.0) / (std::max(interference, 0.0) + cci + noise_power);
    }
    return out;
}

UlRateResult ul_sum_rate(const ChannelSet& ch, const PhaseVector& v, const DlCovariances& w,
                         const UlPowerAlloc& p, double noise_power) {
    const int l_ul = ch.n_ul();
    const int n_rx = ch.n_rx();
    if (p.size() != l_ul) {
        throw std::invalid_argument("ul_sum_rate: uplink power count mismatch");
    }
    UlRateResult res;
    res.sinr = RVec::Zero(l_ul);
    if (l_ul == 0) {
        return res;
    }
    const EffectiveChannels eff = effective_channels(ch, v);

    // Residual self-interference covariance after combining.
    CMat si_cov = CMat::Zero(n_rx, n_rx);
    for (const CMat& wk : w) {
        si_cov += eff.g_bar * wk * eff.g_bar.adjoint();
    }
    const CMat noise_floor = si_cov + noise_power * CMat::Identity(n_rx, n_rx);

    // Decode in descending direct-link norm order.
    std::vector<int> order(l_ul);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return ch.f_d[a].norm() > ch.f_d[b].norm();
    });

    double sum_rate = 0.0;
    for (int j = 0; j < l_ul; ++j) {
        CMat residual = noise_floor;
        for (int jp = j + 1; jp < l_ul; ++jp) {
            const int lp = order[jp];
            residual += p[lp] * eff.f_bar[lp] * eff.f_bar[lp].adjoint();
        }
        Eigen::SelfAdjointEigenSolver<CMat> eig(residual, Eigen::EigenvaluesOnly);
        const double cond = eig.eigenvalues().maxCoeff() / std::max(eig.eigenvalues().minCoeff(), 1e-300);
        res.max_condition = std::max(res.max_condition, cond);

        const int l = order[j];
        const Eigen::LLT<CMat> llt(residual);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("ul_sum_rate: interference covariance not positive definite");
        }
        const double gamma = p[l] * (eff.f_bar[l].adjoint() * llt.solve(eff.f_bar[l])).value().real();
        res.sinr[l] = std::max(gamma, 0.0);
        sum_rate += log2_1p(res.sinr[l]);
    }

    // Order-invariant log-det form of the same quantity; keep the recursion
    // result but flag disagreement beyond conditioning-driven slack.
    CMat full = noise_floor;
    for (int l = 0; l < l_ul; ++l) {
        full += p[l] * eff.f_bar[l] * eff.f_bar[l].adjoint();
    }
    const Eigen::LLT<CMat> llt_full(full);
    const Eigen::LLT<CMat> llt_floor(noise_floor);
    if (llt_full.info() == Eigen::Success && llt_floor.info() == Eigen::Success) {
        double logdet = 0.0;
        for (int i = 0; i < n_rx; ++i) {
            logdet += 2.0 * (std::log(llt_full.matrixL()(i, i).real()) -
                             std::log(llt_floor.matrixL()(i, i).real()));
        }
        const double quotient_rate = logdet / std::log(2.0);
        if (res.max_condition < kConditionLimit &&
            std::abs(quotient_rate - sum_rate) > 1e-6 * (1.0 + std::abs(sum_rate))) {
            throw std::runtime_error("ul_sum_rate: SIC recursion and log-det quotient disagree");
        }
    }

    res.r_ul = sum_rate;
    return res;
}

double residual_si_power(const ChannelSet& ch, const PhaseVector& v) {
    const double raw = ch.g_si.squaredNorm();
    if (raw <= 0.0) {
        throw std::domain_error("residual_si_power: raw self-interference channel is zero");
    }
    const EffectiveChannels eff = effective_channels(ch, v);
    const double combined = eff.g_bar.squaredNorm();
    if (combined <= 0.0) {
        return kResidualFloorDb;
    }
    return std::max(linear_to_db(combined / raw), kResidualFloorDb);
}

RateReport wsr(const ChannelSet& ch, const PhaseVector& v, const DlCovariances& w,
               const UlPowerAlloc& p, double noise_power, double alpha_dl, double alpha_ul) {
    RateReport rep;
    rep.dl_sinr = dl_sinr(ch, v, w, p, noise_power);
    rep.r_dl = 0.0;
    for (Eigen::Index k = 0; k < rep.dl_sinr.size(); ++k) {
        rep.r_dl += log2_1p(rep.dl_sinr[k]);
    }
    const UlRateResult ul = ul_sum_rate(ch, v, w, p, noise_power);
    rep.ul_sinr = ul.sinr;
    rep.r_ul = ul.r_ul;
    rep.max_condition = ul.max_condition;
    rep.wsr = alpha_dl * rep.r_dl + alpha_ul * rep.r_ul;
    rep.residual_si_db = residual_si_power(ch, v);
    return rep;
}

RateReport wsr(const ChannelSet& ch, const PhaseVector& v, const DlBeamformers& w,
               const UlPowerAlloc& p, double noise_power, double alpha_dl, double alpha_ul) {
    return wsr(ch, v, lift_to_covariances(w), p, noise_power, alpha_dl, alpha_ul);
}

}  // namespace irsfd
