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

#include "irsfd/scenario.hpp"

#include <fstream>
#include <iostream>
#include <mutex>
#include <json.hpp>

using json = nlohmann::json;

namespace irsfd {

namespace {

// Substream tags so each channel family consumes an independent stream.
enum StreamTag : std::uint64_t {
    kTagGeometry = 1,
    kTagDlDirect = 2,
    kTagDlIrs = 3,
    kTagUlDirect = 4,
    kTagUlIrs = 5,
    kTagCci = 6,
    kTagLi = 7,
};

std::once_flag g_fraunhofer_warned;

// Largest divisor of m not exceeding floor(sqrt(m)); shapes the IRS grid as
// close to square as the element count allows.
int grid_rows(int m) {
    int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(m))));
    for (; r > 1; --r)
        if (m % r == 0) return r;
    return 1;
}

CVec steering(int n, double theta) {
    CVec a(n);
    for (int i = 0; i < n; ++i) a[i] = std::polar(1.0, kPi * i * std::sin(theta));
    return a;
}

}  // namespace

cplx near_field_gain(double distance_m, double carrier_hz) {
    if (distance_m <= 0.0) throw std::domain_error("near_field_gain: distance must be positive");
    const double lambda = kSpeedOfLight / carrier_hz;
    const double amp = kSpeedOfLight / (4.0 * kPi * carrier_hz * distance_m);
    return std::polar(amp, -2.0 * kPi * distance_m / lambda);
}

double far_field_path_loss(double distance_m, double exponent, double carrier_hz) {
    if (distance_m <= 0.0) throw std::domain_error("far_field_path_loss: distance must be positive");
    const double lambda = kSpeedOfLight / carrier_hz;
    const double c0 = (lambda / (4.0 * kPi)) * (lambda / (4.0 * kPi));
    return c0 * std::pow(distance_m, -exponent);
}

Geometry build_geometry(const SystemConfig& config, std::uint64_t seed) {
    config.validate();
    Geometry g;
    const double half_lambda = 0.5 * config.wavelength();

    auto ula = [&](const Vec3& center, int n) {
        std::vector<Vec3> pos(n);
        for (int i = 0; i < n; ++i)
            pos[i] = center + Vec3((i - 0.5 * (n - 1)) * half_lambda, 0.0, 0.0);
        return pos;
    };
    const Vec3 sep(0.5 * config.txrx_separation, 0.0, 0.0);
    g.bs_tx = ula(config.bs_center - sep, config.n_tx);
    g.bs_rx = ula(config.bs_center + sep, config.n_rx);

    g.irs_rows = grid_rows(config.n_irs);
    g.irs_cols = config.n_irs / g.irs_rows;
    g.irs.resize(config.n_irs);
    for (int iy = 0; iy < g.irs_rows; ++iy)
        for (int ix = 0; ix < g.irs_cols; ++ix)
            g.irs[iy * g.irs_cols + ix] =
                config.irs_center + Vec3((ix - 0.5 * (g.irs_cols - 1)) * half_lambda,
                                          (iy - 0.5 * (g.irs_rows - 1)) * half_lambda, 0.0);

    // Fraunhofer check: aperture diagonal vs BS distance.
    const double dx = (g.irs_cols - 1) * half_lambda;
    const double dy = (g.irs_rows - 1) * half_lambda;
    const double aperture = std::sqrt(dx * dx + dy * dy);
    if (aperture > 0.0) {
        const double fraunhofer = 2.0 * aperture * aperture / config.wavelength();
        const double d_bs = (config.irs_center - config.bs_center).norm();
        if (d_bs > fraunhofer) {
            std::call_once(g_fraunhofer_warned, [&] {
                std::cerr << "irsfd: warning: BS-IRS distance " << d_bs
                          << " m exceeds the Fraunhofer distance " << fraunhofer
                          << " m; spherical-wave BS-IRS model is extrapolating\n";
            });
        }
    }

    Rng rng(mix_seed(seed, kTagGeometry));
    auto drop = [&](const Vec3& center, int n) {
        std::vector<Vec3> pos(n);
        for (int i = 0; i < n; ++i) {
            const double r = config.zone_radius * std::sqrt(rng.uniform());
            const double phi = rng.angle();
            pos[i] = Vec3(center.x() + r * std::cos(phi), center.y() + r * std::sin(phi), center.z());
        }
        return pos;
    };
    g.ul_users = drop(config.ul_zone_center, config.n_ul_users);
    g.dl_users = drop(config.dl_zone_center, config.n_dl_users);
    return g;
}

void synth_bs_irs_channels(const SystemConfig& config, const Geometry& geom, CMat* g_t, CMat* g_r) {
    const int m = static_cast<int>(geom.irs.size());
    g_t->resize(m, config.n_tx);
    for (int i = 0; i < config.n_tx; ++i)
        for (int e = 0; e < m; ++e)
            (*g_t)(e, i) = near_field_gain((geom.irs[e] - geom.bs_tx[i]).norm(), config.carrier_hz);
    g_r->resize(config.n_rx, m);
    for (int j = 0; j < config.n_rx; ++j)
        for (int e = 0; e < m; ++e)
            (*g_r)(j, e) = near_field_gain((geom.bs_rx[j] - geom.irs[e]).norm(), config.carrier_hz);
}

CMat synth_rician_link(double distance_m, double exponent, double rician_k,
                       int rows, int cols, double carrier_hz, std::uint64_t seed) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("synth_rician_link: bad shape");
    Rng rng(seed);
    const double aoa = rng.angle();
    const double aod = rng.angle();
    const CVec a_r = steering(rows, aoa);
    const CVec a_c = steering(cols, aod);
    CMat los = a_r * a_c.adjoint();
    CMat nlos(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) nlos(i, j) = rng.cgaussian();
    const double amp = std::sqrt(far_field_path_loss(distance_m, exponent, carrier_hz));
    const double w_los = std::sqrt(rician_k / (1.0 + rician_k));
    const double w_nlos = std::sqrt(1.0 / (1.0 + rician_k));
    return amp * (w_los * los + w_nlos * nlos);
}

CMat synth_li_channel(const SystemConfig& config, std::uint64_t seed) {
    Rng rng(mix_seed(seed, kTagLi));
    const double k = config.rician_k_li;
    const double mu = std::sqrt(config.sigma_si_sq * k / (1.0 + k));
    const double sd = std::sqrt(config.sigma_si_sq / (1.0 + k));
    CMat h(config.n_rx, config.n_tx);
    for (int i = 0; i < config.n_rx; ++i)
        for (int j = 0; j < config.n_tx; ++j) h(i, j) = mu + sd * rng.cgaussian();
    return h;
}

Realization sample_realization(const SystemConfig& config, std::uint64_t seed) {
    config.validate();
    Realization r;
    r.config = config;
    r.seed = seed;
    r.config_hash = config.canonical_hash();
    r.geometry = build_geometry(config, seed);
    const Geometry& geom = r.geometry;

    synth_bs_irs_channels(config, geom, &r.channels.g_t, &r.channels.g_r);

    const Vec3 tx_center = config.bs_center - Vec3(0.5 * config.txrx_separation, 0.0, 0.0);
    const Vec3 rx_center = config.bs_center + Vec3(0.5 * config.txrx_separation, 0.0, 0.0);

    r.channels.h_d.resize(config.n_dl_users);
    r.channels.h_r.resize(config.n_dl_users);
    for (int k = 0; k < config.n_dl_users; ++k) {
        const Vec3& u = geom.dl_users[k];
        r.channels.h_d[k] = synth_rician_link((u - tx_center).norm(), config.ple_bs_user,
                                              config.rician_k_users, config.n_tx, 1,
                                              config.carrier_hz, mix_seed(seed, kTagDlDirect, k));
        r.channels.h_r[k] = synth_rician_link((u - config.irs_center).norm(), config.ple_irs_user,
                                              config.rician_k_users, config.n_irs, 1,
                                              config.carrier_hz, mix_seed(seed, kTagDlIrs, k));
    }

    r.channels.f_d.resize(config.n_ul_users);
    r.channels.f_r.resize(config.n_ul_users);
    for (int l = 0; l < config.n_ul_users; ++l) {
        const Vec3& u = geom.ul_users[l];
        r.channels.f_d[l] = synth_rician_link((u - rx_center).norm(), config.ple_bs_user,
                                              config.rician_k_users, config.n_rx, 1,
                                              config.carrier_hz, mix_seed(seed, kTagUlDirect, l));
        r.channels.f_r[l] = synth_rician_link((u - config.irs_center).norm(), config.ple_irs_user,
                                              config.rician_k_users, config.n_irs, 1,
                                              config.carrier_hz, mix_seed(seed, kTagUlIrs, l));
    }

    r.channels.cci.resize(config.n_ul_users, config.n_dl_users);
    for (int l = 0; l < config.n_ul_users; ++l)
        for (int k = 0; k < config.n_dl_users; ++k) {
            const double d = (geom.ul_users[l] - geom.dl_users[k]).norm();
            r.channels.cci(l, k) = synth_rician_link(d, config.ple_user_user, config.rician_k_users,
                                                     1, 1, config.carrier_hz,
                                                     mix_seed(seed, kTagCci, l * config.n_dl_users + k))(0, 0);
        }

    r.channels.g_si = synth_li_channel(config, seed);
    return r;
}

namespace {

json cmat_to_json(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat cmat_from_json(const json& j) {
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return CMat(0, 0);
    const int cols = static_cast<int>(j[0].size());
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c)
            m(i, c) = cplx(j[i][c][0].get<double>(), j[i][c][1].get<double>());
    return m;
}

json cvecs_to_json(const std::vector<CVec>& vs) {
    json out = json::array();
    for (const CVec& v : vs) {
        json row = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            row.push_back(json::array({v[i].real(), v[i].imag()}));
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<CVec> cvecs_from_json(const json& j) {
    std::vector<CVec> out(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        CVec v(j[i].size());
        for (std::size_t e = 0; e < j[i].size(); ++e)
            v[e] = cplx(j[i][e][0].get<double>(), j[i][e][1].get<double>());
        out[i] = std::move(v);
    }
    return out;
}

json vec3s_to_json(const std::vector<Vec3>& vs) {
    json out = json::array();
    for (const Vec3& v : vs) out.push_back(json::array({v.x(), v.y(), v.z()}));
    return out;
}

std::vector<Vec3> vec3s_from_json(const json& j) {
    std::vector<Vec3> out(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out[i] = Vec3(j[i][0].get<double>(), j[i][1].get<double>(), j[i][2].get<double>());
    return out;
}

}  // namespace

std::string realization_to_json(const Realization& r) {
    json j;
    j["format"] = "irsfd-realization/1";
    j["seed"] = r.seed;
    j["config_hash"] = r.config_hash;
    j["config"] = json::parse(r.config.to_json());
    j["dims"] = {{"n_tx", r.channels.n_tx()},   {"n_rx", r.channels.n_rx()},
                 {"n_irs", r.channels.n_irs()}, {"n_dl_users", r.channels.n_dl()},
                 {"n_ul_users", r.channels.n_ul()}};
    json ch;
    ch["bs_irs_tx"] = cmat_to_json(r.channels.g_t);
    ch["bs_irs_rx"] = cmat_to_json(r.channels.g_r);
    ch["bs_dl_direct"] = cvecs_to_json(r.channels.h_d);
    ch["irs_dl"] = cvecs_to_json(r.channels.h_r);
    ch["ul_bs_direct"] = cvecs_to_json(r.channels.f_d);
    ch["ul_irs"] = cvecs_to_json(r.channels.f_r);
    ch["cci"] = cmat_to_json(r.channels.cci);
    ch["self_interference"] = cmat_to_json(r.channels.g_si);
    j["channels"] = std::move(ch);
    json geo;
    geo["bs_tx"] = vec3s_to_json(r.geometry.bs_tx);
    geo["bs_rx"] = vec3s_to_json(r.geometry.bs_rx);
    geo["irs"] = vec3s_to_json(r.geometry.irs);
    geo["dl_users"] = vec3s_to_json(r.geometry.dl_users);
    geo["ul_users"] = vec3s_to_json(r.geometry.ul_users);
    geo["irs_rows"] = r.geometry.irs_rows;
    geo["irs_cols"] = r.geometry.irs_cols;
    j["geometry"] = std::move(geo);
    return j.dump(1);
}

Realization realization_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("format", "") != "irsfd-realization/1")
        throw std::invalid_argument("realization: unknown format tag");
    Realization r;
    r.config = SystemConfig::from_json(j["config"].dump());
    r.seed = j["seed"].get<std::uint64_t>();
    r.config_hash = j["config_hash"].get<std::string>();
    if (r.config_hash != r.config.canonical_hash())
        throw std::invalid_argument("realization: config hash does not match embedded config");
    const json& ch = j["channels"];
    r.channels.g_t = cmat_from_json(ch["bs_irs_tx"]);
    r.channels.g_r = cmat_from_json(ch["bs_irs_rx"]);
    r.channels.h_d = cvecs_from_json(ch["bs_dl_direct"]);
    r.channels.h_r = cvecs_from_json(ch["irs_dl"]);
    r.channels.f_d = cvecs_from_json(ch["ul_bs_direct"]);
    r.channels.f_r = cvecs_from_json(ch["ul_irs"]);
    r.channels.cci = cmat_from_json(ch["cci"]);
    r.channels.g_si = cmat_from_json(ch["self_interference"]);
    const json& geo = j["geometry"];
    r.geometry.bs_tx = vec3s_from_json(geo["bs_tx"]);
    r.geometry.bs_rx = vec3s_from_json(geo["bs_rx"]);
    r.geometry.irs = vec3s_from_json(geo["irs"]);
    r.geometry.dl_users = vec3s_from_json(geo["dl_users"]);
    r.geometry.ul_users = vec3s_from_json(geo["ul_users"]);
    r.geometry.irs_rows = geo["irs_rows"].get<int>();
    r.geometry.irs_cols = geo["irs_cols"].get<int>();
    return r;
}

void save_realization(const Realization& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_realization: cannot open " + path);
    out << realization_to_json(r);
}

Realization load_realization(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_realization: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return realization_from_json(text);
}

}  // namespace irsfd
