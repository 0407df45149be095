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

#include "irsfd/config.hpp"

#include <cstdio>
#include <json.hpp>

using json = nlohmann::json;

namespace irsfd {

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
    if (n_tx < 1 || n_rx < 1) fail("antenna counts must be >= 1");
    if (n_dl_users < 1 || n_ul_users < 1) fail("user counts must be >= 1");
    if (n_irs < 1) fail("n_irs must be >= 1");
    if (carrier_hz <= 0.0) fail("carrier_hz must be positive");
    if (p_bs_max <= 0.0 || p_ul_max <= 0.0) fail("power budgets must be positive");
    if (noise_power <= 0.0) fail("noise_power must be positive");
    if (sigma_si_sq < 0.0) fail("sigma_si_sq must be nonnegative");
    if (alpha_dl < 0.0 || alpha_dl > 1.0 || alpha_ul < 0.0 || alpha_ul > 1.0)
        fail("rate weights must lie in [0, 1]");
    if (rician_k_users < 0.0 || rician_k_li < 0.0) fail("Rician factors must be nonnegative");
    if (ple_irs_user <= 0.0 || ple_bs_user <= 0.0 || ple_user_user <= 0.0)
        fail("path-loss exponents must be positive");
    if (penalty_rho < 0.0) fail("penalty_rho must be nonnegative");
    if (epsilon <= 0.0) fail("epsilon must be positive");
    if (zone_radius < 0.0) fail("zone_radius must be nonnegative");
    if (txrx_separation < 0.0) fail("txrx_separation must be nonnegative");
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected [x, y, z] position");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// Reads a power field given in any one of dBm / dBW / Watt keys.
double power_from_json(const json& j, const std::string& base, double fallback_watts) {
    if (j.contains(base + "_dbm")) return dbm_to_watts(j[base + "_dbm"].get<double>());
    if (j.contains(base + "_dbw")) return dbw_to_watts(j[base + "_dbw"].get<double>());
    if (j.contains(base + "_w")) return j[base + "_w"].get<double>();
    return fallback_watts;
}

}  // namespace

std::string SystemConfig::to_json() const {
    json j;
    j["n_tx"] = n_tx;
    j["n_rx"] = n_rx;
    j["n_dl_users"] = n_dl_users;
    j["n_ul_users"] = n_ul_users;
    j["n_irs"] = n_irs;
    j["carrier_hz"] = carrier_hz;
    j["p_bs_max_w"] = p_bs_max;
    j["p_ul_max_w"] = p_ul_max;
    j["noise_w"] = noise_power;
    j["sigma_si_w"] = sigma_si_sq;
    j["alpha_dl"] = alpha_dl;
    j["alpha_ul"] = alpha_ul;
    j["rician_k_users"] = rician_k_users;
    j["rician_k_li"] = rician_k_li;
    j["ple_irs_user"] = ple_irs_user;
    j["ple_bs_user"] = ple_bs_user;
    j["ple_user_user"] = ple_user_user;
    j["penalty_rho"] = penalty_rho;
    j["epsilon"] = epsilon;
    j["bs_center"] = vec3_to_json(bs_center);
    j["irs_center"] = vec3_to_json(irs_center);
    j["ul_zone_center"] = vec3_to_json(ul_zone_center);
    j["dl_zone_center"] = vec3_to_json(dl_zone_center);
    j["zone_radius"] = zone_radius;
    j["txrx_separation"] = txrx_separation;
    j["ew_sweep_descending"] = ew_sweep_descending;
    return j.dump();
}

SystemConfig SystemConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    SystemConfig c;
    c.n_tx = j.value("n_tx", c.n_tx);
    c.n_rx = j.value("n_rx", c.n_rx);
    c.n_dl_users = j.value("n_dl_users", c.n_dl_users);
    c.n_ul_users = j.value("n_ul_users", c.n_ul_users);
    c.n_irs = j.value("n_irs", c.n_irs);
    c.carrier_hz = j.value("carrier_hz", c.carrier_hz);
    c.p_bs_max = power_from_json(j, "p_bs_max", c.p_bs_max);
    c.p_ul_max = power_from_json(j, "p_ul_max", c.p_ul_max);
    c.noise_power = power_from_json(j, "noise", c.noise_power);
    c.sigma_si_sq = power_from_json(j, "sigma_si", c.sigma_si_sq);
    c.alpha_dl = j.value("alpha_dl", c.alpha_dl);
    c.alpha_ul = j.value("alpha_ul", c.alpha_ul);
    if (j.contains("rician_k_users_db")) c.rician_k_users = db_to_linear(j["rician_k_users_db"].get<double>());
    else c.rician_k_users = j.value("rician_k_users", c.rician_k_users);
    if (j.contains("rician_k_li_db")) c.rician_k_li = db_to_linear(j["rician_k_li_db"].get<double>());
    else c.rician_k_li = j.value("rician_k_li", c.rician_k_li);
    c.ple_irs_user = j.value("ple_irs_user", c.ple_irs_user);
    c.ple_bs_user = j.value("ple_bs_user", c.ple_bs_user);
    c.ple_user_user = j.value("ple_user_user", c.ple_user_user);
    c.penalty_rho = j.value("penalty_rho", c.penalty_rho);
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("bs_center")) c.bs_center = vec3_from_json(j["bs_center"]);
    if (j.contains("irs_center")) c.irs_center = vec3_from_json(j["irs_center"]);
    if (j.contains("ul_zone_center")) c.ul_zone_center = vec3_from_json(j["ul_zone_center"]);
    if (j.contains("dl_zone_center")) c.dl_zone_center = vec3_from_json(j["dl_zone_center"]);
    c.zone_radius = j.value("zone_radius", c.zone_radius);
    c.txrx_separation = j.value("txrx_separation", c.txrx_separation);
    c.ew_sweep_descending = j.value("ew_sweep_descending", c.ew_sweep_descending);
    c.validate();
    return c;
}

std::string SystemConfig::canonical_hash() const {
    // nlohmann::json orders object keys lexicographically, so dump() of the
    // field map is already canonical for hashing purposes.
    std::uint64_t h = fnv1a(to_json());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace irsfd
