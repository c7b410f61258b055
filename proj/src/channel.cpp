// SPDX-License-Identifier: Apache-2.0
//
// ruralmimo - link-level simulation and coverage planning for high-tower
// massive MIMO base stations
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

#include "ruralmimo/channel.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "ruralmimo/errors.hpp"

namespace ruralmimo {

double breakpoint_distance_m(const Scenario& s) {
    return 2.0 * kPi * s.bs_height_m * s.user_height_m * s.carrier_frequency_hz / kSpeedOfLightMps;
}

namespace {

// TR 38.901 Table 7.4.1-1, RMa LoS below the breakpoint; fc in GHz
double rma_los_pl1(double d3d_m, double fc_ghz, double building_height_m) {
    const double h = building_height_m;
    return 20.0 * std::log10(40.0 * kPi * d3d_m * fc_ghz / 3.0) +
           std::min(0.03 * std::pow(h, 1.72), 10.0) * std::log10(d3d_m) -
           std::min(0.044 * std::pow(h, 1.72), 14.77) + 0.002 * std::log10(h) * d3d_m;
}

}

double path_loss_db(const Scenario& s, double distance_2d_m, bool los, const PathLossParams& params) {
    if (distance_2d_m < 10.0)
        throw DistanceBelowValidity("path loss model requires at least 10 m, got " +
                                    std::to_string(distance_2d_m) + " m");

    const double height_gap = s.bs_height_m - s.user_height_m;
    const double d3d = std::hypot(distance_2d_m, height_gap);
    const double fc_ghz = s.carrier_frequency_hz * 1e-9;
    const double h = params.avg_building_height_m;
    const double d_bp = breakpoint_distance_m(s);

    // branch on the 3D distance so both slopes join continuously
    const double pl_los = (d3d <= d_bp)
                              ? rma_los_pl1(d3d, fc_ghz, h)
                              : rma_los_pl1(d_bp, fc_ghz, h) + 40.0 * std::log10(d3d / d_bp);
    if (los)
        return pl_los;

    const double w = params.avg_street_width_m;
    const double h_bs = s.bs_height_m;
    const double h_ut = s.user_height_m;
    const double pl_nlos = 161.04 - 7.1 * std::log10(w) + 7.5 * std::log10(h) -
                           (24.37 - 3.7 * (h / h_bs) * (h / h_bs)) * std::log10(h_bs) +
                           (43.42 - 3.1 * std::log10(h_bs)) * (std::log10(d3d) - 3.0) +
                           20.0 * std::log10(fc_ghz) -
                           (3.2 * std::pow(std::log10(11.75 * h_ut), 2.0) - 4.97);
    return std::max(pl_los, pl_nlos);
}

double shadow_std_db(bool los, bool before_breakpoint) {
    if (!los)
        return 8.0;
    return before_breakpoint ? 4.0 : 6.0;
}

double shadow_sample_db(Prng& rng, bool los, bool before_breakpoint) {
    return shadow_std_db(los, before_breakpoint) * rng.normal();
}

VectorCd small_scale(Prng& rng, const ElementLayout& layout, const UserGeometry& geometry, bool los,
                     double rician_k_linear, double wavelength_m, const ClusterProfile& profile) {
    if (profile.num_clusters < 1)
        throw ConfigError("cluster model needs at least one cluster");
    if (rician_k_linear < 0.0)
        throw ConfigError("Rician K factor must be nonnegative");

    const double elevation =
        std::atan2(geometry.user_height_m - geometry.bs_height_m, geometry.distance_2d_m);
    const double azimuth_spread =
        deg_to_rad(los ? profile.azimuth_spread_los_deg : profile.azimuth_spread_nlos_deg);
    const double elevation_spread = deg_to_rad(profile.elevation_spread_deg);

    const int n = profile.num_clusters;
    VectorD cluster_power(n);
    for (int i = 0; i < n; ++i)
        cluster_power[i] = std::exp(-static_cast<double>(i) / profile.power_decay_clusters);
    cluster_power /= cluster_power.sum();

    const int m = layout.num_ports();
    VectorCd diffuse = VectorCd::Zero(m);
    for (int i = 0; i < n; ++i) {
        const double cluster_azimuth = geometry.azimuth_rad + azimuth_spread * rng.normal();
        const double cluster_elevation = elevation + elevation_spread * rng.normal();
        const double psi = 2.0 * kPi * rng.uniform();
        const std::complex<double> gain = std::sqrt(cluster_power[i]) * rng.complex_normal();
        const VectorCd response = steering<double>(layout, cluster_azimuth, cluster_elevation, wavelength_m);
        const VectorD pol = polarization_gains<double>(layout, psi);
        diffuse += gain * response.cwiseProduct(pol.cast<std::complex<double>>());
    }

    if (rician_k_linear == 0.0)
        return diffuse;

    // the deterministic component couples equally into both slants, which
    // keeps its entries at unit modulus and the per-port energy at one
    const VectorCd direct = steering<double>(layout, geometry.azimuth_rad, elevation, wavelength_m);
    const double k = rician_k_linear;
    return std::sqrt(k / (1.0 + k)) * direct + std::sqrt(1.0 / (1.0 + k)) * diffuse;
}

ChannelMatrix generate(Prng& rng, const Scenario& scenario, const UserDrop& drop,
                       const ClusterProfile& profile) {
    const int num_users = drop.num_users();
    const ElementLayout layout = build_layout(scenario.array, scenario.wavelength_m());
    const int num_ports = layout.num_ports();
    const bool los = scenario.bs_type == BsType::HTBS;
    const double d_bp = breakpoint_distance_m(scenario);
    const double height_gap = scenario.bs_height_m - drop.user_height_m;

    ChannelMatrix out;
    out.wavelength_m = scenario.wavelength_m();
    out.h.resize(num_ports, num_users);
    out.large_scale.path_loss_db.resize(num_users);
    out.large_scale.shadow_db.resize(num_users);
    out.large_scale.beta.resize(num_users);
    out.large_scale.los.assign(num_users, los);

    const std::uint64_t base_seed = rng.next_u64();
    for (int k = 0; k < num_users; ++k) {
        Prng user_rng(mix_seed(base_seed, static_cast<std::uint64_t>(k)));
        const double d2 = drop.distance_2d_m[k];
        const double pl = path_loss_db(scenario, d2, los);
        const bool before_breakpoint = std::hypot(d2, height_gap) <= d_bp;
        const double shadow = shadow_sample_db(user_rng, los, before_breakpoint);
        const double beta = std::pow(10.0, -(pl + shadow) / 10.0);

        double kappa = 0.0;
        if (los) {
            const double k_db = profile.rician_k_mean_db + profile.rician_k_std_db * user_rng.normal();
            kappa = db_to_linear(k_db);
        }

        const UserGeometry geometry{d2, drop.azimuth_rad[k], scenario.bs_height_m, drop.user_height_m};
        out.h.col(k) = std::sqrt(beta) *
                       small_scale(user_rng, layout, geometry, los, kappa, out.wavelength_m, profile);

        out.large_scale.path_loss_db[k] = pl;
        out.large_scale.shadow_db[k] = shadow;
        out.large_scale.beta[k] = beta;
        if (d2 > kPathLossValidityM)
            ++out.large_scale.extrapolated_links;
    }
    return out;
}

void write_channel_dump(const ChannelMatrix& channel, double carrier_frequency_hz, std::ostream& out) {
    const std::uint32_t num_ports = static_cast<std::uint32_t>(channel.h.rows());
    const std::uint32_t num_users = static_cast<std::uint32_t>(channel.h.cols());
    out.write(reinterpret_cast<const char*>(&num_ports), sizeof(num_ports));
    out.write(reinterpret_cast<const char*>(&num_users), sizeof(num_users));
    out.write(reinterpret_cast<const char*>(&carrier_frequency_hz), sizeof(carrier_frequency_hz));
    for (std::uint32_t r = 0; r < num_ports; ++r) {
        for (std::uint32_t c = 0; c < num_users; ++c) {
            const float re = static_cast<float>(channel.h(r, c).real());
            const float im = static_cast<float>(channel.h(r, c).imag());
            out.write(reinterpret_cast<const char*>(&re), sizeof(re));
            out.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
}

ChannelDump read_channel_dump(std::istream& in) {
    ChannelDump dump;
    in.read(reinterpret_cast<char*>(&dump.num_ports), sizeof(dump.num_ports));
    in.read(reinterpret_cast<char*>(&dump.num_users), sizeof(dump.num_users));
    in.read(reinterpret_cast<char*>(&dump.carrier_frequency_hz), sizeof(dump.carrier_frequency_hz));
    if (!in)
        throw ParseError("channel dump header is truncated");
    dump.h.resize(dump.num_ports, dump.num_users);
    for (std::uint32_t r = 0; r < dump.num_ports; ++r) {
        for (std::uint32_t c = 0; c < dump.num_users; ++c) {
            float re = 0.0f;
            float im = 0.0f;
            in.read(reinterpret_cast<char*>(&re), sizeof(re));
            in.read(reinterpret_cast<char*>(&im), sizeof(im));
            if (!in)
                throw ParseError("channel dump payload is truncated");
            dump.h(r, c) = {re, im};
        }
    }
    return dump;
}

}
