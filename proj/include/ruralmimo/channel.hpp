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

#pragma once

#include <iosfwd>
#include <vector>

#include "ruralmimo/array.hpp"
#include "ruralmimo/rng.hpp"
#include "ruralmimo/scenario.hpp"
#include "ruralmimo/types.hpp"

namespace ruralmimo {

/// Rural macro propagation environment (3GPP TR 38.901 RMa defaults).
struct PathLossParams {
    double avg_building_height_m = 5.0;
    double avg_street_width_m = 20.0;
};

/// Dual-slope breakpoint of the rural macro line-of-sight model.
double breakpoint_distance_m(const Scenario& scenario);

/// RMa path loss in dB at a horizontal distance. Valid from 10 m; beyond
/// the tabulated 10 km range the final slope is extended unchanged and the
/// caller is expected to surface an extrapolation warning. Terrain is flat.
double path_loss_db(const Scenario& scenario, double distance_2d_m, bool los,
                    const PathLossParams& params = {});

/// distance range beyond which path loss values are extrapolated
inline constexpr double kPathLossValidityM = 10000.0;

double shadow_std_db(bool los, bool before_breakpoint);
double shadow_sample_db(Prng& rng, bool los, bool before_breakpoint);

/// Geometric cluster model knobs for the small-scale response.
struct ClusterProfile {
    int num_clusters = 10;
    double azimuth_spread_los_deg = 12.0;
    double azimuth_spread_nlos_deg = 25.0;
    double elevation_spread_deg = 3.0;
    /// e-folding constant of the exponential cluster power profile,
    /// measured in cluster index
    double power_decay_clusters = 5.0;
    /// lognormal Rician K factor applied on line-of-sight links
    double rician_k_mean_db = 7.0;
    double rician_k_std_db = 4.0;
};

struct UserGeometry {
    double distance_2d_m = 0.0;
    double azimuth_rad = 0.0;
    double bs_height_m = 0.0;
    double user_height_m = 0.0;
};

/// Small-scale response normalized to unit average energy per port:
/// a sum of num_clusters plane waves with Gaussian-spread angles, complex
/// Gaussian gains on an exponential power profile and uniform per-path
/// polarization rotation, Rician-combined with the deterministic
/// line-of-sight steering vector. rician_k_linear = 0 yields the pure
/// diffuse response; the LoS flag selects the angular spread preset.
VectorCd small_scale(Prng& rng, const ElementLayout& layout, const UserGeometry& geometry, bool los,
                     double rician_k_linear, double wavelength_m, const ClusterProfile& profile = {});

/// One multi-user placement: per-user horizontal distance and azimuth.
struct UserDrop {
    std::vector<double> distance_2d_m;
    std::vector<double> azimuth_rad;
    double user_height_m = 0.0;

    int num_users() const { return static_cast<int>(distance_2d_m.size()); }
};

/// Per-user large-scale state of one channel realization.
struct LargeScale {
    VectorD path_loss_db;
    VectorD shadow_db;
    VectorD beta;
    std::vector<bool> los;
    /// user links whose distance exceeded the path loss validity range
    int extrapolated_links = 0;
};

struct ChannelMatrix {
    MatrixCd h;
    LargeScale large_scale;
    double wavelength_m = 0.0;
};

/// Synthesizes the ports-by-users channel for one drop. Line of sight is
/// forced by station class: HTBS masts clear the clutter, legacy masts do
/// not. Per-user substreams are derived from the incoming generator so a
/// user's fading depends only on (seed, user index, geometry).
ChannelMatrix generate(Prng& rng, const Scenario& scenario, const UserDrop& drop,
                       const ClusterProfile& profile = {});

/// Binary dump: uint32 ports, uint32 users, float64 carrier frequency,
/// then the matrix row-major as complex64 (float32 re/im pairs).
void write_channel_dump(const ChannelMatrix& channel, double carrier_frequency_hz, std::ostream& out);

struct ChannelDump {
    std::uint32_t num_ports = 0;
    std::uint32_t num_users = 0;
    double carrier_frequency_hz = 0.0;
    ComplexMatrix<float> h;
};

ChannelDump read_channel_dump(std::istream& in);

}
