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

#include "ruralmimo/channel.hpp"
#include "ruralmimo/scenario.hpp"
#include "ruralmimo/types.hpp"

namespace ruralmimo {

struct PowerAllocation {
    VectorD p_w;
    double eirp_max_w = 0.0;
    double delta_linear = 1.0;
};

enum class CombinerScheme { RZF, ZF, MR };

struct Combiner {
    MatrixCd v;
    CombinerScheme scheme = CombinerScheme::RZF;
};

/// Fractional power control capped at the EIRP limit: every user within
/// delta_db of the weakest received power, the weakest user at full power.
/// max(p beta) / min(p beta) never exceeds the linear delta.
PowerAllocation power_control(const LargeScale& large_scale, double eirp_max_w, double delta_db);

/// Regularized zero forcing, the receive-side optimum for these powers.
Combiner rzf_combiner(const ChannelMatrix& channel, const PowerAllocation& power, double noise_power_w);

/// Interference nulling without regularization; requires full column rank.
Combiner zf_combiner(const ChannelMatrix& channel);

/// Maximum ratio: the combiner is the channel itself.
Combiner mr_combiner(const ChannelMatrix& channel);

VectorD sinr(const ChannelMatrix& channel, const Combiner& combiner, const PowerAllocation& power,
             double noise_power_w);

/// Spectral efficiency and throughput per user with the pilot, duplex and
/// cyclic prefix overheads split out.
struct RateReport {
    VectorD sinr;
    VectorD se_bits_per_hz;
    VectorD rate_bps;
    double pilot_share = 1.0;
    double duplex_share = 1.0;
    double cp_factor = 1.0;
};

/// Uplink rates: tau_p equals the served user count, the uplink gets
/// ul_fraction of the data samples (1 under FDD).
RateReport ul_rate_report(const VectorD& sinr_values, const Scenario& scenario);

}
