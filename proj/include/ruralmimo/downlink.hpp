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
#include "ruralmimo/uplink.hpp"

namespace ruralmimo {

/// Unit-norm transmit directions with per-user power shares.
struct Precoder {
    MatrixCd w;
    VectorD power_w;
};

/// Regularized zero-forcing directions under an equal power split of the
/// total transmit budget.
Precoder dl_precoder(const ChannelMatrix& channel, double noise_power_w, double total_power_w);

VectorD dl_sinr(const ChannelMatrix& channel, const Precoder& precoder, double noise_power_w);

/// Downlink rates. FDD spends tau_p = ports downlink pilots in its own
/// band; TDD reuses the uplink pilots and gets the remaining data share.
RateReport dl_rate_report(const VectorD& sinr_values, const Scenario& scenario);

}
