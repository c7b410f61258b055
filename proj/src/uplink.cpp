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

#include "ruralmimo/uplink.hpp"

#include <cmath>

#include "ruralmimo/combining.hpp"
#include "ruralmimo/errors.hpp"

namespace ruralmimo {

PowerAllocation power_control(const LargeScale& large_scale, double eirp_max_w, double delta_db) {
    const VectorD& beta = large_scale.beta;
    if (eirp_max_w <= 0.0)
        throw ConfigError("EIRP cap must be positive");
    if (delta_db < 0.0)
        throw ConfigError("power ratio window must be nonnegative");

    PowerAllocation out;
    out.eirp_max_w = eirp_max_w;
    out.delta_linear = db_to_linear(delta_db);
    out.p_w.resize(beta.size());
    if (beta.size() == 0)
        return out;

    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        if (!std::isfinite(beta[k]) || beta[k] <= 0.0)
            throw DegenerateGains("large-scale gain of user " + std::to_string(k) +
                                  " is not a positive finite number");
    }

    const double beta_min = beta.minCoeff();
    for (Eigen::Index k = 0; k < beta.size(); ++k)
        out.p_w[k] = std::min(eirp_max_w, eirp_max_w * out.delta_linear * beta_min / beta[k]);
    return out;
}

Combiner rzf_combiner(const ChannelMatrix& channel, const PowerAllocation& power, double noise_power_w) {
    const Eigen::Index num_users = channel.h.cols();
    if (power.p_w.size() != num_users)
        throw ConfigError("power allocation does not match the user count");
    if (noise_power_w <= 0.0)
        throw ConfigError("noise power must be positive");
    VectorD regularization(num_users);
    for (Eigen::Index k = 0; k < num_users; ++k) {
        if (power.p_w[k] <= 0.0)
            throw ConfigError("transmit powers must be positive");
        regularization[k] = noise_power_w / power.p_w[k];
    }
    return {regularized_gram_combiner<double>(channel.h, regularization), CombinerScheme::RZF};
}

Combiner zf_combiner(const ChannelMatrix& channel) {
    const Eigen::Index num_users = channel.h.cols();
    // A singular but consistent Gram system can still pass the solver's
    // residual check, so rank deficiency is tested up front.
    if (num_users > 0) {
        const Eigen::ColPivHouseholderQR<MatrixCd> qr(channel.h);
        if (qr.rank() < num_users)
            throw RankDeficient("channel matrix does not have full column rank");
    }
    try {
        const VectorD zero = VectorD::Zero(num_users);
        return {regularized_gram_combiner<double>(channel.h, zero), CombinerScheme::ZF};
    } catch (const SingularSystem&) {
        throw RankDeficient("channel matrix does not have full column rank");
    }
}

Combiner mr_combiner(const ChannelMatrix& channel) { return {channel.h, CombinerScheme::MR}; }

VectorD sinr(const ChannelMatrix& channel, const Combiner& combiner, const PowerAllocation& power,
             double noise_power_w) {
    return combined_sinr<double>(channel.h, combiner.v, power.p_w, noise_power_w);
}

RateReport ul_rate_report(const VectorD& sinr_values, const Scenario& scenario) {
    const FrameStructure& frame = scenario.coherence_block;
    RateReport report;
    report.sinr = sinr_values;
    report.pilot_share =
        static_cast<double>(frame.tau_c - scenario.num_users) / static_cast<double>(frame.tau_c);
    report.duplex_share = frame.ul_fraction;
    report.cp_factor = 1.0 - scenario.cp_overhead;
    if (report.pilot_share <= 0.0)
        throw ConfigError("coherence block leaves no room for uplink data");

    const double share = report.pilot_share * report.duplex_share;
    report.se_bits_per_hz = sinr_values.unaryExpr([share](double x) { return share * std::log2(1.0 + x); });
    report.rate_bps = scenario.bandwidth_hz * report.cp_factor * report.se_bits_per_hz;
    return report;
}

}
