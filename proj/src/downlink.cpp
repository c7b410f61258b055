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

#include "ruralmimo/downlink.hpp"

#include <cmath>

#include "ruralmimo/combining.hpp"
#include "ruralmimo/errors.hpp"

namespace ruralmimo {

Precoder dl_precoder(const ChannelMatrix& channel, double noise_power_w, double total_power_w) {
    const Eigen::Index num_users = channel.h.cols();
    if (num_users == 0)
        throw ConfigError("precoder needs at least one user");
    if (noise_power_w <= 0.0 || total_power_w <= 0.0)
        throw ConfigError("noise and transmit power must be positive");

    const double per_user_power = total_power_w / static_cast<double>(num_users);
    const VectorD regularization =
        VectorD::Constant(num_users, noise_power_w / per_user_power);
    MatrixCd directions = regularized_gram_combiner<double>(channel.h, regularization);
    for (Eigen::Index k = 0; k < num_users; ++k) {
        const double norm = directions.col(k).norm();
        if (norm == 0.0)
            throw SingularSystem("precoding direction collapsed to zero");
        directions.col(k) /= norm;
    }
    return {directions, VectorD::Constant(num_users, per_user_power)};
}

VectorD dl_sinr(const ChannelMatrix& channel, const Precoder& precoder, double noise_power_w) {
    const Eigen::Index num_users = channel.h.cols();
    if (precoder.w.rows() != channel.h.rows() || precoder.w.cols() != num_users ||
        precoder.power_w.size() != num_users)
        throw ConfigError("channel and precoder dimensions disagree");
    if (noise_power_w <= 0.0)
        throw ConfigError("noise power must be positive");

    // cross(k, i) = h_k^H w_i
    const MatrixCd cross = channel.h.adjoint() * precoder.w;
    VectorD out(num_users);
    for (Eigen::Index k = 0; k < num_users; ++k) {
        const double signal = precoder.power_w[k] * std::norm(cross(k, k));
        double interference = 0.0;
        for (Eigen::Index i = 0; i < num_users; ++i) {
            if (i != k)
                interference += precoder.power_w[i] * std::norm(cross(k, i));
        }
        out[k] = signal / (interference + noise_power_w);
    }
    return out;
}

RateReport dl_rate_report(const VectorD& sinr_values, const Scenario& scenario) {
    const FrameStructure& frame = scenario.coherence_block;
    RateReport report;
    report.sinr = sinr_values;
    report.cp_factor = 1.0 - scenario.cp_overhead;

    if (scenario.duplex == Duplex::FDD) {
        const int tau_p = scenario.num_ports();
        if (frame.tau_c <= tau_p)
            throw ConfigError("FDD downlink pilots exhaust the coherence block: tau_c " +
                              std::to_string(frame.tau_c) + " <= ports " + std::to_string(tau_p));
        report.pilot_share = static_cast<double>(frame.tau_c - tau_p) / static_cast<double>(frame.tau_c);
        report.duplex_share = 1.0;
    } else {
        report.pilot_share =
            static_cast<double>(frame.tau_c - scenario.num_users) / static_cast<double>(frame.tau_c);
        report.duplex_share = 1.0 - frame.ul_fraction;
        if (report.pilot_share <= 0.0)
            throw ConfigError("coherence block leaves no room for downlink data");
    }

    const double share = report.pilot_share * report.duplex_share;
    report.se_bits_per_hz = sinr_values.unaryExpr([share](double x) { return share * std::log2(1.0 + x); });
    report.rate_bps = scenario.bandwidth_hz * report.cp_factor * report.se_bits_per_hz;
    return report;
}

}
