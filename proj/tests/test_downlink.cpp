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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ruralmimo/downlink.hpp"
#include "test_support.hpp"

using namespace ruralmimo;

namespace {

VectorD naive_dl_sinr(const MatrixCd& h, const MatrixCd& w, const VectorD& p, double noise_w) {
    const int num_users = static_cast<int>(h.cols());
    const int num_ports = static_cast<int>(h.rows());
    VectorD out(num_users);
    for (int k = 0; k < num_users; ++k) {
        double signal = 0.0, interference = 0.0;
        for (int i = 0; i < num_users; ++i) {
            std::complex<double> cross(0.0, 0.0);
            for (int m = 0; m < num_ports; ++m) cross += std::conj(h(m, k)) * w(m, i);
            const double term = p[i] * std::norm(cross);
            if (i == k)
                signal = term;
            else
                interference += term;
        }
        out[k] = signal / (interference + noise_w);
    }
    return out;
}

}  // namespace

TEST_CASE("precoder columns are unit norm under an equal power split") {
    Prng rng(3);
    const ChannelMatrix channel = testsupport::random_channel(rng, 16, 4);
    const double total_power_w = 2.0;
    const Precoder precoder = dl_precoder(channel, 0.1, total_power_w);
    REQUIRE(precoder.w.cols() == 4);
    double allocated = 0.0;
    for (int k = 0; k < 4; ++k) {
        CHECK(precoder.w.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(precoder.power_w[k] == doctest::Approx(0.5).epsilon(1e-12));
        allocated += precoder.power_w[k];
    }
    CHECK(allocated == doctest::Approx(total_power_w).epsilon(1e-12));
}

TEST_CASE("downlink sinr agrees with a naive per-entry evaluation") {
    Prng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int num_ports = 4 + static_cast<int>(rng.next_u64() % 12);
        const int num_users = 1 + static_cast<int>(rng.next_u64() % std::min(num_ports, 6));
        const ChannelMatrix channel = testsupport::random_channel(rng, num_ports, num_users);
        const double noise_w = 0.05 + rng.uniform();
        const Precoder precoder = dl_precoder(channel, noise_w, 1.5);
        const VectorD fast = dl_sinr(channel, precoder, noise_w);
        const VectorD slow = naive_dl_sinr(channel.h, precoder.w, precoder.power_w, noise_w);
        for (int k = 0; k < num_users; ++k)
            CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-10));
    }
}

TEST_CASE("interference fades when users decorrelate and power grows") {
    Prng rng(7);
    const ChannelMatrix channel = testsupport::random_channel(rng, 64, 2);
    const double noise_w = 1e-3;
    const Precoder precoder = dl_precoder(channel, noise_w, 10.0);
    const VectorD values = dl_sinr(channel, precoder, noise_w);
    for (int k = 0; k < 2; ++k) CHECK(values[k] > 100.0);
}

TEST_CASE("downlink rates pay for their own pilots on FDD") {
    const Scenario s = testsupport::tower_scenario(20, 32, 8);  // 512 ports
    const VectorD unit_sinr = VectorD::Ones(20);
    const RateReport report = dl_rate_report(unit_sinr, s);
    CHECK(report.pilot_share == doctest::Approx((10000.0 - 512.0) / 10000.0).epsilon(1e-15));
    CHECK(report.duplex_share == 1.0);
    CHECK(report.rate_bps[0] == doctest::Approx(10e6 * 0.95 * 0.9488).epsilon(1e-12));
}

TEST_CASE("FDD downlink needs a coherence block longer than the port count") {
    Scenario s = testsupport::tower_scenario(20, 32, 8);
    s.coherence_block.tau_c = 512;
    CHECK_THROWS_AS(dl_rate_report(VectorD::Ones(20), s), ConfigError);
    s.coherence_block.tau_c = 513;
    CHECK_NOTHROW(dl_rate_report(VectorD::Ones(20), s));
}

TEST_CASE("TDD downlink reuses uplink pilots and takes the remaining data share") {
    Scenario s = testsupport::tower_scenario(20, 32, 8);
    s.duplex = Duplex::TDD;
    s.coherence_block.ul_fraction = 0.25;
    const RateReport report = dl_rate_report(VectorD::Ones(20), s);
    CHECK(report.pilot_share == doctest::Approx(0.998).epsilon(1e-15));
    CHECK(report.duplex_share == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(report.rate_bps[0] == doctest::Approx(10e6 * 0.95 * 0.998 * 0.75).epsilon(1e-12));
}
