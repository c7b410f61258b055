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

#include "ruralmimo/combining.hpp"
#include "ruralmimo/uplink.hpp"
#include "test_support.hpp"

using namespace ruralmimo;

namespace {

LargeScale unit_large_scale(const VectorD& beta) {
    LargeScale ls;
    ls.beta = beta;
    ls.path_loss_db = VectorD::Zero(beta.size());
    ls.shadow_db = VectorD::Zero(beta.size());
    ls.los.assign(beta.size(), true);
    return ls;
}

/// Plain triple loop over ports and users, no linear algebra reductions.
VectorD naive_sinr(const MatrixCd& h, const MatrixCd& v, const VectorD& p, double noise_w) {
    const int num_users = static_cast<int>(h.cols());
    const int num_ports = static_cast<int>(h.rows());
    VectorD out(num_users);
    for (int k = 0; k < num_users; ++k) {
        double interference = 0.0;
        double signal = 0.0;
        double combiner_energy = 0.0;
        for (int i = 0; i < num_users; ++i) {
            std::complex<double> cross(0.0, 0.0);
            for (int m = 0; m < num_ports; ++m) cross += std::conj(v(m, k)) * h(m, i);
            const double term = p[i] * std::norm(cross);
            if (i == k)
                signal = term;
            else
                interference += term;
        }
        for (int m = 0; m < num_ports; ++m) combiner_energy += std::norm(v(m, k));
        out[k] = signal / (interference + noise_w * combiner_energy);
    }
    return out;
}

}  // namespace

TEST_CASE("power control reproduces the two-user 30 dB spread example") {
    // betas 30 dB apart, cap 0.5 W, allowed received spread 20 dB
    VectorD beta(2);
    beta << 1e-6, 1e-9;
    const PowerAllocation power = power_control(unit_large_scale(beta), 0.5, 20.0);
    CHECK(power.p_w[1] == doctest::Approx(0.5).epsilon(1e-15));   // weakest at full power
    CHECK(power.p_w[0] == doctest::Approx(0.05).epsilon(1e-12));  // 10 dB below the cap
    const double received_spread = (power.p_w[0] * beta[0]) / (power.p_w[1] * beta[1]);
    CHECK(received_spread == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("power control caps every user and bounds the received spread") {
    Prng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const int num_users = 2 + static_cast<int>(rng.next_u64() % 12);
        VectorD beta(num_users);
        for (int k = 0; k < num_users; ++k)
            beta[k] = std::pow(10.0, -6.0 - 8.0 * rng.uniform());  // up to 80 dB spread
        const double cap = 0.1 + rng.uniform();
        const PowerAllocation power = power_control(unit_large_scale(beta), cap, 20.0);

        double received_min = 1e300, received_max = 0.0;
        int weakest = 0;
        for (int k = 0; k < num_users; ++k) {
            CHECK(power.p_w[k] <= cap * (1.0 + 1e-12));
            CHECK(power.p_w[k] > 0.0);
            received_min = std::min(received_min, power.p_w[k] * beta[k]);
            received_max = std::max(received_max, power.p_w[k] * beta[k]);
            if (beta[k] < beta[weakest]) weakest = k;
        }
        CHECK(power.p_w[weakest] == doctest::Approx(cap).epsilon(1e-12));
        CHECK(received_max / received_min <= 100.0 * (1.0 + 1e-9));
    }
}

TEST_CASE("power control rejects degenerate gains") {
    VectorD zero(2);
    zero << 1e-6, 0.0;
    CHECK_THROWS_AS(power_control(unit_large_scale(zero), 0.5, 20.0), DegenerateGains);
    VectorD bad(2);
    bad << 1e-6, std::nan("");
    CHECK_THROWS_AS(power_control(unit_large_scale(bad), 0.5, 20.0), DegenerateGains);
}

TEST_CASE("regularized combiner matches the dense inverse") {
    Prng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const int num_ports = 16, num_users = 4;
        ChannelMatrix channel = testsupport::random_channel(rng, num_ports, num_users);
        PowerAllocation power;
        power.p_w.resize(num_users);
        for (int k = 0; k < num_users; ++k) power.p_w[k] = 0.5 + 1.5 * rng.uniform();
        const double noise_w = 0.3;

        const Combiner combiner = rzf_combiner(channel, power, noise_w);
        REQUIRE(combiner.scheme == CombinerScheme::RZF);

        MatrixCd gram = channel.h.adjoint() * channel.h;
        for (int k = 0; k < num_users; ++k) gram(k, k) += noise_w / power.p_w[k];
        const MatrixCd reference = channel.h * gram.inverse();
        CHECK((combiner.v - reference).norm() / reference.norm() < 1e-10);
    }
}

TEST_CASE("regularized combining never loses to simpler schemes") {
    Prng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        ChannelMatrix channel = testsupport::random_channel(rng, 16, 5);
        PowerAllocation power;
        power.p_w = VectorD::Ones(5);
        const double noise_w = 0.2;

        const VectorD rzf = sinr(channel, rzf_combiner(channel, power, noise_w), power, noise_w);
        const VectorD mr = sinr(channel, mr_combiner(channel), power, noise_w);
        const VectorD zf = sinr(channel, zf_combiner(channel), power, noise_w);
        for (int k = 0; k < 5; ++k) {
            CHECK(rzf[k] >= mr[k] - 1e-9);
            CHECK(rzf[k] >= zf[k] - 1e-9);
        }
    }
}

TEST_CASE("zero forcing nulls the interference") {
    Prng rng(29);
    ChannelMatrix channel = testsupport::random_channel(rng, 24, 6);
    const Combiner combiner = zf_combiner(channel);
    REQUIRE(combiner.scheme == CombinerScheme::ZF);
    const MatrixCd cross = combiner.v.adjoint() * channel.h;
    for (int k = 0; k < 6; ++k)
        for (int i = 0; i < 6; ++i)
            if (i != k) CHECK(std::abs(cross(k, i)) / std::abs(cross(k, k)) < 1e-8);
}

TEST_CASE("zero forcing refuses rank deficient channels") {
    Prng rng(37);
    ChannelMatrix channel = testsupport::random_channel(rng, 16, 4);
    channel.h.col(3) = channel.h.col(0);  // collinear users
    CHECK_THROWS_AS(zf_combiner(channel), RankDeficient);

    ChannelMatrix wide = testsupport::random_channel(rng, 3, 5);  // more users than ports
    CHECK_THROWS_AS(zf_combiner(wide), RankDeficient);
}

TEST_CASE("maximum ratio combining is the channel itself") {
    Prng rng(41);
    const ChannelMatrix channel = testsupport::random_channel(rng, 8, 3);
    const Combiner combiner = mr_combiner(channel);
    CHECK(combiner.scheme == CombinerScheme::MR);
    CHECK((combiner.v - channel.h).norm() == 0.0);
}

TEST_CASE("sinr agrees with a naive per-entry evaluation") {
    Prng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const int num_ports = 4 + static_cast<int>(rng.next_u64() % 12);
        const int num_users = 1 + static_cast<int>(rng.next_u64() % std::min(num_ports, 6));
        ChannelMatrix channel = testsupport::random_channel(rng, num_ports, num_users);
        PowerAllocation power;
        power.p_w.resize(num_users);
        for (int k = 0; k < num_users; ++k) power.p_w[k] = 0.2 + rng.uniform();
        const double noise_w = 0.05 + rng.uniform();

        const Combiner combiner = rzf_combiner(channel, power, noise_w);
        const VectorD fast = sinr(channel, combiner, power, noise_w);
        const VectorD slow = naive_sinr(channel.h, combiner.v, power.p_w, noise_w);
        for (int k = 0; k < num_users; ++k)
            CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-10));
    }
}

TEST_CASE("sinr is invariant to rescaling the combiner columns") {
    Prng rng(47);
    ChannelMatrix channel = testsupport::random_channel(rng, 12, 4);
    PowerAllocation power;
    power.p_w = VectorD::Ones(4);
    const double noise_w = 0.4;
    Combiner combiner = rzf_combiner(channel, power, noise_w);
    const VectorD reference = sinr(channel, combiner, power, noise_w);
    for (int k = 0; k < 4; ++k)
        combiner.v.col(k) *= std::complex<double>(0.3 + rng.uniform(), rng.uniform());
    const VectorD rescaled = sinr(channel, combiner, power, noise_w);
    for (int k = 0; k < 4; ++k)
        CHECK(rescaled[k] == doctest::Approx(reference[k]).epsilon(1e-12));
}

TEST_CASE("uplink rate applies pilot, duplex and cyclic prefix overheads") {
    const Scenario s = testsupport::tower_scenario(20, 32, 8);
    const VectorD unit_sinr = VectorD::Ones(20);
    const RateReport report = ul_rate_report(unit_sinr, s);
    CHECK(report.pilot_share == doctest::Approx(0.998).epsilon(1e-15));
    CHECK(report.duplex_share == 1.0);
    CHECK(report.cp_factor == doctest::Approx(0.95).epsilon(1e-15));
    for (int k = 0; k < 20; ++k) {
        CHECK(report.se_bits_per_hz[k] == doctest::Approx(0.998).epsilon(1e-12));
        CHECK(report.rate_bps[k] == doctest::Approx(9481000.0).epsilon(1e-12));
    }

    Scenario tdd = s;
    tdd.duplex = Duplex::TDD;
    tdd.coherence_block.ul_fraction = 0.25;
    const RateReport tdd_report = ul_rate_report(unit_sinr, tdd);
    CHECK(tdd_report.duplex_share == 0.25);
    CHECK(tdd_report.rate_bps[0] == doctest::Approx(9481000.0 * 0.25).epsilon(1e-12));
}
