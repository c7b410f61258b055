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
#include <sstream>

#include "ruralmimo/array.hpp"
#include "ruralmimo/rng.hpp"
#include "ruralmimo/units.hpp"
#include "test_support.hpp"

using namespace ruralmimo;

namespace {

ElementLayout layout_for(int m_h, int m_v, bool dual, double wavelength_m = 0.4283) {
    ArrayConfig config;
    config.m_horizontal = m_h;
    config.m_vertical = m_v;
    config.dual_polarized = dual;
    return build_layout(config, wavelength_m);
}

}  // namespace

TEST_CASE("layout port count and cylinder radius follow the spacing constraint") {
    const double wavelength = 0.4283;
    const ElementLayout layout = layout_for(32, 8, true, wavelength);
    CHECK(layout.num_ports() == 512);
    CHECK(layout.radius_m == doctest::Approx(32 * 0.5 * wavelength / (2.0 * kPi)).epsilon(1e-14));
    CHECK(layout.ring_heights_m.size() == 8);

    double height_sum = 0.0;
    for (double z : layout.ring_heights_m) height_sum += z;
    CHECK(height_sum == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    for (int port = 0; port < layout.num_ports(); ++port) {
        const double r = std::hypot(layout.positions_m(port, 0), layout.positions_m(port, 1));
        CHECK(r == doctest::Approx(layout.radius_m).epsilon(1e-12));
    }
}

TEST_CASE("dual polarized ports come in co-located slant pairs") {
    const ElementLayout layout = layout_for(4, 2, true);
    REQUIRE(layout.num_ports() == 16);
    for (int pair = 0; pair < 8; ++pair) {
        const int a = 2 * pair, b = 2 * pair + 1;
        CHECK(layout.positions_m.row(a) == layout.positions_m.row(b));
        CHECK(layout.polarization[a] == Polarization::SlantPlus45);
        CHECK(layout.polarization[b] == Polarization::SlantMinus45);
    }
}

TEST_CASE("single polarized layout has one port per element") {
    const ElementLayout layout = layout_for(4, 2, false);
    CHECK(layout.num_ports() == 8);
    CHECK_FALSE(layout.dual_polarized);
}

TEST_CASE("build_layout rejects degenerate grids") {
    ArrayConfig config;
    config.m_horizontal = 0;
    CHECK_THROWS_AS(build_layout(config, 0.4), ConfigError);
    config.m_horizontal = 4;
    CHECK_THROWS_AS(build_layout(config, 0.0), ConfigError);
    config.element_spacing_wavelengths = -0.5;
    CHECK_THROWS_AS(build_layout(config, 0.4), ConfigError);
}

TEST_CASE("steering entries are unit modulus so the squared norm is the port count") {
    const ElementLayout layout = layout_for(8, 4, true);
    Prng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const double az = 2.0 * kPi * rng.uniform() - kPi;
        const double el = kPi * (rng.uniform() - 0.5);
        const VectorCd v = steering<double>(layout, az, el, 0.4283);
        CHECK(v.squaredNorm() == doctest::Approx(static_cast<double>(layout.num_ports())).epsilon(1e-12));
        for (int port = 0; port < layout.num_ports(); ++port)
            CHECK(std::abs(v[port]) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("reversing the arrival direction conjugates the steering vector") {
    const ElementLayout layout = layout_for(8, 4, true);
    Prng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const double az = 2.0 * kPi * rng.uniform() - kPi;
        const double el = kPi * (rng.uniform() - 0.5);
        const VectorCd forward = steering<double>(layout, az, el, 0.4283);
        const VectorCd backward = steering<double>(layout, az + kPi, -el, 0.4283);
        CHECK((backward - forward.conjugate()).norm() ==
              doctest::Approx(0.0).scale(std::sqrt(forward.size())).epsilon(1e-10));
    }
}

TEST_CASE("rotating the azimuth by one column step permutes the ring response") {
    const int m_h = 8;
    const ElementLayout layout = layout_for(m_h, 1, false);
    const double az = 0.37, el = 0.12, wavelength = 0.4283;
    const VectorCd base = steering<double>(layout, az, el, wavelength);
    const VectorCd rotated = steering<double>(layout, az + 2.0 * kPi / m_h, el, wavelength);
    for (int column = 0; column < m_h; ++column) {
        const int previous = (column + m_h - 1) % m_h;
        CHECK(std::abs(rotated[column] - base[previous]) < 1e-10);
    }
}

TEST_CASE("steering works in single precision") {
    const ElementLayout layout = layout_for(4, 2, true);
    const ComplexVector<float> v = steering<float>(layout, 0.3f, 0.1f, 0.4283f);
    CHECK(v.squaredNorm() == doctest::Approx(16.0f).epsilon(1e-5));
}

TEST_CASE("slant pair coupling keeps the mean per-port energy at one") {
    const ElementLayout dual = layout_for(4, 1, true);
    const VectorD at_zero = polarization_gains<double>(dual, 0.0);
    CHECK(at_zero[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(at_zero[1] == doctest::Approx(0.0).scale(1.0));

    const VectorD at_diag = polarization_gains<double>(dual, kPi / 4.0);
    CHECK(at_diag[0] == doctest::Approx(1.0));
    CHECK(at_diag[1] == doctest::Approx(1.0));

    // pair energy is psi independent, average per-port energy over psi is 1
    Prng rng(5);
    VectorD mean_energy = VectorD::Zero(dual.num_ports());
    const int trials = 20000;
    for (int trial = 0; trial < trials; ++trial) {
        const double psi = 2.0 * kPi * rng.uniform();
        const VectorD g = polarization_gains<double>(dual, psi);
        for (int pair = 0; pair < dual.num_ports() / 2; ++pair)
            CHECK(g[2 * pair] * g[2 * pair] + g[2 * pair + 1] * g[2 * pair + 1] ==
                  doctest::Approx(2.0).epsilon(1e-12));
        mean_energy += g.cwiseProduct(g);
    }
    mean_energy /= trials;
    for (int port = 0; port < dual.num_ports(); ++port)
        CHECK(mean_energy[port] == doctest::Approx(1.0).epsilon(0.03));

    const ElementLayout single = layout_for(4, 1, false);
    const VectorD passthrough = polarization_gains<double>(single, 1.234);
    for (int port = 0; port < single.num_ports(); ++port) CHECK(passthrough[port] == 1.0);
}

TEST_CASE("layout csv lists one line per port") {
    const ElementLayout layout = layout_for(2, 1, true);
    std::ostringstream out;
    write_layout_csv(layout, out);
    const std::string text = out.str();
    CHECK(text.rfind("port,x_m,y_m,z_m,polarization\n", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + layout.num_ports());
    CHECK(text.find("+45") != std::string::npos);
    CHECK(text.find("-45") != std::string::npos);
}
