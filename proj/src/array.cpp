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

#include "ruralmimo/array.hpp"

#include <cmath>
#include <ostream>

#include "ruralmimo/errors.hpp"

namespace ruralmimo {

ElementLayout build_layout(const ArrayConfig& config, double wavelength_m) {
    if (wavelength_m <= 0.0)
        throw ConfigError("wavelength must be positive");
    if (config.m_horizontal < 1 || config.m_vertical < 1)
        throw ConfigError("array dimensions must be at least 1");
    if (config.element_spacing_wavelengths <= 0.0)
        throw ConfigError("element spacing must be positive");

    const double spacing_m = config.element_spacing_wavelengths * wavelength_m;
    const int per_location = config.dual_polarized ? 2 : 1;
    const int num_ports = config.num_ports();

    ElementLayout layout;
    layout.dual_polarized = config.dual_polarized;
    layout.radius_m = config.m_horizontal * spacing_m / (2.0 * kPi);
    layout.positions_m.resize(num_ports, 3);
    layout.polarization.resize(num_ports);
    layout.ring_heights_m.resize(config.m_vertical);

    const double z_base = -0.5 * (config.m_vertical - 1) * spacing_m;
    int port = 0;
    for (int ring = 0; ring < config.m_vertical; ++ring) {
        const double z = z_base + ring * spacing_m;
        layout.ring_heights_m[ring] = z;
        for (int column = 0; column < config.m_horizontal; ++column) {
            const double phi = 2.0 * kPi * column / config.m_horizontal;
            const double x = layout.radius_m * std::cos(phi);
            const double y = layout.radius_m * std::sin(phi);
            for (int pol = 0; pol < per_location; ++pol) {
                layout.positions_m.row(port) << x, y, z;
                layout.polarization[port] =
                    (pol == 0) ? Polarization::SlantPlus45 : Polarization::SlantMinus45;
                ++port;
            }
        }
    }
    return layout;
}

void write_layout_csv(const ElementLayout& layout, std::ostream& out) {
    out << "port,x_m,y_m,z_m,polarization\n";
    for (int i = 0; i < layout.num_ports(); ++i) {
        out << i << ',' << layout.positions_m(i, 0) << ',' << layout.positions_m(i, 1) << ','
            << layout.positions_m(i, 2) << ','
            << (layout.polarization[i] == Polarization::SlantPlus45 ? "+45" : "-45") << '\n';
    }
}

}
