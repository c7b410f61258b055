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

#include "ruralmimo/scenario.hpp"
#include "ruralmimo/types.hpp"
#include "ruralmimo/units.hpp"

namespace ruralmimo {

enum class Polarization { SlantPlus45, SlantMinus45 };

/// Port positions of a uniform cylindrical array in the mast-local frame
/// (x/y in the horizontal plane, z along the mast, origin at the array
/// center). Dual polarized ports come in co-located +45/-45 pairs.
struct ElementLayout {
    Eigen::Matrix<double, Eigen::Dynamic, 3> positions_m;
    std::vector<Polarization> polarization;
    bool dual_polarized = false;
    double radius_m = 0.0;
    std::vector<double> ring_heights_m;

    int num_ports() const { return static_cast<int>(positions_m.rows()); }
};

/// Cylinder radius follows from the circumferential spacing constraint:
/// m_horizontal equally spaced columns with arc spacing s * wavelength.
/// Rings are stacked with the same spacing, centered on z = 0.
ElementLayout build_layout(const ArrayConfig& config, double wavelength_m);

/// Plane-wave array response for a wave arriving from (azimuth, elevation);
/// entry m is exp(+j 2 pi / wavelength * <position_m, unit_direction>).
/// Entries have unit modulus, so the squared norm equals the port count.
template <typename Scalar>
ComplexVector<Scalar> steering(const ElementLayout& layout, Scalar azimuth_rad, Scalar elevation_rad,
                               Scalar wavelength_m) {
    const Scalar wave_number = Scalar(2) * Scalar(kPi) / wavelength_m;
    const Scalar ux = std::cos(elevation_rad) * std::cos(azimuth_rad);
    const Scalar uy = std::cos(elevation_rad) * std::sin(azimuth_rad);
    const Scalar uz = std::sin(elevation_rad);
    const int m = layout.num_ports();
    ComplexVector<Scalar> response(m);
    for (int i = 0; i < m; ++i) {
        const Scalar phase = wave_number * (Scalar(layout.positions_m(i, 0)) * ux +
                                            Scalar(layout.positions_m(i, 1)) * uy +
                                            Scalar(layout.positions_m(i, 2)) * uz);
        response[i] = std::polar(Scalar(1), phase);
    }
    return response;
}

/// Per-port amplitude coupling of a propagation path whose polarization is
/// rotated by psi relative to the +45 axis. Dual polarized pairs receive
/// (sqrt(2) cos psi, sqrt(2) sin psi) so the average energy per port over a
/// uniform psi is one; single polarized ports pass the path through intact.
template <typename Scalar>
RealVector<Scalar> polarization_gains(const ElementLayout& layout, Scalar psi_rad) {
    const int m = layout.num_ports();
    RealVector<Scalar> gains(m);
    if (!layout.dual_polarized) {
        gains.setOnes();
        return gains;
    }
    const Scalar plus = Scalar(std::sqrt(2.0)) * std::cos(psi_rad);
    const Scalar minus = Scalar(std::sqrt(2.0)) * std::sin(psi_rad);
    for (int i = 0; i < m; ++i)
        gains[i] = layout.polarization[i] == Polarization::SlantPlus45 ? plus : minus;
    return gains;
}

/// CSV dump: port,x_m,y_m,z_m,polarization
void write_layout_csv(const ElementLayout& layout, std::ostream& out);

}
