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

#include <cmath>

namespace ruralmimo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLightMps = 299792458.0;

// thermal noise density at 290 K
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double value) { return 10.0 * std::log10(value); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}
