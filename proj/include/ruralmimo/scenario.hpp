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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruralmimo/errors.hpp"
#include "ruralmimo/units.hpp"

namespace ruralmimo {

enum class Duplex { FDD, TDD };
enum class BsType { Legacy, HTBS };

const char* to_string(Duplex duplex);
const char* to_string(BsType bs_type);

/// Cylindrical port grid; ports = m_horizontal * m_vertical * (2 if dual polarized)
struct ArrayConfig {
    int m_horizontal = 32;
    int m_vertical = 8;
    bool dual_polarized = true;
    double element_spacing_wavelengths = 0.5;

    int num_ports() const { return m_horizontal * m_vertical * (dual_polarized ? 2 : 1); }
};

/// Coherence block bookkeeping. tau_p holds the uplink pilot count and is
/// fixed to the number of served users during validation.
struct FrameStructure {
    int tau_c = 10000;
    int tau_p = 0;
    double ul_fraction = 1.0;

    double uplink_data_share() const {
        return ul_fraction * static_cast<double>(tau_c - tau_p) / static_cast<double>(tau_c);
    }
};

struct Scenario {
    double carrier_frequency_hz = 0.0;
    double bandwidth_hz = 0.0;
    Duplex duplex = Duplex::FDD;
    double bs_height_m = 0.0;
    double user_height_m = 0.0;
    BsType bs_type = BsType::HTBS;
    int num_users = 0;
    ArrayConfig array;
    double eirp_max_dbm = 0.0;
    double power_ratio_delta_db = 20.0;
    double cp_overhead = 0.0;
    double noise_figure_db = 7.0;
    FrameStructure coherence_block;
    double dl_tx_power_dbm = 50.0;
    std::uint64_t seed = 1;

    int num_ports() const { return array.num_ports(); }
    double wavelength_m() const { return kSpeedOfLightMps / carrier_frequency_hz; }
};

struct ConfigViolation {
    enum class Kind { UnknownKey, MissingKey, RangeViolation };

    Kind kind;
    std::string key;
    std::string message;
};

const char* to_string(ConfigViolation::Kind kind);

/// Either a fully validated scenario or the complete list of violations.
struct ScenarioValidation {
    std::optional<Scenario> scenario;
    std::vector<ConfigViolation> violations;

    bool ok() const { return scenario.has_value(); }
    std::string summary() const;
};

/// Flat key = value document; '#' starts a comment, values may be quoted.
using KeyValueDoc = std::map<std::string, std::string>;

KeyValueDoc parse_key_value(std::istream& in);
KeyValueDoc parse_key_value_file(const std::string& path);

ScenarioValidation validate(const KeyValueDoc& doc);

/// Convenience wrapper: throws ConfigError listing every violation.
Scenario load_scenario(const std::string& path);

/// Receiver noise power in watts over the configured bandwidth.
double noise_power_w(const Scenario& scenario);

}
