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

#include "ruralmimo/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ruralmimo {

const char* to_string(Duplex duplex) { return duplex == Duplex::FDD ? "FDD" : "TDD"; }

const char* to_string(BsType bs_type) { return bs_type == BsType::HTBS ? "HTBS" : "Legacy"; }

const char* to_string(ConfigViolation::Kind kind) {
    switch (kind) {
    case ConfigViolation::Kind::UnknownKey:
        return "UnknownKey";
    case ConfigViolation::Kind::MissingKey:
        return "MissingKey";
    default:
        return "RangeViolation";
    }
}

std::string ScenarioValidation::summary() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0)
            out << "; ";
        out << to_string(violations[i].kind) << " " << violations[i].key << ": " << violations[i].message;
    }
    return out.str();
}

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
        --end;
    return text.substr(begin, end - begin);
}

std::string unquote(const std::string& text) {
    if (text.size() >= 2 && ((text.front() == '"' && text.back() == '"') || (text.front() == '\'' && text.back() == '\'')))
        return text.substr(1, text.size() - 2);
    return text;
}

}

KeyValueDoc parse_key_value(std::istream& in) {
    KeyValueDoc doc;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ParseError("line " + std::to_string(line_number) + ": empty key");
        if (doc.count(key))
            throw ParseError("line " + std::to_string(line_number) + ": duplicate key '" + key + "'");
        doc[key] = value;
    }
    return doc;
}

KeyValueDoc parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return parse_key_value(in);
}

namespace {

// Pulls typed values out of the document while recording every violation;
// keys touched here are exempt from the final unknown-key pass.
class DocReader {
  public:
    DocReader(const KeyValueDoc& doc, std::vector<ConfigViolation>& violations)
        : doc_(doc), violations_(violations) {}

    std::optional<std::string> raw(const std::string& key, bool required) {
        consumed_.insert(key);
        const auto it = doc_.find(key);
        if (it == doc_.end()) {
            if (required)
                add(ConfigViolation::Kind::MissingKey, key, "required key is missing");
            return std::nullopt;
        }
        return it->second;
    }

    std::optional<double> number(const std::string& key, bool required) {
        const auto text = raw(key, required);
        if (!text)
            return std::nullopt;
        try {
            std::size_t used = 0;
            const double value = std::stod(*text, &used);
            if (used != text->size() || !std::isfinite(value)) {
                add(ConfigViolation::Kind::RangeViolation, key, "not a finite number: '" + *text + "'");
                return std::nullopt;
            }
            return value;
        } catch (const std::exception&) {
            add(ConfigViolation::Kind::RangeViolation, key, "not a number: '" + *text + "'");
            return std::nullopt;
        }
    }

    std::optional<long long> integer(const std::string& key, bool required) {
        const auto value = number(key, required);
        if (!value)
            return std::nullopt;
        if (*value != std::floor(*value)) {
            add(ConfigViolation::Kind::RangeViolation, key, "must be an integer");
            return std::nullopt;
        }
        return static_cast<long long>(*value);
    }

    std::optional<bool> boolean(const std::string& key, bool required) {
        const auto text = raw(key, required);
        if (!text)
            return std::nullopt;
        if (*text == "true")
            return true;
        if (*text == "false")
            return false;
        add(ConfigViolation::Kind::RangeViolation, key, "must be true or false, got '" + *text + "'");
        return std::nullopt;
    }

    void add(ConfigViolation::Kind kind, const std::string& key, const std::string& message) {
        violations_.push_back({kind, key, message});
    }

    void report_unknown_keys() {
        for (const auto& [key, value] : doc_) {
            (void)value;
            if (!consumed_.count(key))
                add(ConfigViolation::Kind::UnknownKey, key, "key is not recognized");
        }
    }

  private:
    const KeyValueDoc& doc_;
    std::vector<ConfigViolation>& violations_;
    std::set<std::string> consumed_;
};

}

ScenarioValidation validate(const KeyValueDoc& doc) {
    ScenarioValidation result;
    DocReader reader(doc, result.violations);
    Scenario s;

    auto positive = [&](const std::string& key, std::optional<double> value) -> std::optional<double> {
        if (value && *value <= 0.0) {
            reader.add(ConfigViolation::Kind::RangeViolation, key, "must be positive");
            return std::nullopt;
        }
        return value;
    };

    const auto fc_mhz = positive("carrier_frequency_mhz", reader.number("carrier_frequency_mhz", true));
    const auto w_mhz = positive("bandwidth_mhz", reader.number("bandwidth_mhz", true));
    const auto bs_height = positive("bs_height_m", reader.number("bs_height_m", true));
    const auto user_height = positive("user_height_m", reader.number("user_height_m", true));
    const auto eirp = reader.number("eirp_max_dbm", true);
    const auto delta = reader.number("power_ratio_delta_db", true);
    const auto cp_percent = reader.number("cp_overhead_percent", true);
    const auto num_users = reader.integer("num_users", true);
    const auto m_horizontal = reader.integer("m_horizontal", true);
    const auto m_vertical = reader.integer("m_vertical", true);
    const auto dual = reader.boolean("dual_polarized", true);

    std::optional<Duplex> duplex;
    if (const auto text = reader.raw("duplex", true)) {
        if (*text == "FDD")
            duplex = Duplex::FDD;
        else if (*text == "TDD")
            duplex = Duplex::TDD;
        else
            reader.add(ConfigViolation::Kind::RangeViolation, "duplex", "must be FDD or TDD, got '" + *text + "'");
    }

    std::optional<BsType> bs_type;
    if (const auto text = reader.raw("bs_type", true)) {
        if (*text == "HTBS")
            bs_type = BsType::HTBS;
        else if (*text == "Legacy")
            bs_type = BsType::Legacy;
        else
            reader.add(ConfigViolation::Kind::RangeViolation, "bs_type", "must be HTBS or Legacy, got '" + *text + "'");
    }

    const auto noise_figure = reader.number("noise_figure_db", false);
    const auto tau_c = reader.integer("tau_c", false);
    const auto ul_fraction = reader.number("ul_fraction", false);
    const auto dl_power = reader.number("dl_tx_power_dbm", false);

    // parsed as text to keep the full 64 bit range
    std::optional<std::uint64_t> seed;
    if (const auto text = reader.raw("seed", false)) {
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
        if (ec == std::errc() && ptr == text->data() + text->size())
            seed = value;
        else
            reader.add(ConfigViolation::Kind::RangeViolation, "seed", "must be a nonnegative 64-bit integer");
    }

    reader.report_unknown_keys();

    if (delta && *delta < 0.0)
        reader.add(ConfigViolation::Kind::RangeViolation, "power_ratio_delta_db", "must be nonnegative");
    if (cp_percent && (*cp_percent < 0.0 || *cp_percent >= 100.0))
        reader.add(ConfigViolation::Kind::RangeViolation, "cp_overhead_percent", "must lie in [0, 100)");
    if (noise_figure && *noise_figure < 0.0)
        reader.add(ConfigViolation::Kind::RangeViolation, "noise_figure_db", "must be nonnegative");
    if (num_users && *num_users < 1)
        reader.add(ConfigViolation::Kind::RangeViolation, "num_users", "must be at least 1");
    if (m_horizontal && *m_horizontal < 1)
        reader.add(ConfigViolation::Kind::RangeViolation, "m_horizontal", "must be at least 1");
    if (m_vertical && *m_vertical < 1)
        reader.add(ConfigViolation::Kind::RangeViolation, "m_vertical", "must be at least 1");
    if (tau_c && *tau_c < 2)
        reader.add(ConfigViolation::Kind::RangeViolation, "tau_c", "must be at least 2");

    if (duplex && ul_fraction) {
        if (*duplex == Duplex::FDD && *ul_fraction != 1.0)
            reader.add(ConfigViolation::Kind::RangeViolation, "ul_fraction",
                       "FDD dedicates the full uplink band; ul_fraction must be 1");
        if (*duplex == Duplex::TDD && (*ul_fraction <= 0.0 || *ul_fraction >= 1.0))
            reader.add(ConfigViolation::Kind::RangeViolation, "ul_fraction", "TDD requires ul_fraction in (0, 1)");
    }

    // cross-field checks only when the involved fields parsed cleanly
    if (num_users && m_horizontal && m_vertical && dual && *num_users >= 1 && *m_horizontal >= 1 && *m_vertical >= 1) {
        const long long ports = *m_horizontal * *m_vertical * (*dual ? 2 : 1);
        if (*num_users > ports)
            reader.add(ConfigViolation::Kind::RangeViolation, "num_users",
                       "must not exceed the port count " + std::to_string(ports));
    }
    if (num_users && *num_users >= 1) {
        const long long effective_tau_c = tau_c ? *tau_c : s.coherence_block.tau_c;
        if (effective_tau_c <= *num_users)
            reader.add(ConfigViolation::Kind::RangeViolation, "tau_c",
                       "must exceed the uplink pilot count " + std::to_string(*num_users));
    }

    if (!result.violations.empty())
        return result;

    s.carrier_frequency_hz = *fc_mhz * 1e6;
    s.bandwidth_hz = *w_mhz * 1e6;
    s.duplex = *duplex;
    s.bs_height_m = *bs_height;
    s.user_height_m = *user_height;
    s.bs_type = *bs_type;
    s.num_users = static_cast<int>(*num_users);
    s.array.m_horizontal = static_cast<int>(*m_horizontal);
    s.array.m_vertical = static_cast<int>(*m_vertical);
    s.array.dual_polarized = *dual;
    s.eirp_max_dbm = *eirp;
    s.power_ratio_delta_db = *delta;
    s.cp_overhead = *cp_percent / 100.0;
    if (noise_figure)
        s.noise_figure_db = *noise_figure;
    if (tau_c)
        s.coherence_block.tau_c = static_cast<int>(*tau_c);
    s.coherence_block.tau_p = s.num_users;
    s.coherence_block.ul_fraction = ul_fraction ? *ul_fraction : (s.duplex == Duplex::FDD ? 1.0 : 0.25);
    s.dl_tx_power_dbm = dl_power ? *dl_power : (s.bs_type == BsType::HTBS ? 50.0 : 46.0);
    if (seed)
        s.seed = *seed;

    result.scenario = s;
    return result;
}

Scenario load_scenario(const std::string& path) {
    const ScenarioValidation validation = validate(parse_key_value_file(path));
    if (!validation.ok())
        throw ConfigError(validation.summary());
    return *validation.scenario;
}

double noise_power_w(const Scenario& scenario) {
    return dbm_to_watt(kThermalNoiseDbmPerHz + 10.0 * std::log10(scenario.bandwidth_hz) + scenario.noise_figure_db);
}

}
