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

#include "ruralmimo/econ.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ruralmimo/errors.hpp"
#include "ruralmimo/units.hpp"

namespace ruralmimo {

double avg_user_rate_bps(const TrafficModel& traffic, Link link) {
    if (traffic.busy_hours_per_day <= 0.0 || traffic.days_per_month <= 0)
        throw ConfigError("traffic model: busy hours and days must be positive");
    const double gb = link == Link::UL ? traffic.ul_gb_per_month : traffic.dl_gb_per_month;
    if (gb < 0.0) throw ConfigError("traffic model: monthly volume must be nonnegative");
    const double busy_seconds = traffic.days_per_month * traffic.busy_hours_per_day * 3600.0;
    return gb * 8e9 / busy_seconds;
}

long covered_users(int num_users, double per_user_rate_bps, double avg_dl_rate_bps) {
    if (num_users < 1) throw ConfigError("covered_users: num_users must be >= 1");
    if (avg_dl_rate_bps <= 0.0) throw ConfigError("covered_users: average rate must be positive");
    if (per_user_rate_bps < 0.0) throw ConfigError("covered_users: per-user rate must be nonnegative");
    return static_cast<long>(std::floor(num_users * per_user_rate_bps / avg_dl_rate_bps));
}

double round_sig(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double magnitude = std::floor(std::log10(std::fabs(value)));
    const double factor = std::pow(10.0, magnitude - (digits - 1));
    return std::round(value / factor) * factor;
}

EconReport econ_report(double d_cov_km, int num_users, double target_dl_rate_bps,
                       const TrafficModel& traffic, std::vector<UlRatePoint> ul_rate_table) {
    if (d_cov_km <= 0.0) throw ConfigError("econ_report: coverage distance must be positive");
    if (target_dl_rate_bps <= 0.0) throw ConfigError("econ_report: target rate must be positive");

    EconReport report;
    report.num_users = num_users;
    report.d_cov_km = d_cov_km;
    report.target_dl_rate_bps = target_dl_rate_bps;

    const double avg_dl = round_sig(avg_user_rate_bps(traffic, Link::DL), 3);
    const double avg_ul = round_sig(avg_user_rate_bps(traffic, Link::UL), 3);

    report.n_cov = covered_users(num_users, target_dl_rate_bps, avg_dl);
    report.a_cov_km2 = kPi * d_cov_km * d_cov_km;
    report.rho_cov_per_km2 = report.n_cov / report.a_cov_km2;
    report.required_ul_capacity_bps = report.n_cov * avg_ul;
    report.activity_ratio = static_cast<double>(num_users) / report.n_cov;

    std::sort(ul_rate_table.begin(), ul_rate_table.end(),
              [](const UlRatePoint& a, const UlRatePoint& b) { return a.eirp_dbm < b.eirp_dbm; });
    bool found = false;
    for (const UlRatePoint& point : ul_rate_table) {
        if (num_users * point.rate_p5_bps >= report.required_ul_capacity_bps) {
            report.min_eirp_dbm = point.eirp_dbm;
            found = true;
            break;
        }
    }
    if (!found)
        throw NoFeasibleEirp("econ_report: no table entry reaches the required uplink capacity of " +
                             std::to_string(report.required_ul_capacity_bps / 1e6) + " Mbps");
    return report;
}

std::string econ_table_row(const EconReport& report) {
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer), "%d,%.6g,%ld,%.3g,%g,%.3g", report.num_users,
                  report.d_cov_km, report.n_cov, report.rho_cov_per_km2, report.min_eirp_dbm,
                  report.a_cov_km2);
    return buffer;
}

TrafficModel parse_traffic(const KeyValueDoc& doc) {
    TrafficModel traffic;
    for (const auto& [key, value] : doc) {
        double number = 0.0;
        try {
            size_t consumed = 0;
            number = std::stod(value, &consumed);
            if (consumed != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ConfigError("traffic model: key '" + key + "' has non-numeric value '" + value + "'");
        }
        if (key == "ul_gb_per_month") traffic.ul_gb_per_month = number;
        else if (key == "dl_gb_per_month") traffic.dl_gb_per_month = number;
        else if (key == "busy_hours_per_day") traffic.busy_hours_per_day = number;
        else if (key == "days_per_month") traffic.days_per_month = static_cast<int>(number);
        else throw ConfigError("traffic model: unknown key '" + key + "'");
    }
    if (traffic.busy_hours_per_day <= 0.0 || traffic.days_per_month <= 0)
        throw ConfigError("traffic model: busy hours and days must be positive");
    return traffic;
}

std::vector<UlRatePoint> parse_ul_rate_table(std::istream& in) {
    std::vector<UlRatePoint> table;
    std::string line;
    int line_number = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        std::string eirp_text, rate_text;
        if (!std::getline(fields, eirp_text, ',') || !std::getline(fields, rate_text))
            throw ParseError("ul rate table line " + std::to_string(line_number) +
                             ": expected eirp_dbm,ul_rate_p5_mbps");
        try {
            UlRatePoint point;
            point.eirp_dbm = std::stod(eirp_text);
            point.rate_p5_bps = std::stod(rate_text) * 1e6;
            table.push_back(point);
        } catch (const std::exception&) {
            throw ParseError("ul rate table line " + std::to_string(line_number) +
                             ": non-numeric field");
        }
    }
    if (table.empty()) throw ParseError("ul rate table: no data rows");
    return table;
}

std::vector<UlRatePoint> load_ul_rate_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ul rate table '" + path + "'");
    return parse_ul_rate_table(in);
}

}
