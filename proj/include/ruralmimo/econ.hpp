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

#include <string>
#include <vector>

#include "ruralmimo/montecarlo.hpp"

namespace ruralmimo {

/// Monthly traffic volumes spread over the daily busy hours.
struct TrafficModel {
    double ul_gb_per_month = 1.0;
    double dl_gb_per_month = 5.0;
    double busy_hours_per_day = 10.0;
    int days_per_month = 30;
};

/// Busy-hour average rate per subscriber in bit/s (1 GB = 1e9 bytes).
double avg_user_rate_bps(const TrafficModel& traffic, Link link);

/// Subscribers a cell can carry: floor(K * per_user_rate / avg_dl_rate).
long covered_users(int num_users, double per_user_rate_bps, double avg_dl_rate_bps);

/// Round to the given number of significant digits.
double round_sig(double value, int digits);

struct UlRatePoint {
    double eirp_dbm = 0.0;
    double rate_p5_bps = 0.0;
};

struct EconReport {
    int num_users = 0;
    double d_cov_km = 0.0;
    double target_dl_rate_bps = 0.0;
    long n_cov = 0;
    double rho_cov_per_km2 = 0.0;
    double a_cov_km2 = 0.0;
    double required_ul_capacity_bps = 0.0;
    double min_eirp_dbm = 0.0;
    double activity_ratio = 0.0;
};

/// Site dimensioning at a given coverage distance. Traffic averages are
/// rounded to three significant digits before the subscriber arithmetic,
/// matching the reporting precision of the rate columns. min_eirp is the
/// smallest table entry whose aggregate uplink throughput K * rate covers
/// the subscribers' busy-hour uplink demand.
EconReport econ_report(double d_cov_km, int num_users, double target_dl_rate_bps,
                       const TrafficModel& traffic, std::vector<UlRatePoint> ul_rate_table);

/// Columns: K, d_cov_km, n_cov, rho_cov_per_km2, min_eirp_dbm, a_cov_km2
std::string econ_table_row(const EconReport& report);

TrafficModel parse_traffic(const KeyValueDoc& doc);

/// CSV with header eirp_dbm,ul_rate_p5_mbps
std::vector<UlRatePoint> parse_ul_rate_table(std::istream& in);
std::vector<UlRatePoint> load_ul_rate_table(const std::string& path);

}
