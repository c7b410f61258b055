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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruralmimo/channel.hpp"
#include "ruralmimo/scenario.hpp"

namespace ruralmimo {

/// Monte Carlo placement settings. Drops are seeded as
/// mix(master_seed, drop index), so outputs do not depend on the thread
/// schedule and reruns with the same seed replay exactly.
struct DropEnsemble {
    int num_drops = 200;
    double disk_radius_m = 0.0;
    double min_radius_m = 35.0;
    std::uint64_t master_seed = 1;
};

/// Users drawn uniformly over the annulus area between min_radius and the
/// disk radius: r = sqrt(u (R^2 - r_min^2) + r_min^2), azimuth uniform.
UserDrop drop(Prng& rng, const DropEnsemble& ensemble, int num_users, double user_height_m);

/// Nearest-rank percentile of the pooled values: rank ceil(q n / 100).
double percentile_rate(std::vector<double> pooled, double percentile);

struct RateSummary {
    double p5_bps = 0.0;
    double p50_bps = 0.0;
    double p95_bps = 0.0;
    double mean_bps = 0.0;
    std::size_t pool_size = 0;
    std::vector<std::string> warnings;
};

enum class Link { DL, UL };

const char* to_string(Link link);

/// Pooled per-user rates over the ensemble at one evaluation radius.
/// d_eval_m overrides the ensemble disk radius for this evaluation.
struct ExperimentPool {
    std::vector<double> rates_bps;
    long extrapolated_links = 0;
};

ExperimentPool pooled_rates(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                            Link link, unsigned threads = 0, const ClusterProfile& profile = {});

RateSummary summarize(const ExperimentPool& pool);

RateSummary ul_rate_experiment(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                               unsigned threads = 0, const ClusterProfile& profile = {});
RateSummary dl_rate_experiment(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                               unsigned threads = 0, const ClusterProfile& profile = {});

struct CoverageResult {
    double d_cov_m = 0.0;
    double target_rate_bps = 0.0;
    double percentile = 5.0;
    Link link = Link::DL;
    int evaluations = 0;
    bool converged = false;
    /// still above target at the maximum search radius
    bool saturated = false;
    /// bracketing certificate: rate(lo) >= target, rate(hi) < target unless saturated
    double bracket_lo_m = 0.0;
    double bracket_hi_m = 0.0;
    double rate_at_lo_bps = 0.0;
    double rate_at_hi_bps = 0.0;
    std::vector<std::string> warnings;
};

/// Bisection on a monotone radius-to-rate map; exposed for closed-form
/// verification. relative bracket tolerance: (hi - lo) <= rel_tol * lo.
CoverageResult search_coverage_radius(const std::function<double(double)>& percentile_rate_at,
                                      double target_rate_bps, double start_radius_m, double max_radius_m,
                                      double rel_tol = 0.02);

/// Largest radius whose percentile rate still meets the target. Every
/// evaluation reuses the same per-drop seeds (common random numbers), which
/// keeps the rate monotone in the radius in practice.
CoverageResult coverage_search(const Scenario& scenario, const DropEnsemble& ensemble,
                               double target_rate_bps, double percentile, Link link, unsigned threads = 0,
                               double max_radius_m = 100e3, const ClusterProfile& profile = {});

struct SweepBand {
    double fc_mhz = 0.0;
    double w_mhz = 0.0;
    Duplex duplex = Duplex::FDD;
};

struct CoverageSpec {
    double target_mbps = 10.0;
    double percentile = 5.0;
    Link link = Link::DL;
    double max_radius_km = 100.0;
};

/// Cross product grid bs_type x num_users x band x eirp. Cells of one
/// (bs_type, K, band) family share a seed so the EIRP column is evaluated
/// on common channel realizations. The evaluation distance comes from the
/// d_eval_km table keyed "<bs_type>:<K>:<fc_mhz>", or from a coverage
/// search when `coverage` is set.
struct SweepSpec {
    KeyValueDoc base;
    std::vector<BsType> bs_types;
    std::vector<int> num_users;
    std::vector<SweepBand> bands;
    std::vector<double> eirp_dbm;
    int drops = 200;
    double min_radius_m = 35.0;
    std::uint64_t master_seed = 1;
    /// mast height applied per station class when the bs_type axis varies
    double htbs_height_m = 150.0;
    double legacy_height_m = 25.0;
    std::map<std::string, double> d_eval_km;
    std::optional<CoverageSpec> coverage;
};

struct SweepRow {
    std::string bs_type;
    int num_users = 0;
    double fc_mhz = 0.0;
    double w_mhz = 0.0;
    std::string duplex;
    double eirp_dbm = 0.0;
    std::optional<double> d_eval_km;
    std::optional<double> dcov_km;
    std::optional<RateSummary> rates;
    std::vector<std::string> warnings;
};

/// Runs every cell; per-cell failures are recorded in the row warnings and
/// the sweep continues.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads = 0);

/// CSV with the fixed result-table header; rates in Mbps with three
/// significant digits. Byte-identical for identical inputs and seeds.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Grid document: JSON object with "base" (scenario keys), "bs_types",
/// "num_users", "bands", "eirp_dbm" and optional "drops", "min_radius_m",
/// "master_seed", "d_eval_km", "coverage".
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);

std::string d_eval_key(BsType bs_type, int num_users, double fc_mhz);

}
