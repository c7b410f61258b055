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

#include "ruralmimo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ruralmimo/downlink.hpp"
#include "ruralmimo/errors.hpp"
#include "ruralmimo/parallel.hpp"
#include "ruralmimo/uplink.hpp"

namespace ruralmimo {

const char* to_string(Link link) { return link == Link::DL ? "dl" : "ul"; }

UserDrop drop(Prng& rng, const DropEnsemble& ensemble, int num_users, double user_height_m) {
    if (ensemble.disk_radius_m <= ensemble.min_radius_m)
        throw ConfigError("disk radius must exceed the minimum placement radius");
    if (num_users < 0)
        throw ConfigError("user count must be nonnegative");

    UserDrop out;
    out.user_height_m = user_height_m;
    out.distance_2d_m.resize(num_users);
    out.azimuth_rad.resize(num_users);
    const double r2_min = ensemble.min_radius_m * ensemble.min_radius_m;
    const double r2_max = ensemble.disk_radius_m * ensemble.disk_radius_m;
    for (int k = 0; k < num_users; ++k) {
        const double u = rng.uniform();
        out.distance_2d_m[k] = std::sqrt(u * (r2_max - r2_min) + r2_min);
        out.azimuth_rad[k] = 2.0 * kPi * rng.uniform();
    }
    return out;
}

double percentile_rate(std::vector<double> pooled, double percentile) {
    if (pooled.empty())
        throw EmptyPool("percentile of an empty rate pool");
    if (percentile < 0.0 || percentile > 100.0)
        throw ConfigError("percentile must lie in [0, 100]");
    std::sort(pooled.begin(), pooled.end());
    const double exact = percentile * static_cast<double>(pooled.size()) / 100.0;
    // small epsilon keeps exact integer ranks from rounding up
    long rank = static_cast<long>(std::ceil(exact - 1e-9));
    rank = std::clamp<long>(rank, 1, static_cast<long>(pooled.size()));
    return pooled[rank - 1];
}

namespace {

struct DropOutcome {
    std::vector<double> rates_bps;
    int extrapolated_links = 0;
};

DropOutcome run_drop(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                     Link link, int drop_index, const ClusterProfile& profile) {
    const std::uint64_t drop_seed = mix_seed(ensemble.master_seed, static_cast<std::uint64_t>(drop_index));
    Prng position_rng(mix_seed(drop_seed, 1));
    Prng channel_rng(mix_seed(drop_seed, 2));

    DropEnsemble local = ensemble;
    local.disk_radius_m = d_eval_m;
    const UserDrop placement = drop(position_rng, local, scenario.num_users, scenario.user_height_m);
    const ChannelMatrix channel = generate(channel_rng, scenario, placement, profile);
    const double sigma2 = noise_power_w(scenario);

    RateReport report;
    if (link == Link::UL) {
        const PowerAllocation power =
            power_control(channel.large_scale, dbm_to_watt(scenario.eirp_max_dbm),
                          scenario.power_ratio_delta_db);
        const Combiner combiner = rzf_combiner(channel, power, sigma2);
        report = ul_rate_report(sinr(channel, combiner, power, sigma2), scenario);
    } else {
        const Precoder precoder =
            dl_precoder(channel, sigma2, dbm_to_watt(scenario.dl_tx_power_dbm));
        report = dl_rate_report(dl_sinr(channel, precoder, sigma2), scenario);
    }

    DropOutcome outcome;
    outcome.rates_bps.assign(report.rate_bps.data(), report.rate_bps.data() + report.rate_bps.size());
    outcome.extrapolated_links = channel.large_scale.extrapolated_links;
    return outcome;
}

}

ExperimentPool pooled_rates(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                            Link link, unsigned threads, const ClusterProfile& profile) {
    if (ensemble.num_drops < 1)
        throw ConfigError("ensemble needs at least one drop");

    std::vector<DropOutcome> outcomes(ensemble.num_drops);
    parallel_for(static_cast<std::size_t>(ensemble.num_drops), threads, [&](std::size_t i) {
        outcomes[i] = run_drop(scenario, ensemble, d_eval_m, link, static_cast<int>(i), profile);
    });

    ExperimentPool pool;
    pool.rates_bps.reserve(static_cast<std::size_t>(ensemble.num_drops) * scenario.num_users);
    for (const DropOutcome& outcome : outcomes) {
        pool.rates_bps.insert(pool.rates_bps.end(), outcome.rates_bps.begin(), outcome.rates_bps.end());
        pool.extrapolated_links += outcome.extrapolated_links;
    }
    return pool;
}

RateSummary summarize(const ExperimentPool& pool) {
    RateSummary summary;
    summary.p5_bps = percentile_rate(pool.rates_bps, 5.0);
    summary.p50_bps = percentile_rate(pool.rates_bps, 50.0);
    summary.p95_bps = percentile_rate(pool.rates_bps, 95.0);
    summary.mean_bps = std::accumulate(pool.rates_bps.begin(), pool.rates_bps.end(), 0.0) /
                       static_cast<double>(pool.rates_bps.size());
    summary.pool_size = pool.rates_bps.size();
    if (pool.extrapolated_links > 0)
        summary.warnings.push_back("path_loss_extrapolation: " + std::to_string(pool.extrapolated_links) +
                                   " user links beyond 10 km");
    return summary;
}

RateSummary ul_rate_experiment(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                               unsigned threads, const ClusterProfile& profile) {
    return summarize(pooled_rates(scenario, ensemble, d_eval_m, Link::UL, threads, profile));
}

RateSummary dl_rate_experiment(const Scenario& scenario, const DropEnsemble& ensemble, double d_eval_m,
                               unsigned threads, const ClusterProfile& profile) {
    return summarize(pooled_rates(scenario, ensemble, d_eval_m, Link::DL, threads, profile));
}

CoverageResult search_coverage_radius(const std::function<double(double)>& percentile_rate_at,
                                      double target_rate_bps, double start_radius_m, double max_radius_m,
                                      double rel_tol) {
    if (start_radius_m <= 0.0 || max_radius_m <= start_radius_m)
        throw ConfigError("search radii must satisfy 0 < start < max");
    if (target_rate_bps < 0.0)
        throw ConfigError("target rate must be nonnegative");

    CoverageResult result;
    result.target_rate_bps = target_rate_bps;

    auto evaluate = [&](double radius) {
        ++result.evaluations;
        return percentile_rate_at(radius);
    };

    double lo = start_radius_m;
    double rate_lo = evaluate(lo);
    if (rate_lo < target_rate_bps)
        throw TargetUnreachable("percentile rate " + std::to_string(rate_lo) +
                                " bps misses the target at the minimum radius");

    double hi = lo;
    double rate_hi = rate_lo;
    bool bracketed = false;
    while (hi < max_radius_m) {
        const double next = std::min(hi * 2.0, max_radius_m);
        const double rate = evaluate(next);
        if (rate >= target_rate_bps) {
            lo = next;
            rate_lo = rate;
            hi = next;
        } else {
            hi = next;
            rate_hi = rate;
            bracketed = true;
            break;
        }
    }

    if (!bracketed) {
        result.d_cov_m = lo;
        result.saturated = true;
        result.bracket_lo_m = lo;
        result.bracket_hi_m = lo;
        result.rate_at_lo_bps = rate_lo;
        result.rate_at_hi_bps = rate_lo;
        result.warnings.push_back("NoUpperBracket: still above target at the maximum search radius");
        return result;
    }

    while (hi - lo > rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        const double rate = evaluate(mid);
        if (rate >= target_rate_bps) {
            lo = mid;
            rate_lo = rate;
        } else {
            hi = mid;
            rate_hi = rate;
        }
    }

    result.d_cov_m = lo;
    result.converged = true;
    result.bracket_lo_m = lo;
    result.bracket_hi_m = hi;
    result.rate_at_lo_bps = rate_lo;
    result.rate_at_hi_bps = rate_hi;
    return result;
}

CoverageResult coverage_search(const Scenario& scenario, const DropEnsemble& ensemble,
                               double target_rate_bps, double percentile, Link link, unsigned threads,
                               double max_radius_m, const ClusterProfile& profile) {
    bool extrapolated = false;
    const auto evaluate = [&](double radius) {
        const ExperimentPool pool = pooled_rates(scenario, ensemble, radius, link, threads, profile);
        if (pool.extrapolated_links > 0)
            extrapolated = true;
        return percentile_rate(pool.rates_bps, percentile);
    };

    const double start_radius = std::max(100.0, 2.0 * ensemble.min_radius_m);
    CoverageResult result =
        search_coverage_radius(evaluate, target_rate_bps, start_radius, max_radius_m);
    result.percentile = percentile;
    result.link = link;
    if (extrapolated)
        result.warnings.push_back("path_loss_extrapolation: evaluations beyond 10 km");
    return result;
}

std::string d_eval_key(BsType bs_type, int num_users, double fc_mhz) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%s:%d:%g", to_string(bs_type), num_users, fc_mhz);
    return buffer;
}

namespace {

std::string format_value(double value, const char* format) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), format, value);
    return buffer;
}

std::string sanitize_warning(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n')
            c = ';';
    }
    return text;
}

KeyValueDoc cell_doc(const SweepSpec& spec, BsType bs_type, int num_users, const SweepBand& band,
                     double eirp_dbm) {
    KeyValueDoc doc = spec.base;
    doc["bs_type"] = to_string(bs_type);
    doc["bs_height_m"] = format_value(
        bs_type == BsType::HTBS ? spec.htbs_height_m : spec.legacy_height_m, "%.10g");
    doc["num_users"] = std::to_string(num_users);
    doc["carrier_frequency_mhz"] = format_value(band.fc_mhz, "%.10g");
    doc["bandwidth_mhz"] = format_value(band.w_mhz, "%.10g");
    doc["duplex"] = to_string(band.duplex);
    doc["eirp_max_dbm"] = format_value(eirp_dbm, "%.10g");
    // FDD and TDD defaults differ, so a stale ul_fraction cannot survive a
    // duplex override coming from the band axis
    if (band.duplex == Duplex::FDD)
        doc.erase("ul_fraction");
    return doc;
}

}

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads) {
    if (spec.bs_types.empty() || spec.num_users.empty() || spec.bands.empty() || spec.eirp_dbm.empty())
        throw ConfigError("sweep grid axes must be nonempty");
    if (spec.drops < 1)
        throw ConfigError("sweep needs at least one drop per cell");

    std::vector<SweepRow> rows;
    std::uint64_t family_index = 0;
    for (const BsType bs_type : spec.bs_types) {
        for (const int num_users : spec.num_users) {
            for (const SweepBand& band : spec.bands) {
                const std::uint64_t family_seed = mix_seed(spec.master_seed, family_index);
                ++family_index;

                // one scenario per family decides d_eval; EIRP only affects
                // the uplink experiment below
                std::optional<double> family_d_eval_km;
                std::optional<double> family_dcov_km;
                std::vector<std::string> family_warnings;

                const auto d_eval_it = spec.d_eval_km.find(d_eval_key(bs_type, num_users, band.fc_mhz));
                if (d_eval_it != spec.d_eval_km.end())
                    family_d_eval_km = d_eval_it->second;

                if (!family_d_eval_km && spec.coverage) {
                    const KeyValueDoc doc =
                        cell_doc(spec, bs_type, num_users, band, spec.eirp_dbm.front());
                    const ScenarioValidation validation = validate(doc);
                    if (!validation.ok()) {
                        family_warnings.push_back("error: " + validation.summary());
                    } else {
                        try {
                            DropEnsemble ensemble{spec.drops, 0.0, spec.min_radius_m, family_seed};
                            const CoverageResult coverage = coverage_search(
                                *validation.scenario, ensemble, spec.coverage->target_mbps * 1e6,
                                spec.coverage->percentile, spec.coverage->link, threads,
                                spec.coverage->max_radius_km * 1e3);
                            family_d_eval_km = coverage.d_cov_m / 1e3;
                            family_dcov_km = coverage.d_cov_m / 1e3;
                            for (const std::string& warning : coverage.warnings)
                                family_warnings.push_back(warning);
                        } catch (const Error& error) {
                            family_warnings.push_back(std::string("error: ") + error.what());
                        }
                    }
                }

                for (const double eirp : spec.eirp_dbm) {
                    SweepRow row;
                    row.bs_type = to_string(bs_type);
                    row.num_users = num_users;
                    row.fc_mhz = band.fc_mhz;
                    row.w_mhz = band.w_mhz;
                    row.duplex = to_string(band.duplex);
                    row.eirp_dbm = eirp;
                    row.d_eval_km = family_d_eval_km;
                    row.dcov_km = family_dcov_km;
                    row.warnings = family_warnings;

                    const KeyValueDoc doc = cell_doc(spec, bs_type, num_users, band, eirp);
                    const ScenarioValidation validation = validate(doc);
                    if (!validation.ok()) {
                        row.warnings.push_back("error: " + validation.summary());
                        rows.push_back(std::move(row));
                        continue;
                    }
                    if (!row.d_eval_km) {
                        row.warnings.push_back("error: no evaluation distance for this cell");
                        rows.push_back(std::move(row));
                        continue;
                    }
                    try {
                        DropEnsemble ensemble{spec.drops, 0.0, spec.min_radius_m, family_seed};
                        RateSummary summary =
                            ul_rate_experiment(*validation.scenario, ensemble, *row.d_eval_km * 1e3, threads);
                        for (const std::string& warning : summary.warnings)
                            row.warnings.push_back(warning);
                        summary.warnings.clear();
                        row.rates = summary;
                    } catch (const Error& error) {
                        row.warnings.push_back(std::string("error: ") + error.what());
                    }
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "bs_type,K,fc_mhz,W_mhz,duplex,eirp_dbm,d_eval_km,rate_p5_mbps,rate_p50_mbps,"
           "rate_p95_mbps,rate_mean_mbps,dcov_km,warnings\n";
    for (const SweepRow& row : rows) {
        out << row.bs_type << ',' << row.num_users << ',' << format_value(row.fc_mhz, "%.6g") << ','
            << format_value(row.w_mhz, "%.6g") << ',' << row.duplex << ','
            << format_value(row.eirp_dbm, "%.6g") << ',';
        if (row.d_eval_km)
            out << format_value(*row.d_eval_km, "%.6g");
        out << ',';
        if (row.rates) {
            out << format_value(row.rates->p5_bps / 1e6, "%.3g") << ','
                << format_value(row.rates->p50_bps / 1e6, "%.3g") << ','
                << format_value(row.rates->p95_bps / 1e6, "%.3g") << ','
                << format_value(row.rates->mean_bps / 1e6, "%.3g") << ',';
        } else {
            out << ",,,,";
        }
        if (row.dcov_km)
            out << format_value(*row.dcov_km, "%.6g");
        out << ',';
        for (std::size_t i = 0; i < row.warnings.size(); ++i) {
            if (i > 0)
                out << "; ";
            out << sanitize_warning(row.warnings[i]);
        }
        out << '\n';
    }
    return out.str();
}

namespace {

using nlohmann::json;

[[noreturn]] void grid_error(const std::string& message) { throw ConfigError("sweep grid: " + message); }

double number_field(const json& node, const char* key) {
    if (!node.contains(key) || !node[key].is_number())
        grid_error(std::string(key) + " must be a number");
    return node[key].get<double>();
}

}

SweepSpec parse_sweep_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& error) {
        throw ParseError(std::string("sweep grid: ") + error.what());
    }
    if (!doc.is_object())
        grid_error("top level must be an object");

    static const std::set<std::string> known_keys = {
        "base",        "bs_types",      "num_users", "bands",    "eirp_dbm",      "drops",
        "min_radius_m", "master_seed",  "d_eval_km", "coverage", "htbs_height_m", "legacy_height_m"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known_keys.count(key))
            grid_error("unknown key '" + key + "'");
    }
    for (const char* required : {"base", "bs_types", "num_users", "bands", "eirp_dbm"}) {
        if (!doc.contains(required))
            grid_error(std::string("missing key '") + required + "'");
    }

    SweepSpec spec;
    if (!doc["base"].is_object())
        grid_error("base must be an object of scenario keys");
    for (const auto& [key, value] : doc["base"].items()) {
        if (value.is_string())
            spec.base[key] = value.get<std::string>();
        else if (value.is_boolean())
            spec.base[key] = value.get<bool>() ? "true" : "false";
        else if (value.is_number())
            spec.base[key] = format_value(value.get<double>(), "%.17g");
        else
            grid_error("base." + key + " must be a string, number or boolean");
    }

    for (const auto& entry : doc["bs_types"]) {
        const std::string name = entry.is_string() ? entry.get<std::string>() : "";
        if (name == "HTBS")
            spec.bs_types.push_back(BsType::HTBS);
        else if (name == "Legacy")
            spec.bs_types.push_back(BsType::Legacy);
        else
            grid_error("bs_types entries must be HTBS or Legacy");
    }
    for (const auto& entry : doc["num_users"]) {
        if (!entry.is_number_integer() || entry.get<int>() < 1)
            grid_error("num_users entries must be positive integers");
        spec.num_users.push_back(entry.get<int>());
    }
    for (const auto& entry : doc["bands"]) {
        if (!entry.is_object())
            grid_error("bands entries must be objects");
        SweepBand band;
        band.fc_mhz = number_field(entry, "fc_mhz");
        band.w_mhz = number_field(entry, "w_mhz");
        const std::string duplex =
            entry.contains("duplex") && entry["duplex"].is_string() ? entry["duplex"].get<std::string>() : "";
        if (duplex == "FDD")
            band.duplex = Duplex::FDD;
        else if (duplex == "TDD")
            band.duplex = Duplex::TDD;
        else
            grid_error("bands.duplex must be FDD or TDD");
        spec.bands.push_back(band);
    }
    for (const auto& entry : doc["eirp_dbm"]) {
        if (!entry.is_number())
            grid_error("eirp_dbm entries must be numbers");
        spec.eirp_dbm.push_back(entry.get<double>());
    }

    if (doc.contains("drops")) {
        if (!doc["drops"].is_number_integer() || doc["drops"].get<int>() < 1)
            grid_error("drops must be a positive integer");
        spec.drops = doc["drops"].get<int>();
    }
    if (doc.contains("min_radius_m"))
        spec.min_radius_m = number_field(doc, "min_radius_m");
    if (doc.contains("htbs_height_m"))
        spec.htbs_height_m = number_field(doc, "htbs_height_m");
    if (doc.contains("legacy_height_m"))
        spec.legacy_height_m = number_field(doc, "legacy_height_m");
    if (doc.contains("master_seed")) {
        if (!doc["master_seed"].is_number_unsigned() && !doc["master_seed"].is_number_integer())
            grid_error("master_seed must be a nonnegative integer");
        spec.master_seed = doc["master_seed"].get<std::uint64_t>();
    }
    if (doc.contains("d_eval_km")) {
        if (!doc["d_eval_km"].is_object())
            grid_error("d_eval_km must be an object keyed <bs_type>:<K>:<fc_mhz>");
        for (const auto& [key, value] : doc["d_eval_km"].items()) {
            if (!value.is_number())
                grid_error("d_eval_km." + key + " must be a number");
            spec.d_eval_km[key] = value.get<double>();
        }
    }
    if (doc.contains("coverage")) {
        const json& node = doc["coverage"];
        if (!node.is_object())
            grid_error("coverage must be an object");
        CoverageSpec coverage;
        if (node.contains("target_mbps"))
            coverage.target_mbps = number_field(node, "target_mbps");
        if (node.contains("percentile"))
            coverage.percentile = number_field(node, "percentile");
        if (node.contains("max_radius_km"))
            coverage.max_radius_km = number_field(node, "max_radius_km");
        if (node.contains("link")) {
            const std::string link = node["link"].is_string() ? node["link"].get<std::string>() : "";
            if (link == "dl")
                coverage.link = Link::DL;
            else if (link == "ul")
                coverage.link = Link::UL;
            else
                grid_error("coverage.link must be dl or ul");
        }
        spec.coverage = coverage;
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open sweep grid file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_sweep_spec(buffer.str());
}

}
