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

// Command line front end. Exit codes: 0 success, 2 configuration or input
// error, 3 runtime failure (including a failed verify), 4 infeasible
// request (coverage target or EIRP table cannot be met).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ruralmimo/channel.hpp"
#include "ruralmimo/econ.hpp"
#include "ruralmimo/errors.hpp"
#include "ruralmimo/geodata.hpp"
#include "ruralmimo/manifest.hpp"
#include "ruralmimo/montecarlo.hpp"
#include "ruralmimo/scenario.hpp"
#include "ruralmimo/version.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ruralmimo::ConfigError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ruralmimo::ConfigError("cannot write '" + path + "'");
    out << text;
}

std::string trim_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%g", value);
    return buffer;
}

struct ScenarioArgs {
    std::string config_path;
    int users = 0;
    double eirp_dbm = -1e9;
    std::int64_t seed = -1;
    int drops = 200;
    unsigned threads = 0;
    std::string out_path;
};

ruralmimo::Scenario make_scenario(const ScenarioArgs& args, const std::string& config_text) {
    std::istringstream stream(config_text);
    ruralmimo::KeyValueDoc doc = ruralmimo::parse_key_value(stream);
    if (args.users > 0) doc["num_users"] = std::to_string(args.users);
    if (args.eirp_dbm > -1e8) doc["eirp_max_dbm"] = trim_number(args.eirp_dbm);
    if (args.seed >= 0) doc["seed"] = std::to_string(args.seed);
    const ruralmimo::ScenarioValidation validation = ruralmimo::validate(doc);
    if (!validation.ok()) throw ruralmimo::ConfigError(validation.summary());
    return *validation.scenario;
}

void append_overrides(std::string& command, const ScenarioArgs& args) {
    if (args.users > 0) command += " --users " + std::to_string(args.users);
    if (args.eirp_dbm > -1e8) command += " --eirp-dbm " + trim_number(args.eirp_dbm);
    if (args.seed >= 0) command += " --seed " + std::to_string(args.seed);
}

json summary_to_json(const ruralmimo::RateSummary& summary) {
    return json{{"rate_p5_bps", summary.p5_bps},
                {"rate_p50_bps", summary.p50_bps},
                {"rate_p95_bps", summary.p95_bps},
                {"rate_mean_bps", summary.mean_bps},
                {"pool_size", summary.pool_size}};
}

int run_ul_rate(const ScenarioArgs& args, double distance_km) {
    if (args.drops < 1) throw ruralmimo::ConfigError("drops must be >= 1");
    if (distance_km <= 0.0) throw ruralmimo::ConfigError("distance must be positive");
    const std::string config_text = read_file(args.config_path);
    const ruralmimo::Scenario scenario = make_scenario(args, config_text);

    ruralmimo::DropEnsemble ensemble;
    ensemble.num_drops = args.drops;
    ensemble.master_seed = scenario.seed;
    const ruralmimo::RateSummary summary =
        ruralmimo::ul_rate_experiment(scenario, ensemble, distance_km * 1000.0, args.threads);

    json result = summary_to_json(summary);
    result["distance_km"] = distance_km;
    result["link"] = "ul";
    result["drops"] = args.drops;

    ruralmimo::RunManifest manifest;
    manifest.command = "ul-rate --config " + args.config_path + " --distance-km " +
                       trim_number(distance_km) + " --drops " + std::to_string(args.drops);
    append_overrides(manifest.command, args);
    manifest.version = ruralmimo::kVersion;
    manifest.seed = ensemble.master_seed;
    manifest.config_digest = ruralmimo::digest(config_text);
    manifest.warnings = summary.warnings;

    write_output(args.out_path, ruralmimo::wrap_json(manifest, result.dump()));
    for (const std::string& warning : summary.warnings) std::cerr << "warning: " << warning << "\n";
    return 0;
}

int run_coverage(const ScenarioArgs& args, double target_mbps, double percentile,
                 const std::string& link_name, double max_radius_km) {
    if (args.drops < 1) throw ruralmimo::ConfigError("drops must be >= 1");
    if (target_mbps <= 0.0) throw ruralmimo::ConfigError("target rate must be positive");
    ruralmimo::Link link;
    if (link_name == "ul") link = ruralmimo::Link::UL;
    else if (link_name == "dl") link = ruralmimo::Link::DL;
    else throw ruralmimo::ConfigError("link must be 'ul' or 'dl'");

    const std::string config_text = read_file(args.config_path);
    const ruralmimo::Scenario scenario = make_scenario(args, config_text);

    ruralmimo::DropEnsemble ensemble;
    ensemble.num_drops = args.drops;
    ensemble.master_seed = scenario.seed;
    const ruralmimo::CoverageResult coverage =
        ruralmimo::coverage_search(scenario, ensemble, target_mbps * 1e6, percentile, link,
                                   args.threads, max_radius_km * 1000.0);

    const json result{{"d_cov_km", coverage.d_cov_m / 1000.0},
                      {"target_rate_mbps", target_mbps},
                      {"percentile", coverage.percentile},
                      {"link", link_name},
                      {"converged", coverage.converged},
                      {"saturated", coverage.saturated},
                      {"bracket_lo_km", coverage.bracket_lo_m / 1000.0},
                      {"bracket_hi_km", coverage.bracket_hi_m / 1000.0},
                      {"rate_at_lo_bps", coverage.rate_at_lo_bps},
                      {"rate_at_hi_bps", coverage.rate_at_hi_bps},
                      {"evaluations", coverage.evaluations}};

    ruralmimo::RunManifest manifest;
    manifest.command = "coverage --config " + args.config_path + " --target-mbps " +
                       trim_number(target_mbps) + " --percentile " + trim_number(percentile) +
                       " --link " + link_name + " --drops " + std::to_string(args.drops) +
                       " --max-radius-km " + trim_number(max_radius_km);
    append_overrides(manifest.command, args);
    manifest.version = ruralmimo::kVersion;
    manifest.seed = ensemble.master_seed;
    manifest.config_digest = ruralmimo::digest(config_text);
    manifest.warnings = coverage.warnings;

    write_output(args.out_path, ruralmimo::wrap_json(manifest, result.dump()));
    for (const std::string& warning : coverage.warnings) std::cerr << "warning: " << warning << "\n";
    return 0;
}

int run_sweep(const std::string& grid_path, unsigned threads, const std::string& out_path) {
    const std::string grid_text = read_file(grid_path);
    const ruralmimo::SweepSpec spec = ruralmimo::parse_sweep_spec(grid_text);
    const std::vector<ruralmimo::SweepRow> rows = ruralmimo::sweep(spec, threads);

    ruralmimo::RunManifest manifest;
    manifest.command = "sweep --grid " + grid_path;
    manifest.version = ruralmimo::kVersion;
    manifest.seed = spec.master_seed;
    manifest.config_digest = ruralmimo::digest(grid_text);

    write_output(out_path, ruralmimo::wrap_csv(manifest, ruralmimo::sweep_csv(rows)));
    return 0;
}

int run_econ(double dcov_km, int users, double target_dl_mbps, const std::string& traffic_path,
             const std::string& table_path, const std::string& out_path) {
    ruralmimo::TrafficModel traffic;
    std::string traffic_text;
    if (!traffic_path.empty()) {
        traffic_text = read_file(traffic_path);
        std::istringstream stream(traffic_text);
        traffic = ruralmimo::parse_traffic(ruralmimo::parse_key_value(stream));
    }
    const std::string table_text = read_file(table_path);
    std::istringstream table_stream(table_text);
    const std::vector<ruralmimo::UlRatePoint> table = ruralmimo::parse_ul_rate_table(table_stream);

    const ruralmimo::EconReport report =
        ruralmimo::econ_report(dcov_km, users, target_dl_mbps * 1e6, traffic, table);

    const json result{{"num_users", report.num_users},
                      {"d_cov_km", report.d_cov_km},
                      {"target_dl_rate_mbps", report.target_dl_rate_bps / 1e6},
                      {"n_cov", report.n_cov},
                      {"rho_cov_per_km2", report.rho_cov_per_km2},
                      {"a_cov_km2", report.a_cov_km2},
                      {"required_ul_capacity_bps", report.required_ul_capacity_bps},
                      {"min_eirp_dbm", report.min_eirp_dbm},
                      {"activity_ratio", report.activity_ratio}};

    ruralmimo::RunManifest manifest;
    manifest.command = "econ --dcov-km " + trim_number(dcov_km) + " --users " +
                       std::to_string(users) + " --target-dl-mbps " + trim_number(target_dl_mbps) +
                       " --ul-table " + table_path;
    if (!traffic_path.empty()) manifest.command += " --traffic " + traffic_path;
    manifest.version = ruralmimo::kVersion;
    manifest.config_digest = ruralmimo::digest(table_text);

    write_output(out_path, ruralmimo::wrap_json(manifest, result.dump()));
    return 0;
}

int run_sites(const std::string& raster_path, double radius_km, double target_density,
              int max_sites, unsigned threads, const std::string& out_path) {
    const std::string raster_text = read_file(raster_path);
    std::istringstream stream(raster_text);
    const ruralmimo::PopulationRaster raster = ruralmimo::parse_raster(stream);
    const std::vector<ruralmimo::SiteCandidate> sites =
        ruralmimo::find_sites(raster, radius_km, target_density, max_sites, static_cast<int>(threads));

    ruralmimo::RunManifest manifest;
    manifest.command = "sites --raster " + raster_path + " --radius-km " + trim_number(radius_km) +
                       " --target-density " + trim_number(target_density) + " --max-sites " +
                       std::to_string(max_sites);
    manifest.version = ruralmimo::kVersion;
    manifest.config_digest = ruralmimo::digest(raster_text);

    write_output(out_path, ruralmimo::wrap_csv(manifest, ruralmimo::sites_csv(sites)));
    return 0;
}

int run_verify(const std::string& output_path, const std::string& config_path) {
    const std::string text = read_file(output_path);
    const std::string config_text = config_path.empty() ? "" : read_file(config_path);
    const ruralmimo::VerifyReport report = ruralmimo::verify_output(text, config_text);
    std::cout << report.message << "\n";
    return report.ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"link-level simulation and coverage planning for rural massive MIMO towers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ruralmimo::kVersion);

    ScenarioArgs ul_args;
    double ul_distance_km = 0.0;
    CLI::App* ul = app.add_subcommand("ul-rate", "uplink rate percentiles at a fixed radius");
    ul->add_option("--config", ul_args.config_path, "scenario key=value file")->required();
    ul->add_option("--distance-km", ul_distance_km, "evaluation disk radius in km")->required();
    ul->add_option("--drops", ul_args.drops, "number of Monte Carlo drops");
    ul->add_option("--users", ul_args.users, "override num_users");
    ul->add_option("--eirp-dbm", ul_args.eirp_dbm, "override eirp_max_dbm");
    ul->add_option("--seed", ul_args.seed, "override the scenario seed");
    ul->add_option("--threads", ul_args.threads, "worker threads, 0 = RURALMIMO_THREADS or all cores");
    ul->add_option("--out", ul_args.out_path, "output file, default stdout");

    ScenarioArgs cov_args;
    double cov_target_mbps = 10.0;
    double cov_percentile = 5.0;
    std::string cov_link = "dl";
    double cov_max_radius_km = 100.0;
    CLI::App* cov = app.add_subcommand("coverage", "largest radius meeting a percentile rate target");
    cov->add_option("--config", cov_args.config_path, "scenario key=value file")->required();
    cov->add_option("--target-mbps", cov_target_mbps, "per-user rate target");
    cov->add_option("--percentile", cov_percentile, "rate percentile the target applies to");
    cov->add_option("--link", cov_link, "ul or dl");
    cov->add_option("--drops", cov_args.drops, "number of Monte Carlo drops");
    cov->add_option("--max-radius-km", cov_max_radius_km, "search cap");
    cov->add_option("--users", cov_args.users, "override num_users");
    cov->add_option("--eirp-dbm", cov_args.eirp_dbm, "override eirp_max_dbm");
    cov->add_option("--seed", cov_args.seed, "override the scenario seed");
    cov->add_option("--threads", cov_args.threads, "worker threads, 0 = RURALMIMO_THREADS or all cores");
    cov->add_option("--out", cov_args.out_path, "output file, default stdout");

    std::string sweep_grid, sweep_out;
    unsigned sweep_threads = 0;
    CLI::App* sw = app.add_subcommand("sweep", "rate table over a parameter grid, CSV output");
    sw->add_option("--grid", sweep_grid, "sweep grid JSON file")->required();
    sw->add_option("--threads", sweep_threads, "worker threads, 0 = RURALMIMO_THREADS or all cores");
    sw->add_option("--out", sweep_out, "output file, default stdout");

    double econ_dcov_km = 0.0, econ_target_mbps = 10.0;
    int econ_users = 0;
    std::string econ_traffic, econ_table, econ_out;
    CLI::App* ec = app.add_subcommand("econ", "site dimensioning from a coverage distance");
    ec->add_option("--dcov-km", econ_dcov_km, "coverage distance in km")->required();
    ec->add_option("--users", econ_users, "simultaneously scheduled users")->required();
    ec->add_option("--target-dl-mbps", econ_target_mbps, "per-user downlink target");
    ec->add_option("--traffic", econ_traffic, "traffic model key=value file");
    ec->add_option("--ul-table", econ_table, "CSV eirp_dbm,ul_rate_p5_mbps")->required();
    ec->add_option("--out", econ_out, "output file, default stdout");

    std::string sites_raster, sites_out;
    double sites_radius_km = 0.0, sites_target = 0.0;
    int sites_max = 10;
    unsigned sites_threads = 0;
    CLI::App* st = app.add_subcommand("sites", "rank candidate sites on a population raster");
    st->add_option("--raster", sites_raster, "population density raster file")->required();
    st->add_option("--radius-km", sites_radius_km, "coverage disk radius")->required();
    st->add_option("--target-density", sites_target, "target mean density per km^2")->required();
    st->add_option("--max-sites", sites_max, "maximum number of sites");
    st->add_option("--threads", sites_threads, "worker threads, 0 = RURALMIMO_THREADS or all cores");
    st->add_option("--out", sites_out, "output file, default stdout");

    std::string verify_output_path, verify_config;
    CLI::App* vf = app.add_subcommand("verify", "recheck the manifest digests of an output file");
    vf->add_option("output", verify_output_path, "file produced by another subcommand")->required();
    vf->add_option("--config", verify_config, "configuration file to check against the manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ul->parsed()) return run_ul_rate(ul_args, ul_distance_km);
        if (cov->parsed())
            return run_coverage(cov_args, cov_target_mbps, cov_percentile, cov_link,
                                cov_max_radius_km);
        if (sw->parsed()) return run_sweep(sweep_grid, sweep_threads, sweep_out);
        if (ec->parsed())
            return run_econ(econ_dcov_km, econ_users, econ_target_mbps, econ_traffic, econ_table,
                            econ_out);
        if (st->parsed())
            return run_sites(sites_raster, sites_radius_km, sites_target, sites_max, sites_threads,
                             sites_out);
        if (vf->parsed()) return run_verify(verify_output_path, verify_config);
    } catch (const ruralmimo::TargetUnreachable& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 4;
    } catch (const ruralmimo::NoFeasibleEirp& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 4;
    } catch (const ruralmimo::ConfigError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const ruralmimo::ParseError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const ruralmimo::Error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 3;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 3;
    }
    return 2;
}
