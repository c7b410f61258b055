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

#include "ruralmimo/geodata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "ruralmimo/errors.hpp"
#include "ruralmimo/parallel.hpp"
#include "ruralmimo/units.hpp"

namespace ruralmimo {

namespace {

constexpr double kKmPerDegLat = 111.32;
constexpr int kSubgrid = 4;

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

}  // namespace

PopulationRaster parse_raster(std::istream& in) {
    PopulationRaster raster;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        break;
    }
    if (line.empty() || line[0] == '#') throw ParseError("raster: empty input");
    {
        std::istringstream header(line);
        if (!(header >> raster.lon_min_deg >> raster.lon_max_deg >> raster.lat_min_deg >>
              raster.lat_max_deg >> raster.cell_size_deg))
            throw ParseError("raster line " + std::to_string(line_number) +
                             ": header must be lon_min lon_max lat_min lat_max cell_size_deg");
    }
    if (raster.cell_size_deg <= 0.0)
        throw ParseError("raster: cell size must be positive");
    if (raster.lon_max_deg <= raster.lon_min_deg || raster.lat_max_deg <= raster.lat_min_deg)
        throw ParseError("raster: bounds must satisfy lon_min < lon_max and lat_min < lat_max");

    const double cols_exact = (raster.lon_max_deg - raster.lon_min_deg) / raster.cell_size_deg;
    const double rows_exact = (raster.lat_max_deg - raster.lat_min_deg) / raster.cell_size_deg;
    const long cols = std::lround(cols_exact);
    const long rows = std::lround(rows_exact);
    if (cols < 1 || rows < 1 || std::fabs(cols_exact - cols) > 1e-6 ||
        std::fabs(rows_exact - rows) > 1e-6)
        throw InconsistentDimensions("raster: extent is not a whole number of cells");

    raster.density.setZero(rows, cols);
    raster.missing.setZero(rows, cols);

    long row = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> tokens = split_tokens(line);
        if (tokens.empty()) continue;
        if (row >= rows)
            throw InconsistentDimensions("raster line " + std::to_string(line_number) +
                                         ": more data rows than the header implies (" +
                                         std::to_string(rows) + ")");
        if (static_cast<long>(tokens.size()) != cols)
            throw InconsistentDimensions("raster line " + std::to_string(line_number) + ": expected " +
                                         std::to_string(cols) + " columns, got " +
                                         std::to_string(tokens.size()));
        for (long col = 0; col < cols; ++col) {
            const std::string& token = tokens[col];
            if (token == "NA") {
                raster.missing(row, col) = 1;
                ++raster.missing_cells;
                continue;
            }
            try {
                size_t consumed = 0;
                const double value = std::stod(token, &consumed);
                if (consumed != token.size()) throw std::invalid_argument(token);
                if (value < 0.0)
                    throw ParseError("raster line " + std::to_string(line_number) +
                                     ": negative density");
                raster.density(row, col) = value;
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                throw ParseError("raster line " + std::to_string(line_number) +
                                 ": non-numeric value '" + token + "'");
            }
        }
        ++row;
    }
    if (row != rows)
        throw InconsistentDimensions("raster: expected " + std::to_string(rows) +
                                     " data rows, got " + std::to_string(row));
    return raster;
}

PopulationRaster load_raster(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open raster '" + path + "'");
    return parse_raster(in);
}

SiteEvaluation evaluate_site(const PopulationRaster& raster, double lon_deg, double lat_deg,
                             double radius_km) {
    if (radius_km <= 0.0) throw ConfigError("evaluate_site: radius must be positive");
    const double cos_lat = std::cos(deg_to_rad(lat_deg));
    if (cos_lat < 1e-6)
        throw ConfigError("evaluate_site: latitude too close to a pole for the flat projection");

    SiteEvaluation site;
    site.lon_deg = lon_deg;
    site.lat_deg = lat_deg;
    site.radius_km = radius_km;

    const double dlat = radius_km / kKmPerDegLat;
    const double dlon = radius_km / (kKmPerDegLat * cos_lat);
    if (lon_deg + dlon < raster.lon_min_deg || lon_deg - dlon > raster.lon_max_deg ||
        lat_deg + dlat < raster.lat_min_deg || lat_deg - dlat > raster.lat_max_deg)
        throw OutOfBounds("evaluate_site: disk does not intersect the raster");
    site.partial = lon_deg - dlon < raster.lon_min_deg || lon_deg + dlon > raster.lon_max_deg ||
                   lat_deg - dlat < raster.lat_min_deg || lat_deg + dlat > raster.lat_max_deg;

    const double cell = raster.cell_size_deg;
    const double half_diag_km = 0.5 * cell * kKmPerDegLat * std::sqrt(2.0);

    // Index window of the disk bounding box, clamped to the grid.
    const long rows = raster.num_rows();
    const long cols = raster.num_cols();
    const long row_lo = std::clamp<long>(
        static_cast<long>(std::floor((raster.lat_max_deg - (lat_deg + dlat)) / cell)), 0, rows - 1);
    const long row_hi = std::clamp<long>(
        static_cast<long>(std::ceil((raster.lat_max_deg - (lat_deg - dlat)) / cell)), 0, rows - 1);
    const long col_lo = std::clamp<long>(
        static_cast<long>(std::floor((lon_deg - dlon - raster.lon_min_deg) / cell)), 0, cols - 1);
    const long col_hi = std::clamp<long>(
        static_cast<long>(std::ceil((lon_deg + dlon - raster.lon_min_deg) / cell)), 0, cols - 1);

    for (long row = row_lo; row <= row_hi; ++row) {
        const double lat_cell = raster.lat_max_deg - (row + 0.5) * cell;
        const double dy_km = (lat_cell - lat_deg) * kKmPerDegLat;
        for (long col = col_lo; col <= col_hi; ++col) {
            const double lon_cell = raster.lon_min_deg + (col + 0.5) * cell;
            const double dx_km = (lon_cell - lon_deg) * kKmPerDegLat * cos_lat;
            const double dist_km = std::hypot(dx_km, dy_km);
            double fraction = 0.0;
            if (dist_km <= radius_km - half_diag_km) {
                fraction = 1.0;
            } else if (dist_km < radius_km + half_diag_km) {
                int inside = 0;
                for (int si = 0; si < kSubgrid; ++si) {
                    const double lat_sub = lat_cell + cell * (0.5 - (si + 0.5) / kSubgrid);
                    const double sy_km = (lat_sub - lat_deg) * kKmPerDegLat;
                    for (int sj = 0; sj < kSubgrid; ++sj) {
                        const double lon_sub = lon_cell + cell * ((sj + 0.5) / kSubgrid - 0.5);
                        const double sx_km = (lon_sub - lon_deg) * kKmPerDegLat * cos_lat;
                        if (std::hypot(sx_km, sy_km) <= radius_km) ++inside;
                    }
                }
                fraction = static_cast<double>(inside) / (kSubgrid * kSubgrid);
            }
            if (fraction == 0.0) continue;
            const double area_km2 =
                cell * kKmPerDegLat * cell * kKmPerDegLat * std::cos(deg_to_rad(lat_cell));
            site.covered_area_km2 += area_km2 * fraction;
            site.covered_persons += raster.density(row, col) * area_km2 * fraction;
            if (raster.missing(row, col)) ++site.missing_cells;
        }
    }
    if (site.covered_area_km2 > 0.0)
        site.mean_density_per_km2 = site.covered_persons / site.covered_area_km2;
    return site;
}

std::vector<SiteCandidate> find_sites(const PopulationRaster& raster, double radius_km,
                                      double target_density_per_km2, int max_sites,
                                      int num_threads) {
    if (radius_km <= 0.0) throw ConfigError("find_sites: radius must be positive");
    if (target_density_per_km2 < 0.0) throw ConfigError("find_sites: target density must be nonnegative");
    if (max_sites < 1) throw ConfigError("find_sites: max_sites must be >= 1");

    const double stride_lat = 0.5 * radius_km / kKmPerDegLat;
    std::vector<std::pair<double, double>> grid;  // lon, lat
    for (double lat = raster.lat_max_deg - 0.5 * stride_lat; lat > raster.lat_min_deg;
         lat -= stride_lat) {
        const double cos_lat = std::cos(deg_to_rad(lat));
        if (cos_lat < 1e-6) continue;
        const double stride_lon = 0.5 * radius_km / (kKmPerDegLat * cos_lat);
        for (double lon = raster.lon_min_deg + 0.5 * stride_lon; lon < raster.lon_max_deg;
             lon += stride_lon)
            grid.emplace_back(lon, lat);
    }
    if (grid.empty()) throw ConfigError("find_sites: raster smaller than the candidate stride");

    std::vector<std::optional<SiteEvaluation>> evaluations(grid.size());
    parallel_for(grid.size(), num_threads, [&](size_t index) {
        try {
            evaluations[index] =
                evaluate_site(raster, grid[index].first, grid[index].second, radius_km);
        } catch (const OutOfBounds&) {
            // Grid point whose disk misses the raster: not a candidate.
        }
    });

    std::vector<size_t> order;
    order.reserve(grid.size());
    for (size_t index = 0; index < evaluations.size(); ++index)
        if (evaluations[index] && evaluations[index]->covered_area_km2 > 0.0)
            order.push_back(index);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double da = std::fabs(evaluations[a]->mean_density_per_km2 - target_density_per_km2);
        const double db = std::fabs(evaluations[b]->mean_density_per_km2 - target_density_per_km2);
        if (da != db) return da < db;
        if (evaluations[a]->lat_deg != evaluations[b]->lat_deg)
            return evaluations[a]->lat_deg < evaluations[b]->lat_deg;
        return evaluations[a]->lon_deg < evaluations[b]->lon_deg;
    });

    std::vector<SiteCandidate> sites;
    for (size_t index : order) {
        if (static_cast<int>(sites.size()) >= max_sites) break;
        const SiteEvaluation& candidate = *evaluations[index];
        bool separated = true;
        for (const SiteCandidate& kept : sites) {
            const double mid_lat =
                deg_to_rad(0.5 * (candidate.lat_deg + kept.evaluation.lat_deg));
            const double dx_km =
                (candidate.lon_deg - kept.evaluation.lon_deg) * kKmPerDegLat * std::cos(mid_lat);
            const double dy_km = (candidate.lat_deg - kept.evaluation.lat_deg) * kKmPerDegLat;
            if (std::hypot(dx_km, dy_km) < radius_km) {
                separated = false;
                break;
            }
        }
        if (!separated) continue;
        SiteCandidate site;
        site.rank = static_cast<int>(sites.size()) + 1;
        site.evaluation = candidate;
        sites.push_back(site);
    }
    return sites;
}

std::string sites_csv(const std::vector<SiteCandidate>& sites) {
    std::string csv = "rank,lon,lat,mean_density,covered_persons,radius_km\n";
    char buffer[256];
    for (const SiteCandidate& site : sites) {
        std::snprintf(buffer, sizeof(buffer), "%d,%.6g,%.6g,%.6g,%.6g,%.6g\n", site.rank,
                      site.evaluation.lon_deg, site.evaluation.lat_deg,
                      site.evaluation.mean_density_per_km2, site.evaluation.covered_persons,
                      site.evaluation.radius_km);
        csv += buffer;
    }
    return csv;
}

}
