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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ruralmimo/geodata.hpp"
#include "ruralmimo/rng.hpp"
#include "ruralmimo/units.hpp"
#include "test_support.hpp"

using namespace ruralmimo;

namespace {

constexpr double kKmPerDeg = 111.32;

PopulationRaster uniform_raster(double lon_min, double lon_max, double lat_min, double lat_max,
                                double cell, double value) {
    PopulationRaster raster;
    raster.lon_min_deg = lon_min;
    raster.lon_max_deg = lon_max;
    raster.lat_min_deg = lat_min;
    raster.lat_max_deg = lat_max;
    raster.cell_size_deg = cell;
    const long rows = std::lround((lat_max - lat_min) / cell);
    const long cols = std::lround((lon_max - lon_min) / cell);
    raster.density.setConstant(rows, cols, value);
    raster.missing.setZero(rows, cols);
    return raster;
}

double total_population(const PopulationRaster& raster) {
    double total = 0.0;
    for (long row = 0; row < raster.num_rows(); ++row) {
        const double lat = raster.lat_max_deg - (row + 0.5) * raster.cell_size_deg;
        const double area = raster.cell_size_deg * kKmPerDeg * raster.cell_size_deg * kKmPerDeg *
                            std::cos(deg_to_rad(lat));
        for (long col = 0; col < raster.num_cols(); ++col) total += raster.density(row, col) * area;
    }
    return total;
}

}  // namespace

TEST_CASE("raster files parse with NA holes counted") {
    std::istringstream in(
        "# density grid\n"
        "35 35.2 10.5 10.7 0.05\n"
        "1 2 3 4\n"
        "5 6 7 8\n"
        "NA 10 11 12\n"
        "13 14 15 16\n");
    const PopulationRaster raster = parse_raster(in);
    CHECK(raster.num_rows() == 4);
    CHECK(raster.num_cols() == 4);
    CHECK(raster.missing_cells == 1);
    CHECK(raster.density(0, 0) == 1.0);   // first row is the northern edge
    CHECK(raster.density(2, 0) == 0.0);   // NA reads as zero
    CHECK(raster.missing(2, 0) == 1);
    CHECK(raster.density(3, 3) == 16.0);
}

TEST_CASE("raster parsing rejects malformed input") {
    std::istringstream bad_header("35 35.2 10.5\n1 2\n");
    CHECK_THROWS_AS(parse_raster(bad_header), ParseError);

    std::istringstream fractional_extent("35 35.2 10.5 10.7 0.03\n1 2 3\n");
    CHECK_THROWS_AS(parse_raster(fractional_extent), InconsistentDimensions);

    std::istringstream short_row("35 35.1 10.5 10.6 0.05\n1 2\n3\n");
    CHECK_THROWS_AS(parse_raster(short_row), InconsistentDimensions);

    std::istringstream missing_row("35 35.1 10.5 10.6 0.05\n1 2\n");
    CHECK_THROWS_AS(parse_raster(missing_row), InconsistentDimensions);

    std::istringstream extra_row("35 35.1 10.5 10.6 0.05\n1 2\n3 4\n5 6\n");
    CHECK_THROWS_AS(parse_raster(extra_row), InconsistentDimensions);

    std::istringstream not_a_number("35 35.1 10.5 10.6 0.05\n1 fern\n3 4\n");
    CHECK_THROWS_AS(parse_raster(not_a_number), ParseError);

    std::istringstream negative("35 35.1 10.5 10.6 0.05\n1 -2\n3 4\n");
    CHECK_THROWS_AS(parse_raster(negative), ParseError);

    CHECK_THROWS_AS(load_raster("missing_raster.txt"), ConfigError);
}

TEST_CASE("a disk inside a uniform raster integrates to density times area") {
    const PopulationRaster raster = uniform_raster(35.0, 36.0, 10.5, 11.75, 0.005, 55.0);
    const SiteEvaluation site = evaluate_site(raster, 35.5, 11.1, 12.5);
    const double expected = 55.0 * kPi * 12.5 * 12.5;
    CHECK_FALSE(site.partial);
    CHECK(site.covered_persons == doctest::Approx(expected).epsilon(0.01));
    CHECK(site.covered_area_km2 == doctest::Approx(kPi * 12.5 * 12.5).epsilon(0.01));
    CHECK(site.mean_density_per_km2 == doctest::Approx(55.0).epsilon(0.005));
    CHECK(site.missing_cells == 0);
}

TEST_CASE("a disk on the raster edge covers half the mass and is flagged partial") {
    const PopulationRaster raster = uniform_raster(35.0, 36.0, 10.5, 11.75, 0.005, 20.0);
    const SiteEvaluation site = evaluate_site(raster, 35.0, 11.1, 12.5);
    CHECK(site.partial);
    CHECK(site.covered_persons ==
          doctest::Approx(0.5 * 20.0 * kPi * 12.5 * 12.5).epsilon(0.02));
    CHECK(site.mean_density_per_km2 == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("disks that miss the raster are out of bounds") {
    const PopulationRaster raster = uniform_raster(35.0, 36.0, 10.5, 11.75, 0.05, 20.0);
    CHECK_THROWS_AS(evaluate_site(raster, 40.0, 11.0, 12.5), OutOfBounds);
    CHECK_THROWS_AS(evaluate_site(raster, 35.5, 2.0, 12.5), OutOfBounds);
    CHECK_THROWS_AS(evaluate_site(raster, 35.5, 11.0, 0.0), ConfigError);
}

TEST_CASE("the equirectangular scaling stays consistent at high latitude") {
    const PopulationRaster raster = uniform_raster(20.0, 22.0, 59.5, 60.5, 0.005, 12.0);
    const SiteEvaluation site = evaluate_site(raster, 21.0, 60.0, 15.0);
    CHECK(site.covered_persons == doctest::Approx(12.0 * kPi * 15.0 * 15.0).epsilon(0.015));
    CHECK(site.mean_density_per_km2 == doctest::Approx(12.0).epsilon(0.01));
}

TEST_CASE("quadrant partition conserves the population mass") {
    PopulationRaster raster = uniform_raster(35.0, 36.0, 10.5, 11.5, 0.05, 0.0);
    Prng rng(6);
    for (long row = 0; row < raster.num_rows(); ++row)
        for (long col = 0; col < raster.num_cols(); ++col)
            raster.density(row, col) = 100.0 * rng.uniform();

    const double total = total_population(raster);

    double recovered = 0.0;
    const long half_rows = raster.num_rows() / 2, half_cols = raster.num_cols() / 2;
    for (int quadrant = 0; quadrant < 4; ++quadrant) {
        const long row0 = (quadrant / 2) * half_rows;
        const long col0 = (quadrant % 2) * half_cols;
        PopulationRaster part;
        part.cell_size_deg = raster.cell_size_deg;
        part.lon_min_deg = raster.lon_min_deg + col0 * raster.cell_size_deg;
        part.lon_max_deg = part.lon_min_deg + half_cols * raster.cell_size_deg;
        part.lat_max_deg = raster.lat_max_deg - row0 * raster.cell_size_deg;
        part.lat_min_deg = part.lat_max_deg - half_rows * raster.cell_size_deg;
        part.density = raster.density.block(row0, col0, half_rows, half_cols);
        part.missing.setZero(half_rows, half_cols);

        const double center_lon = 0.5 * (part.lon_min_deg + part.lon_max_deg);
        const double center_lat = 0.5 * (part.lat_min_deg + part.lat_max_deg);
        const SiteEvaluation whole = evaluate_site(part, center_lon, center_lat, 45.0);
        CHECK(whole.partial);  // the disk spills past the quadrant on purpose
        recovered += whole.covered_persons;
    }
    CHECK(recovered == doctest::Approx(total).epsilon(0.01));
}

TEST_CASE("site search targets the requested density and keeps sites apart") {
    PopulationRaster raster = uniform_raster(35.0, 36.0, 10.5, 11.5, 0.01, 5.0);
    // a dense 10 km square around (35.75, 11.25)
    for (long row = 0; row < raster.num_rows(); ++row) {
        for (long col = 0; col < raster.num_cols(); ++col) {
            const double lat = raster.lat_max_deg - (row + 0.5) * raster.cell_size_deg;
            const double lon = raster.lon_min_deg + (col + 0.5) * raster.cell_size_deg;
            if (std::fabs(lat - 11.25) < 0.045 && std::fabs(lon - 35.75) < 0.045)
                raster.density(row, col) = 60.0;
        }
    }

    const double radius_km = 8.0;
    const std::vector<SiteCandidate> sites = find_sites(raster, radius_km, 60.0, 5, 1);
    REQUIRE_FALSE(sites.empty());

    // the winner sits inside the dense block
    const SiteCandidate& best = sites.front();
    CHECK(best.rank == 1);
    CHECK(std::fabs(best.evaluation.lat_deg - 11.25) < 0.1);
    CHECK(std::fabs(best.evaluation.lon_deg - 35.75) < 0.1);
    CHECK(best.evaluation.mean_density_per_km2 > 20.0);

    for (std::size_t a = 0; a < sites.size(); ++a) {
        CHECK(sites[a].rank == static_cast<int>(a) + 1);
        for (std::size_t b = a + 1; b < sites.size(); ++b) {
            const double dx = (sites[a].evaluation.lon_deg - sites[b].evaluation.lon_deg) *
                              kKmPerDeg * std::cos(deg_to_rad(11.0));
            const double dy =
                (sites[a].evaluation.lat_deg - sites[b].evaluation.lat_deg) * kKmPerDeg;
            CHECK(std::hypot(dx, dy) >= radius_km * 0.99);
        }
    }

    // the ranking does not depend on the thread count
    const std::vector<SiteCandidate> parallel = find_sites(raster, radius_km, 60.0, 5, 4);
    REQUIRE(parallel.size() == sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        CHECK(parallel[i].evaluation.lon_deg == sites[i].evaluation.lon_deg);
        CHECK(parallel[i].evaluation.lat_deg == sites[i].evaluation.lat_deg);
    }
}

TEST_CASE("site lists serialize to CSV") {
    const PopulationRaster raster = uniform_raster(35.0, 35.5, 10.5, 11.0, 0.01, 30.0);
    const std::vector<SiteCandidate> sites = find_sites(raster, 6.0, 30.0, 3, 1);
    const std::string csv = sites_csv(sites);
    CHECK(csv.rfind("rank,lon,lat,mean_density,covered_persons,radius_km\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + static_cast<int>(sites.size()));
}
