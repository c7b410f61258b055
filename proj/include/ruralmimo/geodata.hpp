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

#include <iosfwd>
#include <string>
#include <vector>

#include "ruralmimo/types.hpp"

namespace ruralmimo {

/// Gridded population density in persons/km^2 on a regular lon/lat grid.
/// Row 0 is the northernmost row. Missing cells ("NA" in the file) are
/// stored as zero and counted in missing_cells.
struct PopulationRaster {
    double lon_min_deg = 0.0;
    double lon_max_deg = 0.0;
    double lat_min_deg = 0.0;
    double lat_max_deg = 0.0;
    double cell_size_deg = 0.0;
    RealMatrix<double> density;
    RealMatrix<unsigned char> missing;
    long missing_cells = 0;

    long num_rows() const { return density.rows(); }
    long num_cols() const { return density.cols(); }
};

PopulationRaster parse_raster(std::istream& in);
PopulationRaster load_raster(const std::string& path);

/// Disk integral of one candidate site.
struct SiteEvaluation {
    double lon_deg = 0.0;
    double lat_deg = 0.0;
    double radius_km = 0.0;
    double covered_persons = 0.0;
    double covered_area_km2 = 0.0;
    double mean_density_per_km2 = 0.0;
    /// True when the disk extends past the raster bounds; the part outside
    /// contributes nothing.
    bool partial = false;
    long missing_cells = 0;
};

/// Integrate population over a disk around (lon, lat) with equirectangular
/// distances scaled at the site latitude. Cells are classified against the
/// radius with a half-diagonal margin; boundary cells are refined on a
/// 4x4 subgrid. Throws OutOfBounds when the disk misses the raster.
SiteEvaluation evaluate_site(const PopulationRaster& raster, double lon_deg, double lat_deg,
                             double radius_km);

struct SiteCandidate {
    int rank = 0;
    SiteEvaluation evaluation;
};

/// Scan a candidate grid with stride radius/2, rank by closeness of the
/// disk mean density to target, and greedily keep sites at least one
/// radius apart.
std::vector<SiteCandidate> find_sites(const PopulationRaster& raster, double radius_km,
                                      double target_density_per_km2, int max_sites,
                                      int num_threads = 0);

std::string sites_csv(const std::vector<SiteCandidate>& sites);

}
