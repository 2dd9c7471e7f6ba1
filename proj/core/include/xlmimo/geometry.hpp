// SPDX-License-Identifier: Apache-2.0
//
// xlmimo: near-field XL-MIMO channel simulation and estimation toolkit
// Copyright (C) 2026 The xlmimo authors
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

#include "xlmimo/common.hpp"

#include <vector>

namespace xlmimo
{
    enum class Side
    {
        rx,
        tx
    };

    // Two parallel uniform linear arrays, each split into equal contiguous subarrays
    // that are wired to one RF chain apiece.
    struct ArrayConfig
    {
        int n_rx = 128;
        int n_tx = 128;
        int k_rx = 4;
        int k_tx = 2;
        double carrier_freq = 60.0e9; // Hz
        double spacing = 0.0;         // meters; 0 selects half a wavelength

        double wavelength() const { return speed_of_light / carrier_freq; }
        double element_spacing() const { return spacing > 0.0 ? spacing : 0.5 * wavelength(); }

        int antennas(Side s) const { return s == Side::rx ? n_rx : n_tx; }
        int subarrays(Side s) const { return s == Side::rx ? k_rx : k_tx; }
        int subarray_size(Side s) const { return antennas(s) / subarrays(s); }

        double aperture(Side s) const { return (antennas(s) - 1) * element_spacing(); }
        double subarray_aperture(Side s) const { return (subarray_size(s) - 1) * element_spacing(); }

        /// Throws ConfigInvalid when counts do not divide or values are non-positive.
        void validate() const;
    };

    // Line-of-sight geometry between the two array centers. The transmit array lies in the
    // x-z plane at elevation elev_tx; azim_rx rotates the receive array out of that plane.
    struct SceneGeometry
    {
        double range_m = 100.0;
        double elev_rx = 0.0;
        double elev_tx = 0.0;
        double azim_rx = 0.0;
        Complex los_gain = 1.0;
    };

    // Linear/quadratic phase coefficients and the coupling factor that the parabolic
    // wavefront is written in.
    struct TransformedParams
    {
        double phi_rx = 0.0;
        double phi_tx = 0.0;
        double alpha_rx = 0.0; // >= 0
        double alpha_tx = 0.0; // <= 0
        double eta = 0.0;      // 1/m
    };

    TransformedParams transform(const SceneGeometry &geom);

    /// (index - (N+1)/2) * d for a 1-based antenna index
    double element_offset(const ArrayConfig &config, Side side, int index);

    /// ((2i-1) N_s - N) d / 2 for a 1-based subarray index
    double subarray_centroid(const ArrayConfig &config, Side side, int subarray);

    /// 1-based subarray that holds the 1-based antenna index
    int subarray_of(const ArrayConfig &config, Side side, int index);

    std::vector<double> element_offsets(const ArrayConfig &config, Side side);
    std::vector<double> subarray_centroids(const ArrayConfig &config, Side side);

    // Distances between receive antenna m and transmit antenna n (1-based)
    double exact_distance(const ArrayConfig &config, const SceneGeometry &geom, int m, int n);
    double parabolic_distance(const ArrayConfig &config, const SceneGeometry &geom, int m, int n);
    double sopm_distance(const ArrayConfig &config, const SceneGeometry &geom, int m, int n);

    // Offset-level forms; the *_excess variants return r - R without cancellation.
    double exact_excess(double range, double elev_rx, double elev_tx, double azim_rx, double d_rx, double d_tx);
    double parabolic_excess(const TransformedParams &p, double d_rx, double d_tx);
    double sopm_excess(const TransformedParams &p, double d_rx, double d_tx, double nu_rx, double nu_tx);

    /// Parabolic distance in the expanded form, without the transformed parameters.
    double parabolic_distance_expanded(double range, double elev_rx, double elev_tx, double azim_rx, double d_rx, double d_tx);

    double fraunhofer_distance(double aperture, double wavelength);
    double mimo_ard(const ArrayConfig &config);
    double sopd(const ArrayConfig &config);
    double lemma1_bound(const ArrayConfig &config, double range_m);

    enum class PowerMode
    {
        los,
        nlos
    };

    struct SearchOptions
    {
        int coarse_points = 64;      // per angle over [0, 2pi)
        int refine_cells = 8;        // best coarse cells handed to golden-section refinement
        int refine_sweeps = 3;       // coordinate passes per cell
        double tolerance_m = 0.01;   // bisection tolerance on range
        double range_lo = 0.1;
        double range_hi = 10000.0;
        std::size_t workers = 0;     // 0 = default_worker_count()
    };

    struct WorstCase
    {
        double value = 0.0;
        double elev_rx = 0.0;
        double elev_tx = 0.0;
        double azim_rx = 0.0;
        int m = 1;
        int n = 1;
    };

    /// Largest (2 pi / lambda)|exact - parabolic| over the angle box and all antenna pairs.
    WorstCase parabolic_phase_error(const ArrayConfig &config, double range_m, const SearchOptions &opt = {});

    /// Smallest range whose worst parabolic phase error is at most pi/8.
    double parabolic_validity_distance(const ArrayConfig &config, const SearchOptions &opt = {});

    /// Worst case over the angle box of (r_min / r_max)^2 across element pairs (los) or
    /// across receive elements seen from a point source (nlos).
    WorstCase power_uniformity(const ArrayConfig &config, double range_m, PowerMode mode, const SearchOptions &opt = {});

    /// Smallest range at which the worst-case power ratio reaches the threshold.
    double uniform_power_distance(const ArrayConfig &config, double threshold, PowerMode mode, const SearchOptions &opt = {});

    struct PhaseErrorReport
    {
        double max_error_rad = 0.0;
        double elev = 0.0;          // canonical theta with elev_tx = elev + pi
        double elev_rx = 0.0;       // raw argmax angles as found by the search
        double elev_tx = 0.0;
        double azim_rx = 0.0;
        double delta_rx = 0.0;      // antenna offsets at the argmax
        double delta_tx = 0.0;
        int m = 1;
        int n = 1;
        double analytic_bound_rad = 0.0;
        bool edge_antennas = false;     // |delta| equals half the array aperture on both sides
        bool antiparallel = false;      // displacements point in opposite directions within tolerance
        double alignment_error_rad = 0.0;

        bool worst_case_structure() const { return edge_antennas && antiparallel; }
    };

    /// Brute-force maximum of (2 pi / lambda)|exact - sopm| over angles and antenna pairs.
    /// grid_density is the coarse grid size per angle.
    PhaseErrorReport lemma1_bruteforce(const ArrayConfig &config, double range_m, int grid_density = 64, std::size_t workers = 0);
}
