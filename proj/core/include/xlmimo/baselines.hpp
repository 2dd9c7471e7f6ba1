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

#include "xlmimo/channel.hpp"
#include "xlmimo/common.hpp"
#include "xlmimo/frontend.hpp"
#include "xlmimo/nlos_estimator.hpp"

#include <vector>

namespace xlmimo
{
    // Column evaluations above which the joint-dictionary OMP refuses to run
    constexpr double joint_omp_guard = 1e7;

    struct BaselineResult
    {
        ComplexMatrix channel;
        OpCounters counters;
    };

    /// OMP over the full joint polar dictionary, columns generated on the fly. Works on the
    /// whitened observation. Throws ErrorKind::scale_refused above the guard.
    BaselineResult joint_omp_estimate(const ComplexMatrix &y, const HybridFrontend &fe, const NlosDictionaries &dicts,
                                      int sparsity);

    /// Same, reusing precomputed side sensing matrices and returning the raw OMP result
    OmpResult joint_omp(const ComplexMatrix &ybar, const SideSensing &ups, int sparsity, OpCounters *counters = nullptr);

    struct GenieInfo
    {
        SceneGeometry geom;
        NlosPathSet paths;
    };

    /// Joint LS of the true LoS (parabolic) and NLoS structures against the whitened observation
    BaselineResult genie_ls_estimate(const ComplexMatrix &y, const HybridFrontend &fe, const GenieInfo &genie);

    struct GeoGrid
    {
        std::vector<double> elev_rx;
        std::vector<double> elev_tx;
        std::vector<double> azim_rx;
        std::vector<double> range;

        void validate() const;
    };

    /// Uniform angle grids over [angle_lo, angle_hi] and a uniform range grid over [range_lo, range_hi]
    GeoGrid make_geo_grid(int q_angle, int q_range, double angle_lo, double angle_hi, double range_lo, double range_hi);

    struct PeResult
    {
        SceneGeometry geom; // best candidate, los_gain holds the fitted gain
        ComplexMatrix channel;
        OpCounters counters;
    };

    /// Exhaustive parabolic-model search over the `neighborhood` grid points nearest the truth
    /// on every axis, scalar LS gain per candidate.
    PeResult genie_pe_los(const ComplexMatrix &y, const HybridFrontend &fe, const GeoGrid &grid, const SceneGeometry &truth,
                          int neighborhood);

    /// Restricted PE for the LoS part, then joint-dictionary OMP (SMR-OMP when the joint
    /// dictionary exceeds the guard) with the true path count on the residual.
    BaselineResult genie_pe_estimate(const ComplexMatrix &y, const HybridFrontend &fe, const GeoGrid &grid,
                                     const GenieInfo &genie, int neighborhood, const NlosDictionaries &dicts);
}
