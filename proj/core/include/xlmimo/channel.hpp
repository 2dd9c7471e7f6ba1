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
#include "xlmimo/geometry.hpp"
#include "xlmimo/rng.hpp"

#include <string>
#include <vector>

namespace xlmimo
{
    // Phase coefficients of a steering vector: entry m is exp(-j 2pi/lambda (delta_m linear + delta_m^2 quadratic))
    struct SteeringParams
    {
        double linear = 0.0;
        double quadratic = 0.0; // 1/m; receive side >= 0, transmit side <= 0
    };

    ComplexVector steering_vector(const ArrayConfig &config, Side side, const SteeringParams &params);

    /// Steering vector over an explicit list of element offsets (e.g. one subarray).
    ComplexVector steering_vector(const std::vector<double> &offsets, double wavelength, const SteeringParams &params);

    /// [Lambda]_{m,n} = exp(j 2pi/lambda eta delta_rm delta_tn)
    ComplexMatrix coupling_matrix(const ArrayConfig &config, double eta);

    enum class LosModel
    {
        nuswm,
        uswm,
        parabolic,
        sopm
    };

    const char *to_string(LosModel model);
    LosModel los_model_from_string(const std::string &name);

    /// Line-of-sight channel under the chosen wavefront model. All models share the value
    /// los_gain at the array centers.
    ComplexMatrix los_channel(const ArrayConfig &config, const SceneGeometry &geom, LosModel model);

    /// g a_r(phi_r, alpha_r) a_t(phi_t, alpha_t)^H (.) Lambda(eta) from transformed parameters
    ComplexMatrix parabolic_channel(const ArrayConfig &config, const TransformedParams &p, Complex gain);

    /// Block-wise outer-product channel (per-block shifted linear phases) from transformed parameters
    ComplexMatrix sopm_channel(const ArrayConfig &config, const TransformedParams &p, Complex gain);

    struct NlosPath
    {
        Complex gain = 0.0;
        SteeringParams rx;
        SteeringParams tx;
        double aoa = 0.0;      // rad
        double aod = 0.0;      // rad
        double rx_range = 0.0; // m
        double tx_range = 0.0; // m
    };

    struct NlosPathSet
    {
        std::vector<NlosPath> paths;
    };

    SteeringParams nlos_rx_params(double aoa, double range);
    SteeringParams nlos_tx_params(double aod, double range);

    /// sqrt(1/L) sum_l g_l a_r a_t^H; the zero matrix when there are no paths
    ComplexMatrix nlos_channel(const ArrayConfig &config, const NlosPathSet &paths);

    struct SceneConfig
    {
        double range_min = 90.0;
        double range_max = 100.0;
        double angle_min = -pi / 3.0;
        double angle_max = pi / 3.0;
        int num_paths = 3;
        double kappa = 4.0;
        double scatter_angle_min = pi / 6.0;
        double scatter_angle_max = 5.0 * pi / 6.0;
        double scatter_range_min = 5.0;
        double scatter_range_max = 50.0;
        LosModel truth_model = LosModel::nuswm;

        void validate() const;
    };

    struct ChannelPair
    {
        ComplexMatrix los;
        ComplexMatrix nlos;
        SceneGeometry truth_geom;
        NlosPathSet truth_paths;

        ComplexMatrix total() const { return los + nlos; }
    };

    /// Draws one random scene and synthesizes its channel.
    ChannelPair sample_scene(const ArrayConfig &config, Rng &rng, const SceneConfig &scene);
}
