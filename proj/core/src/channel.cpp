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

#include "xlmimo/channel.hpp"

#include <cmath>
#include <string>

namespace xlmimo
{
    ComplexVector steering_vector(const std::vector<double> &offsets, double wavelength, const SteeringParams &p)
    {
        const double k0 = 2.0 * pi / wavelength;
        ComplexVector a(Eigen::Index(offsets.size()));
        for (std::size_t m = 0; m < offsets.size(); ++m)
        {
            double d = offsets[m];
            a[Eigen::Index(m)] = std::polar(1.0, -k0 * (d * p.linear + d * d * p.quadratic));
        }
        return a;
    }

    ComplexVector steering_vector(const ArrayConfig &config, Side side, const SteeringParams &params)
    {
        return steering_vector(element_offsets(config, side), config.wavelength(), params);
    }

    ComplexMatrix coupling_matrix(const ArrayConfig &config, double eta)
    {
        const auto dr = element_offsets(config, Side::rx);
        const auto dt = element_offsets(config, Side::tx);
        const double k0 = 2.0 * pi / config.wavelength();
        ComplexMatrix lam(config.n_rx, config.n_tx);
        for (int n = 0; n < config.n_tx; ++n)
            for (int m = 0; m < config.n_rx; ++m)
                lam(m, n) = std::polar(1.0, k0 * eta * dr[m] * dt[n]);
        return lam;
    }

    const char *to_string(LosModel model)
    {
        switch (model)
        {
        case LosModel::nuswm:
            return "nuswm";
        case LosModel::uswm:
            return "uswm";
        case LosModel::parabolic:
            return "parabolic";
        case LosModel::sopm:
            return "sopm";
        }
        return "unknown";
    }

    LosModel los_model_from_string(const std::string &name)
    {
        for (LosModel m : {LosModel::nuswm, LosModel::uswm, LosModel::parabolic, LosModel::sopm})
            if (name == to_string(m))
                return m;
        throw Error(ErrorKind::config_invalid, "unknown wavefront model '" + name + "'");
    }

    ComplexMatrix parabolic_channel(const ArrayConfig &config, const TransformedParams &p, Complex gain)
    {
        ComplexVector ar = steering_vector(config, Side::rx, {p.phi_rx, p.alpha_rx});
        ComplexVector at = steering_vector(config, Side::tx, {p.phi_tx, p.alpha_tx});
        ComplexMatrix h = gain * ar * at.adjoint();
        return h.cwiseProduct(coupling_matrix(config, p.eta));
    }

    ComplexMatrix sopm_channel(const ArrayConfig &config, const TransformedParams &p, Complex gain)
    {
        const auto dr = element_offsets(config, Side::rx);
        const auto dt = element_offsets(config, Side::tx);
        const int nrs = config.subarray_size(Side::rx), nts = config.subarray_size(Side::tx);
        const double k0 = 2.0 * pi / config.wavelength();

        ComplexMatrix h(config.n_rx, config.n_tx);
        for (int i = 1; i <= config.k_rx; ++i)
        {
            double nu_r = subarray_centroid(config, Side::rx, i);
            std::vector<double> off_r(dr.begin() + (i - 1) * nrs, dr.begin() + i * nrs);
            for (int j = 1; j <= config.k_tx; ++j)
            {
                double nu_t = subarray_centroid(config, Side::tx, j);
                std::vector<double> off_t(dt.begin() + (j - 1) * nts, dt.begin() + j * nts);

                Complex g_ij = gain * std::polar(1.0, -k0 * p.eta * nu_r * nu_t);
                ComplexVector ar = steering_vector(off_r, config.wavelength(), {p.phi_rx - p.eta * nu_t, p.alpha_rx});
                ComplexVector at = steering_vector(off_t, config.wavelength(), {p.phi_tx + p.eta * nu_r, p.alpha_tx});
                h.block((i - 1) * nrs, (j - 1) * nts, nrs, nts) = g_ij * ar * at.adjoint();
            }
        }
        return h;
    }

    namespace
    {
        ComplexMatrix spherical_channel(const ArrayConfig &config, const SceneGeometry &g, bool amplitude)
        {
            const auto dr = element_offsets(config, Side::rx);
            const auto dt = element_offsets(config, Side::tx);
            const double k0 = 2.0 * pi / config.wavelength();
            const double R = g.range_m;
            ComplexMatrix h(config.n_rx, config.n_tx);
            for (int n = 0; n < config.n_tx; ++n)
                for (int m = 0; m < config.n_rx; ++m)
                {
                    double ex = exact_excess(R, g.elev_rx, g.elev_tx, g.azim_rx, dr[m], dt[n]);
                    double amp = amplitude ? R / (R + ex) : 1.0;
                    h(m, n) = g.los_gain * std::polar(amp, -k0 * ex);
                }
            return h;
        }
    }

    ComplexMatrix los_channel(const ArrayConfig &config, const SceneGeometry &geom, LosModel model)
    {
        config.validate();
        if (!(geom.range_m > 0.0))
            throw Error(ErrorKind::precondition, "los_channel needs a positive range");
        switch (model)
        {
        case LosModel::nuswm:
            return spherical_channel(config, geom, true);
        case LosModel::uswm:
            return spherical_channel(config, geom, false);
        case LosModel::parabolic:
            return parabolic_channel(config, transform(geom), geom.los_gain);
        case LosModel::sopm:
            return sopm_channel(config, transform(geom), geom.los_gain);
        }
        throw Error(ErrorKind::config_invalid, "unknown wavefront model");
    }

    SteeringParams nlos_rx_params(double aoa, double range)
    {
        double rho = std::cos(aoa);
        return {rho, (1.0 - rho * rho) / (2.0 * range)};
    }

    SteeringParams nlos_tx_params(double aod, double range)
    {
        double rho = -std::cos(aod);
        return {rho, -(1.0 - rho * rho) / (2.0 * range)};
    }

    ComplexMatrix nlos_channel(const ArrayConfig &config, const NlosPathSet &set)
    {
        ComplexMatrix h = ComplexMatrix::Zero(config.n_rx, config.n_tx);
        if (set.paths.empty())
            return h;
        for (const auto &path : set.paths)
            h += path.gain * steering_vector(config, Side::rx, path.rx) * steering_vector(config, Side::tx, path.tx).adjoint();
        return h * std::sqrt(1.0 / double(set.paths.size()));
    }

    void SceneConfig::validate() const
    {
        if (!(range_min > 0.0) || range_max < range_min)
            throw Error(ErrorKind::config_invalid, "scene range bounds");
        if (angle_max < angle_min || scatter_angle_max < scatter_angle_min)
            throw Error(ErrorKind::config_invalid, "scene angle bounds");
        if (num_paths < 0 || !(kappa >= 0.0))
            throw Error(ErrorKind::config_invalid, "path count and Rician factor must be non-negative");
        if (!(scatter_range_min > 0.0) || scatter_range_max < scatter_range_min)
            throw Error(ErrorKind::config_invalid, "scatterer range bounds");
    }

    ChannelPair sample_scene(const ArrayConfig &config, Rng &rng, const SceneConfig &scene)
    {
        config.validate();
        scene.validate();

        ChannelPair out;
        SceneGeometry &g = out.truth_geom;
        g.elev_rx = rng.uniform(scene.angle_min, scene.angle_max);
        g.elev_tx = rng.uniform(scene.angle_min, scene.angle_max);
        g.azim_rx = rng.uniform(scene.angle_min, scene.angle_max);
        g.range_m = rng.uniform(scene.range_min, scene.range_max);
        g.los_gain = std::sqrt(scene.kappa / (1.0 + scene.kappa)) * rng.unit_phase();

        const double path_var = 1.0 / (1.0 + scene.kappa);
        for (int l = 0; l < scene.num_paths; ++l)
        {
            NlosPath p;
            p.gain = rng.complex_normal(path_var);
            p.aoa = rng.uniform(scene.scatter_angle_min, scene.scatter_angle_max);
            p.aod = rng.uniform(scene.scatter_angle_min, scene.scatter_angle_max);
            p.rx_range = rng.uniform(scene.scatter_range_min, scene.scatter_range_max);
            p.tx_range = rng.uniform(scene.scatter_range_min, scene.scatter_range_max);
            p.rx = nlos_rx_params(p.aoa, p.rx_range);
            p.tx = nlos_tx_params(p.aod, p.tx_range);
            out.truth_paths.paths.push_back(p);
        }

        out.los = los_channel(config, g, scene.truth_model);
        out.nlos = nlos_channel(config, out.truth_paths);
        return out;
    }
}
