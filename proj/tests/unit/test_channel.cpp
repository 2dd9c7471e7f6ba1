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

#include <catch2/catch_amalgamated.hpp>

#include "xlmimo/channel.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace xlmimo;

namespace
{
    ArrayConfig make_config(int nr, int nt, int kr, int kt)
    {
        ArrayConfig c;
        c.n_rx = nr;
        c.n_tx = nt;
        c.k_rx = kr;
        c.k_tx = kt;
        return c;
    }

    SceneGeometry scene(double range, double er, double et, double az, Complex g)
    {
        SceneGeometry s;
        s.range_m = range;
        s.elev_rx = er;
        s.elev_tx = et;
        s.azim_rx = az;
        s.los_gain = g;
        return s;
    }

    double wrapped(double a)
    {
        return std::abs(std::remainder(a, 2.0 * pi));
    }
}

TEST_CASE("Steering vector - trivial cases and DFT column")
{
    ArrayConfig c = make_config(16, 8, 4, 2);
    ComplexVector ones = steering_vector(c, Side::rx, {0.0, 0.0});
    CHECK((ones - ComplexVector::Ones(16)).norm() == 0.0);

    ComplexVector a = steering_vector(c, Side::tx, {0.37, -0.02});
    CHECK(a.norm() == Catch::Approx(std::sqrt(8.0)).epsilon(1e-14));
    for (int k = 0; k < a.size(); ++k)
        CHECK(std::abs(a[k]) == Catch::Approx(1.0).epsilon(1e-15));

    // phi = 2 lambda / (N d) lands on DFT bin 2 up to a constant phase
    const int n = 16;
    double phi = 2.0 * c.wavelength() / (n * c.element_spacing());
    ComplexVector s = steering_vector(c, Side::rx, {phi, 0.0});
    Complex ref_ratio = s[0] / std::polar(1.0, 0.0);
    for (int m = 0; m < n; ++m)
    {
        Complex dft = std::polar(1.0, -2.0 * pi * 2.0 * m / n);
        CHECK(std::abs(s[m] / dft - ref_ratio) < 1e-12);
    }
}

TEST_CASE("Coupling matrix identities")
{
    ArrayConfig c = make_config(12, 12, 3, 2);
    CHECK((coupling_matrix(c, 0.0) - ComplexMatrix::Ones(12, 12)).norm() == 0.0);
    ComplexMatrix prod = coupling_matrix(c, 0.013).cwiseProduct(coupling_matrix(c, -0.013));
    CHECK((prod - ComplexMatrix::Ones(12, 12)).norm() < 1e-12);
    ComplexMatrix lam = coupling_matrix(c, 0.02);
    CHECK((lam.transpose() - lam).norm() < 1e-12);
    for (int m = 0; m < 12; ++m)
        for (int n = 0; n < 12; ++n)
            CHECK(std::abs(lam(m, n)) == Catch::Approx(1.0));

    ArrayConfig rect = make_config(6, 10, 1, 1);
    ArrayConfig flip = make_config(10, 6, 1, 1);
    CHECK((coupling_matrix(rect, 0.05).transpose() - coupling_matrix(flip, 0.05)).norm() < 1e-12);
}

TEST_CASE("LoS models - elementwise agreement with distance formulas")
{
    ArrayConfig c = make_config(16, 12, 4, 3);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> ua(-1.0, 1.0);
    const double k0 = 2.0 * pi / c.wavelength();
    for (int trial = 0; trial < 20; ++trial)
    {
        SceneGeometry g = scene(3.0 + 5.0 * trial, ua(gen), ua(gen), ua(gen), std::polar(0.7, ua(gen)));
        const double R = g.range_m;
        ComplexMatrix hn = los_channel(c, g, LosModel::nuswm);
        ComplexMatrix hu = los_channel(c, g, LosModel::uswm);
        ComplexMatrix hp = los_channel(c, g, LosModel::parabolic);
        ComplexMatrix hs = los_channel(c, g, LosModel::sopm);
        for (int m = 1; m <= 16; ++m)
            for (int n = 1; n <= 12; ++n)
            {
                double r = oracle::cartesian_distance(R, g.elev_rx, g.elev_tx, g.azim_rx,
                                                      element_offset(c, Side::rx, m), element_offset(c, Side::tx, n));
                // Reference value (gain / R) exp(-j k r) with the common factor R exp(j k R) folded into the gain
                Complex nus = g.los_gain * (R / r) * std::polar(1.0, -k0 * (r - R));
                CHECK(std::abs(hn(m - 1, n - 1) - nus) < 1e-9);
                CHECK(std::abs(hu(m - 1, n - 1) - nus * (r / R)) < 1e-9);

                Complex par = g.los_gain * std::polar(1.0, -k0 * (parabolic_distance(c, g, m, n) - R));
                CHECK(std::abs(hp(m - 1, n - 1) - par) < 1e-9);
                Complex sop = g.los_gain * std::polar(1.0, -k0 * (sopm_distance(c, g, m, n) - R));
                CHECK(std::abs(hs(m - 1, n - 1) - sop) < 1e-9);

                CHECK(std::abs(hu(m - 1, n - 1)) == Catch::Approx(0.7).epsilon(1e-13));
                CHECK(std::abs(hp(m - 1, n - 1)) == Catch::Approx(0.7).epsilon(1e-13));
                CHECK(std::abs(hs(m - 1, n - 1)) == Catch::Approx(0.7).epsilon(1e-13));
            }
    }
}

TEST_CASE("LoS models - reference element, degeneracy, rank-1 blocks")
{
    ArrayConfig odd = make_config(9, 15, 1, 1);
    SceneGeometry g = scene(7.5, 0.4, -0.3, 0.8, Complex(0.3, -0.4));
    for (LosModel model : {LosModel::nuswm, LosModel::uswm, LosModel::parabolic, LosModel::sopm})
        CHECK(std::abs(los_channel(odd, g, model)(4, 7) - g.los_gain) < 1e-14);

    ArrayConfig full = make_config(16, 16, 16, 16);
    for (double r : {2.0, 10.0, 90.0})
    {
        SceneGeometry s = scene(r, 0.9, -0.5, 0.2, Complex(1.0, 0.0));
        CHECK((los_channel(full, s, LosModel::sopm) - los_channel(full, s, LosModel::parabolic)).norm() <= 1e-10 * 16);
    }

    ArrayConfig c = make_config(32, 32, 4, 2);
    SceneGeometry s = scene(6.0, 0.3, 0.2, -0.4, Complex(1.0, 0.0));
    ComplexMatrix h = los_channel(c, s, LosModel::sopm);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(oracle::numerical_rank(h.block(i * 8, j * 16, 8, 16), 1e-12) == 1);

    TransformedParams p = transform(s);
    ComplexMatrix built = s.los_gain * steering_vector(c, Side::rx, {p.phi_rx, p.alpha_rx}) *
                          steering_vector(c, Side::tx, {p.phi_tx, p.alpha_tx}).adjoint();
    built = built.cwiseProduct(coupling_matrix(c, p.eta));
    CHECK((los_channel(c, s, LosModel::parabolic) - built).norm() < 1e-12 * built.norm());
}

TEST_CASE("LoS models - SOPM close to USWM far beyond the subarray distance")
{
    ArrayConfig c = make_config(128, 128, 4, 2);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> ua(-pi / 3, pi / 3);
    for (int trial = 0; trial < 5; ++trial)
    {
        SceneGeometry s = scene(100.0, ua(gen), ua(gen), ua(gen), 1.0);
        ComplexMatrix hs = los_channel(c, s, LosModel::sopm);
        ComplexMatrix hu = los_channel(c, s, LosModel::uswm);
        double worst = 0.0;
        for (int n = 0; n < 128; ++n)
            for (int m = 0; m < 128; ++m)
                worst = std::max(worst, wrapped(std::arg(hs(m, n) / hu(m, n))));
        CHECK(worst <= pi / 8);
        CHECK(worst <= lemma1_bound(c, 100.0) * 1.05);
        CHECK((hs - hu).norm() / hu.norm() < 0.05);
    }

    // nuswm moduli lie between the extreme distance ratios
    SceneGeometry near = scene(3.0, 0.5, 0.6, 0.1, Complex(0.0, 2.0));
    ComplexMatrix hn = los_channel(c, near, LosModel::nuswm);
    double rmin = 1e9, rmax = 0.0;
    for (int m = 1; m <= 128; m += 1)
        for (int n = 1; n <= 128; n += 1)
        {
            double r = exact_distance(c, near, m, n);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
    CHECK(hn.cwiseAbs().minCoeff() >= 2.0 * 3.0 / rmax * (1 - 1e-12));
    CHECK(hn.cwiseAbs().maxCoeff() <= 2.0 * 3.0 / rmin * (1 + 1e-12));
}

TEST_CASE("NLoS channel - trivial cases and rank")
{
    ArrayConfig c = make_config(16, 16, 4, 2);
    CHECK(nlos_channel(c, {}).norm() == 0.0);

    NlosPathSet one;
    one.paths.push_back({Complex(1.0), {0.0, 0.0}, {0.0, 0.0}});
    CHECK((nlos_channel(c, one) - ComplexMatrix::Ones(16, 16)).norm() < 1e-14);

    for (int l = 1; l <= 3; ++l)
    {
        NlosPathSet set;
        for (int k = 0; k < l; ++k)
        {
            NlosPath p;
            p.gain = Complex(1.0 + k, 0.5 * k);
            p.rx = {-0.75 + 0.5 * k, 0.0};
            p.tx = {0.6 - 0.5 * k, -0.01 * k};
            set.paths.push_back(p);
        }
        CHECK(oracle::numerical_rank(nlos_channel(c, set)) == l);
    }

    SteeringParams r = nlos_rx_params(pi / 3, 10.0), t = nlos_tx_params(pi / 3, 20.0);
    CHECK(r.linear == Catch::Approx(0.5));
    CHECK(r.quadratic == Catch::Approx(0.75 / 20.0));
    CHECK(t.linear == Catch::Approx(-0.5));
    CHECK(t.quadratic == Catch::Approx(-0.75 / 40.0));
}

TEST_CASE("Scene sampling - gains, boxes, NLoS power")
{
    ArrayConfig c = make_config(8, 8, 2, 2);
    SceneConfig sc;
    sc.kappa = 4.0;
    sc.num_paths = 3;
    Rng rng(5);
    ChannelPair pair = sample_scene(c, rng, sc);
    CHECK(std::norm(pair.truth_geom.los_gain) == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(pair.truth_paths.paths.size() == 3);
    // per-path effective variance after the sqrt(1/L) prefactor
    CHECK((1.0 / (1.0 + sc.kappa)) / sc.num_paths == Catch::Approx(1.0 / 15.0));

    const int draws = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < draws; ++k)
    {
        ChannelPair p = sample_scene(c, rng, sc);
        const auto &g = p.truth_geom;
        CHECK(g.range_m >= sc.range_min);
        CHECK(g.range_m <= sc.range_max);
        CHECK(std::abs(g.elev_rx) <= pi / 3);
        CHECK(std::abs(g.azim_rx) <= pi / 3);
        for (const auto &path : p.truth_paths.paths)
        {
            CHECK(path.aoa >= pi / 6);
            CHECK(path.aoa <= 5 * pi / 6);
            CHECK(path.rx_range >= 5.0);
            CHECK(path.tx_range <= 50.0);
        }
        double v = p.nlos.squaredNorm() / 64.0;
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / draws;
    double sd = std::sqrt((sum2 / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 0.2) <= 3.0 * sd);

    SceneConfig los_only = sc;
    los_only.kappa = 1e12;
    ChannelPair p = sample_scene(c, rng, los_only);
    CHECK(p.nlos.squaredNorm() < 1e-9);

    SceneConfig bad = sc;
    bad.range_min = -1.0;
    CHECK_THROWS_AS(sample_scene(c, rng, bad), Error);

    Rng a(99), b(99);
    CHECK(sample_scene(c, a, sc).total() == sample_scene(c, b, sc).total());
}
