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

#include "xlmimo/baselines.hpp"
#include "xlmimo/numerics.hpp"

#include "oracles.hpp"

#include <cmath>

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
}

TEST_CASE("Joint OMP - exact path, empty sparsity, guard")
{
    ArrayConfig c = make_config(32, 32, 2, 2);
    Rng rng(1);
    HybridFrontend fe = build_frontend(c, rng, 6, 6);
    NlosConfig nc;
    nc.q_angle = 16;
    nc.q_curv = 3;
    NlosDictionaries d = build_dictionaries(c, nc);

    ComplexMatrix h = Complex(0.2, 0.9) * d.rx.columns.col(13) * d.tx.columns.col(30).adjoint();
    BaselineResult r = joint_omp_estimate(project(fe, h), fe, d, 1);
    CHECK(oracle::nmse(r.channel, h) < 1e-20);
    CHECK(r.counters.sensing_column_evals == 48u * 48u);

    BaselineResult z = joint_omp_estimate(project(fe, h), fe, d, 0);
    CHECK(z.channel.norm() == 0.0);

    NlosConfig big;
    big.q_angle = 256;
    big.q_curv = 7;
    ArrayConfig s = make_config(16, 16, 2, 2);
    NlosDictionaries db = build_dictionaries(s, big);
    Rng r2(2);
    HybridFrontend fs = build_frontend(s, r2, 4, 4);
    CHECK_NOTHROW(joint_omp_estimate(ComplexMatrix::Zero(8, 8), fs, db, 3));
    try
    {
        joint_omp_estimate(ComplexMatrix::Zero(8, 8), fs, db, 4);
        FAIL("guard did not trigger");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::scale_refused);
    }
}

TEST_CASE("Joint OMP - coincides with SMR-OMP under support containment")
{
    ArrayConfig c = make_config(16, 16, 2, 2);
    NlosConfig nc;
    nc.q_angle = 16;
    nc.q_curv = 2;
    nc.r_min = 0.05;
    nc.l_rx = 2;
    nc.l_tx = 2;
    NlosDictionaries d = build_dictionaries(c, nc);
    SceneConfig scene;
    scene.num_paths = 2;

    int contained = 0;
    for (int trial = 0; trial < 40; ++trial)
    {
        Rng rng(derive_seed(5, std::uint64_t(trial)));
        ChannelPair ch = sample_scene(c, rng, scene);
        HybridFrontend fe = build_frontend(c, rng, 8, 8);
        ComplexMatrix y = receive(fe, ch.nlos, rng, 0.01);

        NlosEstimate smr = estimate_nlos(y, fe, ComplexMatrix(), d, nc);
        auto wh = combiner_whiteners(fe);
        SideSensing ups = make_side_sensing(fe, wh, d.rx, d.tx);
        OmpResult j = joint_omp(whiten_rows(y, fe, wh), ups, 2);

        bool inside = true;
        for (int k : j.support.indices)
            inside = inside && smr.rx_support.contains(k % d.rx.size()) && smr.tx_support.contains(k / d.rx.size());
        if (!inside)
            continue;
        ++contained;
        REQUIRE(j.support.size() == smr.atoms.size());
        for (std::size_t k = 0; k < smr.atoms.size(); ++k)
        {
            CHECK(j.support.indices[k] == smr.atoms[k].second * d.rx.size() + smr.atoms[k].first);
            CHECK(j.coeffs[Eigen::Index(k)] == smr.coeffs[Eigen::Index(k)]);
        }
        BaselineResult full = joint_omp_estimate(y, fe, d, 2);
        CHECK((full.channel - smr.channel).norm() == 0.0);
    }
    CHECK(contained >= 34);
}

TEST_CASE("Genie LS - exact gains, mismatch floor, noise scaling")
{
    ArrayConfig c = make_config(32, 32, 4, 2);
    SceneConfig scene;
    scene.truth_model = LosModel::parabolic;
    Rng rng(3);
    ChannelPair ch = sample_scene(c, rng, scene);
    HybridFrontend fe = build_frontend(c, rng, 6, 8);
    GenieInfo genie{ch.truth_geom, ch.truth_paths};

    BaselineResult exact = genie_ls_estimate(project(fe, ch.total()), fe, genie);
    CHECK(oracle::nmse(exact.channel, ch.total()) < 1e-20);

    // spherical truth: the residual error equals the projection of the truth onto the regressors
    scene.truth_model = LosModel::nuswm;
    Rng rng2(3);
    ChannelPair sph = sample_scene(c, rng2, scene);
    BaselineResult fl = genie_ls_estimate(project(fe, sph.total()), fe, {sph.truth_geom, sph.truth_paths});
    {
        auto wh = combiner_whiteners(fe);
        std::vector<ComplexMatrix> s{parabolic_channel(c, transform(sph.truth_geom), 1.0)};
        for (const auto &p : sph.truth_paths.paths)
            s.push_back(steering_vector(c, Side::rx, p.rx) * steering_vector(c, Side::tx, p.tx).adjoint());
        oracle::Mat a(fe.m_rx() * fe.m_tx(), Eigen::Index(s.size()));
        for (std::size_t k = 0; k < s.size(); ++k)
            a.col(Eigen::Index(k)) = oracle::vec(whiten_rows(project(fe, s[k]), fe, wh));
        oracle::Vec g = oracle::dense_ls(a, oracle::vec(whiten_rows(project(fe, sph.total()), fe, wh)));
        oracle::Mat ref = oracle::Mat::Zero(32, 32);
        for (std::size_t k = 0; k < s.size(); ++k)
            ref += g[Eigen::Index(k)] * s[k];
        CHECK(oracle::nmse(fl.channel, ref) < 1e-18);
        CHECK(oracle::nmse(fl.channel, sph.total()) > 0.0);
    }

    double e1 = 0.0, e2 = 0.0;
    for (int k = 0; k < 300; ++k)
    {
        Rng n1(derive_seed(40, std::uint64_t(k))), n2(derive_seed(40, std::uint64_t(k)));
        e1 += oracle::nmse(genie_ls_estimate(receive(fe, ch.total(), n1, 0.02), fe, genie).channel, ch.total());
        e2 += oracle::nmse(genie_ls_estimate(receive(fe, ch.total(), n2, 0.01), fe, genie).channel, ch.total());
    }
    CHECK(e1 / e2 == Catch::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("Genie PE - on-grid truth and exhaustive equivalence")
{
    ArrayConfig c = make_config(16, 16, 2, 2);
    Rng rng(4);
    HybridFrontend fe = build_frontend(c, rng, 4, 4);
    GeoGrid grid = make_geo_grid(7, 7, -pi / 3.0, pi / 3.0, 5.0, 35.0);

    SceneGeometry truth;
    truth.elev_rx = grid.elev_rx[2];
    truth.elev_tx = grid.elev_tx[5];
    truth.azim_rx = grid.azim_rx[3];
    truth.range_m = grid.range[1];
    truth.los_gain = std::polar(0.9, 0.4);
    ComplexMatrix h = parabolic_channel(c, transform(truth), truth.los_gain);
    ComplexMatrix y = project(fe, h);

    PeResult pe = genie_pe_los(y, fe, grid, truth, 3);
    CHECK(pe.geom.elev_rx == truth.elev_rx);
    CHECK(pe.geom.elev_tx == truth.elev_tx);
    CHECK(pe.geom.azim_rx == truth.azim_rx);
    CHECK(pe.geom.range_m == truth.range_m);
    CHECK(std::abs(pe.geom.los_gain - truth.los_gain) < 1e-12);
    CHECK(pe.counters.metric_evals == 81u);

    // full-grid neighborhood against a plain exhaustive residual minimization
    std::mt19937_64 gen(4);
    ComplexMatrix yn = y + 0.5 * oracle::random_matrix(gen, 8, 8);
    PeResult all = genie_pe_los(yn, fe, grid, truth, 7);
    CHECK(all.counters.metric_evals == 2401u);

    double best = 1e300;
    SceneGeometry arg;
    for (double r : grid.range)
        for (double az : grid.azim_rx)
            for (double et : grid.elev_tx)
                for (double er : grid.elev_rx)
                {
                    SceneGeometry g;
                    g.range_m = r, g.azim_rx = az, g.elev_tx = et, g.elev_rx = er;
                    oracle::Vec b = oracle::vec(project(fe, parabolic_channel(c, transform(g), 1.0)));
                    oracle::Vec yv = oracle::vec(yn);
                    oracle::Vec gain = oracle::dense_ls(b, yv);
                    double res = (yv - b * gain[0]).squaredNorm();
                    if (res < best)
                        best = res, arg = g;
                }
    CHECK(all.geom.elev_rx == arg.elev_rx);
    CHECK(all.geom.elev_tx == arg.elev_tx);
    CHECK(all.geom.azim_rx == arg.azim_rx);
    CHECK(all.geom.range_m == arg.range_m);
    CHECK((oracle::vec(yn) - oracle::vec(project(fe, all.channel))).squaredNorm() == Catch::Approx(best).epsilon(1e-10));

    CHECK_THROWS_AS(genie_pe_los(y, fe, grid, truth, 4), Error);
}

TEST_CASE("Genie PE - full pipeline adds the NLoS stage")
{
    ArrayConfig c = make_config(32, 32, 4, 2);
    Rng rng(6);
    ChannelPair ch = sample_scene(c, rng, SceneConfig{});
    HybridFrontend fe = build_frontend(c, rng, 6, 8);
    GeoGrid grid = make_geo_grid(49, 64, -pi / 3.0, pi / 3.0, 5.0, 200.0);
    NlosConfig nc;
    nc.q_angle = 32;
    nc.q_curv = 3;
    NlosDictionaries d = build_dictionaries(c, nc);
    ComplexMatrix y = receive(fe, ch.total(), rng, 1e-3);

    GenieInfo genie{ch.truth_geom, ch.truth_paths};
    BaselineResult full = genie_pe_estimate(y, fe, grid, genie, 5, d);
    PeResult los = genie_pe_los(y, fe, grid, ch.truth_geom, 5);
    CHECK(full.counters.metric_evals == 625u);
    CHECK(full.counters.sensing_column_evals == 3u * 96u * 96u);
    CHECK(oracle::nmse(full.channel, ch.total()) < oracle::nmse(los.channel, ch.total()));
}
