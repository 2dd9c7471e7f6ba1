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
#include "xlmimo/frontend.hpp"

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
}

TEST_CASE("Frontend - modulus, block structure, rank")
{
    ArrayConfig c = make_config(16, 12, 4, 3);
    Rng rng(1);
    HybridFrontend fe = build_frontend(c, rng, 3, 2);
    CHECK(fe.m_rx() == 12);
    CHECK(fe.m_tx() == 6);

    ComplexMatrix w = fe.combiner(), f = fe.precoder();
    REQUIRE(w.rows() == 16);
    REQUIRE(w.cols() == 12);
    for (int col = 0; col < 12; ++col)
        CHECK(w.col(col).norm() == Catch::Approx(1.0).epsilon(1e-14));
    for (int col = 0; col < 6; ++col)
        CHECK(f.col(col).norm() == Catch::Approx(1.0).epsilon(1e-14));
    for (int row = 0; row < 16; ++row)
        for (int col = 0; col < 12; ++col)
        {
            bool on_block = row / 4 == col / 3;
            if (on_block)
                CHECK(std::abs(w(row, col)) == Catch::Approx(0.5).epsilon(1e-14));
            else
                CHECK(w(row, col) == Complex(0.0));
        }

    for (const auto &b : fe.combiner_blocks)
        CHECK(oracle::numerical_rank(b) == 3);
    Rng rng2(2);
    HybridFrontend wide = build_frontend(c, rng2, 6, 5);
    for (const auto &b : wide.combiner_blocks)
        CHECK(oracle::numerical_rank(b) == 4);
    for (const auto &b : wide.precoder_blocks)
        CHECK(oracle::numerical_rank(b) == 4);

    Rng rng3(3);
    HybridFrontend inv_n = build_frontend(c, rng3, 2, 2, ModulusConvention::inv_n);
    CHECK(std::abs(inv_n.combiner_blocks[0](1, 1)) == Catch::Approx(0.25));
    CHECK(modulus_from_string("inv_n") == ModulusConvention::inv_n);
    CHECK_THROWS_AS(modulus_from_string("other"), Error);
}

TEST_CASE("Receive - noiseless structure and block recovery")
{
    ArrayConfig c = make_config(8, 8, 2, 2);
    Rng rng(4);
    HybridFrontend fe = build_frontend(c, rng, 4, 4);
    ComplexMatrix zero = ComplexMatrix::Zero(8, 8);
    CHECK(receive(fe, zero, rng, 0.0).norm() == 0.0);

    std::mt19937_64 gen(4);
    ComplexMatrix h = oracle::random_matrix(gen, 8, 8);
    ComplexMatrix y = receive(fe, h, rng, 0.0);
    ComplexMatrix ref = fe.combiner().adjoint() * h * fe.precoder();
    CHECK((y - ref).norm() < 1e-12 * ref.norm());

    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
        {
            ComplexMatrix yb = subarray_block(y, fe, i, j);
            ComplexMatrix hb = fe.combiner_blocks[i - 1].adjoint().inverse() * yb * fe.precoder_blocks[j - 1].inverse();
            CHECK((hb - h.block((i - 1) * 4, (j - 1) * 4, 4, 4)).norm() < 1e-9 * h.norm());
        }
}

TEST_CASE("Receive - noise power and linearity")
{
    ArrayConfig c = make_config(8, 6, 2, 3);
    Rng rng(6);
    HybridFrontend fe = build_frontend(c, rng, 3, 2);
    std::mt19937_64 gen(6);
    ComplexMatrix h = oracle::random_matrix(gen, 8, 6);
    ComplexMatrix clean = project(fe, h);

    double sigma2 = 0.4;
    double w_energy = 0.0;
    for (const auto &b : fe.combiner_blocks)
        w_energy += b.squaredNorm();
    double expected = sigma2 * fe.m_tx() * w_energy;

    const int trials = 4000;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t)
    {
        double e = (receive(fe, h, rng, sigma2) - clean).squaredNorm();
        sum += e;
        sum2 += e * e;
    }
    double mean = sum / trials, sd = std::sqrt((sum2 / trials - mean * mean) / trials);
    CHECK(std::abs(mean - expected) <= 4.0 * sd);

    ComplexMatrix noise = oracle::random_matrix(gen, 8, fe.m_tx());
    ComplexMatrix h2 = oracle::random_matrix(gen, 8, 6);
    ComplexMatrix lhs = receive_with_noise(fe, h + h2, noise) - receive_with_noise(fe, h2, noise);
    CHECK((lhs - project(fe, h)).norm() < 1e-12 * h.norm());

    CHECK_THROWS_AS(project(fe, ComplexMatrix::Zero(7, 6)), Error);
}

TEST_CASE("Subarray blocks - partition and rank")
{
    ArrayConfig one = make_config(8, 8, 1, 1);
    Rng rng(8);
    HybridFrontend fe1 = build_frontend(one, rng, 5, 3);
    std::mt19937_64 gen(8);
    ComplexMatrix y1 = oracle::random_matrix(gen, 5, 3);
    CHECK(subarray_block(y1, fe1, 1, 1) == y1);

    ArrayConfig c = make_config(32, 32, 4, 2);
    HybridFrontend fe = build_frontend(c, rng, 4, 6);
    SceneGeometry g;
    g.range_m = 5.0;
    g.elev_rx = 0.3;
    g.elev_tx = -0.2;
    g.azim_rx = 0.5;
    ComplexMatrix y = project(fe, los_channel(c, g, LosModel::sopm));
    ComplexMatrix tiled(y.rows(), y.cols());
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 2; ++j)
        {
            ComplexMatrix b = subarray_block(y, fe, i, j);
            tiled.block((i - 1) * 4, (j - 1) * 6, 4, 6) = b;
            CHECK(oracle::numerical_rank(b, 1e-10) == 1);
        }
    CHECK(tiled == y);
    CHECK_THROWS_AS(subarray_block(y, fe, 5, 1), Error);
}

TEST_CASE("Whitening - orthonormal, covariance, invertibility")
{
    std::mt19937_64 gen(9);
    ComplexMatrix a = oracle::random_matrix(gen, 8, 3);
    ComplexMatrix q = Eigen::HouseholderQR<ComplexMatrix>(a).householderQ() * ComplexMatrix::Identity(8, 3);
    ComplexMatrix yb = oracle::random_matrix(gen, 3, 5);
    WhitenedObservation wo = whiten(yb, q, 1.0);
    CHECK((wo.whitener - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((wo.data - yb).norm() < 1e-12);

    ArrayConfig c = make_config(8, 4, 2, 1);
    Rng rng(10);
    HybridFrontend fe = build_frontend(c, rng, 3, 1);
    WhitenedObservation w2 = whiten(yb, fe.combiner_blocks[0], 0.5);
    CHECK((w2.whitener * w2.data - yb).norm() < 1e-12 * yb.norm());

    // Whitened pure noise has covariance sigma^2 I
    const double sigma2 = 0.7;
    const int samples = 10000;
    ComplexMatrix cov = ComplexMatrix::Zero(3, 3);
    ComplexMatrix l = combiner_whiteners(fe)[0];
    for (int s = 0; s < samples; ++s)
    {
        ComplexMatrix y = receive(fe, ComplexMatrix::Zero(8, 4), rng, sigma2);
        ComplexMatrix yw = whiten(subarray_block(y, fe, 1, 1), fe.combiner_blocks[0], sigma2).data;
        cov += yw * yw.adjoint();
    }
    cov /= double(samples);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
        {
            if (i == j)
                CHECK(std::abs(cov(i, j).real() / sigma2 - 1.0) < 0.05);
            else
                CHECK(std::abs(cov(i, j)) / sigma2 < 0.05);
        }

    // Full-observation whitening equals the explicit block-diagonal solve
    auto whs = combiner_whiteners(fe);
    ComplexMatrix wbar = whitened_combiner(fe, whs);
    ComplexMatrix big_l = ComplexMatrix::Zero(6, 6);
    big_l.block(0, 0, 3, 3) = whs[0];
    big_l.block(3, 3, 3, 3) = whs[1];
    ComplexMatrix ref = big_l.triangularView<Eigen::Lower>().solve(fe.combiner().adjoint());
    CHECK((wbar - ref).norm() < 1e-12 * ref.norm());
    ComplexMatrix y = oracle::random_matrix(gen, 6, 1);
    CHECK((whiten_rows(y, fe, whs) - big_l.triangularView<Eigen::Lower>().solve(y)).norm() < 1e-12 * y.norm());

    ComplexMatrix dup = fe.combiner_blocks[0];
    dup.col(2) = dup.col(0);
    CHECK_THROWS_AS(whiten(yb, dup, 1.0), Error);
}
