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

// Independent reference computations used by the tests. Nothing here calls into the
// library code paths it is compared against.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle
{
    using cd = std::complex<double>;
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;

    inline Mat random_matrix(std::mt19937_64 &gen, int rows, int cols)
    {
        std::normal_distribution<double> nd(0.0, 1.0);
        Mat a(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i)
                a(i, j) = cd(nd(gen), nd(gen));
        return a;
    }

    // Kronecker product built entry by entry
    inline Mat kron(const Mat &a, const Mat &b)
    {
        Mat k(a.rows() * b.rows(), a.cols() * b.cols());
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j)
                for (int p = 0; p < b.rows(); ++p)
                    for (int q = 0; q < b.cols(); ++q)
                        k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
        return k;
    }

    inline Vec vec(const Mat &x)
    {
        Vec v(x.size());
        for (int j = 0; j < x.cols(); ++j)
            for (int i = 0; i < x.rows(); ++i)
                v(j * x.rows() + i) = x(i, j);
        return v;
    }

    // Householder QR least squares
    inline Vec dense_ls(const Mat &a, const Vec &b)
    {
        return a.colPivHouseholderQr().solve(b);
    }

    inline int numerical_rank(const Mat &a, double rel_tol = 1e-9)
    {
        Eigen::JacobiSVD<Mat> svd(a);
        const auto &s = svd.singularValues();
        int r = 0;
        for (int k = 0; k < s.size(); ++k)
            if (s(k) > rel_tol * s(0))
                ++r;
        return r;
    }

    // Antenna positions in Cartesian coordinates: receive element at
    // (d cos th_r, d sin th_r sin ph_r, R + d sin th_r cos ph_r), transmit element at
    // (d cos th_t, 0, d sin th_t).
    inline double cartesian_distance(double range, double th_r, double th_t, double ph_r, double dr, double dt)
    {
        double xr = dr * std::cos(th_r), yr = dr * std::sin(th_r) * std::sin(ph_r), zr = range + dr * std::sin(th_r) * std::cos(ph_r);
        double xt = dt * std::cos(th_t), yt = 0.0, zt = dt * std::sin(th_t);
        return std::sqrt((xr - xt) * (xr - xt) + (yr - yt) * (yr - yt) + (zr - zt) * (zr - zt));
    }

    inline double nmse(const Mat &est, const Mat &truth)
    {
        return (est - truth).squaredNorm() / truth.squaredNorm();
    }
}
