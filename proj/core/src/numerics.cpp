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

#include "xlmimo/numerics.hpp"

#include <cmath>
#include <string>

namespace xlmimo
{
    ComplexMatrix cholesky_lower(const ComplexMatrix &k)
    {
        const Eigen::Index n = k.rows();
        if (n == 0 || k.cols() != n)
            throw Error(ErrorKind::dimension_mismatch, "cholesky_lower expects a square matrix");

        double scale = k.norm();
        if (!std::isfinite(scale))
            throw Error(ErrorKind::precondition, "cholesky_lower input is not finite");
        if ((k - k.adjoint()).norm() > 1e-10 * scale)
            throw Error(ErrorKind::precondition, "cholesky_lower input is not Hermitian");

        ComplexMatrix l = ComplexMatrix::Zero(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            double d = k(j, j).real();
            for (Eigen::Index p = 0; p < j; ++p)
                d -= std::norm(l(j, p));

            // Relative pivot test: cancellation down to 1e-10 of the diagonal means dependent columns
            if (!(d > 1e-10 * std::abs(k(j, j).real())))
                throw Error(ErrorKind::not_positive_definite, "pivot " + std::to_string(j) + " is not positive");

            double ljj = std::sqrt(d);
            l(j, j) = ljj;
            for (Eigen::Index i = j + 1; i < n; ++i)
            {
                Complex s = k(i, j);
                for (Eigen::Index p = 0; p < j; ++p)
                    s -= l(i, p) * std::conj(l(j, p));
                l(i, j) = s / ljj;
            }
        }
        return l;
    }

    ComplexMatrix lower_solve(const ComplexMatrix &l, const ComplexMatrix &b)
    {
        if (l.rows() != l.cols() || l.rows() != b.rows())
            throw Error(ErrorKind::dimension_mismatch, "lower_solve");
        ComplexMatrix x = b;
        const Eigen::Index n = l.rows();
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            for (Eigen::Index i = 0; i < n; ++i)
            {
                Complex s = x(i, c);
                for (Eigen::Index p = 0; p < i; ++p)
                    s -= l(i, p) * x(p, c);
                x(i, c) = s / l(i, i);
            }
        return x;
    }

    ComplexMatrix least_squares_multi(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.rows() != b.rows())
            throw Error(ErrorKind::dimension_mismatch, "least_squares: rows(A) != rows(B)");
        if (a.cols() == 0 || a.rows() < a.cols())
            throw Error(ErrorKind::rank_deficient, "least_squares: system is not overdetermined");

        ComplexMatrix gram = a.adjoint() * a;
        gram = 0.5 * (gram + gram.adjoint()).eval();
        ComplexMatrix rhs = a.adjoint() * b;

        ComplexMatrix l;
        try
        {
            l = cholesky_lower(gram);
        }
        catch (const Error &e)
        {
            if (e.kind() == ErrorKind::not_positive_definite)
                throw Error(ErrorKind::rank_deficient, "least_squares: columns are numerically dependent");
            throw;
        }

        // Forward then backward substitution with L and L^H
        ComplexMatrix y = lower_solve(l, rhs);
        const Eigen::Index n = l.rows();
        ComplexMatrix x(n, b.cols());
        for (Eigen::Index c = 0; c < b.cols(); ++c)
            for (Eigen::Index i = n - 1; i >= 0; --i)
            {
                Complex s = y(i, c);
                for (Eigen::Index p = i + 1; p < n; ++p)
                    s -= std::conj(l(p, i)) * x(p, c);
                x(i, c) = s / l(i, i);
            }
        return x;
    }

    ComplexVector least_squares(const ComplexMatrix &a, const ComplexVector &b)
    {
        return least_squares_multi(a, ComplexMatrix(b)).col(0);
    }

    ComplexVector sandwich_apply(const ComplexMatrix &wbar, const ComplexMatrix &x, const ComplexMatrix &f)
    {
        if (wbar.cols() != x.rows() || x.cols() != f.rows())
            throw Error(ErrorKind::dimension_mismatch, "sandwich_apply");
        ComplexMatrix y = wbar * x * f;
        return vec(y);
    }

    ComplexVector vec(const ComplexMatrix &x)
    {
        return Eigen::Map<const ComplexVector>(x.data(), x.size());
    }

    ComplexMatrix invec(const ComplexVector &v, Eigen::Index rows, Eigen::Index cols)
    {
        if (rows * cols != v.size())
            throw Error(ErrorKind::dimension_mismatch, "invec");
        return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
    }

    Complex inner(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.rows() != b.rows() || a.cols() != b.cols())
            throw Error(ErrorKind::dimension_mismatch, "inner");
        Complex s = 0.0;
        const Complex *pa = a.data();
        const Complex *pb = b.data();
        for (Eigen::Index k = 0; k < a.size(); ++k)
            s += std::conj(pa[k]) * pb[k];
        return s;
    }
}
