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

namespace xlmimo
{
    /// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
    /// A pivot that drops below 1e-10 of its diagonal entry is reported as
    /// ErrorKind::not_positive_definite (repeated or dependent beams).
    ComplexMatrix cholesky_lower(const ComplexMatrix &k);

    /// Solves L * X = B for lower-triangular L.
    ComplexMatrix lower_solve(const ComplexMatrix &l, const ComplexMatrix &b);

    /// Minimizer of ||A x - b||_2 via the normal equations.
    /// Throws ErrorKind::rank_deficient when A^H A is numerically singular.
    ComplexVector least_squares(const ComplexMatrix &a, const ComplexVector &b);

    /// Column-wise least squares for several right-hand sides
    ComplexMatrix least_squares_multi(const ComplexMatrix &a, const ComplexMatrix &b);

    /// vec(Wbar * X * F), i.e. (F^T kron Wbar) vec(X) without forming the Kronecker product.
    ComplexVector sandwich_apply(const ComplexMatrix &wbar, const ComplexMatrix &x, const ComplexMatrix &f);

    ComplexVector vec(const ComplexMatrix &x);
    ComplexMatrix invec(const ComplexVector &v, Eigen::Index rows, Eigen::Index cols);

    /// Hermitian inner product <a, b> = a^H b over the vectorized operands.
    Complex inner(const ComplexMatrix &a, const ComplexMatrix &b);

    /// Index of the largest entry; ties go to the smallest index.
    template <typename Vec>
    Eigen::Index argmax_first(const Vec &v)
    {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < v.size(); ++k)
            if (v[k] > v[best])
                best = k;
        return best;
    }
}
