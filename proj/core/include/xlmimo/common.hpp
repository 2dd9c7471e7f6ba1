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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace xlmimo
{
    using Complex = std::complex<double>;

    // Column-major storage, so vec(X) is the raw buffer of X.
    using ComplexMatrix = Eigen::MatrixXcd;
    using ComplexVector = Eigen::VectorXcd;

    inline constexpr double pi = 3.141592653589793238462643383279502884;
    inline constexpr double speed_of_light = 3.0e8;

    enum class ErrorKind
    {
        not_positive_definite,
        rank_deficient,
        dimension_mismatch,
        index_out_of_range,
        search_failed,
        config_invalid,
        zero_vector,
        zero_regressor,
        zero_truth,
        scale_refused,
        io_error,
        precondition
    };

    const char *to_string(ErrorKind kind);

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what)
            : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    // Work counters matching the growth laws of the complexity comparison.
    struct OpCounters
    {
        std::uint64_t metric_evals = 0;          // array-gain metric evaluations (grid searches)
        std::uint64_t sensing_column_evals = 0;  // sensing-column correlations (OMP/SOMP)

        OpCounters &operator+=(const OpCounters &o)
        {
            metric_evals += o.metric_evals;
            sensing_column_evals += o.sensing_column_evals;
            return *this;
        }
        std::uint64_t total() const { return metric_evals + sensing_column_evals; }
    };
}
