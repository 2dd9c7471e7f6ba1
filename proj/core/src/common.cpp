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

#include "xlmimo/common.hpp"

namespace xlmimo
{
    const char *to_string(ErrorKind kind)
    {
        switch (kind)
        {
        case ErrorKind::not_positive_definite:
            return "NotPositiveDefinite";
        case ErrorKind::rank_deficient:
            return "RankDeficient";
        case ErrorKind::dimension_mismatch:
            return "DimensionMismatch";
        case ErrorKind::index_out_of_range:
            return "IndexOutOfRange";
        case ErrorKind::search_failed:
            return "SearchFailed";
        case ErrorKind::config_invalid:
            return "ConfigInvalid";
        case ErrorKind::zero_vector:
            return "ZeroVector";
        case ErrorKind::zero_regressor:
            return "ZeroRegressor";
        case ErrorKind::zero_truth:
            return "ZeroTruth";
        case ErrorKind::scale_refused:
            return "ScaleRefused";
        case ErrorKind::io_error:
            return "IoError";
        case ErrorKind::precondition:
            return "PreconditionViolated";
        }
        return "Unknown";
    }
}
