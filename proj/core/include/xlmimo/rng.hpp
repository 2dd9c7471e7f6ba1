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

#include <cstdint>
#include <random>

namespace xlmimo
{
    // SplitMix64 finalizer; used to derive independent child seeds.
    std::uint64_t mix_seed(std::uint64_t x);
    std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

    // Seeded random source. Distributions are implemented here rather than through
    // <random> distributions so sequences are identical across standard libraries.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

        double uniform();                    // [0, 1)
        double uniform(double lo, double hi); // [lo, hi)
        double normal();                     // N(0, 1)
        Complex complex_normal(double variance); // CN(0, variance)
        Complex unit_phase();                // exp(j*U[0, 2pi))

        std::uint64_t next_u64() { return engine_(); }

    private:
        std::mt19937_64 engine_;
        bool has_spare_ = false;
        double spare_ = 0.0;
    };
}
