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

#include "xlmimo/rng.hpp"

#include <cmath>

namespace xlmimo
{
    std::uint64_t mix_seed(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream)
    {
        return mix_seed(mix_seed(parent) ^ (stream * 0xD6E8FEB86659FD93ULL + 0x632BE59BD9B4E019ULL));
    }

    double Rng::uniform()
    {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    double Rng::uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    // Box-Muller, caching the second variate
    double Rng::normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0)
            u1 = uniform();
        double u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * pi * u2);
        has_spare_ = true;
        return rad * std::cos(2.0 * pi * u2);
    }

    Complex Rng::complex_normal(double variance)
    {
        double s = std::sqrt(0.5 * variance);
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    Complex Rng::unit_phase()
    {
        return std::polar(1.0, 2.0 * pi * uniform());
    }
}
