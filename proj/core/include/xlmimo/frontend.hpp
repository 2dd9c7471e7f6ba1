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
#include "xlmimo/geometry.hpp"
#include "xlmimo/rng.hpp"

#include <string>
#include <vector>

namespace xlmimo
{
    enum class ModulusConvention
    {
        inv_sqrt_n, // entries 1/sqrt(N_s): unit-norm beams
        inv_n       // entries 1/N_s
    };

    ModulusConvention modulus_from_string(const std::string &name);
    const char *to_string(ModulusConvention m);

    // Partially connected analog combiner and precoder: each RF chain drives one subarray
    // through unit-modulus phase shifters, so the assembled matrices are block diagonal.
    struct HybridFrontend
    {
        ArrayConfig config;
        int m_rx_per_sub = 0;
        int m_tx_per_sub = 0;
        std::vector<ComplexMatrix> combiner_blocks; // K_r blocks, N_rs x M_rs
        std::vector<ComplexMatrix> precoder_blocks; // K_t blocks, N_ts x M_ts

        int m_rx() const { return config.k_rx * m_rx_per_sub; }
        int m_tx() const { return config.k_tx * m_tx_per_sub; }

        ComplexMatrix combiner() const; // N_r x M_r
        ComplexMatrix precoder() const; // N_t x M_t
    };

    HybridFrontend build_frontend(const ArrayConfig &config, Rng &rng, int m_rx_per_sub, int m_tx_per_sub,
                                  ModulusConvention modulus = ModulusConvention::inv_sqrt_n);

    /// W^H X F using the block structure
    ComplexMatrix project(const HybridFrontend &fe, const ComplexMatrix &x);

    /// Y = W^H H F + W^H N, N with i.i.d. CN(0, noise_var) entries
    ComplexMatrix receive(const HybridFrontend &fe, const ComplexMatrix &h, Rng &rng, double noise_var);

    /// Same with an explicit N_r x M_t noise realization
    ComplexMatrix receive_with_noise(const HybridFrontend &fe, const ComplexMatrix &h, const ComplexMatrix &noise);

    /// Block (i, j) of Y, 1-based subarray indices
    ComplexMatrix subarray_block(const ComplexMatrix &y, const HybridFrontend &fe, int i, int j);

    struct WhitenedObservation
    {
        ComplexMatrix data;     // L^{-1} Y
        ComplexMatrix whitener; // L with K = noise_var L L^H
        double noise_var = 0.0;
    };

    WhitenedObservation whiten(const ComplexMatrix &y_block, const ComplexMatrix &combiner_block, double noise_var);

    /// Cholesky factors L_i of W_i^H W_i, one per receive subarray
    std::vector<ComplexMatrix> combiner_whiteners(const HybridFrontend &fe);

    /// Row-wise application of blkdiag(L_i)^{-1}
    ComplexMatrix whiten_rows(const ComplexMatrix &y, const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners);

    /// blkdiag(L_i)^{-1} W^H, M_r x N_r
    ComplexMatrix whitened_combiner(const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners);
}
