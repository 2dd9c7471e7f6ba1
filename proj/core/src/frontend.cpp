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

#include "xlmimo/frontend.hpp"
#include "xlmimo/numerics.hpp"

#include <cmath>
#include <string>

namespace xlmimo
{
    ModulusConvention modulus_from_string(const std::string &name)
    {
        if (name == "inv_sqrt_n")
            return ModulusConvention::inv_sqrt_n;
        if (name == "inv_n")
            return ModulusConvention::inv_n;
        throw Error(ErrorKind::config_invalid, "unknown modulus convention '" + name + "'");
    }

    const char *to_string(ModulusConvention m)
    {
        return m == ModulusConvention::inv_n ? "inv_n" : "inv_sqrt_n";
    }

    namespace
    {
        ComplexMatrix block_diagonal(const std::vector<ComplexMatrix> &blocks)
        {
            Eigen::Index rows = 0, cols = 0;
            for (const auto &b : blocks)
            {
                rows += b.rows();
                cols += b.cols();
            }
            ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
            Eigen::Index r = 0, c = 0;
            for (const auto &b : blocks)
            {
                out.block(r, c, b.rows(), b.cols()) = b;
                r += b.rows();
                c += b.cols();
            }
            return out;
        }

        ComplexMatrix phase_block(Rng &rng, int n, int m, double modulus)
        {
            ComplexMatrix b(n, m);
            for (int col = 0; col < m; ++col)
                for (int row = 0; row < n; ++row)
                    b(row, col) = modulus * rng.unit_phase();
            return b;
        }
    }

    ComplexMatrix HybridFrontend::combiner() const
    {
        return block_diagonal(combiner_blocks);
    }

    ComplexMatrix HybridFrontend::precoder() const
    {
        return block_diagonal(precoder_blocks);
    }

    HybridFrontend build_frontend(const ArrayConfig &config, Rng &rng, int m_rx_per_sub, int m_tx_per_sub, ModulusConvention modulus)
    {
        config.validate();
        if (m_rx_per_sub < 1 || m_tx_per_sub < 1)
            throw Error(ErrorKind::config_invalid, "at least one beam per subarray is required");

        HybridFrontend fe;
        fe.config = config;
        fe.m_rx_per_sub = m_rx_per_sub;
        fe.m_tx_per_sub = m_tx_per_sub;

        const int nrs = config.subarray_size(Side::rx), nts = config.subarray_size(Side::tx);
        const double mod_r = modulus == ModulusConvention::inv_n ? 1.0 / nrs : 1.0 / std::sqrt(double(nrs));
        const double mod_t = modulus == ModulusConvention::inv_n ? 1.0 / nts : 1.0 / std::sqrt(double(nts));
        for (int i = 0; i < config.k_rx; ++i)
            fe.combiner_blocks.push_back(phase_block(rng, nrs, m_rx_per_sub, mod_r));
        for (int j = 0; j < config.k_tx; ++j)
            fe.precoder_blocks.push_back(phase_block(rng, nts, m_tx_per_sub, mod_t));
        return fe;
    }

    ComplexMatrix project(const HybridFrontend &fe, const ComplexMatrix &x)
    {
        const auto &c = fe.config;
        if (x.rows() != c.n_rx || x.cols() != c.n_tx)
            throw Error(ErrorKind::dimension_mismatch, "channel does not match the array configuration");
        const int nrs = c.subarray_size(Side::rx), nts = c.subarray_size(Side::tx);
        const int mrs = fe.m_rx_per_sub, mts = fe.m_tx_per_sub;

        ComplexMatrix y(fe.m_rx(), fe.m_tx());
        for (int i = 0; i < c.k_rx; ++i)
        {
            // rows of subarray i combined first, then each transmit subarray
            ComplexMatrix wx = fe.combiner_blocks[i].adjoint() * x.middleRows(i * nrs, nrs);
            for (int j = 0; j < c.k_tx; ++j)
                y.block(i * mrs, j * mts, mrs, mts) = wx.middleCols(j * nts, nts) * fe.precoder_blocks[j];
        }
        return y;
    }

    ComplexMatrix receive_with_noise(const HybridFrontend &fe, const ComplexMatrix &h, const ComplexMatrix &noise)
    {
        const auto &c = fe.config;
        if (noise.rows() != c.n_rx || noise.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "noise must be N_r x M_t");
        ComplexMatrix y = project(fe, h);
        const int nrs = c.subarray_size(Side::rx), mrs = fe.m_rx_per_sub;
        for (int i = 0; i < c.k_rx; ++i)
            y.middleRows(i * mrs, mrs) += fe.combiner_blocks[i].adjoint() * noise.middleRows(i * nrs, nrs);
        return y;
    }

    ComplexMatrix receive(const HybridFrontend &fe, const ComplexMatrix &h, Rng &rng, double noise_var)
    {
        ComplexMatrix noise = ComplexMatrix::Zero(fe.config.n_rx, fe.m_tx());
        if (noise_var > 0.0)
            for (Eigen::Index col = 0; col < noise.cols(); ++col)
                for (Eigen::Index row = 0; row < noise.rows(); ++row)
                    noise(row, col) = rng.complex_normal(noise_var);
        return receive_with_noise(fe, h, noise);
    }

    ComplexMatrix subarray_block(const ComplexMatrix &y, const HybridFrontend &fe, int i, int j)
    {
        if (i < 1 || i > fe.config.k_rx || j < 1 || j > fe.config.k_tx)
            throw Error(ErrorKind::index_out_of_range, "subarray block (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        if (y.rows() != fe.m_rx() || y.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");
        return y.block((i - 1) * fe.m_rx_per_sub, (j - 1) * fe.m_tx_per_sub, fe.m_rx_per_sub, fe.m_tx_per_sub);
    }

    WhitenedObservation whiten(const ComplexMatrix &y_block, const ComplexMatrix &combiner_block, double noise_var)
    {
        if (y_block.rows() != combiner_block.cols())
            throw Error(ErrorKind::dimension_mismatch, "whiten: block rows must equal the combiner beam count");
        ComplexMatrix gram = combiner_block.adjoint() * combiner_block;
        gram = 0.5 * (gram + gram.adjoint()).eval();
        WhitenedObservation w;
        w.whitener = cholesky_lower(gram);
        w.data = lower_solve(w.whitener, y_block);
        w.noise_var = noise_var;
        return w;
    }

    std::vector<ComplexMatrix> combiner_whiteners(const HybridFrontend &fe)
    {
        std::vector<ComplexMatrix> out;
        for (const auto &w : fe.combiner_blocks)
        {
            ComplexMatrix gram = w.adjoint() * w;
            gram = 0.5 * (gram + gram.adjoint()).eval();
            out.push_back(cholesky_lower(gram));
        }
        return out;
    }

    ComplexMatrix whiten_rows(const ComplexMatrix &y, const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners)
    {
        if (y.rows() != fe.m_rx() || int(whiteners.size()) != fe.config.k_rx)
            throw Error(ErrorKind::dimension_mismatch, "whiten_rows");
        ComplexMatrix out(y.rows(), y.cols());
        const int mrs = fe.m_rx_per_sub;
        for (int i = 0; i < fe.config.k_rx; ++i)
            out.middleRows(i * mrs, mrs) = lower_solve(whiteners[i], y.middleRows(i * mrs, mrs));
        return out;
    }

    ComplexMatrix whitened_combiner(const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners)
    {
        const auto &c = fe.config;
        const int nrs = c.subarray_size(Side::rx), mrs = fe.m_rx_per_sub;
        ComplexMatrix out = ComplexMatrix::Zero(fe.m_rx(), c.n_rx);
        for (int i = 0; i < c.k_rx; ++i)
            out.block(i * mrs, i * nrs, mrs, nrs) = lower_solve(whiteners[i], fe.combiner_blocks[i].adjoint());
        return out;
    }
}
