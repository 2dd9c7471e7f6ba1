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

#include "xlmimo/channel.hpp"
#include "xlmimo/common.hpp"
#include "xlmimo/frontend.hpp"

#include <string>
#include <vector>

namespace xlmimo
{
    // How the coupling factor enters the shifted linear phases in the regression step.
    enum class EtaConvention
    {
        plain,         // xi = phi -/+ eta * nu, nu in meters
        spacing_scaled // xi = phi -/+ d * eta * nu
    };

    EtaConvention eta_convention_from_string(const std::string &name);
    const char *to_string(EtaConvention c);

    struct AsagmConfig
    {
        int q_xi = 320;
        int q_alpha = 7;
        double xi_lo = -1.0;
        double xi_hi = 1.0;
        double r_min = 10.0; // sets the curvature grid extent 1 / (2 r_min)
        int t_iter = 3;
        EtaConvention eta_convention = EtaConvention::plain;

        void validate() const;
    };

    struct ParamGrid
    {
        std::vector<double> xi;       // Q_xi points, uniform
        std::vector<double> alpha_rx; // Q_alpha points in [0, alpha_max]
        std::vector<double> alpha_tx; // Q_alpha points in [-alpha_max, 0]

        int q_xi() const { return int(xi.size()); }
        int q_alpha() const { return int(alpha_rx.size()); }
    };

    ParamGrid make_param_grid(const AsagmConfig &cfg);

    /// Normalized whitened effective steering vector of one subarray. Receive side:
    /// L_i^{-1} W_i^H (slice of a_r); transmit side: F_j^H (slice of a_t). Index is 1-based.
    /// Pass an empty whitener for the transmit side.
    ComplexVector effective_steering(Side side, int subarray, const HybridFrontend &fe, const ComplexMatrix &whitener,
                                     const SteeringParams &params);

    /// |a_r^H Ybar a_t|
    double gain_metric(const ComplexMatrix &ybar, const ComplexVector &a_rx, const ComplexVector &a_tx);

    struct AsagmState
    {
        std::vector<int> xi_rx; // K_t grid indices (one shifted receive phase per transmit subarray)
        std::vector<int> xi_tx; // K_r grid indices (one shifted transmit phase per receive subarray)
        int alpha_rx = 0;
        int alpha_tx = 0;
        double objective = 0.0;
    };

    // Precomputed per-trial quantities: whitened blocks and effective steering tables for
    // every grid point. Table column index is alpha_index * Q_xi + xi_index.
    class AsagmProblem
    {
    public:
        AsagmProblem(const ComplexMatrix &y, const HybridFrontend &fe, const ParamGrid &grid);

        const HybridFrontend &frontend() const { return *fe_; }
        const ParamGrid &grid() const { return *grid_; }
        int k_rx() const { return k_rx_; }
        int k_tx() const { return k_tx_; }

        const ComplexMatrix &block(int i, int j) const { return blocks_[std::size_t(i * k_tx_ + j)]; }
        const ComplexMatrix &rx_table(int i) const { return rx_tables_[std::size_t(i)]; }
        const ComplexMatrix &tx_table(int j) const { return tx_tables_[std::size_t(j)]; }
        const std::vector<ComplexMatrix> &whiteners() const { return whiteners_; }

        /// Sum over all blocks of the bilinear gain metric at the given state.
        double objective(const AsagmState &s) const;

    private:
        const HybridFrontend *fe_;
        const ParamGrid *grid_;
        int k_rx_, k_tx_;
        std::vector<ComplexMatrix> whiteners_;
        std::vector<ComplexMatrix> blocks_;
        std::vector<ComplexMatrix> rx_tables_;
        std::vector<ComplexMatrix> tx_tables_;
    };

    struct StepStats
    {
        OpCounters counters;
        bool reverted = false; // new estimates lost to rounding against the old ones and were discarded
    };

    /// Receive half-step. With energy_metric the transmit estimates are ignored and each
    /// block is scored by ||a_r^H Ybar_ij||.
    StepStats asagm_receive_step(AsagmState &state, const AsagmProblem &prob, bool energy_metric = false);

    /// Transmit half-step (mirror of the receive step).
    StepStats asagm_transmit_step(AsagmState &state, const AsagmProblem &prob);

    struct LinearFit
    {
        double phi_rx = 0.0;
        double phi_tx = 0.0;
        double eta = 0.0;
        bool eta_identifiable = true;
    };

    /// Least-squares fit of xi_tx[i] = phi_tx + s eta nu_rx[i], xi_rx[j] = phi_rx - s eta nu_tx[j].
    LinearFit fit_linear_params(const std::vector<double> &xi_rx, const std::vector<double> &xi_tx,
                                const std::vector<double> &nu_rx, const std::vector<double> &nu_tx, double scale = 1.0);

    /// Scalar LS gain of Y against W^H (a_r a_t^H (.) Lambda(eta)) F
    Complex fit_gain(const ComplexMatrix &y, const HybridFrontend &fe, const TransformedParams &p);

    struct LosEstimate
    {
        TransformedParams params;
        Complex gain = 0.0;
        ComplexMatrix channel;
        AsagmState state;
        std::vector<double> objective_trace; // after every half-step from the first transmit step on
        bool eta_identifiable = true;
        int reverted_steps = 0;
        OpCounters counters;
    };

    LosEstimate estimate_los(const ComplexMatrix &y, const HybridFrontend &fe, const AsagmConfig &cfg);
    LosEstimate estimate_los(const AsagmProblem &prob, const ComplexMatrix &y, const AsagmConfig &cfg);
}
