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

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace xlmimo
{
    // Steering vectors sampled on an (angle, curvature) grid. Column q * q_curv + c holds angle q
    // and curvature level c. Angles sit at the cell midpoints (2q + 1 - Q) / Q so that the aliased
    // pair -1 / +1 never appears twice.
    struct PolarDictionary
    {
        Side side = Side::rx;
        int q_angle = 0;
        int q_curv = 0;
        ComplexMatrix columns; // N x Q_D, unit-modulus entries
        std::vector<SteeringParams> params;

        int size() const { return int(columns.cols()); }
    };

    PolarDictionary build_polar_dictionary(const ArrayConfig &config, Side side, int q_angle, int q_curv, double r_min);

    struct SupportSet
    {
        std::vector<int> indices;

        std::size_t size() const { return indices.size(); }
        bool contains(int k) const;
    };

    struct SompResult
    {
        SupportSet support;
        ComplexMatrix coeffs; // |support| x cols(Y)
        std::vector<double> residual_norms;
    };

    /// Simultaneous OMP: selection by the row norms of sensing^H R scaled by the column norms,
    /// joint LS refit. Always returns `sparsity` distinct indices.
    SompResult somp(const ComplexMatrix &y, const ComplexMatrix &sensing, int sparsity, OpCounters *counters = nullptr);

    struct OmpOptions
    {
        int max_iterations = 1;
        double stop_residual = 0.0; // stop once ||r|| falls below this value
    };

    struct OmpResult
    {
        SupportSet support;
        ComplexVector coeffs;
        std::vector<double> residual_norms;
    };

    // Normalized correlation magnitudes |column_k^H r| / ||column_k|| for every candidate column
    using OmpCorrelator = std::function<Eigen::VectorXd(const ComplexVector &r)>;
    using OmpColumn = std::function<ComplexVector(int k)>;

    /// OMP over an implicit sensing matrix. Stops early when the residual vanishes.
    OmpResult omp_generic(const ComplexVector &y, int num_columns, const OmpCorrelator &correlate, const OmpColumn &column,
                          const OmpOptions &opt, OpCounters *counters = nullptr);

    OmpResult omp(const ComplexVector &y, const ComplexMatrix &sensing, const OmpOptions &opt, OpCounters *counters = nullptr);

    // Whitened per-side sensing matrices: rx = L^{-1} W^H D_r (M_r x Q_Dr), tx = F^H D_t (M_t x Q_Dt)
    struct SideSensing
    {
        ComplexMatrix rx;
        ComplexMatrix tx;
    };

    SideSensing make_side_sensing(const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners,
                                  const PolarDictionary &d_rx, const PolarDictionary &d_tx);

    /// Receive and transmit supports detected on the whitened observation and its adjoint.
    std::pair<SupportSet, SupportSet> detect_side_supports(const ComplexMatrix &ybar, const SideSensing &sensing, int l_rx,
                                                           int l_tx, OpCounters *counters = nullptr);

    /// vec(ups_rx[:, a] ups_tx[:, b]^H), the joint sensing column of atom (a, b)
    ComplexVector sensing_column(const ComplexMatrix &ups_rx, const ComplexMatrix &ups_tx, int a, int b);

    /// Joint sensing columns for all selected pairs; column bi * |rx| + ai pairs rx[ai] with tx[bi].
    ComplexMatrix refined_sensing(const ComplexMatrix &ups_rx, const ComplexMatrix &ups_tx, const SupportSet &rx,
                                  const SupportSet &tx);

    /// Same from explicit dictionary selections (N_r x L_r and N_t x L_t)
    ComplexMatrix refined_sensing(const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners,
                                  const ComplexMatrix &d_rx_sel, const ComplexMatrix &d_tx_sel);

    /// Columns conj(d_t) (x) d_r for each atom (dictionary index pairs)
    ComplexMatrix synthesis_columns(const PolarDictionary &d_rx, const PolarDictionary &d_tx,
                                    const std::vector<std::pair<int, int>> &atoms);

    enum class Stopping
    {
        fixed,
        residual
    };

    Stopping stopping_from_string(const std::string &name);
    const char *to_string(Stopping s);

    struct NlosConfig
    {
        int q_angle = 128;
        int q_curv = 7;
        double r_min = 5.0;
        int l_rx = 3;
        int l_tx = 3;
        Stopping stopping = Stopping::fixed;

        void validate() const;
    };

    struct NlosDictionaries
    {
        PolarDictionary rx;
        PolarDictionary tx;
    };

    NlosDictionaries build_dictionaries(const ArrayConfig &config, const NlosConfig &cfg);

    struct NlosEstimate
    {
        ComplexMatrix channel;
        SupportSet rx_support;
        SupportSet tx_support;
        SupportSet support;                     // into the refined joint dictionary
        std::vector<std::pair<int, int>> atoms; // (receive, transmit) dictionary index per support entry
        ComplexVector coeffs;
        std::vector<double> residual_norms;
        OpCounters counters;
    };

    /// Subtracts the projected LoS estimate (empty matrix = none) and recovers the NLoS part.
    /// noise_var is only used by the residual stopping rule.
    NlosEstimate estimate_nlos(const ComplexMatrix &y, const HybridFrontend &fe, const ComplexMatrix &h_los,
                               const NlosDictionaries &dicts, const NlosConfig &cfg, double noise_var = 0.0);
}
