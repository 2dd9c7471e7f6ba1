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

#include "xlmimo/los_estimator.hpp"
#include "xlmimo/numerics.hpp"

#include <cmath>

namespace xlmimo
{
    namespace
    {
        inline Complex dotc(const Complex *a, const Complex *b, Eigen::Index n)
        {
            Complex s = 0.0;
            for (Eigen::Index k = 0; k < n; ++k)
                s += std::conj(a[k]) * b[k];
            return s;
        }

        // y = A x, accumulated column by column
        ComplexVector matvec(const ComplexMatrix &a, const ComplexVector &x)
        {
            ComplexVector y = ComplexVector::Zero(a.rows());
            for (Eigen::Index c = 0; c < a.cols(); ++c)
                for (Eigen::Index r = 0; r < a.rows(); ++r)
                    y[r] += a(r, c) * x[c];
            return y;
        }

        // y = A^H x
        ComplexVector matvec_adj(const ComplexMatrix &a, const ComplexVector &x)
        {
            ComplexVector y(a.cols());
            for (Eigen::Index c = 0; c < a.cols(); ++c)
                y[c] = dotc(a.col(c).data(), x.data(), a.rows());
            return y;
        }

        std::vector<double> subarray_offsets(const ArrayConfig &config, Side side, int subarray)
        {
            auto all = element_offsets(config, side);
            const int ns = config.subarray_size(side);
            return {all.begin() + (subarray - 1) * ns, all.begin() + subarray * ns};
        }

        ComplexMatrix steering_table(Side side, int subarray, const HybridFrontend &fe, const ComplexMatrix &whitener,
                                     const ParamGrid &grid)
        {
            const auto &alphas = side == Side::rx ? grid.alpha_rx : grid.alpha_tx;
            const int qx = grid.q_xi(), qa = grid.q_alpha();
            const int m = side == Side::rx ? fe.m_rx_per_sub : fe.m_tx_per_sub;
            ComplexMatrix t(m, qx * qa);
            for (int a = 0; a < qa; ++a)
                for (int x = 0; x < qx; ++x)
                    t.col(a * qx + x) = effective_steering(side, subarray, fe, whitener, {grid.xi[std::size_t(x)], alphas[std::size_t(a)]});
            return t;
        }

        double sum_of(const std::vector<double> &v)
        {
            double s = 0.0;
            for (double x : v)
                s += x;
            return s;
        }
    }

    EtaConvention eta_convention_from_string(const std::string &name)
    {
        if (name == "plain")
            return EtaConvention::plain;
        if (name == "spacing_scaled")
            return EtaConvention::spacing_scaled;
        throw Error(ErrorKind::config_invalid, "unknown eta convention '" + name + "'");
    }

    const char *to_string(EtaConvention c)
    {
        return c == EtaConvention::plain ? "plain" : "spacing_scaled";
    }

    void AsagmConfig::validate() const
    {
        if (q_xi < 1 || q_alpha < 1)
            throw Error(ErrorKind::config_invalid, "grid sizes must be positive");
        if (!(xi_lo < xi_hi) && q_xi > 1)
            throw Error(ErrorKind::config_invalid, "xi range is empty");
        if (!(r_min > 0.0))
            throw Error(ErrorKind::config_invalid, "r_min must be positive");
        if (t_iter < 1)
            throw Error(ErrorKind::config_invalid, "t_iter must be at least 1");
    }

    ParamGrid make_param_grid(const AsagmConfig &cfg)
    {
        cfg.validate();
        ParamGrid g;
        const double mid = 0.5 * (cfg.xi_lo + cfg.xi_hi), half = 0.5 * (cfg.xi_hi - cfg.xi_lo);
        g.xi.resize(std::size_t(cfg.q_xi), mid);
        if (cfg.q_xi > 1)
            for (int k = 0; k < cfg.q_xi; ++k)
                g.xi[std::size_t(k)] = mid + half * double(2 * k - (cfg.q_xi - 1)) / double(cfg.q_xi - 1);

        const double amax = 1.0 / (2.0 * cfg.r_min);
        g.alpha_rx.resize(std::size_t(cfg.q_alpha), 0.0);
        g.alpha_tx.resize(std::size_t(cfg.q_alpha), 0.0);
        if (cfg.q_alpha > 1)
            for (int a = 0; a < cfg.q_alpha; ++a)
            {
                g.alpha_rx[std::size_t(a)] = amax * double(a) / double(cfg.q_alpha - 1);
                g.alpha_tx[std::size_t(a)] = -g.alpha_rx[std::size_t(a)];
            }
        return g;
    }

    ComplexVector effective_steering(Side side, int subarray, const HybridFrontend &fe, const ComplexMatrix &whitener,
                                     const SteeringParams &params)
    {
        const ArrayConfig &cfg = fe.config;
        if (subarray < 1 || subarray > cfg.subarrays(side))
            throw Error(ErrorKind::index_out_of_range, "subarray index out of range");
        ComplexVector s = steering_vector(subarray_offsets(cfg, side, subarray), cfg.wavelength(), params);
        ComplexVector e;
        if (side == Side::rx)
        {
            e = fe.combiner_blocks[std::size_t(subarray - 1)].adjoint() * s;
            if (whitener.size() != 0)
                e = lower_solve(whitener, e);
        }
        else
            e = fe.precoder_blocks[std::size_t(subarray - 1)].adjoint() * s;

        const double n = e.norm();
        if (n == 0.0)
            throw Error(ErrorKind::zero_vector, "effective steering vector vanishes");
        return e / n;
    }

    double gain_metric(const ComplexMatrix &ybar, const ComplexVector &a_rx, const ComplexVector &a_tx)
    {
        if (ybar.rows() != a_rx.size() || ybar.cols() != a_tx.size())
            throw Error(ErrorKind::dimension_mismatch, "gain_metric dimensions");
        ComplexVector z = matvec(ybar, a_tx);
        return std::abs(dotc(a_rx.data(), z.data(), z.size()));
    }

    AsagmProblem::AsagmProblem(const ComplexMatrix &y, const HybridFrontend &fe, const ParamGrid &grid)
        : fe_(&fe), grid_(&grid), k_rx_(fe.config.k_rx), k_tx_(fe.config.k_tx)
    {
        if (y.rows() != fe.m_rx() || y.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");
        if (grid.xi.empty() || grid.alpha_rx.size() != grid.alpha_tx.size() || grid.alpha_rx.empty())
            throw Error(ErrorKind::config_invalid, "malformed parameter grid");

        whiteners_ = combiner_whiteners(fe);
        for (int i = 1; i <= k_rx_; ++i)
            for (int j = 1; j <= k_tx_; ++j)
                blocks_.push_back(lower_solve(whiteners_[std::size_t(i - 1)], subarray_block(y, fe, i, j)));
        for (int i = 1; i <= k_rx_; ++i)
            rx_tables_.push_back(steering_table(Side::rx, i, fe, whiteners_[std::size_t(i - 1)], grid));
        for (int j = 1; j <= k_tx_; ++j)
            tx_tables_.push_back(steering_table(Side::tx, j, fe, ComplexMatrix(), grid));
    }

    double AsagmProblem::objective(const AsagmState &s) const
    {
        const int qx = grid_->q_xi();
        double total = 0.0;
        for (int i = 0; i < k_rx_; ++i)
            for (int j = 0; j < k_tx_; ++j)
            {
                const ComplexMatrix &tr = rx_tables_[std::size_t(i)];
                const ComplexMatrix &tt = tx_tables_[std::size_t(j)];
                ComplexVector z = matvec(block(i, j), tt.col(s.alpha_tx * qx + s.xi_tx[std::size_t(i)]));
                total += std::abs(dotc(tr.col(s.alpha_rx * qx + s.xi_rx[std::size_t(j)]).data(), z.data(), z.size()));
            }
        return total;
    }

    StepStats asagm_receive_step(AsagmState &state, const AsagmProblem &prob, bool energy_metric)
    {
        const int qx = prob.grid().q_xi(), qa = prob.grid().q_alpha(), q = qx * qa;
        const int kr = prob.k_rx(), kt = prob.k_tx();
        if (int(state.xi_tx.size()) != kr || int(state.xi_rx.size()) != kt)
            throw Error(ErrorKind::dimension_mismatch, "state does not match the subarray counts");

        // best_x[j][a], best_v[j][a]: inner argmax over xi for each curvature candidate
        std::vector<std::vector<int>> best_x(static_cast<std::size_t>(kt), std::vector<int>(static_cast<std::size_t>(qa)));
        std::vector<double> totals(static_cast<std::size_t>(qa), 0.0);
        std::vector<double> score(static_cast<std::size_t>(q));

        for (int j = 0; j < kt; ++j)
        {
            std::fill(score.begin(), score.end(), 0.0);
            for (int i = 0; i < kr; ++i)
            {
                const ComplexMatrix &tr = prob.rx_table(i);
                if (energy_metric)
                {
                    ComplexMatrix p = tr.adjoint() * prob.block(i, j);
                    for (int k = 0; k < q; ++k)
                        score[std::size_t(k)] += p.row(k).norm();
                }
                else
                {
                    ComplexVector z = matvec(prob.block(i, j), prob.tx_table(j).col(state.alpha_tx * qx + state.xi_tx[std::size_t(i)]));
                    for (int k = 0; k < q; ++k)
                        score[std::size_t(k)] += std::abs(dotc(tr.col(k).data(), z.data(), z.size()));
                }
            }
            for (int a = 0; a < qa; ++a)
            {
                int bx = 0;
                double bv = score[std::size_t(a * qx)];
                for (int x = 1; x < qx; ++x)
                    if (score[std::size_t(a * qx + x)] > bv)
                        bv = score[std::size_t(a * qx + x)], bx = x;
                best_x[std::size_t(j)][std::size_t(a)] = bx;
                totals[std::size_t(a)] += bv;
            }
        }

        int ba = 0;
        for (int a = 1; a < qa; ++a)
            if (totals[std::size_t(a)] > totals[std::size_t(ba)])
                ba = a;

        StepStats st;
        st.counters.metric_evals += std::uint64_t(kr) * std::uint64_t(kt) * std::uint64_t(q);

        AsagmState next = state;
        next.alpha_rx = ba;
        for (int j = 0; j < kt; ++j)
            next.xi_rx[std::size_t(j)] = best_x[std::size_t(j)][std::size_t(ba)];
        next.objective = prob.objective(next);
        if (!energy_metric && next.objective < state.objective)
        {
            st.reverted = true;
            return st;
        }
        state = next;
        return st;
    }

    StepStats asagm_transmit_step(AsagmState &state, const AsagmProblem &prob)
    {
        const int qx = prob.grid().q_xi(), qa = prob.grid().q_alpha(), q = qx * qa;
        const int kr = prob.k_rx(), kt = prob.k_tx();
        if (int(state.xi_tx.size()) != kr || int(state.xi_rx.size()) != kt)
            throw Error(ErrorKind::dimension_mismatch, "state does not match the subarray counts");

        std::vector<std::vector<int>> best_x(static_cast<std::size_t>(kr), std::vector<int>(static_cast<std::size_t>(qa)));
        std::vector<double> totals(static_cast<std::size_t>(qa), 0.0);
        std::vector<double> score(static_cast<std::size_t>(q));

        for (int i = 0; i < kr; ++i)
        {
            std::fill(score.begin(), score.end(), 0.0);
            for (int j = 0; j < kt; ++j)
            {
                const ComplexMatrix &tt = prob.tx_table(j);
                ComplexVector w = matvec_adj(prob.block(i, j), prob.rx_table(i).col(state.alpha_rx * qx + state.xi_rx[std::size_t(j)]));
                for (int k = 0; k < q; ++k)
                    score[std::size_t(k)] += std::abs(dotc(tt.col(k).data(), w.data(), w.size()));
            }
            for (int a = 0; a < qa; ++a)
            {
                int bx = 0;
                double bv = score[std::size_t(a * qx)];
                for (int x = 1; x < qx; ++x)
                    if (score[std::size_t(a * qx + x)] > bv)
                        bv = score[std::size_t(a * qx + x)], bx = x;
                best_x[std::size_t(i)][std::size_t(a)] = bx;
                totals[std::size_t(a)] += bv;
            }
        }

        int ba = 0;
        for (int a = 1; a < qa; ++a)
            if (totals[std::size_t(a)] > totals[std::size_t(ba)])
                ba = a;

        StepStats st;
        st.counters.metric_evals += std::uint64_t(kr) * std::uint64_t(kt) * std::uint64_t(q);

        AsagmState next = state;
        next.alpha_tx = ba;
        for (int i = 0; i < kr; ++i)
            next.xi_tx[std::size_t(i)] = best_x[std::size_t(i)][std::size_t(ba)];
        next.objective = prob.objective(next);
        if (next.objective < state.objective)
        {
            st.reverted = true;
            return st;
        }
        state = next;
        return st;
    }

    LinearFit fit_linear_params(const std::vector<double> &xi_rx, const std::vector<double> &xi_tx,
                                const std::vector<double> &nu_rx, const std::vector<double> &nu_tx, double scale)
    {
        if (xi_rx.size() != nu_tx.size() || xi_tx.size() != nu_rx.size() || xi_rx.empty() || xi_tx.empty())
            throw Error(ErrorKind::dimension_mismatch, "regression inputs do not match the subarray counts");
        if (!(scale > 0.0))
            throw Error(ErrorKind::precondition, "regression scale must be positive");

        const double kr = double(xi_tx.size()), kt = double(xi_rx.size());
        const double mr = sum_of(nu_rx) / kr, mt = sum_of(nu_tx) / kt;
        const double xr = sum_of(xi_rx) / kt, xt = sum_of(xi_tx) / kr;

        LinearFit fit;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < xi_tx.size(); ++i)
            num += (nu_rx[i] - mr) * xi_tx[i], den += (nu_rx[i] - mr) * (nu_rx[i] - mr);
        for (std::size_t j = 0; j < xi_rx.size(); ++j)
            num -= (nu_tx[j] - mt) * xi_rx[j], den += (nu_tx[j] - mt) * (nu_tx[j] - mt);

        double c = 0.0;
        if (den == 0.0)
            fit.eta_identifiable = false;
        else
            c = num / den;
        fit.phi_tx = xt - c * mr;
        fit.phi_rx = xr + c * mt;
        fit.eta = c / scale;
        return fit;
    }

    Complex fit_gain(const ComplexMatrix &y, const HybridFrontend &fe, const TransformedParams &p)
    {
        ComplexMatrix b = project(fe, parabolic_channel(fe.config, p, 1.0));
        if (b.rows() != y.rows() || b.cols() != y.cols())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");
        const double nb = b.squaredNorm();
        if (nb == 0.0)
            throw Error(ErrorKind::zero_regressor, "gain regressor vanishes");
        return inner(b, y) / nb;
    }

    LosEstimate estimate_los(const ComplexMatrix &y, const HybridFrontend &fe, const AsagmConfig &cfg)
    {
        ParamGrid grid = make_param_grid(cfg);
        AsagmProblem prob(y, fe, grid);
        return estimate_los(prob, y, cfg);
    }

    LosEstimate estimate_los(const AsagmProblem &prob, const ComplexMatrix &y, const AsagmConfig &cfg)
    {
        cfg.validate();
        const HybridFrontend &fe = prob.frontend();
        const ParamGrid &grid = prob.grid();

        LosEstimate est;
        AsagmState &s = est.state;
        s.xi_rx.assign(std::size_t(prob.k_tx()), 0);
        s.xi_tx.assign(std::size_t(prob.k_rx()), 0);
        s.objective = prob.objective(s);

        auto account = [&](const StepStats &st, bool record)
        {
            est.counters += st.counters;
            est.reverted_steps += st.reverted ? 1 : 0;
            if (record)
                est.objective_trace.push_back(s.objective);
        };

        for (int t = 0; t < cfg.t_iter; ++t)
        {
            account(asagm_receive_step(s, prob, t == 0), t > 0);
            account(asagm_transmit_step(s, prob), true);
        }

        std::vector<double> xr, xt;
        for (int idx : s.xi_rx)
            xr.push_back(grid.xi[std::size_t(idx)]);
        for (int idx : s.xi_tx)
            xt.push_back(grid.xi[std::size_t(idx)]);
        const double scale = cfg.eta_convention == EtaConvention::plain ? 1.0 : fe.config.element_spacing();
        LinearFit fit = fit_linear_params(xr, xt, subarray_centroids(fe.config, Side::rx),
                                          subarray_centroids(fe.config, Side::tx), scale);

        est.params.phi_rx = fit.phi_rx;
        est.params.phi_tx = fit.phi_tx;
        est.params.alpha_rx = grid.alpha_rx[std::size_t(s.alpha_rx)];
        est.params.alpha_tx = grid.alpha_tx[std::size_t(s.alpha_tx)];
        est.params.eta = fit.eta;
        est.eta_identifiable = fit.eta_identifiable;
        est.gain = fit_gain(y, fe, est.params);
        est.channel = parabolic_channel(fe.config, est.params, est.gain);
        return est;
    }
}
