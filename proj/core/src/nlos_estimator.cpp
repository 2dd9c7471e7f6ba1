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

#include "xlmimo/nlos_estimator.hpp"
#include "xlmimo/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace xlmimo
{
    namespace
    {
        Eigen::VectorXd inverse_column_norms(const ComplexMatrix &a)
        {
            Eigen::VectorXd v(a.cols());
            for (Eigen::Index k = 0; k < a.cols(); ++k)
            {
                const double n = a.col(k).norm();
                v[k] = n > 0.0 ? 1.0 / n : 0.0;
            }
            return v;
        }
    }

    bool SupportSet::contains(int k) const
    {
        return std::find(indices.begin(), indices.end(), k) != indices.end();
    }

    PolarDictionary build_polar_dictionary(const ArrayConfig &config, Side side, int q_angle, int q_curv, double r_min)
    {
        if (q_angle < 2 || q_curv < 1)
            throw Error(ErrorKind::config_invalid, "dictionary needs q_angle >= 2 and q_curv >= 1");
        if (!(r_min > 0.0))
            throw Error(ErrorKind::config_invalid, "dictionary r_min must be positive");
        config.validate();

        PolarDictionary d;
        d.side = side;
        d.q_angle = q_angle;
        d.q_curv = q_curv;
        d.columns.resize(config.antennas(side), Eigen::Index(q_angle) * q_curv);
        d.params.reserve(std::size_t(q_angle * q_curv));
        const double sign = side == Side::rx ? 1.0 : -1.0;
        for (int q = 0; q < q_angle; ++q)
        {
            const double phi = double(2 * q + 1 - q_angle) / double(q_angle);
            const double amax = (1.0 - phi * phi) / (2.0 * r_min);
            for (int c = 0; c < q_curv; ++c)
            {
                double alpha = q_curv > 1 ? amax * double(c) / double(q_curv - 1) : 0.0;
                SteeringParams p{phi, sign * alpha};
                d.params.push_back(p);
                d.columns.col(q * q_curv + c) = steering_vector(config, side, p);
            }
        }
        return d;
    }

    SompResult somp(const ComplexMatrix &y, const ComplexMatrix &sensing, int sparsity, OpCounters *counters)
    {
        if (y.rows() != sensing.rows())
            throw Error(ErrorKind::dimension_mismatch, "somp: observation and sensing rows differ");
        if (sparsity < 1 || sparsity > sensing.cols())
            throw Error(ErrorKind::precondition, "somp: sparsity out of range");

        SompResult res;
        const Eigen::VectorXd inv_norm = inverse_column_norms(sensing);
        const double vanish = 1e-13 * y.norm();
        ComplexMatrix r = y;
        ComplexMatrix sel(sensing.rows(), 0);
        res.coeffs.resize(0, y.cols());
        for (int it = 0; it < sparsity; ++it)
        {
            ComplexMatrix p = sensing.adjoint() * r;
            Eigen::VectorXd score = p.rowwise().norm().cwiseProduct(inv_norm);
            for (int k : res.support.indices)
                score[k] = -1.0;
            const int best = int(argmax_first(score));
            res.support.indices.push_back(best);
            if (counters)
                counters->sensing_column_evals += std::uint64_t(sensing.cols());

            sel.conservativeResize(Eigen::NoChange, sel.cols() + 1);
            sel.col(sel.cols() - 1) = sensing.col(best);
            if (r.norm() <= vanish)
            {
                // nothing left to explain: the index is padding and gets a zero coefficient
                res.coeffs.conservativeResize(res.coeffs.rows() + 1, Eigen::NoChange);
                res.coeffs.row(res.coeffs.rows() - 1).setZero();
            }
            else
            {
                res.coeffs = least_squares_multi(sel, y);
                r = y - sel * res.coeffs;
            }
            res.residual_norms.push_back(r.norm());
        }
        return res;
    }

    OmpResult omp_generic(const ComplexVector &y, int num_columns, const OmpCorrelator &correlate, const OmpColumn &column,
                          const OmpOptions &opt, OpCounters *counters)
    {
        if (num_columns < 1 || opt.max_iterations < 0)
            throw Error(ErrorKind::precondition, "omp: empty sensing matrix or negative iteration count");

        OmpResult res;
        const double ynorm = y.norm();
        const double vanish = 1e-13 * ynorm;
        ComplexVector r = y;
        ComplexMatrix sel(y.size(), 0);
        const int iters = std::min(opt.max_iterations, num_columns);
        for (int it = 0; it < iters; ++it)
        {
            const double rn = r.norm();
            if (rn <= vanish || rn < opt.stop_residual)
                break;
            Eigen::VectorXd score = correlate(r);
            if (score.size() != num_columns)
                throw Error(ErrorKind::dimension_mismatch, "omp: correlator returned the wrong length");
            for (int k : res.support.indices)
                score[k] = -1.0;
            const int best = int(argmax_first(score));
            res.support.indices.push_back(best);
            if (counters)
                counters->sensing_column_evals += std::uint64_t(num_columns);

            sel.conservativeResize(Eigen::NoChange, sel.cols() + 1);
            sel.col(sel.cols() - 1) = column(best);
            res.coeffs = least_squares(sel, y);
            r = y - sel * res.coeffs;
            res.residual_norms.push_back(r.norm());
        }
        if (res.support.indices.empty())
            res.coeffs.resize(0);
        return res;
    }

    OmpResult omp(const ComplexVector &y, const ComplexMatrix &sensing, const OmpOptions &opt, OpCounters *counters)
    {
        if (y.size() != sensing.rows())
            throw Error(ErrorKind::dimension_mismatch, "omp: observation and sensing rows differ");
        const Eigen::VectorXd inv_norm = inverse_column_norms(sensing);
        auto correlate = [&](const ComplexVector &r) -> Eigen::VectorXd
        {
            Eigen::VectorXd s(sensing.cols());
            for (Eigen::Index k = 0; k < sensing.cols(); ++k)
                s[k] = std::abs(sensing.col(k).dot(r)) * inv_norm[k];
            return s;
        };
        auto column = [&](int k) -> ComplexVector { return sensing.col(k); };
        return omp_generic(y, int(sensing.cols()), correlate, column, opt, counters);
    }

    SideSensing make_side_sensing(const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners,
                                  const PolarDictionary &d_rx, const PolarDictionary &d_tx)
    {
        if (d_rx.columns.rows() != fe.config.n_rx || d_tx.columns.rows() != fe.config.n_tx)
            throw Error(ErrorKind::dimension_mismatch, "dictionary length does not match the array");
        SideSensing s;
        s.rx = whitened_combiner(fe, whiteners) * d_rx.columns;
        s.tx = fe.precoder().adjoint() * d_tx.columns;
        return s;
    }

    std::pair<SupportSet, SupportSet> detect_side_supports(const ComplexMatrix &ybar, const SideSensing &sensing, int l_rx,
                                                           int l_tx, OpCounters *counters)
    {
        SupportSet rx = somp(ybar, sensing.rx, l_rx, counters).support;
        SupportSet tx = somp(ybar.adjoint(), sensing.tx, l_tx, counters).support;
        return {rx, tx};
    }

    ComplexVector sensing_column(const ComplexMatrix &ups_rx, const ComplexMatrix &ups_tx, int a, int b)
    {
        const Eigen::Index mr = ups_rx.rows(), mt = ups_tx.rows();
        ComplexVector v(mr * mt);
        for (Eigen::Index n = 0; n < mt; ++n)
        {
            const Complex ct = std::conj(ups_tx(n, b));
            for (Eigen::Index m = 0; m < mr; ++m)
                v[n * mr + m] = ups_rx(m, a) * ct;
        }
        return v;
    }

    ComplexMatrix refined_sensing(const ComplexMatrix &ups_rx, const ComplexMatrix &ups_tx, const SupportSet &rx,
                                  const SupportSet &tx)
    {
        if (rx.size() == 0 || tx.size() == 0)
            throw Error(ErrorKind::precondition, "refined_sensing: empty selection");
        const Eigen::Index lr = Eigen::Index(rx.size());
        ComplexMatrix s(ups_rx.rows() * ups_tx.rows(), lr * Eigen::Index(tx.size()));
        for (std::size_t bi = 0; bi < tx.size(); ++bi)
            for (std::size_t ai = 0; ai < rx.size(); ++ai)
            {
                const int a = rx.indices[ai], b = tx.indices[bi];
                if (a < 0 || a >= ups_rx.cols() || b < 0 || b >= ups_tx.cols())
                    throw Error(ErrorKind::index_out_of_range, "refined_sensing: support index out of range");
                s.col(Eigen::Index(bi) * lr + Eigen::Index(ai)) = sensing_column(ups_rx, ups_tx, a, b);
            }
        return s;
    }

    ComplexMatrix refined_sensing(const HybridFrontend &fe, const std::vector<ComplexMatrix> &whiteners,
                                  const ComplexMatrix &d_rx_sel, const ComplexMatrix &d_tx_sel)
    {
        if (d_rx_sel.rows() != fe.config.n_rx || d_tx_sel.rows() != fe.config.n_tx)
            throw Error(ErrorKind::dimension_mismatch, "refined_sensing: selection length does not match the array");
        ComplexMatrix ur = whitened_combiner(fe, whiteners) * d_rx_sel;
        ComplexMatrix ut = fe.precoder().adjoint() * d_tx_sel;
        SupportSet rx, tx;
        for (int a = 0; a < ur.cols(); ++a)
            rx.indices.push_back(a);
        for (int b = 0; b < ut.cols(); ++b)
            tx.indices.push_back(b);
        return refined_sensing(ur, ut, rx, tx);
    }

    ComplexMatrix synthesis_columns(const PolarDictionary &d_rx, const PolarDictionary &d_tx,
                                    const std::vector<std::pair<int, int>> &atoms)
    {
        const Eigen::Index nr = d_rx.columns.rows(), nt = d_tx.columns.rows();
        ComplexMatrix psi(nr * nt, Eigen::Index(atoms.size()));
        for (std::size_t k = 0; k < atoms.size(); ++k)
        {
            const auto &dr = d_rx.columns.col(atoms[k].first);
            const auto &dt = d_tx.columns.col(atoms[k].second);
            for (Eigen::Index n = 0; n < nt; ++n)
                psi.col(Eigen::Index(k)).segment(n * nr, nr) = dr * std::conj(dt[n]);
        }
        return psi;
    }

    Stopping stopping_from_string(const std::string &name)
    {
        if (name == "fixed")
            return Stopping::fixed;
        if (name == "residual")
            return Stopping::residual;
        throw Error(ErrorKind::config_invalid, "unknown stopping rule '" + name + "'");
    }

    const char *to_string(Stopping s)
    {
        return s == Stopping::fixed ? "fixed" : "residual";
    }

    void NlosConfig::validate() const
    {
        if (q_angle < 2 || q_curv < 1)
            throw Error(ErrorKind::config_invalid, "dictionary needs q_angle >= 2 and q_curv >= 1");
        if (!(r_min > 0.0))
            throw Error(ErrorKind::config_invalid, "dictionary r_min must be positive");
        if (l_rx < 1 || l_tx < 1)
            throw Error(ErrorKind::config_invalid, "sparsity levels must be positive");
    }

    NlosDictionaries build_dictionaries(const ArrayConfig &config, const NlosConfig &cfg)
    {
        cfg.validate();
        return {build_polar_dictionary(config, Side::rx, cfg.q_angle, cfg.q_curv, cfg.r_min),
                build_polar_dictionary(config, Side::tx, cfg.q_angle, cfg.q_curv, cfg.r_min)};
    }

    NlosEstimate estimate_nlos(const ComplexMatrix &y, const HybridFrontend &fe, const ComplexMatrix &h_los,
                               const NlosDictionaries &dicts, const NlosConfig &cfg, double noise_var)
    {
        cfg.validate();
        if (y.rows() != fe.m_rx() || y.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");

        ComplexMatrix y_nlos = h_los.size() == 0 ? y : ComplexMatrix(y - project(fe, h_los));
        auto whiteners = combiner_whiteners(fe);
        ComplexMatrix ybar = whiten_rows(y_nlos, fe, whiteners);
        SideSensing ups = make_side_sensing(fe, whiteners, dicts.rx, dicts.tx);

        NlosEstimate est;
        std::tie(est.rx_support, est.tx_support) = detect_side_supports(ybar, ups, cfg.l_rx, cfg.l_tx, &est.counters);
        ComplexMatrix refined = refined_sensing(ups.rx, ups.tx, est.rx_support, est.tx_support);

        OmpOptions opt;
        if (cfg.stopping == Stopping::fixed)
            opt.max_iterations = std::max(cfg.l_rx, cfg.l_tx);
        else
        {
            opt.max_iterations = cfg.l_rx * cfg.l_tx;
            opt.stop_residual = 1.1 * std::sqrt(double(y.size()) * noise_var);
        }
        OmpResult o = omp(vec(ybar), refined, opt, &est.counters);
        est.support = o.support;
        est.coeffs = o.coeffs;
        est.residual_norms = o.residual_norms;

        const int lr = int(est.rx_support.size());
        for (int k : est.support.indices)
            est.atoms.emplace_back(est.rx_support.indices[std::size_t(k % lr)], est.tx_support.indices[std::size_t(k / lr)]);

        if (est.atoms.empty())
            est.channel = ComplexMatrix::Zero(fe.config.n_rx, fe.config.n_tx);
        else
            est.channel = invec(synthesis_columns(dicts.rx, dicts.tx, est.atoms) * est.coeffs, fe.config.n_rx, fe.config.n_tx);
        return est;
    }
}
