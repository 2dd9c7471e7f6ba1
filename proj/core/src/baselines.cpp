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

#include "xlmimo/baselines.hpp"
#include "xlmimo/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace xlmimo
{
    namespace
    {
        ComplexMatrix reconstruct(const NlosDictionaries &dicts, const SideSensing &ups, const OmpResult &o, int n_rx, int n_tx)
        {
            if (o.support.size() == 0)
                return ComplexMatrix::Zero(n_rx, n_tx);
            const int qr = int(ups.rx.cols());
            std::vector<std::pair<int, int>> atoms;
            for (int k : o.support.indices)
                atoms.emplace_back(k % qr, k / qr);
            return invec(synthesis_columns(dicts.rx, dicts.tx, atoms) * o.coeffs, n_rx, n_tx);
        }

        // indices of the `count` grid points nearest to `value`, clamped to the grid
        std::vector<int> neighborhood_indices(const std::vector<double> &g, double value, int count)
        {
            int best = 0;
            for (int k = 1; k < int(g.size()); ++k)
                if (std::abs(g[std::size_t(k)] - value) < std::abs(g[std::size_t(best)] - value))
                    best = k;
            const int n = std::min(count, int(g.size()));
            int lo = std::clamp(best - n / 2, 0, int(g.size()) - n);
            std::vector<int> idx(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k)
                idx[std::size_t(k)] = lo + k;
            return idx;
        }

        std::vector<double> uniform(int q, double lo, double hi)
        {
            std::vector<double> v(std::size_t(q), 0.5 * (lo + hi));
            if (q > 1)
                for (int k = 0; k < q; ++k)
                    v[std::size_t(k)] = lo + (hi - lo) * double(k) / double(q - 1);
            return v;
        }
    }

    OmpResult joint_omp(const ComplexMatrix &ybar, const SideSensing &ups, int sparsity, OpCounters *counters)
    {
        const Eigen::Index qr = ups.rx.cols(), qt = ups.tx.cols();
        if (double(sparsity) * double(qr) * double(qt) > joint_omp_guard)
            throw Error(ErrorKind::scale_refused, "joint-dictionary OMP exceeds the column evaluation guard");
        if (ybar.rows() != ups.rx.rows() || ybar.cols() != ups.tx.rows())
            throw Error(ErrorKind::dimension_mismatch, "joint_omp: observation does not match the sensing matrices");

        Eigen::VectorXd inv_r(qr), inv_t(qt);
        for (Eigen::Index a = 0; a < qr; ++a)
            inv_r[a] = 1.0 / ups.rx.col(a).norm();
        for (Eigen::Index b = 0; b < qt; ++b)
            inv_t[b] = 1.0 / ups.tx.col(b).norm();

        // u_a^H R v_b for all atoms at once, column-major over (a, b)
        auto correlate = [&](const ComplexVector &r) -> Eigen::VectorXd
        {
            ComplexMatrix c = ups.rx.adjoint() * invec(r, ybar.rows(), ybar.cols()) * ups.tx;
            Eigen::VectorXd s(qr * qt);
            for (Eigen::Index b = 0; b < qt; ++b)
                for (Eigen::Index a = 0; a < qr; ++a)
                    s[b * qr + a] = std::abs(c(a, b)) * inv_r[a] * inv_t[b];
            return s;
        };
        auto column = [&](int k) -> ComplexVector { return sensing_column(ups.rx, ups.tx, int(k % qr), int(k / qr)); };

        OmpOptions opt;
        opt.max_iterations = sparsity;
        return omp_generic(vec(ybar), int(qr * qt), correlate, column, opt, counters);
    }

    BaselineResult joint_omp_estimate(const ComplexMatrix &y, const HybridFrontend &fe, const NlosDictionaries &dicts,
                                      int sparsity)
    {
        if (sparsity < 0)
            throw Error(ErrorKind::precondition, "sparsity must be nonnegative");
        if (y.rows() != fe.m_rx() || y.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");
        if (double(sparsity) * double(dicts.rx.size()) * double(dicts.tx.size()) > joint_omp_guard)
            throw Error(ErrorKind::scale_refused, "joint-dictionary OMP exceeds the column evaluation guard");

        BaselineResult res;
        if (sparsity == 0)
        {
            res.channel = ComplexMatrix::Zero(fe.config.n_rx, fe.config.n_tx);
            return res;
        }
        auto wh = combiner_whiteners(fe);
        SideSensing ups = make_side_sensing(fe, wh, dicts.rx, dicts.tx);
        OmpResult o = joint_omp(whiten_rows(y, fe, wh), ups, sparsity, &res.counters);
        res.channel = reconstruct(dicts, ups, o, fe.config.n_rx, fe.config.n_tx);
        return res;
    }

    BaselineResult genie_ls_estimate(const ComplexMatrix &y, const HybridFrontend &fe, const GenieInfo &genie)
    {
        if (y.rows() != fe.m_rx() || y.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");
        const ArrayConfig &c = fe.config;
        std::vector<ComplexMatrix> structures;
        structures.push_back(parabolic_channel(c, transform(genie.geom), 1.0));
        for (const auto &p : genie.paths.paths)
            structures.push_back(steering_vector(c, Side::rx, p.rx) * steering_vector(c, Side::tx, p.tx).adjoint());

        auto wh = combiner_whiteners(fe);
        ComplexMatrix a(y.size(), Eigen::Index(structures.size()));
        for (std::size_t k = 0; k < structures.size(); ++k)
            a.col(Eigen::Index(k)) = vec(whiten_rows(project(fe, structures[k]), fe, wh));
        ComplexVector g = least_squares(a, vec(whiten_rows(y, fe, wh)));

        BaselineResult res;
        res.channel = ComplexMatrix::Zero(c.n_rx, c.n_tx);
        for (std::size_t k = 0; k < structures.size(); ++k)
            res.channel += g[Eigen::Index(k)] * structures[k];
        return res;
    }

    void GeoGrid::validate() const
    {
        if (elev_rx.empty() || elev_tx.empty() || azim_rx.empty() || range.empty())
            throw Error(ErrorKind::config_invalid, "geometric grids must be nonempty");
        for (double r : range)
            if (!(r > 0.0))
                throw Error(ErrorKind::config_invalid, "range grid must be positive");
    }

    GeoGrid make_geo_grid(int q_angle, int q_range, double angle_lo, double angle_hi, double range_lo, double range_hi)
    {
        if (q_angle < 1 || q_range < 1 || angle_hi < angle_lo || range_hi < range_lo || !(range_lo > 0.0))
            throw Error(ErrorKind::config_invalid, "invalid geometric grid");
        GeoGrid g;
        g.elev_rx = uniform(q_angle, angle_lo, angle_hi);
        g.elev_tx = g.elev_rx;
        g.azim_rx = g.elev_rx;
        g.range = uniform(q_range, range_lo, range_hi);
        return g;
    }

    PeResult genie_pe_los(const ComplexMatrix &y, const HybridFrontend &fe, const GeoGrid &grid, const SceneGeometry &truth,
                          int neighborhood)
    {
        grid.validate();
        if (neighborhood < 1 || neighborhood % 2 == 0)
            throw Error(ErrorKind::precondition, "neighborhood must be odd and positive");
        if (y.rows() != fe.m_rx() || y.cols() != fe.m_tx())
            throw Error(ErrorKind::dimension_mismatch, "observation does not match the frontend");

        const auto i_er = neighborhood_indices(grid.elev_rx, truth.elev_rx, neighborhood);
        const auto i_et = neighborhood_indices(grid.elev_tx, truth.elev_tx, neighborhood);
        const auto i_az = neighborhood_indices(grid.azim_rx, truth.azim_rx, neighborhood);
        const auto i_r = neighborhood_indices(grid.range, truth.range_m, neighborhood);

        PeResult res;
        double best = -1.0;
        for (int r : i_r)
            for (int az : i_az)
                for (int et : i_et)
                    for (int er : i_er)
                    {
                        SceneGeometry g;
                        g.range_m = grid.range[std::size_t(r)];
                        g.elev_rx = grid.elev_rx[std::size_t(er)];
                        g.elev_tx = grid.elev_tx[std::size_t(et)];
                        g.azim_rx = grid.azim_rx[std::size_t(az)];
                        ComplexMatrix b = project(fe, parabolic_channel(fe.config, transform(g), 1.0));
                        const double nb = b.squaredNorm();
                        const Complex ip = inner(b, y);
                        const double metric = nb > 0.0 ? std::norm(ip) / nb : 0.0;
                        res.counters.metric_evals += 1;
                        if (metric > best)
                        {
                            best = metric;
                            g.los_gain = nb > 0.0 ? ip / nb : Complex(0.0);
                            res.geom = g;
                        }
                    }
        res.channel = parabolic_channel(fe.config, transform(res.geom), res.geom.los_gain);
        return res;
    }

    BaselineResult genie_pe_estimate(const ComplexMatrix &y, const HybridFrontend &fe, const GeoGrid &grid,
                                     const GenieInfo &genie, int neighborhood, const NlosDictionaries &dicts)
    {
        PeResult pe = genie_pe_los(y, fe, grid, genie.geom, neighborhood);
        BaselineResult res;
        res.counters += pe.counters;
        res.channel = pe.channel;

        const int l = int(genie.paths.paths.size());
        if (l == 0)
            return res;
        ComplexMatrix resid = y - project(fe, pe.channel);
        if (double(l) * double(dicts.rx.size()) * double(dicts.tx.size()) <= joint_omp_guard)
        {
            BaselineResult nl = joint_omp_estimate(resid, fe, dicts, l);
            res.channel += nl.channel;
            res.counters += nl.counters;
        }
        else
        {
            NlosConfig cfg;
            cfg.q_angle = dicts.rx.q_angle;
            cfg.q_curv = dicts.rx.q_curv;
            cfg.l_rx = l;
            cfg.l_tx = l;
            NlosEstimate nl = estimate_nlos(resid, fe, ComplexMatrix(), dicts, cfg);
            res.channel += nl.channel;
            res.counters += nl.counters;
        }
        return res;
    }
}
