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

#include "xlmimo/geometry.hpp"
#include "xlmimo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <string>

namespace xlmimo
{
    void ArrayConfig::validate() const
    {
        if (n_rx < 1 || n_tx < 1 || k_rx < 1 || k_tx < 1)
            throw Error(ErrorKind::config_invalid, "antenna and RF-chain counts must be positive");
        if (n_rx % k_rx != 0 || n_tx % k_tx != 0)
            throw Error(ErrorKind::config_invalid, "RF-chain count must divide the antenna count");
        if (!(carrier_freq > 0.0) || spacing < 0.0)
            throw Error(ErrorKind::config_invalid, "carrier frequency must be positive and spacing non-negative");
    }

    TransformedParams transform(const SceneGeometry &g)
    {
        TransformedParams p;
        p.phi_rx = std::sin(g.elev_rx) * std::cos(g.azim_rx);
        p.phi_tx = std::sin(g.elev_tx);
        p.alpha_rx = (1.0 - p.phi_rx * p.phi_rx) / (2.0 * g.range_m);
        p.alpha_tx = -(1.0 - p.phi_tx * p.phi_tx) / (2.0 * g.range_m);
        p.eta = std::cos(g.elev_rx) * std::cos(g.elev_tx) / g.range_m;
        return p;
    }

    double element_offset(const ArrayConfig &config, Side side, int index)
    {
        int n = config.antennas(side);
        if (index < 1 || index > n)
            throw Error(ErrorKind::index_out_of_range, "antenna index " + std::to_string(index));
        return (index - 0.5 * (n + 1)) * config.element_spacing();
    }

    double subarray_centroid(const ArrayConfig &config, Side side, int subarray)
    {
        int k = config.subarrays(side);
        if (subarray < 1 || subarray > k)
            throw Error(ErrorKind::index_out_of_range, "subarray index " + std::to_string(subarray));
        int ns = config.subarray_size(side);
        return 0.5 * double((2 * subarray - 1) * ns - config.antennas(side)) * config.element_spacing();
    }

    int subarray_of(const ArrayConfig &config, Side side, int index)
    {
        if (index < 1 || index > config.antennas(side))
            throw Error(ErrorKind::index_out_of_range, "antenna index " + std::to_string(index));
        return (index - 1) / config.subarray_size(side) + 1;
    }

    std::vector<double> element_offsets(const ArrayConfig &config, Side side)
    {
        std::vector<double> out(config.antennas(side));
        for (int m = 1; m <= config.antennas(side); ++m)
            out[m - 1] = element_offset(config, side, m);
        return out;
    }

    std::vector<double> subarray_centroids(const ArrayConfig &config, Side side)
    {
        std::vector<double> out(config.subarrays(side));
        for (int i = 1; i <= config.subarrays(side); ++i)
            out[i - 1] = subarray_centroid(config, side, i);
        return out;
    }

    namespace
    {
        struct Frame
        {
            double sr, cr, st, ct, sp, cp;

            Frame(double elev_rx, double elev_tx, double azim_rx)
                : sr(std::sin(elev_rx)), cr(std::cos(elev_rx)), st(std::sin(elev_tx)), ct(std::cos(elev_tx)),
                  sp(std::sin(azim_rx)), cp(std::cos(azim_rx)) {}

            TransformedParams params(double range) const
            {
                TransformedParams p;
                p.phi_rx = sr * cp;
                p.phi_tx = st;
                p.alpha_rx = (1.0 - p.phi_rx * p.phi_rx) / (2.0 * range);
                p.alpha_tx = -(1.0 - p.phi_tx * p.phi_tx) / (2.0 * range);
                p.eta = cr * ct / range;
                return p;
            }
        };

        // r - R computed as (r^2 - R^2) / (r + R)
        inline double excess(double range, const Frame &f, double dr, double dt)
        {
            double x = dr * f.sr * f.cp - dt * f.st;
            double y = dr * f.sr * f.sp;
            double z = dr * f.cr - dt * f.ct;
            double s = 2.0 * range * x + x * x + y * y + z * z;
            return s / (std::sqrt(range * range + s) + range);
        }
    }

    double exact_excess(double range, double elev_rx, double elev_tx, double azim_rx, double d_rx, double d_tx)
    {
        return excess(range, Frame(elev_rx, elev_tx, azim_rx), d_rx, d_tx);
    }

    double parabolic_excess(const TransformedParams &p, double dr, double dt)
    {
        return dr * dr * p.alpha_rx - dt * dt * p.alpha_tx + dr * p.phi_rx - dt * p.phi_tx - p.eta * dr * dt;
    }

    double sopm_excess(const TransformedParams &p, double dr, double dt, double nu_r, double nu_t)
    {
        return dr * dr * p.alpha_rx - dt * dt * p.alpha_tx + dr * (p.phi_rx - p.eta * nu_t) -
               dt * (p.phi_tx + p.eta * nu_r) + p.eta * nu_r * nu_t;
    }

    double parabolic_distance_expanded(double range, double elev_rx, double elev_tx, double azim_rx, double dr, double dt)
    {
        double a = dr * std::sin(elev_rx) * std::sin(azim_rx);
        double b = dr * std::cos(elev_rx) - dt * std::cos(elev_tx);
        return range + dr * std::sin(elev_rx) * std::cos(azim_rx) - dt * std::sin(elev_tx) + (a * a + b * b) / (2.0 * range);
    }

    double exact_distance(const ArrayConfig &config, const SceneGeometry &g, int m, int n)
    {
        double dr = element_offset(config, Side::rx, m);
        double dt = element_offset(config, Side::tx, n);
        return g.range_m + exact_excess(g.range_m, g.elev_rx, g.elev_tx, g.azim_rx, dr, dt);
    }

    double parabolic_distance(const ArrayConfig &config, const SceneGeometry &g, int m, int n)
    {
        double dr = element_offset(config, Side::rx, m);
        double dt = element_offset(config, Side::tx, n);
        return g.range_m + parabolic_excess(transform(g), dr, dt);
    }

    double sopm_distance(const ArrayConfig &config, const SceneGeometry &g, int m, int n)
    {
        double dr = element_offset(config, Side::rx, m);
        double dt = element_offset(config, Side::tx, n);
        double nu_r = subarray_centroid(config, Side::rx, subarray_of(config, Side::rx, m));
        double nu_t = subarray_centroid(config, Side::tx, subarray_of(config, Side::tx, n));
        return g.range_m + sopm_excess(transform(g), dr, dt, nu_r, nu_t);
    }

    double fraunhofer_distance(double aperture, double wavelength)
    {
        return 2.0 * aperture * aperture / wavelength;
    }

    double mimo_ard(const ArrayConfig &config)
    {
        return 4.0 * config.aperture(Side::rx) * config.aperture(Side::tx) / config.wavelength();
    }

    double sopd(const ArrayConfig &config)
    {
        return 4.0 * config.subarray_aperture(Side::rx) * config.subarray_aperture(Side::tx) / config.wavelength();
    }

    double lemma1_bound(const ArrayConfig &config, double range_m)
    {
        return pi * config.subarray_aperture(Side::rx) * config.subarray_aperture(Side::tx) /
               (2.0 * range_m * config.wavelength());
    }

    // ------------------------------------------------------------------------
    // Worst case over the angle box
    // ------------------------------------------------------------------------

    namespace
    {
        enum class Level
        {
            coarse,
            fine,
            full
        };

        struct PairValue
        {
            double value = -1.0;
            int m = 1;
            int n = 1;
        };

        using AngleObjective = std::function<PairValue(const Frame &, Level)>;

        struct IndexSets
        {
            std::vector<int> coarse, fine, full;
        };

        std::vector<int> uniq(std::vector<int> v, int n)
        {
            std::set<int> s;
            for (int x : v)
                if (x >= 1 && x <= n)
                    s.insert(x);
            return {s.begin(), s.end()};
        }

        std::vector<int> all_indices(int n)
        {
            std::vector<int> v(n);
            std::iota(v.begin(), v.end(), 1);
            return v;
        }

        std::vector<int> strided(int n, int count)
        {
            std::vector<int> v;
            int stride = std::max(1, (n - 1) / std::max(1, count - 1));
            for (int m = 1; m <= n; m += stride)
                v.push_back(m);
            v.push_back(n);
            return v;
        }

        // Ends of the array, ends and middle of every subarray, plus a stride
        IndexSets subarray_indices(const ArrayConfig &config, Side side)
        {
            int n = config.antennas(side), ns = config.subarray_size(side);
            std::vector<int> c{1, n};
            for (int i = 0; i < config.subarrays(side); ++i)
            {
                c.push_back(i * ns + 1);
                c.push_back((i + 1) * ns);
                c.push_back(i * ns + (ns + 1) / 2);
            }
            IndexSets s;
            s.coarse = uniq(c, n);
            auto f = strided(n, 17);
            f.insert(f.end(), c.begin(), c.end());
            s.fine = uniq(f, n);
            s.full = all_indices(n);
            return s;
        }

        IndexSets plain_indices(int n)
        {
            IndexSets s;
            s.coarse = uniq({1, (n + 3) / 4, (n + 1) / 2, n / 2 + 1, (3 * n + 3) / 4, n}, n);
            s.fine = uniq(strided(n, 17), n);
            s.full = all_indices(n);
            return s;
        }

        const std::vector<int> &pick(const IndexSets &s, Level level)
        {
            return level == Level::coarse ? s.coarse : level == Level::fine ? s.fine : s.full;
        }

        struct AnglePoint
        {
            double a[3];
        };

        struct Candidate
        {
            PairValue pv;
            AnglePoint at;
        };

        double golden_max(const std::function<double(double)> &f, double lo, double hi, double &best_x, double best_val)
        {
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            double f1 = f(x1), f2 = f(x2);
            for (int it = 0; it < 40 && hi - lo > 1e-9; ++it)
            {
                if (f1 >= f2)
                {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = f(x1);
                }
                else
                {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = f(x2);
                }
            }
            double x = f1 >= f2 ? x1 : x2;
            double v = std::max(f1, f2);
            if (v > best_val)
            {
                best_x = x;
                return v;
            }
            return best_val;
        }

        // Coarse grid over [0, 2pi)^3, then coordinate-wise golden-section refinement of the
        // best cells, then an exhaustive pair scan at each refined point.
        Candidate maximize_over_angles(const AngleObjective &obj, const SearchOptions &opt)
        {
            const int g = std::max(4, opt.coarse_points);
            const double step = 2.0 * pi / g;
            const std::size_t cells = std::size_t(g) * g * g;
            std::vector<double> coarse(cells);

            parallel_for(
                std::size_t(g), [&](std::size_t a)
                {
                    for (int b = 0; b < g; ++b)
                        for (int c = 0; c < g; ++c)
                        {
                            Frame f(a * step, b * step, c * step);
                            coarse[(a * g + b) * g + c] = obj(f, Level::coarse).value;
                        } },
                opt.workers);

            std::vector<std::size_t> order(cells);
            std::iota(order.begin(), order.end(), 0);
            std::size_t top = std::min<std::size_t>(std::max(1, opt.refine_cells), cells);
            std::partial_sort(order.begin(), order.begin() + top, order.end(), [&](std::size_t x, std::size_t y)
                              { return coarse[x] > coarse[y] || (coarse[x] == coarse[y] && x < y); });

            std::vector<Candidate> refined(top);
            parallel_for(
                top, [&](std::size_t k)
                {
                    std::size_t cell = order[k];
                    AnglePoint p{{double(cell / (g * g)) * step, double((cell / g) % g) * step, double(cell % g) * step}};
                    auto eval = [&](const AnglePoint &q)
                    { return obj(Frame(q.a[0], q.a[1], q.a[2]), Level::fine).value; };
                    double best = eval(p);
                    double half = step;
                    for (int sweep = 0; sweep < opt.refine_sweeps; ++sweep)
                    {
                        for (int axis = 0; axis < 3; ++axis)
                        {
                            double x = p.a[axis];
                            auto line = [&](double t)
                            {
                                AnglePoint q = p;
                                q.a[axis] = t;
                                return eval(q);
                            };
                            best = golden_max(line, x - half, x + half, x, best);
                            p.a[axis] = x;
                        }
                        half *= 0.5;
                    }
                    refined[k].at = p;
                    refined[k].pv = obj(Frame(p.a[0], p.a[1], p.a[2]), Level::full); },
                opt.workers);

            Candidate best = refined[0];
            for (std::size_t k = 1; k < top; ++k)
                if (refined[k].pv.value > best.pv.value)
                    best = refined[k];
            return best;
        }

        WorstCase to_worst_case(const Candidate &c)
        {
            WorstCase w;
            w.value = c.pv.value;
            w.elev_rx = c.at.a[0];
            w.elev_tx = c.at.a[1];
            w.azim_rx = c.at.a[2];
            w.m = c.pv.m;
            w.n = c.pv.n;
            return w;
        }

        // Smallest R in [lo, hi] with ok(R), assuming ok is monotone in R
        double bisect_range(const std::function<bool(double)> &ok, const SearchOptions &opt, const char *what)
        {
            double lo = opt.range_lo, hi = opt.range_hi;
            if (!ok(hi))
                throw Error(ErrorKind::search_failed, std::string(what) + ": criterion not met within the search bracket");
            if (ok(lo))
                return lo;
            while (hi - lo > opt.tolerance_m)
            {
                double mid = 0.5 * (lo + hi);
                if (ok(mid))
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        }

        double wrap_angle(double a)
        {
            a = std::fmod(a, 2.0 * pi);
            return a < 0.0 ? a + 2.0 * pi : a;
        }
    }

    WorstCase parabolic_phase_error(const ArrayConfig &config, double range_m, const SearchOptions &opt)
    {
        config.validate();
        const auto dr = element_offsets(config, Side::rx);
        const auto dt = element_offsets(config, Side::tx);
        const IndexSets ir = plain_indices(config.n_rx), it = plain_indices(config.n_tx);
        const double k0 = 2.0 * pi / config.wavelength();

        AngleObjective obj = [&](const Frame &f, Level level)
        {
            TransformedParams p = f.params(range_m);
            PairValue best;
            for (int m : pick(ir, level))
                for (int n : pick(it, level))
                {
                    double e = std::abs(excess(range_m, f, dr[m - 1], dt[n - 1]) - parabolic_excess(p, dr[m - 1], dt[n - 1]));
                    if (e > best.value)
                        best = {e, m, n};
                }
            best.value *= k0;
            return best;
        };
        return to_worst_case(maximize_over_angles(obj, opt));
    }

    double parabolic_validity_distance(const ArrayConfig &config, const SearchOptions &opt)
    {
        config.validate();
        if (config.n_rx == 1 && config.n_tx == 1)
            return 0.0;
        return bisect_range([&](double r)
                            { return parabolic_phase_error(config, r, opt).value <= pi / 8.0; },
                            opt, "parabolic_validity_distance");
    }

    WorstCase power_uniformity(const ArrayConfig &config, double range_m, PowerMode mode, const SearchOptions &opt)
    {
        config.validate();
        const auto dr = element_offsets(config, Side::rx);
        const auto dt = element_offsets(config, Side::tx);
        const IndexSets ir = plain_indices(config.n_rx);
        const IndexSets it = mode == PowerMode::los ? plain_indices(config.n_tx) : IndexSets{};
        const double zero = 0.0;

        // The search maximizes non-uniformity 1 - (r_min / r_max)^2
        AngleObjective obj = [&](const Frame &f, Level level)
        {
            double rmin = 1e300, rmax = 0.0;
            int m_at = 1, n_at = 1;
            const auto &rows = pick(ir, level);
            if (mode == PowerMode::nlos)
            {
                for (int m : rows)
                {
                    double r = range_m + excess(range_m, f, dr[m - 1], zero);
                    rmin = std::min(rmin, r);
                    if (r > rmax)
                    {
                        rmax = r;
                        m_at = m;
                    }
                }
            }
            else
            {
                for (int m : rows)
                    for (int n : pick(it, level))
                    {
                        double r = range_m + excess(range_m, f, dr[m - 1], dt[n - 1]);
                        rmin = std::min(rmin, r);
                        if (r > rmax)
                        {
                            rmax = r;
                            m_at = m;
                            n_at = n;
                        }
                    }
            }
            double ratio = (rmin / rmax) * (rmin / rmax);
            return PairValue{1.0 - ratio, m_at, n_at};
        };

        SearchOptions o = opt;
        WorstCase w = to_worst_case(maximize_over_angles(obj, o));
        w.value = 1.0 - w.value;
        return w;
    }

    double uniform_power_distance(const ArrayConfig &config, double threshold, PowerMode mode, const SearchOptions &opt)
    {
        if (!(threshold > 0.0 && threshold <= 1.0))
            throw Error(ErrorKind::precondition, "uniform_power_distance threshold must lie in (0, 1]");
        return bisect_range([&](double r)
                            { return power_uniformity(config, r, mode, opt).value >= threshold; },
                            opt, "uniform_power_distance");
    }

    PhaseErrorReport lemma1_bruteforce(const ArrayConfig &config, double range_m, int grid_density, std::size_t workers)
    {
        config.validate();
        if (!(range_m > 0.0))
            throw Error(ErrorKind::precondition, "lemma1_bruteforce needs a positive range");

        const auto dr = element_offsets(config, Side::rx);
        const auto dt = element_offsets(config, Side::tx);
        std::vector<double> nu_r(config.n_rx), nu_t(config.n_tx);
        for (int m = 1; m <= config.n_rx; ++m)
            nu_r[m - 1] = subarray_centroid(config, Side::rx, subarray_of(config, Side::rx, m));
        for (int n = 1; n <= config.n_tx; ++n)
            nu_t[n - 1] = subarray_centroid(config, Side::tx, subarray_of(config, Side::tx, n));

        const IndexSets ir = subarray_indices(config, Side::rx), it = subarray_indices(config, Side::tx);
        const double k0 = 2.0 * pi / config.wavelength();

        AngleObjective obj = [&](const Frame &f, Level level)
        {
            TransformedParams p = f.params(range_m);
            PairValue best;
            for (int m : pick(ir, level))
                for (int n : pick(it, level))
                {
                    double e = std::abs(excess(range_m, f, dr[m - 1], dt[n - 1]) -
                                        sopm_excess(p, dr[m - 1], dt[n - 1], nu_r[m - 1], nu_t[n - 1]));
                    if (e > best.value)
                        best = {e, m, n};
                }
            best.value *= k0;
            return best;
        };

        SearchOptions opt;
        opt.coarse_points = grid_density;
        opt.workers = workers;
        Candidate c = maximize_over_angles(obj, opt);

        PhaseErrorReport rep;
        rep.max_error_rad = std::max(0.0, c.pv.value);
        rep.elev_rx = c.at.a[0];
        rep.elev_tx = c.at.a[1];
        rep.azim_rx = c.at.a[2];
        rep.m = c.pv.m;
        rep.n = c.pv.n;
        rep.delta_rx = dr[c.pv.m - 1];
        rep.delta_tx = dt[c.pv.n - 1];
        rep.analytic_bound_rad = lemma1_bound(config, range_m);

        // Canonical form with non-negative offsets: (delta, theta) and (-delta, theta + pi)
        // describe the same antenna position.
        double th_r = rep.elev_rx, th_t = rep.elev_tx;
        double a_r = rep.delta_rx, a_t = rep.delta_tx;
        if (a_r < 0.0)
        {
            a_r = -a_r;
            th_r += pi;
        }
        if (a_t < 0.0)
        {
            a_t = -a_t;
            th_t += pi;
        }
        rep.elev = wrap_angle(th_t);

        const double tol = 1e-9 * config.element_spacing();
        rep.edge_antennas = std::abs(a_r - 0.5 * config.aperture(Side::rx)) <= tol &&
                            std::abs(a_t - 0.5 * config.aperture(Side::tx)) <= tol;

        // Displacement directions of both antennas relative to their array centers
        Frame f(th_r, th_t, rep.azim_rx);
        double u[3] = {f.cr, f.sr * f.sp, f.sr * f.cp};
        double v[3] = {f.ct, 0.0, f.st};
        double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        rep.alignment_error_rad = pi - std::acos(std::clamp(dot, -1.0, 1.0));
        rep.antiparallel = rep.alignment_error_rad <= 2.0 * (2.0 * pi / std::max(4, grid_density));
        return rep;
    }
}
