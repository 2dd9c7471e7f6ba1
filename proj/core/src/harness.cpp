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

#include "xlmimo/harness.hpp"
#include "xlmimo/parallel.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace xlmimo
{
    using json = nlohmann::json;

    namespace
    {
        constexpr double deg = pi / 180.0;

        template <typename T>
        void read(const json &j, const char *key, T &out)
        {
            auto it = j.find(key);
            if (it == j.end())
                return;
            try
            {
                out = it->get<T>();
            }
            catch (const json::exception &e)
            {
                throw Error(ErrorKind::config_invalid, std::string("config key '") + key + "': " + e.what());
            }
        }

        void read_deg(const json &j, const char *key, double &radians)
        {
            double v = radians / deg;
            read(j, key, v);
            radians = v * deg;
        }

        double to_deg(double radians)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.15g", radians / deg);
            return std::strtod(buf, nullptr);
        }

        void reject_unknown(const json &j, const char *section, std::initializer_list<const char *> keys)
        {
            if (!j.is_object())
                throw Error(ErrorKind::config_invalid, std::string("config section '") + section + "' must be an object");
            for (auto it = j.begin(); it != j.end(); ++it)
            {
                bool known = false;
                for (const char *k : keys)
                    known = known || it.key() == k;
                if (!known)
                    throw Error(ErrorKind::config_invalid, std::string("unknown key '") + it.key() + "' in '" + section + "'");
            }
        }

        std::string fmt(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        double elapsed_ms(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }

        struct TrialSetup
        {
            SceneConfig scene;
            int m_rx = 0, m_tx = 0;
            double noise_var = 0.0;
        };

        TrialSetup setup_for(const ExperimentConfig &cfg, double value)
        {
            TrialSetup s;
            s.scene = cfg.scene;
            s.m_rx = cfg.m_rx;
            s.m_tx = cfg.m_tx;
            double snr = cfg.snr_db;
            switch (cfg.axis)
            {
            case SweepAxis::distance:
                s.scene.range_min = s.scene.range_max = value;
                break;
            case SweepAxis::snr:
                snr = value;
                break;
            case SweepAxis::pilots:
                s.m_rx = s.m_tx = int(std::lround(value));
                break;
            }
            s.noise_var = std::pow(10.0, -snr / 10.0);
            return s;
        }
    }

    SweepAxis sweep_axis_from_string(const std::string &name)
    {
        if (name == "distance")
            return SweepAxis::distance;
        if (name == "snr")
            return SweepAxis::snr;
        if (name == "pilots")
            return SweepAxis::pilots;
        throw Error(ErrorKind::config_invalid, "unknown sweep axis '" + name + "'");
    }

    const char *to_string(SweepAxis a)
    {
        switch (a)
        {
        case SweepAxis::distance:
            return "distance";
        case SweepAxis::snr:
            return "snr";
        case SweepAxis::pilots:
            return "pilots";
        }
        return "?";
    }

    const std::vector<std::string> &known_estimators()
    {
        static const std::vector<std::string> names{"asagm_smr", "joint_omp", "genie_ls", "genie_pe"};
        return names;
    }

    void ExperimentConfig::validate() const
    {
        array.validate();
        scene.validate();
        asagm.validate();
        nlos.validate();
        if (trials < 1)
            throw Error(ErrorKind::config_invalid, "trials must be at least 1");
        if (points.empty())
            throw Error(ErrorKind::config_invalid, "sweep needs at least one point");
        if (estimators.empty())
            throw Error(ErrorKind::config_invalid, "no estimators selected");
        for (const auto &e : estimators)
        {
            bool ok = false;
            for (const auto &k : known_estimators())
                ok = ok || e == k;
            if (!ok)
                throw Error(ErrorKind::config_invalid, "unknown estimator '" + e + "'");
        }
        std::vector<int> beams{m_rx, m_tx};
        if (axis == SweepAxis::pilots)
            for (double p : points)
                beams.push_back(int(std::lround(p)));
        for (std::size_t k = 0; k < beams.size(); ++k)
        {
            const int m = beams[k];
            const bool rx_ok = m >= array.k_rx && m % array.k_rx == 0 && m / array.k_rx <= array.subarray_size(Side::rx);
            const bool tx_ok = m >= array.k_tx && m % array.k_tx == 0 && m / array.k_tx <= array.subarray_size(Side::tx);
            if ((k != 1 && !rx_ok) || (k != 0 && !tx_ok))
                throw Error(ErrorKind::config_invalid, "beam count " + std::to_string(m) + " does not fit the subarrays");
        }
        if (axis == SweepAxis::distance)
            for (double p : points)
                if (!(p > 0.0))
                    throw Error(ErrorKind::config_invalid, "distance points must be positive");
        if (pe.q_angle < 1 || pe.q_range < 1 || pe.neighborhood < 1 || pe.neighborhood % 2 == 0 || !(pe.range_min > 0.0) ||
            pe.range_max < pe.range_min)
            throw Error(ErrorKind::config_invalid, "invalid genie PE grid");
    }

    ExperimentConfig desk_profile()
    {
        ExperimentConfig c;
        c.array.n_rx = c.array.n_tx = 64;
        c.array.k_rx = 4;
        c.array.k_tx = 2;
        c.scene.range_min = 90.0;
        c.scene.range_max = 100.0;
        c.m_rx = c.m_tx = 32;
        c.asagm.q_xi = 320;
        c.asagm.q_alpha = 7;
        c.nlos.q_angle = 128;
        c.nlos.q_curv = 7;
        c.nlos.l_rx = c.nlos.l_tx = c.scene.num_paths;
        c.pe.q_angle = 98;
        c.pe.q_range = 128;
        return c;
    }

    ExperimentConfig paper_profile()
    {
        ExperimentConfig c = desk_profile();
        c.array.n_rx = c.array.n_tx = 128;
        c.m_rx = c.m_tx = 64;
        c.asagm.q_xi = 640;
        c.nlos.q_angle = 256;
        c.pe.q_angle = 196;
        c.pe.q_range = 256;
        return c;
    }

    ExperimentConfig parse_config(const std::string &json_text, const ExperimentConfig &base)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::exception &e)
        {
            throw Error(ErrorKind::config_invalid, std::string("config is not valid JSON: ") + e.what());
        }
        reject_unknown(j, "root", {"profile", "array", "scene", "frontend", "asagm", "nlos", "genie_pe", "complexity", "estimators", "sweep", "record_timing", "workers"});

        ExperimentConfig c = base;
        if (j.contains("profile"))
        {
            std::string p = j["profile"].get<std::string>();
            if (p == "desk")
                c = desk_profile();
            else if (p == "paper")
                c = paper_profile();
            else
                throw Error(ErrorKind::config_invalid, "unknown profile '" + p + "'");
        }

        if (j.contains("array"))
        {
            const json &a = j["array"];
            reject_unknown(a, "array", {"n_rx", "n_tx", "k_rx", "k_tx", "carrier_freq", "spacing"});
            read(a, "n_rx", c.array.n_rx);
            read(a, "n_tx", c.array.n_tx);
            read(a, "k_rx", c.array.k_rx);
            read(a, "k_tx", c.array.k_tx);
            read(a, "carrier_freq", c.array.carrier_freq);
            read(a, "spacing", c.array.spacing);
        }
        bool paths_given = false;
        if (j.contains("scene"))
        {
            const json &s = j["scene"];
            reject_unknown(s, "scene", {"range_min", "range_max", "angle_min_deg", "angle_max_deg", "num_paths", "kappa", "scatter_angle_min_deg", "scatter_angle_max_deg", "scatter_range_min", "scatter_range_max", "truth_model"});
            read(s, "range_min", c.scene.range_min);
            read(s, "range_max", c.scene.range_max);
            read_deg(s, "angle_min_deg", c.scene.angle_min);
            read_deg(s, "angle_max_deg", c.scene.angle_max);
            paths_given = s.contains("num_paths");
            read(s, "num_paths", c.scene.num_paths);
            read(s, "kappa", c.scene.kappa);
            read_deg(s, "scatter_angle_min_deg", c.scene.scatter_angle_min);
            read_deg(s, "scatter_angle_max_deg", c.scene.scatter_angle_max);
            read(s, "scatter_range_min", c.scene.scatter_range_min);
            read(s, "scatter_range_max", c.scene.scatter_range_max);
            if (s.contains("truth_model"))
                c.scene.truth_model = los_model_from_string(s["truth_model"].get<std::string>());
        }
        if (j.contains("frontend"))
        {
            const json &f = j["frontend"];
            reject_unknown(f, "frontend", {"m_rx", "m_tx", "modulus"});
            read(f, "m_rx", c.m_rx);
            read(f, "m_tx", c.m_tx);
            if (f.contains("modulus"))
                c.modulus = modulus_from_string(f["modulus"].get<std::string>());
        }
        if (j.contains("asagm"))
        {
            const json &a = j["asagm"];
            reject_unknown(a, "asagm", {"q_xi", "q_alpha", "xi_lo", "xi_hi", "r_min", "t_iter", "eta_convention"});
            read(a, "q_xi", c.asagm.q_xi);
            read(a, "q_alpha", c.asagm.q_alpha);
            read(a, "xi_lo", c.asagm.xi_lo);
            read(a, "xi_hi", c.asagm.xi_hi);
            read(a, "r_min", c.asagm.r_min);
            read(a, "t_iter", c.asagm.t_iter);
            if (a.contains("eta_convention"))
                c.asagm.eta_convention = eta_convention_from_string(a["eta_convention"].get<std::string>());
        }
        bool l_given = false;
        if (j.contains("nlos"))
        {
            const json &n = j["nlos"];
            reject_unknown(n, "nlos", {"q_angle", "q_curv", "r_min", "l_hat", "stopping"});
            read(n, "q_angle", c.nlos.q_angle);
            read(n, "q_curv", c.nlos.q_curv);
            read(n, "r_min", c.nlos.r_min);
            if (n.contains("l_hat"))
            {
                l_given = true;
                read(n, "l_hat", c.nlos.l_rx);
                c.nlos.l_tx = c.nlos.l_rx;
            }
            if (n.contains("stopping"))
                c.nlos.stopping = stopping_from_string(n["stopping"].get<std::string>());
        }
        if (paths_given && !l_given)
            c.nlos.l_rx = c.nlos.l_tx = std::max(1, c.scene.num_paths);
        if (j.contains("genie_pe"))
        {
            const json &p = j["genie_pe"];
            reject_unknown(p, "genie_pe", {"q_angle", "q_range", "range_min", "range_max", "neighborhood"});
            read(p, "q_angle", c.pe.q_angle);
            read(p, "q_range", c.pe.q_range);
            read(p, "range_min", c.pe.range_min);
            read(p, "range_max", c.pe.range_max);
            read(p, "neighborhood", c.pe.neighborhood);
        }
        if (j.contains("complexity"))
        {
            const json &x = j["complexity"];
            reject_unknown(x, "complexity", {"t_grad", "q_eta"});
            read(x, "t_grad", c.complexity.t_grad);
            read(x, "q_eta", c.complexity.q_eta);
        }
        read(j, "estimators", c.estimators);
        if (j.contains("sweep"))
        {
            const json &s = j["sweep"];
            reject_unknown(s, "sweep", {"axis", "points", "snr_db", "trials", "seed"});
            if (s.contains("axis"))
                c.axis = sweep_axis_from_string(s["axis"].get<std::string>());
            read(s, "points", c.points);
            read(s, "snr_db", c.snr_db);
            read(s, "trials", c.trials);
            read(s, "seed", c.seed);
        }
        read(j, "record_timing", c.record_timing);
        read(j, "workers", c.workers);
        c.validate();
        return c;
    }

    ExperimentConfig load_config(const std::string &path, const ExperimentConfig &base)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorKind::io_error, "cannot open config '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), base);
    }

    std::string dump_config(const ExperimentConfig &c)
    {
        json j;
        j["array"] = {{"n_rx", c.array.n_rx}, {"n_tx", c.array.n_tx}, {"k_rx", c.array.k_rx}, {"k_tx", c.array.k_tx},
                      {"carrier_freq", c.array.carrier_freq}, {"spacing", c.array.spacing}};
        j["scene"] = {{"range_min", c.scene.range_min},
                      {"range_max", c.scene.range_max},
                      {"angle_min_deg", to_deg(c.scene.angle_min)},
                      {"angle_max_deg", to_deg(c.scene.angle_max)},
                      {"num_paths", c.scene.num_paths},
                      {"kappa", c.scene.kappa},
                      {"scatter_angle_min_deg", to_deg(c.scene.scatter_angle_min)},
                      {"scatter_angle_max_deg", to_deg(c.scene.scatter_angle_max)},
                      {"scatter_range_min", c.scene.scatter_range_min},
                      {"scatter_range_max", c.scene.scatter_range_max},
                      {"truth_model", to_string(c.scene.truth_model)}};
        j["frontend"] = {{"m_rx", c.m_rx}, {"m_tx", c.m_tx}, {"modulus", to_string(c.modulus)}};
        j["asagm"] = {{"q_xi", c.asagm.q_xi}, {"q_alpha", c.asagm.q_alpha}, {"xi_lo", c.asagm.xi_lo}, {"xi_hi", c.asagm.xi_hi},
                      {"r_min", c.asagm.r_min}, {"t_iter", c.asagm.t_iter}, {"eta_convention", to_string(c.asagm.eta_convention)}};
        j["nlos"] = {{"q_angle", c.nlos.q_angle}, {"q_curv", c.nlos.q_curv}, {"r_min", c.nlos.r_min}, {"l_hat", c.nlos.l_rx},
                     {"stopping", to_string(c.nlos.stopping)}};
        j["genie_pe"] = {{"q_angle", c.pe.q_angle}, {"q_range", c.pe.q_range}, {"range_min", c.pe.range_min},
                         {"range_max", c.pe.range_max}, {"neighborhood", c.pe.neighborhood}};
        j["complexity"] = {{"t_grad", c.complexity.t_grad}, {"q_eta", c.complexity.q_eta}};
        j["estimators"] = c.estimators;
        j["sweep"] = {{"axis", to_string(c.axis)}, {"points", c.points}, {"snr_db", c.snr_db}, {"trials", c.trials}, {"seed", c.seed}};
        j["record_timing"] = c.record_timing;
        j["workers"] = c.workers;
        return j.dump(2);
    }

    double nmse(const ComplexMatrix &estimate, const ComplexMatrix &truth)
    {
        if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
            throw Error(ErrorKind::dimension_mismatch, "nmse: shapes differ");
        const double t = truth.squaredNorm();
        if (t == 0.0)
            throw Error(ErrorKind::zero_truth, "nmse: truth channel is zero");
        return (estimate - truth).squaredNorm() / t;
    }

    SweepContext make_context(const ExperimentConfig &cfg)
    {
        SweepContext ctx;
        ctx.dicts = build_dictionaries(cfg.array, cfg.nlos);
        ctx.geo = make_geo_grid(cfg.pe.q_angle, cfg.pe.q_range, cfg.scene.angle_min, cfg.scene.angle_max, cfg.pe.range_min,
                                cfg.pe.range_max);
        return ctx;
    }

    TrialData make_trial_data(const ExperimentConfig &cfg, double sweep_value, int trial_index)
    {
        const TrialSetup s = setup_for(cfg, sweep_value);
        const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(trial_index));
        Rng scene_rng(derive_seed(trial_seed, 1)), fe_rng(derive_seed(trial_seed, 2)), noise_rng(derive_seed(trial_seed, 3));

        TrialData d;
        d.channel = sample_scene(cfg.array, scene_rng, s.scene);
        d.frontend = build_frontend(cfg.array, fe_rng, s.m_rx / cfg.array.k_rx, s.m_tx / cfg.array.k_tx, cfg.modulus);
        d.y = receive(d.frontend, d.channel.total(), noise_rng, s.noise_var);
        d.noise_var = s.noise_var;
        return d;
    }

    TrialRecord run_trial(const ExperimentConfig &cfg, double sweep_value, int trial_index)
    {
        return run_trial(cfg, make_context(cfg), sweep_value, trial_index);
    }

    TrialRecord run_trial(const ExperimentConfig &cfg, const SweepContext &ctx, double sweep_value, int trial_index)
    {
        const TrialData d = make_trial_data(cfg, sweep_value, trial_index);
        const ChannelPair &ch = d.channel;
        const HybridFrontend &fe = d.frontend;
        const ComplexMatrix &y = d.y;
        const ComplexMatrix truth = ch.total();
        const GenieInfo genie{ch.truth_geom, ch.truth_paths};

        TrialRecord rec;
        rec.sweep_value = sweep_value;
        rec.trial = trial_index;
        for (const auto &name : cfg.estimators)
        {
            EstimatorOutcome out;
            out.estimator = name;
            const auto t0 = std::chrono::steady_clock::now();
            try
            {
                ComplexMatrix h;
                if (name == "asagm_smr")
                {
                    LosEstimate los = estimate_los(y, fe, cfg.asagm);
                    NlosEstimate nl = estimate_nlos(y, fe, los.channel, ctx.dicts, cfg.nlos, d.noise_var);
                    h = los.channel + nl.channel;
                    out.counters += los.counters;
                    out.counters += nl.counters;
                }
                else if (name == "joint_omp")
                {
                    BaselineResult r = joint_omp_estimate(y, fe, ctx.dicts, cfg.nlos.l_rx + 1);
                    h = r.channel;
                    out.counters += r.counters;
                }
                else if (name == "genie_ls")
                    h = genie_ls_estimate(y, fe, genie).channel;
                else if (name == "genie_pe")
                {
                    BaselineResult r = genie_pe_estimate(y, fe, ctx.geo, genie, cfg.pe.neighborhood, ctx.dicts);
                    h = r.channel;
                    out.counters += r.counters;
                }
                else
                    throw Error(ErrorKind::config_invalid, "unknown estimator '" + name + "'");
                out.nmse = nmse(h, truth);
            }
            catch (const Error &e)
            {
                out.nmse = std::numeric_limits<double>::quiet_NaN();
                out.error = to_string(e.kind());
            }
            catch (const std::exception &e)
            {
                out.nmse = std::numeric_limits<double>::quiet_NaN();
                out.error = e.what();
            }
            out.time_ms = cfg.record_timing ? elapsed_ms(t0) : 0.0;
            rec.outcomes.push_back(out);
        }
        return rec;
    }

    std::vector<SweepRow> run_sweep(const ExperimentConfig &cfg, std::vector<TrialRecord> *records)
    {
        cfg.validate();
        const SweepContext ctx = make_context(cfg);
        const std::size_t np = cfg.points.size(), nt = std::size_t(cfg.trials);
        std::vector<TrialRecord> recs(np * nt);
        parallel_for(
            recs.size(), [&](std::size_t k) { recs[k] = run_trial(cfg, ctx, cfg.points[k / nt], int(k % nt)); },
            cfg.workers > 0 ? std::size_t(cfg.workers) : 0);

        std::vector<SweepRow> rows;
        for (std::size_t p = 0; p < np; ++p)
            for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
            {
                SweepRow row;
                row.sweep_value = cfg.points[p];
                row.estimator = cfg.estimators[e];
                double sum = 0.0, time = 0.0, ops = 0.0;
                for (std::size_t t = 0; t < nt; ++t)
                {
                    const EstimatorOutcome &o = recs[p * nt + t].outcomes[e];
                    if (!std::isfinite(o.nmse))
                    {
                        ++row.errors;
                        continue;
                    }
                    ++row.trials;
                    sum += o.nmse;
                    time += o.time_ms;
                    ops += double(o.counters.total());
                }
                const double nan = std::numeric_limits<double>::quiet_NaN();
                row.mean_nmse = row.trials > 0 ? sum / row.trials : nan;
                row.nmse_db = row.trials > 0 ? 10.0 * std::log10(row.mean_nmse) : nan;
                row.mean_time_ms = row.trials > 0 ? time / row.trials : nan;
                row.metric_evals = row.trials > 0 ? ops / row.trials : nan;
                row.snr_linear = 1.0 / setup_for(cfg, cfg.points[p]).noise_var;
                rows.push_back(row);
            }
        if (records)
            *records = std::move(recs);
        return rows;
    }

    void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows)
    {
        os << "sweep_value,estimator,mean_nmse,nmse_db,trials,mean_time_ms,metric_evals,errors,snr_linear\n";
        for (const auto &r : rows)
            os << fmt(r.sweep_value) << ',' << r.estimator << ',' << fmt(r.mean_nmse) << ',' << fmt(r.nmse_db) << ','
               << r.trials << ',' << fmt(r.mean_time_ms) << ',' << fmt(r.metric_evals) << ',' << r.errors << ','
               << fmt(r.snr_linear) << '\n';
    }

    void write_sweep_csv(const std::string &path, const std::vector<SweepRow> &rows)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error(ErrorKind::io_error, "cannot write '" + path + "'");
        write_sweep_csv(out, rows);
        if (!out)
            throw Error(ErrorKind::io_error, "write failed for '" + path + "'");
    }

    ComplexityReport complexity_report(const ExperimentConfig &cfg)
    {
        cfg.validate();
        const double mr = cfg.m_rx, mt = cfg.m_tx, kr = cfg.array.k_rx, kt = cfg.array.k_tx;
        const double nr = cfg.array.n_rx, nt = cfg.array.n_tx;
        const double qx = cfg.asagm.q_xi, qa = cfg.asagm.q_alpha, ti = cfg.asagm.t_iter;
        const double qdr = double(cfg.nlos.q_angle) * cfg.nlos.q_curv, qdt = qdr;
        const double l = cfg.nlos.l_rx;
        const double qth = cfg.pe.q_angle, qr = cfg.pe.q_range;

        // dry run on one scene for the instrumented counters
        Rng scene_rng(derive_seed(cfg.seed, 1)), fe_rng(derive_seed(cfg.seed, 2)), noise_rng(derive_seed(cfg.seed, 3));
        ChannelPair ch = sample_scene(cfg.array, scene_rng, cfg.scene);
        HybridFrontend fe = build_frontend(cfg.array, fe_rng, cfg.m_rx / cfg.array.k_rx, cfg.m_tx / cfg.array.k_tx, cfg.modulus);
        ComplexMatrix y = receive(fe, ch.total(), noise_rng, std::pow(10.0, -cfg.snr_db / 10.0));

        auto asagm_count = [&](int q)
        {
            AsagmConfig a = cfg.asagm;
            a.q_xi = q;
            return double(estimate_los(y, fe, a).counters.metric_evals);
        };
        auto smr_count = [&](int q_angle)
        {
            NlosConfig n = cfg.nlos;
            n.q_angle = q_angle;
            NlosDictionaries d = build_dictionaries(cfg.array, n);
            auto wh = combiner_whiteners(fe);
            SideSensing ups = make_side_sensing(fe, wh, d.rx, d.tx);
            OpCounters c;
            detect_side_supports(whiten_rows(y, fe, wh), ups, n.l_rx, n.l_tx, &c);
            return double(c.sensing_column_evals);
        };
        auto joint_count = [&](int q_angle) -> double
        {
            NlosConfig n = cfg.nlos;
            n.q_angle = q_angle;
            try
            {
                NlosDictionaries d = build_dictionaries(cfg.array, n);
                return double(joint_omp_estimate(y, fe, d, n.l_rx + 1).counters.sensing_column_evals);
            }
            catch (const Error &e)
            {
                if (e.kind() == ErrorKind::scale_refused)
                    return -1.0;
                throw;
            }
        };

        ComplexityReport rep;
        const double asagm_full = asagm_count(cfg.asagm.q_xi);
        const double smr_full = smr_count(cfg.nlos.q_angle);
        const double joint_full = joint_count(cfg.nlos.q_angle);
        const int half_angle = std::max(2, cfg.nlos.q_angle / 2);
        rep.asagm_doubling = asagm_full / asagm_count(std::max(1, cfg.asagm.q_xi / 2));
        rep.smr_doubling = smr_full / smr_count(half_angle);
        {
            const double jh = joint_count(half_angle);
            rep.joint_doubling = joint_full > 0.0 && jh > 0.0 ? joint_full / jh : 0.0;
        }

        rep.rows.push_back({"los", "proposed", "T_iter (K_t M_r Q_xi Q_alpha + K_r M_t Q_xi Q_alpha)",
                            ti * (kt * mr * qx * qa + kr * mt * qx * qa), asagm_full});
        rep.rows.push_back({"los", "geometric PE", "M_r M_t (Q_theta_r Q_theta_t Q_phi_r Q_R + T_grad N_r N_t)",
                            mr * mt * (qth * qth * qth * qr + cfg.complexity.t_grad * nr * nt), -1.0});
        rep.rows.push_back({"nlos", "proposed", "L M_r M_t (Q_Dr + Q_Dt)", l * mr * mt * (qdr + qdt), smr_full});
        rep.rows.push_back({"nlos", "joint-dictionary OMP", "L M_r M_t Q_Dr Q_Dt", l * mr * mt * qdr * qdt, -1.0});
        rep.rows.push_back({"joint", "joint-dictionary OMP", "(L+1) M_r M_t Q_Dr Q_Dt", (l + 1) * mr * mt * qdr * qdt, joint_full});
        rep.rows.push_back({"joint", "three-stage MMV OMP", "(L+1) Q_eta Q_Dr Q_Dt min(N_r, N_t)",
                            (l + 1) * cfg.complexity.q_eta * qdr * qdt * std::min(nr, nt), -1.0});
        return rep;
    }

    void write_complexity_csv(std::ostream &os, const ComplexityReport &report)
    {
        os << "stage,scheme,formula,value,measured_counter\n";
        for (const auto &r : report.rows)
            os << r.stage << ',' << r.scheme << ",\"" << r.formula << "\"," << fmt(r.value) << ','
               << (r.measured >= 0.0 ? fmt(r.measured) : std::string()) << '\n';
        os << "scaling,asagm_q_xi_doubling,,2," << fmt(report.asagm_doubling) << '\n';
        os << "scaling,smr_q_d_doubling,,2," << fmt(report.smr_doubling) << '\n';
        os << "scaling,joint_q_d_doubling,,4," << (report.joint_doubling > 0.0 ? fmt(report.joint_doubling) : std::string()) << '\n';
    }

    void write_matrix_csv(std::ostream &os, const ComplexMatrix &m)
    {
        os << "row,col,re,im\n";
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                os << r << ',' << c << ',' << fmt(m(r, c).real()) << ',' << fmt(m(r, c).imag()) << '\n';
    }

    void write_support_csv(std::ostream &os, const NlosEstimate &est)
    {
        os << "kind,position,rx_index,tx_index,coeff_re,coeff_im\n";
        for (std::size_t k = 0; k < est.rx_support.size(); ++k)
            os << "rx," << k << ',' << est.rx_support.indices[k] << ",,,\n";
        for (std::size_t k = 0; k < est.tx_support.size(); ++k)
            os << "tx," << k << ",," << est.tx_support.indices[k] << ",,\n";
        for (std::size_t k = 0; k < est.atoms.size(); ++k)
            os << "atom," << k << ',' << est.atoms[k].first << ',' << est.atoms[k].second << ','
               << fmt(est.coeffs[Eigen::Index(k)].real()) << ',' << fmt(est.coeffs[Eigen::Index(k)].imag()) << '\n';
    }

    void write_trace_csv(std::ostream &os, const std::vector<double> &trace)
    {
        os << "half_step,objective\n";
        for (std::size_t k = 0; k < trace.size(); ++k)
            os << k << ',' << fmt(trace[k]) << '\n';
    }
}
