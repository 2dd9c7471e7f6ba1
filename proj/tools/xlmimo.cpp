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

// Command line front end: sweeps, distance criteria, phase-error verification,
// complexity table and single-trial dumps.

#include "xlmimo/harness.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace xlmimo;

namespace
{
    struct ConfigFlags
    {
        std::string config_path;
        bool paper_scale = false;
        std::optional<int> trials, q_xi, q_alpha, t_iter, q_angle, q_curv, l_hat, threads;
        std::optional<double> r_min, snr;
        std::optional<std::uint64_t> seed;
        std::string stopping;
        std::vector<std::string> estimators;

        void attach(CLI::App *app)
        {
            app->add_option("-c,--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
            app->add_flag("--paper-scale", paper_scale, "Start from the full-scale profile");
            app->add_option("--trials", trials, "Trials per sweep point");
            app->add_option("--seed", seed, "Base seed");
            app->add_option("--snr", snr, "SNR in dB when SNR is not the sweep axis");
            app->add_option("--q-xi", q_xi, "ASAGM linear-phase grid size");
            app->add_option("--q-alpha", q_alpha, "ASAGM curvature grid size");
            app->add_option("--t-iter", t_iter, "ASAGM alternations");
            app->add_option("--r-min", r_min, "ASAGM minimum range (m)");
            app->add_option("--q-angle", q_angle, "Polar dictionary angle grid");
            app->add_option("--q-curv", q_curv, "Polar dictionary curvature grid");
            app->add_option("--l-hat", l_hat, "Side support size");
            app->add_option("--stopping", stopping, "OMP stopping rule")->check(CLI::IsMember({"fixed", "residual"}));
            app->add_option("--estimators", estimators, "Estimators to run")->check(CLI::IsMember(known_estimators()));
            app->add_option("--threads", threads, "Worker threads (0 = default)");
        }

        ExperimentConfig build() const
        {
            ExperimentConfig c = paper_scale ? paper_profile() : desk_profile();
            if (!config_path.empty())
                c = load_config(config_path, c);
            if (trials)
                c.trials = *trials;
            if (seed)
                c.seed = *seed;
            if (snr)
                c.snr_db = *snr;
            if (q_xi)
                c.asagm.q_xi = *q_xi;
            if (q_alpha)
                c.asagm.q_alpha = *q_alpha;
            if (t_iter)
                c.asagm.t_iter = *t_iter;
            if (r_min)
                c.asagm.r_min = *r_min;
            if (q_angle)
                c.nlos.q_angle = *q_angle;
            if (q_curv)
                c.nlos.q_curv = *q_curv;
            if (l_hat)
                c.nlos.l_rx = c.nlos.l_tx = *l_hat;
            if (!stopping.empty())
                c.nlos.stopping = stopping_from_string(stopping);
            if (!estimators.empty())
                c.estimators = estimators;
            if (threads)
                c.workers = *threads;
            if (paper_scale && estimators.empty())
            {
                // joint OMP over the full-scale dictionary exceeds its guard
                std::erase(c.estimators, std::string("joint_omp"));
            }
            c.validate();
            return c;
        }
    };

    std::ostream &open_out(const std::string &path, std::ofstream &file)
    {
        if (path.empty() || path == "-")
            return std::cout;
        file.open(path, std::ios::binary);
        if (!file)
            throw Error(ErrorKind::io_error, "cannot write '" + path + "'");
        return file;
    }

    void write_file(const std::filesystem::path &p, const std::function<void(std::ostream &)> &body)
    {
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw Error(ErrorKind::io_error, "cannot write '" + p.string() + "'");
        body(f);
    }

    int run_sweep_cmd(const ConfigFlags &flags, const std::string &axis, const std::vector<double> &points, bool timing,
                      const std::string &out, bool dump)
    {
        ExperimentConfig c = flags.build();
        if (flags.paper_scale && flags.estimators.empty())
            std::cerr << "joint_omp disabled at full scale\n";
        if (!axis.empty())
        {
            c.axis = sweep_axis_from_string(axis);
            if (points.empty())
            {
                if (c.axis == SweepAxis::distance)
                    c.points = {10, 20, 40, 60, 80, 100, 120, 140, 160, 180, 200};
                else if (c.axis == SweepAxis::pilots)
                    c.points = {8, 16, 24, 32};
                else
                    c.points = {-10, -5, 0, 5, 10, 15, 20};
            }
        }
        if (!points.empty())
            c.points = points;
        c.record_timing = c.record_timing || timing;
        c.validate();
        if (dump)
        {
            std::cout << dump_config(c) << '\n';
            return 0;
        }
        std::ofstream file;
        std::ostream &os = open_out(out, file);
        write_sweep_csv(os, run_sweep(c));
        return 0;
    }

    int run_criteria_cmd(const ConfigFlags &flags, double threshold, double fd_antennas)
    {
        const ExperimentConfig c = flags.build();
        const ArrayConfig &a = c.array;
        const double lambda = a.wavelength();
        const double fd_aperture = (fd_antennas - 1.0) * a.element_spacing();
        std::printf("criterion,value_m\n");
        std::printf("fraunhofer_%g_antennas,%.6g\n", fd_antennas, fraunhofer_distance(fd_aperture, lambda));
        std::printf("mimo_ard,%.6g\n", mimo_ard(a));
        std::printf("sopd,%.6g\n", sopd(a));
        std::printf("parabolic_validity,%.6g\n", parabolic_validity_distance(a));
        std::printf("upd_los,%.6g\n", uniform_power_distance(a, threshold, PowerMode::los));
        std::printf("upd_nlos,%.6g\n", uniform_power_distance(a, threshold, PowerMode::nlos));
        return 0;
    }

    int run_lemma_cmd(const ConfigFlags &flags, const std::vector<double> &ranges, int density)
    {
        const ExperimentConfig c = flags.build();
        std::printf("range_m,max_error_rad,bound_rad,ratio,m,n,elev_rx,elev_tx,azim_rx,edge_antennas,antiparallel\n");
        for (double r : ranges)
        {
            const PhaseErrorReport rep = lemma1_bruteforce(c.array, r, density, c.workers > 0 ? std::size_t(c.workers) : 0);
            std::printf("%g,%.8g,%.8g,%.6f,%d,%d,%.6f,%.6f,%.6f,%d,%d\n", r, rep.max_error_rad, rep.analytic_bound_rad,
                        rep.max_error_rad / rep.analytic_bound_rad, rep.m, rep.n, rep.elev_rx, rep.elev_tx, rep.azim_rx,
                        int(rep.edge_antennas), int(rep.antiparallel));
        }
        return 0;
    }

    int run_complexity_cmd(const ConfigFlags &flags, const std::string &out)
    {
        const ExperimentConfig c = flags.build();
        const ComplexityReport r = complexity_report(c);
        std::ofstream file;
        std::ostream &os = open_out(out, file);
        write_complexity_csv(os, r);
        std::fprintf(stderr, "doubling ratios: asagm %.4f smr %.4f joint %.4f\n", r.asagm_doubling, r.smr_doubling,
                     r.joint_doubling);
        return 0;
    }

    int run_trial_cmd(const ConfigFlags &flags, const std::string &axis, double value, int index, const std::string &dir)
    {
        ExperimentConfig c = flags.build();
        if (!axis.empty())
            c.axis = sweep_axis_from_string(axis);
        c.record_timing = true;
        const TrialRecord rec = run_trial(c, value, index);
        std::printf("estimator,nmse,nmse_db,time_ms,metric_evals,sensing_column_evals,error\n");
        for (const auto &o : rec.outcomes)
            std::printf("%s,%.10g,%.6f,%.3f,%llu,%llu,%s\n", o.estimator.c_str(), o.nmse, 10.0 * std::log10(o.nmse), o.time_ms,
                        static_cast<unsigned long long>(o.counters.metric_evals),
                        static_cast<unsigned long long>(o.counters.sensing_column_evals), o.error.c_str());
        if (dir.empty())
            return 0;

        namespace fs = std::filesystem;
        fs::create_directories(dir);
        const TrialData d = make_trial_data(c, value, index);
        const SweepContext ctx = make_context(c);
        const LosEstimate los = estimate_los(d.y, d.frontend, c.asagm);
        const NlosEstimate nl = estimate_nlos(d.y, d.frontend, los.channel, ctx.dicts, c.nlos, d.noise_var);
        const fs::path p(dir);
        write_file(p / "truth.csv", [&](std::ostream &os) { write_matrix_csv(os, d.channel.total()); });
        write_file(p / "estimate.csv", [&](std::ostream &os) { write_matrix_csv(os, los.channel + nl.channel); });
        write_file(p / "observation.csv", [&](std::ostream &os) { write_matrix_csv(os, d.y); });
        write_file(p / "objective_trace.csv", [&](std::ostream &os) { write_trace_csv(os, los.objective_trace); });
        write_file(p / "supports.csv", [&](std::ostream &os) { write_support_csv(os, nl); });
        write_file(p / "config.json", [&](std::ostream &os) { os << dump_config(c) << '\n'; });
        const TransformedParams tp = transform(d.channel.truth_geom);
        std::printf("param,truth,estimate\n");
        std::printf("phi_rx,%.8f,%.8f\nphi_tx,%.8f,%.8f\n", tp.phi_rx, los.params.phi_rx, tp.phi_tx, los.params.phi_tx);
        std::printf("alpha_rx,%.8g,%.8g\nalpha_tx,%.8g,%.8g\n", tp.alpha_rx, los.params.alpha_rx, tp.alpha_tx,
                    los.params.alpha_tx);
        std::printf("eta,%.8g,%.8g\n", tp.eta, los.params.eta);
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"xlmimo: near-field XL-MIMO channel estimation experiments"};
    app.require_subcommand(1);

    ConfigFlags sweep_flags, crit_flags, lemma_flags, cx_flags, trial_flags;
    // distance criteria and the phase-error bound refer to the full-size arrays by default
    crit_flags.paper_scale = lemma_flags.paper_scale = true;

    auto *sweep = app.add_subcommand("sweep", "Monte-Carlo NMSE sweep, CSV on stdout or --out");
    std::string axis, out;
    std::vector<double> points;
    bool timing = false, dump = false;
    sweep_flags.attach(sweep);
    sweep->add_option("--axis", axis, "Sweep axis")->check(CLI::IsMember({"distance", "snr", "pilots"}));
    sweep->add_option("--points", points, "Sweep values (dB, meters or beams)");
    sweep->add_option("-o,--out", out, "Output CSV path");
    sweep->add_flag("--timing", timing, "Record wall time per estimator");
    sweep->add_flag("--dump-config", dump, "Print the resolved config and exit");

    auto *crit = app.add_subcommand("criteria", "Distance criteria for the configured arrays");
    double threshold = 0.9, fd_antennas = 256;
    crit_flags.attach(crit);
    crit->add_option("--threshold", threshold, "Power-uniformity threshold")->check(CLI::Range(0.0, 1.0));
    crit->add_option("--fd-antennas", fd_antennas, "Antennas of the single-array Fraunhofer example");

    auto *lemma = app.add_subcommand("verify-lemma1", "Brute-force worst subarray phase error against the closed-form bound");
    std::vector<double> ranges{50, 100, 200};
    int density = 64;
    lemma_flags.attach(lemma);
    lemma->add_option("--range", ranges, "Link ranges (m)");
    lemma->add_option("--density", density, "Coarse grid points per angle");

    auto *cx = app.add_subcommand("complexity", "Complexity table with measured counters");
    std::string cx_out;
    cx_flags.attach(cx);
    cx->add_option("-o,--out", cx_out, "Output CSV path");

    auto *trial = app.add_subcommand("trial", "Run one trial and dump intermediate results");
    std::string trial_axis, trial_dir;
    double value = 10.0;
    int index = 0;
    trial_flags.attach(trial);
    trial->add_option("--axis", trial_axis, "Sweep axis")->check(CLI::IsMember({"distance", "snr", "pilots"}));
    trial->add_option("--value", value, "Sweep value");
    trial->add_option("--index", index, "Trial index");
    trial->add_option("--dump-dir", trial_dir, "Directory for matrix and trace dumps");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sweep)
            return run_sweep_cmd(sweep_flags, axis, points, timing, out, dump);
        if (*crit)
            return run_criteria_cmd(crit_flags, threshold, fd_antennas);
        if (*lemma)
            return run_lemma_cmd(lemma_flags, ranges, density);
        if (*cx)
            return run_complexity_cmd(cx_flags, cx_out);
        if (*trial)
            return run_trial_cmd(trial_flags, trial_axis, value, index, trial_dir);
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
