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

#include "xlmimo/baselines.hpp"
#include "xlmimo/channel.hpp"
#include "xlmimo/common.hpp"
#include "xlmimo/frontend.hpp"
#include "xlmimo/geometry.hpp"
#include "xlmimo/los_estimator.hpp"
#include "xlmimo/nlos_estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace xlmimo
{
    enum class SweepAxis
    {
        distance, // sweep value is the link range in meters
        snr,      // sweep value is the SNR in dB
        pilots    // sweep value is the number of training beams per side
    };

    SweepAxis sweep_axis_from_string(const std::string &name);
    const char *to_string(SweepAxis a);

    struct PeGridConfig
    {
        int q_angle = 98;
        int q_range = 128;
        double range_min = 10.0;
        double range_max = 200.0;
        int neighborhood = 5;
    };

    // Symbols of the complexity table that belong to baselines not implemented here
    struct ComplexityConfig
    {
        int t_grad = 10;
        int q_eta = 64;
    };

    struct ExperimentConfig
    {
        ArrayConfig array;
        SceneConfig scene;
        int m_rx = 32; // training beams, total over all subarrays
        int m_tx = 32;
        ModulusConvention modulus = ModulusConvention::inv_sqrt_n;
        AsagmConfig asagm;
        NlosConfig nlos;
        PeGridConfig pe;
        ComplexityConfig complexity;
        std::vector<std::string> estimators{"asagm_smr", "joint_omp", "genie_ls", "genie_pe"};
        SweepAxis axis = SweepAxis::snr;
        std::vector<double> points{-10, -5, 0, 5, 10, 15, 20};
        double snr_db = 10.0; // used when the sweep axis is not snr
        int trials = 100;
        std::uint64_t seed = 1;
        bool record_timing = false;
        int workers = 0; // 0 = XLMIMO_THREADS or hardware concurrency

        void validate() const;
    };

    /// Desk-scale defaults (N = 64, M = 32, Q_xi = 320, Q_D = 896)
    ExperimentConfig desk_profile();
    /// Full-scale defaults (N = 128, M = 64, Q_xi = 640, Q_D = 1792)
    ExperimentConfig paper_profile();

    /// Parses a JSON document; keys absent from the document keep the values of `base`.
    ExperimentConfig parse_config(const std::string &json_text, const ExperimentConfig &base = desk_profile());
    ExperimentConfig load_config(const std::string &path, const ExperimentConfig &base = desk_profile());
    std::string dump_config(const ExperimentConfig &cfg);

    const std::vector<std::string> &known_estimators();

    /// ||est - truth||_F^2 / ||truth||_F^2
    double nmse(const ComplexMatrix &estimate, const ComplexMatrix &truth);

    struct EstimatorOutcome
    {
        std::string estimator;
        double nmse = 0.0; // NaN when the estimator failed
        double time_ms = 0.0;
        OpCounters counters;
        std::string error;
    };

    struct TrialRecord
    {
        double sweep_value = 0.0;
        int trial = 0;
        std::vector<EstimatorOutcome> outcomes;
    };

    // Per-sweep immutable data shared by all trials with the same array and beam counts
    struct SweepContext
    {
        NlosDictionaries dicts;
        GeoGrid geo;
    };

    SweepContext make_context(const ExperimentConfig &cfg);

    // Random draws of one trial
    struct TrialData
    {
        ChannelPair channel;
        HybridFrontend frontend;
        ComplexMatrix y;
        double noise_var = 0.0;
    };

    TrialData make_trial_data(const ExperimentConfig &cfg, double sweep_value, int trial_index);

    /// One Monte-Carlo trial. Scene, frontend and noise streams depend only on (seed, trial),
    /// so every sweep point sees the same random draws.
    TrialRecord run_trial(const ExperimentConfig &cfg, double sweep_value, int trial_index);
    TrialRecord run_trial(const ExperimentConfig &cfg, const SweepContext &ctx, double sweep_value, int trial_index);

    struct SweepRow
    {
        double sweep_value = 0.0;
        std::string estimator;
        double mean_nmse = 0.0;
        double nmse_db = 0.0;
        int trials = 0; // successful trials
        double mean_time_ms = 0.0;
        double metric_evals = 0.0; // mean operation count per trial
        int errors = 0;
        double snr_linear = 0.0;
    };

    std::vector<SweepRow> run_sweep(const ExperimentConfig &cfg, std::vector<TrialRecord> *records = nullptr);

    void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows);
    void write_sweep_csv(const std::string &path, const std::vector<SweepRow> &rows);

    struct ComplexityRow
    {
        std::string stage;
        std::string scheme;
        std::string formula;
        double value = 0.0;
        double measured = -1.0; // negative when no instrumented counter exists
    };

    struct ComplexityReport
    {
        std::vector<ComplexityRow> rows;
        double asagm_doubling = 0.0; // counter ratio when Q_xi doubles
        double smr_doubling = 0.0;   // side-correlation ratio when Q_D doubles
        double joint_doubling = 0.0; // joint-OMP ratio when Q_D doubles (0 when refused)
    };

    ComplexityReport complexity_report(const ExperimentConfig &cfg);
    void write_complexity_csv(std::ostream &os, const ComplexityReport &report);

    // Debug dumps
    void write_matrix_csv(std::ostream &os, const ComplexMatrix &m);
    void write_support_csv(std::ostream &os, const NlosEstimate &est);
    void write_trace_csv(std::ostream &os, const std::vector<double> &trace);
}
