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

#include <catch2/catch_amalgamated.hpp>

#include "xlmimo/harness.hpp"

#include "oracles.hpp"

#include <cmath>
#include <sstream>

using namespace xlmimo;

namespace
{
    ExperimentConfig small_config()
    {
        ExperimentConfig c = desk_profile();
        c.array.n_rx = c.array.n_tx = 16;
        c.array.k_rx = c.array.k_tx = 2;
        c.m_rx = c.m_tx = 8;
        c.asagm.q_xi = 64;
        c.asagm.q_alpha = 3;
        c.nlos.q_angle = 16;
        c.nlos.q_curv = 3;
        c.nlos.l_rx = c.nlos.l_tx = 2;
        c.scene.num_paths = 2;
        c.pe.q_angle = 16;
        c.pe.q_range = 16;
        c.pe.neighborhood = 3;
        c.points = {0.0, 20.0};
        c.trials = 4;
        c.workers = 1;
        return c;
    }

    std::string csv_of(const std::vector<SweepRow> &rows)
    {
        std::ostringstream os;
        write_sweep_csv(os, rows);
        return os.str();
    }

    const EstimatorOutcome &outcome(const TrialRecord &r, const std::string &name)
    {
        for (const auto &o : r.outcomes)
            if (o.estimator == name)
                return o;
        FAIL("missing estimator " << name);
        return r.outcomes.front();
    }
}

TEST_CASE("nmse definition and zero truth")
{
    ComplexMatrix t(2, 2), e(2, 2);
    t << 1.0, 0.0, 0.0, 1.0;
    e << 1.0, 0.0, 0.0, 0.0;
    CHECK(nmse(e, t) == Catch::Approx(0.5));
    CHECK(nmse(t, t) == 0.0);
    CHECK(nmse(ComplexMatrix::Zero(2, 2), t) == Catch::Approx(1.0));

    std::mt19937_64 gen(3);
    ComplexMatrix r = oracle::random_matrix(gen, 5, 7);
    ComplexMatrix s = oracle::random_matrix(gen, 5, 7);
    CHECK(nmse(s, r) == Catch::Approx(oracle::nmse(s, r)).epsilon(1e-12));

    try
    {
        nmse(t, ComplexMatrix::Zero(2, 2));
        FAIL("expected zero_truth");
    }
    catch (const Error &err)
    {
        CHECK(err.kind() == ErrorKind::zero_truth);
    }
}

TEST_CASE("trials are deterministic and share random draws across estimators")
{
    ExperimentConfig c = small_config();
    const SweepContext ctx = make_context(c);
    TrialRecord a = run_trial(c, ctx, 10.0, 3);
    TrialRecord b = run_trial(c, ctx, 10.0, 3);
    REQUIRE(a.outcomes.size() == 4);
    for (std::size_t k = 0; k < a.outcomes.size(); ++k)
    {
        CHECK(a.outcomes[k].error.empty());
        CHECK(a.outcomes[k].nmse == b.outcomes[k].nmse);
    }

    // dropping estimators does not change the draws seen by the rest
    ExperimentConfig only = c;
    only.estimators = {"genie_ls"};
    TrialRecord g = run_trial(only, ctx, 10.0, 3);
    REQUIRE(g.outcomes.size() == 1);
    CHECK(g.outcomes[0].nmse == outcome(a, "genie_ls").nmse);

    TrialData d = make_trial_data(c, 10.0, 3);
    CHECK(nmse(d.channel.total(), d.channel.total()) == 0.0);
    CHECK(d.noise_var == Catch::Approx(0.1));
    CHECK(d.y.rows() == c.m_rx);
    CHECK(d.y.cols() == c.m_tx);
    TrialData d2 = make_trial_data(c, 20.0, 3);
    CHECK(d2.channel.los == d.channel.los);
    CHECK(d2.frontend.combiner() == d.frontend.combiner());

    TrialRecord other = run_trial(c, ctx, 10.0, 4);
    CHECK(outcome(other, "genie_ls").nmse != outcome(a, "genie_ls").nmse);
}

TEST_CASE("timing is zero unless requested")
{
    ExperimentConfig c = small_config();
    c.estimators = {"asagm_smr"};
    TrialRecord r = run_trial(c, 10.0, 0);
    CHECK(r.outcomes[0].time_ms == 0.0);
    c.record_timing = true;
    r = run_trial(c, 10.0, 0);
    CHECK(r.outcomes[0].time_ms > 0.0);
}

TEST_CASE("sweep rows and serial versus parallel output")
{
    ExperimentConfig c = small_config();
    c.points = {5.0};
    c.trials = 1;
    c.estimators = {"asagm_smr"};
    auto rows = run_sweep(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trials == 1);
    CHECK(rows[0].errors == 0);
    CHECK(rows[0].nmse_db == Catch::Approx(10.0 * std::log10(rows[0].mean_nmse)));
    CHECK(rows[0].metric_evals > 0.0);

    ExperimentConfig s = small_config();
    std::vector<TrialRecord> recs;
    auto serial = run_sweep(s, &recs);
    REQUIRE(serial.size() == 2 * 4);
    REQUIRE(recs.size() == 2 * 4);

    double sum = 0.0;
    for (int t = 0; t < 4; ++t)
        sum += outcome(recs[std::size_t(4 + t)], "genie_ls").nmse;
    CHECK(serial[4 + 2].estimator == "genie_ls");
    CHECK(serial[4 + 2].mean_nmse == Catch::Approx(sum / 4).epsilon(1e-14));

    CHECK(serial[0].snr_linear == Catch::Approx(1.0));
    CHECK(serial[4].snr_linear == Catch::Approx(100.0));

    ExperimentConfig p = s;
    p.workers = 3;
    CHECK(csv_of(run_sweep(p)) == csv_of(serial));
    CHECK(csv_of(run_sweep(s)) == csv_of(serial));
}

TEST_CASE("failed trials are excluded from the means")
{
    ExperimentConfig c = small_config();
    c.scene.num_paths = 0;
    c.scene.kappa = 0.0; // no LoS power and no paths: the truth is zero
    c.points = {10.0};
    c.trials = 2;
    c.estimators = {"genie_ls"};
    auto rows = run_sweep(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].errors == 2);
    CHECK(rows[0].trials == 0);
    CHECK(std::isnan(rows[0].mean_nmse));

    std::vector<TrialRecord> recs;
    run_sweep(c, &recs);
    CHECK(recs[0].outcomes[0].error == "ZeroTruth");
}

TEST_CASE("noiseless LoS-only trial")
{
    ExperimentConfig c = small_config();
    c.scene.num_paths = 0;
    c.scene.truth_model = LosModel::parabolic;
    c.estimators = {"genie_ls", "asagm_smr"};
    TrialRecord r = run_trial(c, 300.0, 0);
    CHECK(outcome(r, "genie_ls").nmse < 1e-20);
    CHECK(outcome(r, "asagm_smr").nmse < 0.05);
}

TEST_CASE("genie LS lower bounds the proposed estimator")
{
    ExperimentConfig c = small_config();
    c.estimators = {"asagm_smr", "genie_ls"};
    const SweepContext ctx = make_context(c);
    int below = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t)
    {
        TrialRecord r = run_trial(c, ctx, 10.0, t);
        below += outcome(r, "genie_ls").nmse <= outcome(r, "asagm_smr").nmse;
    }
    CHECK(below >= 19);
}

TEST_CASE("sweep axes")
{
    ExperimentConfig c = small_config();
    c.estimators = {"genie_ls"};
    c.axis = SweepAxis::pilots;
    c.points = {4.0, 8.0};
    c.trials = 2;
    auto rows = run_sweep(c);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].errors == 0);

    c.points = {6.0};
    CHECK_NOTHROW(c.validate());
    c.points = {5.0};
    CHECK_THROWS_AS(c.validate(), Error);
    c.points = {32.0};
    CHECK_THROWS_AS(c.validate(), Error);

    c.axis = SweepAxis::distance;
    c.points = {-1.0};
    CHECK_THROWS_AS(c.validate(), Error);
    c.points = {20.0, 50.0};
    CHECK(run_sweep(c).size() == 2);

    CHECK(sweep_axis_from_string("distance") == SweepAxis::distance);
    CHECK(std::string(to_string(SweepAxis::pilots)) == "pilots");
    CHECK_THROWS_AS(sweep_axis_from_string("range"), Error);
}

TEST_CASE("config parsing")
{
    ExperimentConfig d = parse_config("{}");
    CHECK(dump_config(d) == dump_config(desk_profile()));

    ExperimentConfig p = parse_config(R"({"profile": "paper"})");
    CHECK(p.array.n_rx == 128);
    CHECK(p.asagm.q_xi == 640);
    CHECK(p.nlos.q_angle == 256);

    ExperimentConfig c = parse_config(R"({"asagm": {"q_xi": 100}, "scene": {"num_paths": 5}, "sweep": {"trials": 7}})");
    CHECK(c.asagm.q_xi == 100);
    CHECK(c.scene.num_paths == 5);
    CHECK(c.nlos.l_rx == 5);
    CHECK(c.trials == 7);

    CHECK_THROWS_AS(parse_config(R"({"asagm": {"qxi": 100}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"profile": "huge"})"), Error);
    CHECK_THROWS_AS(parse_config("{not json"), Error);

    ExperimentConfig s = small_config();
    s.axis = SweepAxis::distance;
    s.points = {10.0, 20.0, 40.0};
    s.estimators = {"joint_omp"};
    s.scene.angle_min = -0.5;
    ExperimentConfig back = parse_config(dump_config(s));
    CHECK(dump_config(back) == dump_config(s));
    CHECK(back.scene.angle_min == Catch::Approx(-0.5).epsilon(1e-12));
    CHECK(back.points == s.points);
}

TEST_CASE("complexity report doubling ratios")
{
    ExperimentConfig c = small_config();
    ComplexityReport r = complexity_report(c);
    CHECK(r.rows.size() == 6);
    CHECK(r.asagm_doubling == Catch::Approx(2.0).epsilon(0.05));
    CHECK(r.smr_doubling == Catch::Approx(2.0).epsilon(0.05));
    CHECK(r.joint_doubling == Catch::Approx(4.0).epsilon(0.10));
    for (const auto &row : r.rows)
        CHECK(row.value > 0.0);
    std::ostringstream os;
    write_complexity_csv(os, r);
    CHECK(os.str().find("stage") != std::string::npos);
}
