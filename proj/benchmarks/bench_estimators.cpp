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

#include <benchmark/benchmark.h>

using namespace xlmimo;

namespace
{
    ExperimentConfig bench_config()
    {
        ExperimentConfig c = desk_profile();
        c.workers = 1;
        return c;
    }

    void BM_Asagm(benchmark::State &state)
    {
        ExperimentConfig c = bench_config();
        c.asagm.q_xi = int(state.range(0));
        const TrialData d = make_trial_data(c, 10.0, 0);
        std::uint64_t evals = 0;
        for (auto _ : state)
        {
            LosEstimate e = estimate_los(d.y, d.frontend, c.asagm);
            evals = e.counters.metric_evals;
            benchmark::DoNotOptimize(e.gain);
        }
        state.counters["metric_evals"] = double(evals);
    }
    BENCHMARK(BM_Asagm)->Arg(160)->Arg(320)->Arg(640)->Unit(benchmark::kMillisecond);

    void BM_SmrOmp(benchmark::State &state)
    {
        ExperimentConfig c = bench_config();
        c.nlos.q_angle = int(state.range(0));
        const TrialData d = make_trial_data(c, 10.0, 0);
        const NlosDictionaries dicts = build_dictionaries(c.array, c.nlos);
        const ComplexMatrix h_los = estimate_los(d.y, d.frontend, c.asagm).channel;
        for (auto _ : state)
        {
            NlosEstimate e = estimate_nlos(d.y, d.frontend, h_los, dicts, c.nlos, d.noise_var);
            benchmark::DoNotOptimize(e.channel.data());
        }
    }
    BENCHMARK(BM_SmrOmp)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

    void BM_JointOmp(benchmark::State &state)
    {
        ExperimentConfig c = bench_config();
        c.nlos.q_angle = int(state.range(0));
        const TrialData d = make_trial_data(c, 10.0, 0);
        const NlosDictionaries dicts = build_dictionaries(c.array, c.nlos);
        for (auto _ : state)
        {
            BaselineResult r = joint_omp_estimate(d.y, d.frontend, dicts, c.nlos.l_rx + 1);
            benchmark::DoNotOptimize(r.channel.data());
        }
    }
    BENCHMARK(BM_JointOmp)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

    void BM_GenieLs(benchmark::State &state)
    {
        ExperimentConfig c = bench_config();
        const TrialData d = make_trial_data(c, 10.0, 0);
        const GenieInfo g{d.channel.truth_geom, d.channel.truth_paths};
        for (auto _ : state)
            benchmark::DoNotOptimize(genie_ls_estimate(d.y, d.frontend, g).channel.data());
    }
    BENCHMARK(BM_GenieLs)->Unit(benchmark::kMillisecond);

    void BM_PhaseErrorSearch(benchmark::State &state)
    {
        ArrayConfig a;
        for (auto _ : state)
            benchmark::DoNotOptimize(lemma1_bruteforce(a, 100.0, int(state.range(0)), 1).max_error_rad);
    }
    BENCHMARK(BM_PhaseErrorSearch)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
}

BENCHMARK_MAIN();
