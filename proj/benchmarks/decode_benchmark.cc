// Copyright 2026 clusterps Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "clusterps/codes.h"
#include "clusterps/decoder.h"
#include "clusterps/dem.h"
#include "clusterps/metrics.h"
#include "clusterps/window.h"

using namespace clusterps;

namespace {

DetectorErrorModel benchmark_model(const std::string &family) {
    if (family == "rep11") {
        return phenomenological_dem(repetition_code(11), 11, 0.05, 0.05);
    }
    if (family == "surface5") {
        return phenomenological_dem(rotated_surface_code(5), 5, 0.02, 0.02);
    }
    if (family == "bb72") {
        return phenomenological_dem(
            bivariate_bicycle_code(6, 6, {{3, 0}, {0, 1}, {0, 2}}, {{0, 3}, {1, 0}, {2, 0}}), 6, 0.01, 0.01);
    }
    SparseBinaryMatrix seed = ldpc_34_check_matrix();
    return phenomenological_dem(hgp_code(seed, seed), 5, 0.01, 0.01);
}

void bench_global_decode(benchmark::State &state, const std::string &family) {
    DetectorErrorModel model = benchmark_model(family);
    BpLsdDecoder decoder(model);
    uint64_t shot = 0;
    for (auto _ : state) {
        state.PauseTiming();
        ShotSample sample = sample_shot(model, 1, shot++);
        state.ResumeTiming();
        DecodeOutcome outcome = decoder.decode(sample.syndrome);
        benchmark::DoNotOptimize(outcome.correction.data());
    }
}

void bench_window_decode(benchmark::State &state, const std::string &family) {
    DetectorErrorModel model = benchmark_model(family);
    SlidingWindowDecoder decoder(model, WindowConfig{3, 1});
    uint64_t shot = 0;
    for (auto _ : state) {
        state.PauseTiming();
        ShotSample sample = sample_shot(model, 1, shot++);
        state.ResumeTiming();
        WindowRunResult result = decoder.run(sample.syndrome);
        benchmark::DoNotOptimize(result.correction.data());
    }
}

void bench_sample_shot(benchmark::State &state, const std::string &family) {
    DetectorErrorModel model = benchmark_model(family);
    uint64_t shot = 0;
    for (auto _ : state) {
        ShotSample sample = sample_shot(model, 1, shot++);
        benchmark::DoNotOptimize(sample.syndrome.data());
    }
}

void bench_metric(benchmark::State &state) {
    DetectorErrorModel model = benchmark_model("rep11");
    BpLsdDecoder decoder(model);
    MechanismSet everything = MechanismSet::all(model.num_mechanisms);
    ShotSample sample = sample_shot(model, 1, 5);
    DecodeOutcome outcome = decoder.decode(sample.syndrome);
    for (auto _ : state) {
        double q = cluster_llr_norm_fraction(outcome.clusters, everything, 2.0, model.llrs);
        benchmark::DoNotOptimize(q);
    }
}

}  // namespace

BENCHMARK_CAPTURE(bench_sample_shot, rep11, "rep11");
BENCHMARK_CAPTURE(bench_global_decode, rep11, "rep11");
BENCHMARK_CAPTURE(bench_global_decode, surface5, "surface5");
BENCHMARK_CAPTURE(bench_global_decode, bb72, "bb72");
BENCHMARK_CAPTURE(bench_global_decode, hgp225, "hgp225");
BENCHMARK_CAPTURE(bench_window_decode, rep11, "rep11");
BENCHMARK_CAPTURE(bench_window_decode, surface5, "surface5");
BENCHMARK(bench_metric);

BENCHMARK_MAIN();
