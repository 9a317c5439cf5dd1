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

#ifndef CLUSTERPS_HARNESS_H
#define CLUSTERPS_HARNESS_H

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "clusterps/decoder.h"
#include "clusterps/dem.h"
#include "clusterps/metrics.h"
#include "clusterps/postselect.h"
#include "clusterps/stats.h"
#include "clusterps/window.h"

namespace clusterps {

enum class RunMode { kGlobal, kRealtime };

const char *run_mode_name(RunMode mode);

struct ExperimentConfig {
    std::string code_name = "custom";
    double noise_rate = 0.0;  // echoed into the CSV "p" column
    uint64_t shots = 1;
    uint64_t seed = 0;
    RunMode mode = RunMode::kGlobal;
    BpConfig bp;
    bool converged_max_confidence = false;
    WindowConfig window;    // realtime mode only
    uint32_t lookback = 1;  // realtime mode only
    std::vector<MetricSpec> metrics;
    // Cutoffs to sweep; empty means the automatic quantile grid over the
    // observed metric values.
    std::vector<double> cutoffs;
    // Restrict cluster metrics to mechanisms that touch at least one
    // detector (the CLI's --restrict z).
    bool restrict_to_detectable = false;
    uint32_t threads = 1;

    void validate() const;
};

/// One (metric, cutoff) line of the sweep.
struct SweepRow {
    std::string metric;  // family name: size, llr, weight, density
    double alpha = std::numeric_limits<double>::quiet_NaN();  // NaN when the family has none
    double cutoff = 0.0;
    uint64_t shots = 0;
    uint64_t accepted = 0;
    uint64_t errors = 0;  // logical errors among accepted shots
    bool p_log_defined = false;
    double p_log = 0.0;
    double p_log_lo = 0.0;
    double p_log_hi = 0.0;
    double p_abort = 0.0;
    bool t_accepted_defined = false;
    double t_accepted_mean = 0.0;
    uint64_t early_aborts = 0;  // aborts before the final window (realtime)
};

struct ExperimentResult {
    uint32_t rounds = 1;  // T used for time accounting
    uint64_t total_logical_errors = 0;  // without post-selection
    std::vector<SweepRow> rows;
};

/// Samples `config.shots` shots of the model, decodes each once (globally or
/// through sliding windows), records per-shot metric values, then evaluates
/// every (metric, cutoff) pair against the records. Deterministic for a
/// fixed seed, independent of `threads`.
ExperimentResult run_experiment(const DetectorErrorModel &model, const ExperimentConfig &config);

struct RoundPoint {
    double rounds = 0.0;  // T
    double p_abort = 0.0;
    double p_log = 0.0;
};

struct RoundFit {
    double g = 0.0;              // -slope of ln(1 - p_abort) vs T
    double p_abort_round = 0.0;  // 1 - exp(-g)
    double r_squared = 1.0;
    std::vector<double> p_log_per_round;  // p_log / T per used point
    double p_log_per_round_slope = 0.0;
    size_t points_used = 0;
};

/// Fits ln(1 - p_abort) linearly against T over >= 3 distinct T values.
/// Points with p_abort = 1 are dropped.
RoundFit per_round_fit(const std::vector<RoundPoint> &points);

/// CSV with the fixed header
/// code,p,T,mode,W,F,L,metric,alpha,cutoff,shots,accepted,errors,p_log,
/// p_log_lo,p_log_hi,p_abort,t_accepted_mean. Undefined fields are empty.
std::string results_csv(const ExperimentConfig &config, const ExperimentResult &result);

/// JSON manifest echoing the configuration, seed, and version string.
std::string results_manifest_json(const ExperimentConfig &config, const ExperimentResult &result);

/// Log-log trade-off plot (p_log vs p_abort and p_log vs mean accepted
/// time) as a standalone SVG.
std::string tradeoff_plot_svg(const ExperimentResult &result);

void write_text_file(const std::string &path, const std::string &content);

/// Splits [0, n) into `threads` contiguous chunks run concurrently. The
/// partition depends only on n and `threads`; callers write to per-index
/// slots, so results do not depend on scheduling.
void parallel_for(uint64_t n, uint32_t threads, const std::function<void(uint64_t, uint64_t)> &body);

}  // namespace clusterps

#endif
