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

#ifndef CLUSTERPS_POSTSELECT_H
#define CLUSTERPS_POSTSELECT_H

#include <cstdint>
#include <optional>
#include <vector>

#include "clusterps/decoder.h"
#include "clusterps/dem.h"
#include "clusterps/metrics.h"
#include "clusterps/window.h"

namespace clusterps {

/// Accept a fully decoded shot iff its metric value is at most the cutoff.
struct GlobalPolicy {
    MetricSpec metric;
    double cutoff = 1.0;
};

/// Abort mid-run when the committed-cluster metric over the last `lookback`
/// windows exceeds the cutoff.
struct RealtimePolicy {
    MetricSpec metric;  // cluster family only
    double cutoff = 1.0;
    uint32_t lookback = 1;  // L

    void validate() const;
};

struct ShotVerdict {
    bool accepted = false;
    std::optional<uint32_t> abort_window;
    uint32_t rounds_elapsed = 0;
    double metric_value = 0.0;  // value at the decision point
};

ShotVerdict global_decide(const GlobalPolicy &policy, const DecodeOutcome &outcome,
                          const DetectorErrorModel &model);

/// Committed mechanisms that lie in clusters of the last L windows,
/// regrouped into connected components of the global fault graph, plus the
/// union of those windows' commit sets (the metric denominator).
struct CommittedClusters {
    std::vector<std::vector<uint32_t>> components;  // global ids, each sorted
    std::vector<uint32_t> denominator;              // global ids, sorted
};

/// Evaluates the lookback at window w over records[w-L+1 .. w]. Requires
/// w >= L - 1.
CommittedClusters committed_clusters(const std::vector<WindowRecord> &records, const FaultGraph &graph, uint32_t w,
                                     uint32_t lookback);

/// Cluster-family metric over committed components: component sizes or llr
/// masses against the committed denominator, both intersected with the
/// spec's restriction. An empty denominator gives 0.
double committed_metric(const CommittedClusters &committed, const MetricSpec &spec,
                        const DetectorErrorModel &model);

struct RealtimeOutcome {
    ShotVerdict verdict;
    BitVec predicted_flips;  // meaningful for accepted shots
    std::vector<uint32_t> checkpoint_windows;
    std::vector<double> checkpoint_values;
};

/// Runs sliding-window decoding, evaluating the committed-cluster metric
/// after each window w >= L - 1 and after the final window (with the
/// lookback clamped when the run is shorter than L), aborting as soon as the
/// value exceeds the cutoff. An abort at window w is charged
/// min(T, w*F + W) rounds; accepted shots are charged T rounds.
RealtimeOutcome realtime_decide(const RealtimePolicy &policy, const SlidingWindowDecoder &decoder,
                                const FaultGraph &graph, const BitVec &syndrome);

}  // namespace clusterps

#endif
