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

#include "clusterps/postselect.h"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace clusterps {

void RealtimePolicy::validate() const {
    metric.validate();
    if (!metric.is_cluster_family()) {
        throw std::invalid_argument("real-time policies need a cluster metric family");
    }
    if (lookback < 1) {
        throw std::invalid_argument("lookback must be at least 1");
    }
}

ShotVerdict global_decide(const GlobalPolicy &policy, const DecodeOutcome &outcome,
                          const DetectorErrorModel &model) {
    ShotVerdict verdict;
    verdict.metric_value = evaluate_metric(policy.metric, outcome, model);
    verdict.accepted = verdict.metric_value <= policy.cutoff;
    verdict.rounds_elapsed = model.has_detector_times() ? model.num_rounds() : 1;
    return verdict;
}

CommittedClusters committed_clusters(const std::vector<WindowRecord> &records, const FaultGraph &graph, uint32_t w,
                                     uint32_t lookback) {
    if (lookback < 1 || w + 1 < lookback) {
        throw std::invalid_argument("lookback reaches before the first window");
    }
    if (w >= records.size()) {
        throw std::invalid_argument("window has not been decoded yet");
    }
    CommittedClusters out;
    BitVec inside(graph.num_mechanisms(), 0);
    std::vector<uint32_t> inside_ids;
    for (uint32_t prior = w + 1 - lookback; prior <= w; prior++) {
        const WindowRecord &record = records[prior];
        const WindowStep &step = *record.step;
        out.denominator.insert(out.denominator.end(), step.commit.begin(), step.commit.end());
        for (const Cluster &cluster : record.clusters) {
            for (uint32_t local : cluster.mechanisms) {
                if (step.commit_local[local]) {
                    uint32_t mech = step.active[local];
                    if (!inside[mech]) {
                        inside[mech] = 1;
                        inside_ids.push_back(mech);
                    }
                }
            }
        }
    }
    std::sort(out.denominator.begin(), out.denominator.end());
    std::sort(inside_ids.begin(), inside_ids.end());
    BitVec visited(graph.num_mechanisms(), 0);
    for (uint32_t start : inside_ids) {
        if (visited[start]) {
            continue;
        }
        std::vector<uint32_t> component;
        std::deque<uint32_t> queue{start};
        visited[start] = 1;
        while (!queue.empty()) {
            uint32_t mech = queue.front();
            queue.pop_front();
            component.push_back(mech);
            for (uint32_t neighbor : graph.neighbors[mech]) {
                if (inside[neighbor] && !visited[neighbor]) {
                    visited[neighbor] = 1;
                    queue.push_back(neighbor);
                }
            }
        }
        std::sort(component.begin(), component.end());
        out.components.push_back(std::move(component));
    }
    return out;
}

double committed_metric(const CommittedClusters &committed, const MetricSpec &spec,
                        const DetectorErrorModel &model) {
    spec.validate();
    if (!spec.is_cluster_family()) {
        throw std::invalid_argument("committed-cluster metrics use a cluster family");
    }
    const MechanismSet *restriction = spec.restriction.get();
    MechanismSet fallback;
    if (restriction == nullptr) {
        fallback = MechanismSet::all(model.num_mechanisms);
        restriction = &fallback;
    }
    if (spec.family == MetricFamily::kClusterSize) {
        size_t denominator = 0;
        for (uint32_t mech : committed.denominator) {
            denominator += restriction->mask[mech];
        }
        if (denominator == 0) {
            return 0.0;
        }
        std::vector<double> sizes;
        for (const std::vector<uint32_t> &component : committed.components) {
            size_t count = 0;
            for (uint32_t mech : component) {
                count += restriction->mask[mech];
            }
            if (count > 0) {
                sizes.push_back(static_cast<double>(count));
            }
        }
        return alpha_norm(sizes, spec.alpha) / static_cast<double>(denominator);
    }
    double total = 0.0;
    size_t in_restriction = 0;
    for (uint32_t mech : committed.denominator) {
        if (restriction->mask[mech]) {
            total += model.llrs[mech];
            in_restriction++;
        }
    }
    if (in_restriction == 0) {
        return 0.0;
    }
    if (total == 0.0) {
        throw std::domain_error("llr metric undefined: zero total llr mass over committed mechanisms");
    }
    std::vector<double> masses;
    for (const std::vector<uint32_t> &component : committed.components) {
        double mass = 0.0;
        bool hit = false;
        for (uint32_t mech : component) {
            if (restriction->mask[mech]) {
                mass += model.llrs[mech];
                hit = true;
            }
        }
        if (hit) {
            masses.push_back(mass);
        }
    }
    return alpha_norm(masses, spec.alpha) / total;
}

RealtimeOutcome realtime_decide(const RealtimePolicy &policy, const SlidingWindowDecoder &decoder,
                                const FaultGraph &graph, const BitVec &syndrome) {
    policy.validate();
    const DetectorErrorModel &model = decoder.model();
    uint32_t rounds = model.num_rounds();
    uint32_t window = decoder.config().window_size;
    uint32_t commit = decoder.config().commit_size;
    RealtimeOutcome out;
    WindowObserver observer = [&](const std::vector<WindowRecord> &records) {
        const WindowRecord &newest = records.back();
        uint32_t w = newest.window_index;
        bool is_final = newest.step->is_final;
        if (w + 1 < policy.lookback && !is_final) {
            return true;
        }
        uint32_t lookback = std::min<uint32_t>(policy.lookback, w + 1);
        CommittedClusters committed = committed_clusters(records, graph, w, lookback);
        double value = committed_metric(committed, policy.metric, model);
        out.checkpoint_windows.push_back(w);
        out.checkpoint_values.push_back(value);
        if (value > policy.cutoff) {
            out.verdict.accepted = false;
            out.verdict.abort_window = w;
            out.verdict.rounds_elapsed =
                static_cast<uint32_t>(std::min<uint64_t>(rounds, static_cast<uint64_t>(w) * commit + window));
            out.verdict.metric_value = value;
            return false;
        }
        return true;
    };
    WindowRunResult result = decoder.run(syndrome, observer);
    out.predicted_flips = std::move(result.predicted_flips);
    if (result.completed) {
        out.verdict.accepted = true;
        out.verdict.rounds_elapsed = rounds;
        out.verdict.metric_value = out.checkpoint_values.back();
    }
    return out;
}

}  // namespace clusterps
