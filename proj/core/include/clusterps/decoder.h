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

#ifndef CLUSTERPS_DECODER_H
#define CLUSTERPS_DECODER_H

#include <cstdint>
#include <memory>
#include <vector>

#include "clusterps/dem.h"

namespace clusterps {

namespace internal {
struct BpWiring;
}  // namespace internal

struct BpConfig {
    uint32_t max_iterations = 30;
    double scale = 1.0;       // min-sum normalization factor in (0, 1]
    double llr_clamp = 50.0;  // posterior llrs are clamped to +/- this

    void validate() const;
};

struct BpResult {
    std::vector<double> posterior_llrs;
    BitVec hard_decision;
    bool converged = false;
};

/// Min-sum belief propagation on the model's Tanner graph for a target
/// syndrome. Converged means the hard decision reproduces the syndrome; a
/// zero syndrome converges before any message passing with posteriors equal
/// to the prior llrs. Posteriors are reported (clamped) whether or not BP
/// converged.
BpResult bp_decode(const DetectorErrorModel &model, const BitVec &syndrome, const BpConfig &config = {});

/// One decoding cluster: a set of mechanisms whose restricted linear system
/// covers its share of the syndrome, together with the local solution found.
struct Cluster {
    std::vector<uint32_t> mechanisms;  // sorted ascending
    double llr_mass = 0.0;             // sum of model llrs over mechanisms
    BitVec local_solution;             // aligned with `mechanisms`

    size_t size() const { return mechanisms.size(); }
};

/// Mechanisms in the order they first entered any cluster; lets tests check
/// that cluster growth only ever adds mechanisms.
struct LsdTrace {
    std::vector<uint32_t> added;
};

/// Cluster decomposition of a syndrome. Seeds one cluster per violated
/// detector in ascending order at the most likely incident mechanism, grows
/// each unsolvable cluster by one mechanism per round-robin pass toward the
/// most likely boundary mechanism (ties to the lowest index), merges
/// clusters that touch a common detector, and stops growing a cluster once
/// its restricted system becomes solvable, which is tracked by incremental
/// elimination. Each finished cluster is then solved by elimination over its
/// mechanisms in decreasing likelihood order.
std::vector<Cluster> lsd_decode(const DetectorErrorModel &model, const FaultGraph &graph, const BitVec &syndrome,
                                const std::vector<double> &posterior_llrs, LsdTrace *trace = nullptr);

struct DecodeOutcome {
    BitVec correction;
    bool bp_converged = false;
    std::vector<double> posterior_llrs;
    std::vector<Cluster> clusters;
    BitVec predicted_flips;
    BitVec syndrome;
};

/// BP followed by cluster decomposition. Clusters are always grown from the
/// original syndrome, whether or not BP converged; the correction is the BP
/// hard decision when BP converged and the union of cluster solutions
/// otherwise. With converged_max_confidence set, a converged shot skips
/// clustering entirely and reports no clusters.
class BpLsdDecoder {
   public:
    explicit BpLsdDecoder(const DetectorErrorModel &model, BpConfig config = {},
                          bool converged_max_confidence = false);

    /// Thread-safe for concurrent calls on the same instance.
    DecodeOutcome decode(const BitVec &syndrome) const;

    const DetectorErrorModel &model() const { return *model_; }
    const FaultGraph &fault_graph() const { return graph_; }

   private:
    const DetectorErrorModel *model_;  // not owned; must outlive the decoder
    FaultGraph graph_;
    BpConfig config_;
    bool converged_max_confidence_;
    std::shared_ptr<const internal::BpWiring> wiring_;
};

}  // namespace clusterps

#endif
