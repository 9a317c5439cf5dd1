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

#ifndef CLUSTERPS_WINDOW_H
#define CLUSTERPS_WINDOW_H

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "clusterps/decoder.h"
#include "clusterps/dem.h"

namespace clusterps {

struct WindowConfig {
    uint32_t window_size = 1;  // W, in rounds
    uint32_t commit_size = 1;  // F, 1 <= F <= W

    void validate() const;
};

/// Detectors whose time lies in [w*F, w*F + W - 1], sorted ascending.
std::vector<uint32_t> window_detectors(const DetectorErrorModel &model, const WindowConfig &config, uint32_t w);

/// Mechanisms touching any of `detectors`, minus the committed ones. Sorted.
std::vector<uint32_t> active_mechanisms(const DetectorErrorModel &model, const std::vector<uint32_t> &detectors,
                                        const BitVec &committed);

/// ceil((T_max + 1 - W) / F) + 1 windows, one when W covers everything.
size_t count_windows(const DetectorErrorModel &model, const WindowConfig &config);

/// Shot-independent plan for one window: its detector set, its active
/// mechanisms (which double as the local-to-global index map), the subset
/// that will be committed, and an inner decoder for the restricted model.
struct WindowStep {
    uint32_t index = 0;
    bool is_final = false;
    std::vector<uint32_t> detectors;  // global detector ids, sorted
    std::vector<uint32_t> active;     // global mechanism ids, sorted
    std::vector<uint32_t> commit;     // subset of active, sorted
    BitVec commit_local;              // over positions in `active`
    DetectorErrorModel sub_model;     // restricted model, no observables
    std::unique_ptr<BpLsdDecoder> sub_decoder;
};

/// Shot-specific outcome of one window, in local indices.
struct WindowRecord {
    uint32_t window_index = 0;
    const WindowStep *step = nullptr;
    std::vector<Cluster> clusters;  // local mechanism indices
    BitVec local_solution;          // over positions in step->active
};

struct WindowRunResult {
    BitVec correction;       // global mechanism vector
    BitVec predicted_flips;  // from the global observable matrix
    std::vector<WindowRecord> records;
    bool completed = false;  // false when the observer aborted the run
    uint32_t windows_processed = 0;
};

/// Called after each window with all records so far (the newest is last).
/// Returning false aborts the run.
using WindowObserver = std::function<bool(const std::vector<WindowRecord> &)>;

/// Sliding-window decoding: windows advance by F rounds, each is decoded on
/// the residual syndrome, and only corrections on mechanisms touching the
/// first F rounds of the window are committed (the final window commits all
/// of its active mechanisms). The window structure is shot-independent and
/// precomputed once.
class SlidingWindowDecoder {
   public:
    SlidingWindowDecoder(const DetectorErrorModel &model, const WindowConfig &config, BpConfig bp_config = {},
                         bool converged_max_confidence = false);

    size_t num_windows() const { return steps_.size(); }
    const WindowStep &step(size_t w) const { return *steps_[w]; }
    const DetectorErrorModel &model() const { return *model_; }
    const WindowConfig &config() const { return config_; }

    /// Thread-safe for concurrent calls on the same instance.
    WindowRunResult run(const BitVec &syndrome) const;
    WindowRunResult run(const BitVec &syndrome, const WindowObserver &observer) const;

   private:
    const DetectorErrorModel *model_;  // not owned; must outlive the decoder
    WindowConfig config_;
    std::vector<std::unique_ptr<WindowStep>> steps_;
};

}  // namespace clusterps

#endif
