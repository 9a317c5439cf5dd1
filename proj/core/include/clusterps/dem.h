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

#ifndef CLUSTERPS_DEM_H
#define CLUSTERPS_DEM_H

#include <cstdint>
#include <string>
#include <vector>

#include "clusterps/bits.h"
#include "clusterps/sparse.h"

namespace clusterps {

/// Detector error model: independent binary error mechanisms, each with a
/// prior, a set of detectors it flips and a set of logical observables it
/// flips. Detectors may carry a time coordinate (the syndrome round they
/// belong to), which windowed decoding requires.
struct DetectorErrorModel {
    size_t num_detectors = 0;
    size_t num_mechanisms = 0;
    size_t num_observables = 0;
    SparseBinaryMatrix check_matrix;       // num_detectors x num_mechanisms
    SparseBinaryMatrix observable_matrix;  // num_observables x num_mechanisms
    std::vector<double> priors;            // each in (0, 0.5]
    std::vector<double> llrs;              // ln((1 - p) / p), derived from priors
    std::vector<uint32_t> detector_times;  // empty, or one round index per detector
    bool priors_were_folded = false;       // some parsed prior was >= 0.5

    bool has_detector_times() const { return !detector_times.empty(); }
    /// max detector time + 1. Requires detector times.
    uint32_t num_rounds() const;

    /// Checks structural invariants; throws std::invalid_argument on failure.
    void validate() const;
};

/// Assembles a model from per-mechanism supports and derives the llrs.
/// Priors must already be in (0, 0.5].
DetectorErrorModel make_dem(size_t num_detectors, size_t num_observables,
                            std::vector<std::vector<uint32_t>> detector_columns,
                            std::vector<std::vector<uint32_t>> observable_columns, std::vector<double> priors,
                            std::vector<uint32_t> detector_times = {});

/// Parses the text format: one `error(p) D<i>... L<j>...` line per mechanism,
/// `#` comment lines, and an optional `times: t0 t1 ...` header giving one
/// round index per detector. Detector and observable counts are inferred.
/// Repeated D/L references on one line cancel mod 2. Priors in [0.5, 1) are
/// folded to 1-p and flagged. Throws std::invalid_argument with the line
/// number on malformed input.
DetectorErrorModel parse_dem(const std::string &text);

/// Canonical form: optional times header, then one error line per mechanism
/// in column order with detectors ascending before observables ascending.
/// Probabilities use the shortest representation that round-trips the double.
std::string serialize_dem(const DetectorErrorModel &model);

/// Mechanism adjacency: two mechanisms are neighbors when they share a
/// detector. Lists are sorted and contain no self loops.
struct FaultGraph {
    std::vector<std::vector<uint32_t>> neighbors;
    size_t num_mechanisms() const { return neighbors.size(); }
};

FaultGraph build_fault_graph(const DetectorErrorModel &model);

struct ShotSample {
    BitVec faults;            // num_mechanisms
    BitVec syndrome;          // num_detectors
    BitVec observable_flips;  // num_observables
};

/// Draws shot `shot_index` of the stream identified by `seed`. The result
/// depends only on (model, seed, shot_index).
ShotSample sample_shot(const DetectorErrorModel &model, uint64_t seed, uint64_t shot_index);

std::vector<ShotSample> sample_shots(const DetectorErrorModel &model, uint64_t num_shots, uint64_t seed);

}  // namespace clusterps

#endif
