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

#ifndef CLUSTERPS_ORACLE_H
#define CLUSTERPS_ORACLE_H

#include <cstdint>
#include <map>
#include <unordered_map>

#include "clusterps/decoder.h"
#include "clusterps/dem.h"
#include "clusterps/metrics.h"

namespace clusterps {

struct OracleLimit {
    uint32_t max_mechanisms = 20;
};

struct ExhaustiveDecode {
    BitVec best_fault;        // minimum-weight fault reproducing the syndrome
    double best_weight = 0.0;
    uint64_t best_class = 0;  // observable mask of best_fault
    // For each logical class with a consistent fault: its minimum weight.
    std::map<uint64_t, double> class_min_weight;
};

/// Enumerates all 2^N fault vectors, keeping the minimum-weight one per
/// logical class. Weight ties break to the lexicographically smallest fault
/// vector. Throws when no fault reproduces the syndrome, when N exceeds the
/// limit, or when the model has more than 63 observables.
ExhaustiveDecode ml_decode_exhaustive(const DetectorErrorModel &model, const BitVec &syndrome,
                                      const OracleLimit &limit = {});

/// Difference between the two smallest per-class minimum weights; +infinity
/// when fewer than two classes have a consistent fault.
double logical_gap_exact(const std::map<uint64_t, double> &class_min_weights);

/// One exhaustive sweep tabulating the answer for every consistent syndrome,
/// for models small enough to decode repeatedly (needs <= 63 detectors).
class ExhaustiveOracle {
   public:
    explicit ExhaustiveOracle(const DetectorErrorModel &model, const OracleLimit &limit = {});

    /// Throws when the syndrome has no consistent fault.
    const ExhaustiveDecode &decode(const BitVec &syndrome) const;

   private:
    const DetectorErrorModel *model_;
    std::unordered_map<uint64_t, ExhaustiveDecode> table_;
};

/// Recomputes a metric straight from its defining formula, sharing no code
/// with the production metric path; used to cross-check it.
double metric_reference(const DecodeOutcome &outcome, const DetectorErrorModel &model, const MetricSpec &spec);

}  // namespace clusterps

#endif
