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

#ifndef CLUSTERPS_METRICS_H
#define CLUSTERPS_METRICS_H

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "clusterps/decoder.h"
#include "clusterps/dem.h"

namespace clusterps {

/// A set of mechanism indices, kept both as a sorted list and as a mask.
struct MechanismSet {
    std::vector<uint32_t> ids;  // sorted ascending
    BitVec mask;                // length num_mechanisms

    static MechanismSet all(size_t num_mechanisms);
    static MechanismSet from_ids(std::vector<uint32_t> ids, size_t num_mechanisms);

    size_t size() const { return ids.size(); }
    bool contains(uint32_t id) const { return mask[id] != 0; }
};

enum class MetricFamily {
    kClusterSize,
    kClusterLlr,
    kCorrectionWeight,
    kDetectorDensity,
};

/// Short family name as used in spec strings and CSV: "size", "llr",
/// "weight", "density".
const char *metric_family_name(MetricFamily family);

struct MetricSpec {
    MetricFamily family = MetricFamily::kClusterSize;
    // Norm order for the cluster families; positive, may be infinity.
    double alpha = 1.0;
    // Mechanisms the metric is restricted to; null means all mechanisms.
    std::shared_ptr<const MechanismSet> restriction;

    bool is_cluster_family() const {
        return family == MetricFamily::kClusterSize || family == MetricFamily::kClusterLlr;
    }
    void validate() const;
    /// "size:2", "llr:inf", "weight", "density".
    std::string to_string() const;
};

/// Parses "size:2", "llr:inf", "weight", "density". Cluster families require
/// an alpha given as a decimal or the literal "inf"; the other families
/// reject one.
MetricSpec parse_metric_spec(const std::string &text);

/// alpha-norm of `values` (each >= 0), computed in scaled form so large
/// alpha does not overflow. alpha = infinity gives the max.
double alpha_norm(const std::vector<double> &values, double alpha);

/// (sum_i |C_i ∩ E|^alpha)^(1/alpha) / |E|, clusters intersected with the
/// restriction and empty intersections dropped.
double cluster_size_norm_fraction(const std::vector<Cluster> &clusters, const MechanismSet &restriction,
                                  double alpha);

/// Same with llr masses: numerator over sum_{e in C_i ∩ E} w_e, denominator
/// sum_{e in E} w_e. Zero total mass over E is an error.
double cluster_llr_norm_fraction(const std::vector<Cluster> &clusters, const MechanismSet &restriction, double alpha,
                                 const std::vector<double> &llrs);

/// Sum of llrs over the correction's support.
double correction_weight(const BitVec &correction, const std::vector<double> &llrs);

/// Fraction of violated detectors.
double detector_density(const BitVec &syndrome);

/// Dispatches a metric spec against a decode outcome.
double evaluate_metric(const MetricSpec &spec, const DecodeOutcome &outcome, const DetectorErrorModel &model);

}  // namespace clusterps

#endif
