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

#include "clusterps/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clusterps {

MechanismSet MechanismSet::all(size_t num_mechanisms) {
    MechanismSet set;
    set.ids.resize(num_mechanisms);
    for (size_t i = 0; i < num_mechanisms; i++) {
        set.ids[i] = static_cast<uint32_t>(i);
    }
    set.mask.assign(num_mechanisms, 1);
    return set;
}

MechanismSet MechanismSet::from_ids(std::vector<uint32_t> ids, size_t num_mechanisms) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (!ids.empty() && ids.back() >= num_mechanisms) {
        throw std::invalid_argument("mechanism id out of range");
    }
    MechanismSet set;
    set.mask.assign(num_mechanisms, 0);
    for (uint32_t id : ids) {
        set.mask[id] = 1;
    }
    set.ids = std::move(ids);
    return set;
}

const char *metric_family_name(MetricFamily family) {
    switch (family) {
        case MetricFamily::kClusterSize:
            return "size";
        case MetricFamily::kClusterLlr:
            return "llr";
        case MetricFamily::kCorrectionWeight:
            return "weight";
        case MetricFamily::kDetectorDensity:
            return "density";
    }
    throw std::logic_error("unknown metric family");
}

void MetricSpec::validate() const {
    if (is_cluster_family() && !(alpha > 0)) {
        throw std::invalid_argument("metric alpha must be positive");
    }
}

std::string MetricSpec::to_string() const {
    std::string out = metric_family_name(family);
    if (is_cluster_family()) {
        out += ':';
        out += std::isinf(alpha) ? "inf" : format_double(alpha);
    }
    return out;
}

MetricSpec parse_metric_spec(const std::string &text) {
    MetricSpec spec;
    size_t colon = text.find(':');
    std::string family = text.substr(0, colon);
    if (family == "size") {
        spec.family = MetricFamily::kClusterSize;
    } else if (family == "llr") {
        spec.family = MetricFamily::kClusterLlr;
    } else if (family == "weight") {
        spec.family = MetricFamily::kCorrectionWeight;
    } else if (family == "density") {
        spec.family = MetricFamily::kDetectorDensity;
    } else {
        throw std::invalid_argument("unknown metric family '" + family + "'");
    }
    if (spec.is_cluster_family()) {
        if (colon == std::string::npos) {
            throw std::invalid_argument("metric '" + family + "' needs an alpha, e.g. '" + family + ":2'");
        }
        std::string alpha = text.substr(colon + 1);
        if (alpha == "inf") {
            spec.alpha = std::numeric_limits<double>::infinity();
        } else {
            size_t used = 0;
            try {
                spec.alpha = std::stod(alpha, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used != alpha.size() || used == 0) {
                throw std::invalid_argument("bad metric alpha '" + alpha + "'");
            }
        }
    } else if (colon != std::string::npos) {
        throw std::invalid_argument("metric '" + family + "' does not take an alpha");
    }
    spec.validate();
    return spec;
}

double alpha_norm(const std::vector<double> &values, double alpha) {
    if (values.empty()) {
        return 0.0;
    }
    double top = 0.0;
    for (double v : values) {
        top = std::max(top, v);
    }
    if (top == 0.0) {
        return 0.0;
    }
    if (std::isinf(alpha)) {
        return top;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += std::pow(v / top, alpha);
    }
    return top * std::pow(sum, 1.0 / alpha);
}

namespace {

std::vector<double> restricted_sizes(const std::vector<Cluster> &clusters, const MechanismSet &restriction) {
    std::vector<double> sizes;
    for (const Cluster &cluster : clusters) {
        size_t count = 0;
        for (uint32_t mech : cluster.mechanisms) {
            count += restriction.mask[mech];
        }
        if (count > 0) {
            sizes.push_back(static_cast<double>(count));
        }
    }
    return sizes;
}

std::vector<double> restricted_masses(const std::vector<Cluster> &clusters, const MechanismSet &restriction,
                                      const std::vector<double> &llrs) {
    std::vector<double> masses;
    for (const Cluster &cluster : clusters) {
        double mass = 0.0;
        bool hit = false;
        for (uint32_t mech : cluster.mechanisms) {
            if (restriction.mask[mech]) {
                mass += llrs[mech];
                hit = true;
            }
        }
        if (hit) {
            masses.push_back(mass);
        }
    }
    return masses;
}

}  // namespace

double cluster_size_norm_fraction(const std::vector<Cluster> &clusters, const MechanismSet &restriction,
                                  double alpha) {
    std::vector<double> sizes = restricted_sizes(clusters, restriction);
    if (sizes.empty()) {
        return 0.0;
    }
    if (restriction.size() == 0) {
        throw std::invalid_argument("metric restriction set is empty");
    }
    return alpha_norm(sizes, alpha) / static_cast<double>(restriction.size());
}

double cluster_llr_norm_fraction(const std::vector<Cluster> &clusters, const MechanismSet &restriction, double alpha,
                                 const std::vector<double> &llrs) {
    std::vector<double> masses = restricted_masses(clusters, restriction, llrs);
    if (masses.empty()) {
        return 0.0;
    }
    if (restriction.size() == 0) {
        throw std::invalid_argument("metric restriction set is empty");
    }
    double total = 0.0;
    for (uint32_t mech : restriction.ids) {
        total += llrs[mech];
    }
    if (total == 0.0) {
        throw std::domain_error("llr metric undefined: zero total llr mass over the restriction");
    }
    return alpha_norm(masses, alpha) / total;
}

double correction_weight(const BitVec &correction, const std::vector<double> &llrs) {
    double weight = 0.0;
    for (size_t i = 0; i < correction.size(); i++) {
        if (correction[i]) {
            weight += llrs[i];
        }
    }
    return weight;
}

double detector_density(const BitVec &syndrome) {
    if (syndrome.empty()) {
        throw std::invalid_argument("detector density needs at least one detector");
    }
    return static_cast<double>(bit_weight(syndrome)) / static_cast<double>(syndrome.size());
}

double evaluate_metric(const MetricSpec &spec, const DecodeOutcome &outcome, const DetectorErrorModel &model) {
    spec.validate();
    switch (spec.family) {
        case MetricFamily::kClusterSize:
        case MetricFamily::kClusterLlr: {
            const MechanismSet *restriction = spec.restriction.get();
            MechanismSet fallback;
            if (restriction == nullptr) {
                fallback = MechanismSet::all(model.num_mechanisms);
                restriction = &fallback;
            }
            if (spec.family == MetricFamily::kClusterSize) {
                return cluster_size_norm_fraction(outcome.clusters, *restriction, spec.alpha);
            }
            return cluster_llr_norm_fraction(outcome.clusters, *restriction, spec.alpha, model.llrs);
        }
        case MetricFamily::kCorrectionWeight:
            return correction_weight(outcome.correction, model.llrs);
        case MetricFamily::kDetectorDensity:
            return detector_density(outcome.syndrome);
    }
    throw std::logic_error("unknown metric family");
}

}  // namespace clusterps
