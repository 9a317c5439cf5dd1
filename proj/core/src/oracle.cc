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

#include "clusterps/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace clusterps {

namespace {

// Lexicographic order on fault vectors read mechanism 0 first: the vector
// with a 0 at the first differing position is smaller.
bool lex_smaller(uint64_t a, uint64_t b) {
    if (a == b) {
        return false;
    }
    uint64_t first_diff = static_cast<uint64_t>(std::countr_zero(a ^ b));
    return ((a >> first_diff) & 1) == 0;
}

double exact_weight(uint64_t faults, const std::vector<double> &llrs) {
    double weight = 0.0;
    while (faults != 0) {
        int bit = std::countr_zero(faults);
        weight += llrs[bit];
        faults &= faults - 1;
    }
    return weight;
}

struct SweepSetup {
    std::vector<std::vector<uint64_t>> syndrome_delta;  // per mechanism
    std::vector<uint64_t> observable_delta;             // per mechanism
    size_t words = 0;
};

SweepSetup prepare_sweep(const DetectorErrorModel &model, const OracleLimit &limit) {
    if (model.num_mechanisms > limit.max_mechanisms || model.num_mechanisms > 63) {
        throw std::invalid_argument("model too large for exhaustive decoding");
    }
    if (model.num_observables > 63) {
        throw std::invalid_argument("too many observables for class masks");
    }
    SweepSetup setup;
    setup.words = (model.num_detectors + 63) / 64;
    setup.syndrome_delta.assign(model.num_mechanisms, std::vector<uint64_t>(setup.words, 0));
    setup.observable_delta.assign(model.num_mechanisms, 0);
    for (size_t mech = 0; mech < model.num_mechanisms; mech++) {
        for (uint32_t det : model.check_matrix.col(mech)) {
            setup.syndrome_delta[mech][det / 64] ^= uint64_t{1} << (det % 64);
        }
        for (uint32_t obs : model.observable_matrix.col(mech)) {
            setup.observable_delta[mech] ^= uint64_t{1} << obs;
        }
    }
    return setup;
}

// Visits every fault vector once, in Gray-code order, maintaining its
// syndrome and observable mask incrementally.
template <typename Visit>
void sweep_all_faults(const DetectorErrorModel &model, const SweepSetup &setup, Visit &&visit) {
    std::vector<uint64_t> syndrome(setup.words, 0);
    uint64_t observables = 0;
    uint64_t faults = 0;
    visit(faults, syndrome, observables);
    uint64_t total = uint64_t{1} << model.num_mechanisms;
    for (uint64_t i = 1; i < total; i++) {
        int bit = std::countr_zero(i);
        faults ^= uint64_t{1} << bit;
        for (size_t w = 0; w < setup.words; w++) {
            syndrome[w] ^= setup.syndrome_delta[bit][w];
        }
        observables ^= setup.observable_delta[bit];
        visit(faults, syndrome, observables);
    }
}

BitVec mask_to_bits(uint64_t mask, size_t n) {
    BitVec bits(n, 0);
    for (size_t i = 0; i < n; i++) {
        bits[i] = (mask >> i) & 1;
    }
    return bits;
}

struct Candidate {
    double weight = 0.0;
    uint64_t faults = 0;
    bool present = false;

    void offer(double w, uint64_t f) {
        if (!present || w < weight || (w == weight && lex_smaller(f, faults))) {
            present = true;
            weight = w;
            faults = f;
        }
    }
};

}  // namespace

ExhaustiveDecode ml_decode_exhaustive(const DetectorErrorModel &model, const BitVec &syndrome,
                                      const OracleLimit &limit) {
    model.validate();
    if (syndrome.size() != model.num_detectors) {
        throw std::invalid_argument("syndrome length does not match the model's detector count");
    }
    SweepSetup setup = prepare_sweep(model, limit);
    std::vector<uint64_t> target(setup.words, 0);
    for (size_t det = 0; det < syndrome.size(); det++) {
        if (syndrome[det]) {
            target[det / 64] |= uint64_t{1} << (det % 64);
        }
    }
    Candidate best;
    std::map<uint64_t, Candidate> per_class;
    sweep_all_faults(model, setup, [&](uint64_t faults, const std::vector<uint64_t> &acc, uint64_t observables) {
        if (acc != target) {
            return;
        }
        double weight = exact_weight(faults, model.llrs);
        best.offer(weight, faults);
        per_class[observables].offer(weight, faults);
    });
    if (!best.present) {
        throw std::runtime_error("no fault vector reproduces the syndrome");
    }
    ExhaustiveDecode out;
    out.best_fault = mask_to_bits(best.faults, model.num_mechanisms);
    out.best_weight = best.weight;
    for (const auto &[cls, candidate] : per_class) {
        out.class_min_weight[cls] = candidate.weight;
        if (candidate.faults == best.faults) {
            out.best_class = cls;
        }
    }
    return out;
}

double logical_gap_exact(const std::map<uint64_t, double> &class_min_weights) {
    if (class_min_weights.size() < 2) {
        return std::numeric_limits<double>::infinity();
    }
    double first = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (const auto &[cls, weight] : class_min_weights) {
        if (weight < first) {
            second = first;
            first = weight;
        } else if (weight < second) {
            second = weight;
        }
    }
    return second - first;
}

ExhaustiveOracle::ExhaustiveOracle(const DetectorErrorModel &model, const OracleLimit &limit) : model_(&model) {
    model.validate();
    if (model.num_detectors > 63) {
        throw std::invalid_argument("too many detectors to tabulate every syndrome");
    }
    SweepSetup setup = prepare_sweep(model, limit);
    struct Entry {
        Candidate best;
        std::map<uint64_t, Candidate> per_class;
    };
    std::unordered_map<uint64_t, Entry> entries;
    sweep_all_faults(model, setup, [&](uint64_t faults, const std::vector<uint64_t> &acc, uint64_t observables) {
        double weight = exact_weight(faults, model_->llrs);
        Entry &entry = entries[acc.empty() ? 0 : acc[0]];
        entry.best.offer(weight, faults);
        entry.per_class[observables].offer(weight, faults);
    });
    for (const auto &[key, entry] : entries) {
        ExhaustiveDecode decode;
        decode.best_fault = mask_to_bits(entry.best.faults, model.num_mechanisms);
        decode.best_weight = entry.best.weight;
        for (const auto &[cls, candidate] : entry.per_class) {
            decode.class_min_weight[cls] = candidate.weight;
            if (candidate.faults == entry.best.faults) {
                decode.best_class = cls;
            }
        }
        table_.emplace(key, std::move(decode));
    }
}

const ExhaustiveDecode &ExhaustiveOracle::decode(const BitVec &syndrome) const {
    if (syndrome.size() != model_->num_detectors) {
        throw std::invalid_argument("syndrome length does not match the model's detector count");
    }
    uint64_t key = 0;
    for (size_t det = 0; det < syndrome.size(); det++) {
        if (syndrome[det]) {
            key |= uint64_t{1} << det;
        }
    }
    auto it = table_.find(key);
    if (it == table_.end()) {
        throw std::runtime_error("no fault vector reproduces the syndrome");
    }
    return it->second;
}

double metric_reference(const DecodeOutcome &outcome, const DetectorErrorModel &model, const MetricSpec &spec) {
    std::vector<uint8_t> in_restriction(model.num_mechanisms, 1);
    size_t restriction_size = model.num_mechanisms;
    if (spec.restriction != nullptr) {
        in_restriction.assign(model.num_mechanisms, 0);
        restriction_size = 0;
        for (uint32_t id : spec.restriction->ids) {
            in_restriction[id] = 1;
            restriction_size++;
        }
    }
    switch (spec.family) {
        case MetricFamily::kClusterSize: {
            if (restriction_size == 0) {
                throw std::invalid_argument("metric restriction set is empty");
            }
            if (std::isinf(spec.alpha)) {
                double largest = 0.0;
                for (const Cluster &cluster : outcome.clusters) {
                    double n = 0.0;
                    for (uint32_t mech : cluster.mechanisms) {
                        n += in_restriction[mech];
                    }
                    largest = std::max(largest, n);
                }
                return largest / static_cast<double>(restriction_size);
            }
            double sum = 0.0;
            for (const Cluster &cluster : outcome.clusters) {
                double n = 0.0;
                for (uint32_t mech : cluster.mechanisms) {
                    n += in_restriction[mech];
                }
                sum += std::pow(n, spec.alpha);
            }
            return std::pow(sum, 1.0 / spec.alpha) / static_cast<double>(restriction_size);
        }
        case MetricFamily::kClusterLlr: {
            if (restriction_size == 0) {
                throw std::invalid_argument("metric restriction set is empty");
            }
            double total = 0.0;
            for (size_t mech = 0; mech < model.num_mechanisms; mech++) {
                if (in_restriction[mech]) {
                    total += model.llrs[mech];
                }
            }
            if (total == 0.0) {
                throw std::domain_error("llr metric undefined: zero total llr mass over the restriction");
            }
            if (std::isinf(spec.alpha)) {
                double largest = 0.0;
                for (const Cluster &cluster : outcome.clusters) {
                    double mass = 0.0;
                    for (uint32_t mech : cluster.mechanisms) {
                        if (in_restriction[mech]) {
                            mass += model.llrs[mech];
                        }
                    }
                    largest = std::max(largest, mass);
                }
                return largest / total;
            }
            double sum = 0.0;
            for (const Cluster &cluster : outcome.clusters) {
                double mass = 0.0;
                bool hit = false;
                for (uint32_t mech : cluster.mechanisms) {
                    if (in_restriction[mech]) {
                        mass += model.llrs[mech];
                        hit = true;
                    }
                }
                if (hit) {
                    sum += std::pow(mass, spec.alpha);
                }
            }
            return std::pow(sum, 1.0 / spec.alpha) / total;
        }
        case MetricFamily::kCorrectionWeight: {
            double weight = 0.0;
            for (size_t mech = 0; mech < outcome.correction.size(); mech++) {
                if (outcome.correction[mech]) {
                    weight += model.llrs[mech];
                }
            }
            return weight;
        }
        case MetricFamily::kDetectorDensity: {
            if (outcome.syndrome.empty()) {
                throw std::invalid_argument("detector density needs at least one detector");
            }
            double violated = 0.0;
            for (uint8_t bit : outcome.syndrome) {
                violated += bit;
            }
            return violated / static_cast<double>(outcome.syndrome.size());
        }
    }
    throw std::logic_error("unknown metric family");
}

}  // namespace clusterps
