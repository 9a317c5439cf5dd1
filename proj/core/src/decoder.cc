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

#include "clusterps/decoder.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace clusterps {

namespace internal {

// Flat adjacency of the Tanner graph, in both check-major and var-major
// order. Edge ids refer to the check-major layout.
struct BpWiring {
    uint32_t num_checks = 0;
    uint32_t num_vars = 0;
    uint32_t num_edges = 0;
    std::vector<uint32_t> check_start;  // size num_checks + 1
    std::vector<uint32_t> edge_var;     // size num_edges
    std::vector<uint32_t> var_start;    // size num_vars + 1
    std::vector<uint32_t> var_edge;     // size num_edges
};

}  // namespace internal

namespace {

using internal::BpWiring;

// Messages saturate here so that opposing saturated checks cancel to a
// finite value instead of producing nan.
constexpr double kMaxMessage = 1e30;

BpWiring build_wiring(const DetectorErrorModel &model) {
    BpWiring wiring;
    wiring.num_checks = static_cast<uint32_t>(model.num_detectors);
    wiring.num_vars = static_cast<uint32_t>(model.num_mechanisms);
    wiring.check_start.assign(wiring.num_checks + 1, 0);
    for (uint32_t c = 0; c < wiring.num_checks; c++) {
        wiring.check_start[c + 1] = wiring.check_start[c] + static_cast<uint32_t>(model.check_matrix.row(c).size());
    }
    wiring.num_edges = wiring.check_start[wiring.num_checks];
    wiring.edge_var.reserve(wiring.num_edges);
    for (uint32_t c = 0; c < wiring.num_checks; c++) {
        for (uint32_t v : model.check_matrix.row(c)) {
            wiring.edge_var.push_back(v);
        }
    }
    wiring.var_start.assign(wiring.num_vars + 1, 0);
    for (uint32_t e = 0; e < wiring.num_edges; e++) {
        wiring.var_start[wiring.edge_var[e] + 1]++;
    }
    for (uint32_t v = 0; v < wiring.num_vars; v++) {
        wiring.var_start[v + 1] += wiring.var_start[v];
    }
    wiring.var_edge.resize(wiring.num_edges);
    std::vector<uint32_t> cursor(wiring.var_start.begin(), wiring.var_start.end() - 1);
    for (uint32_t e = 0; e < wiring.num_edges; e++) {
        wiring.var_edge[cursor[wiring.edge_var[e]]++] = e;
    }
    return wiring;
}

bool hard_decision_matches(const BpWiring &wiring, const BitVec &hard, const BitVec &syndrome) {
    for (uint32_t c = 0; c < wiring.num_checks; c++) {
        uint8_t parity = 0;
        for (uint32_t e = wiring.check_start[c]; e < wiring.check_start[c + 1]; e++) {
            parity ^= hard[wiring.edge_var[e]];
        }
        if (parity != syndrome[c]) {
            return false;
        }
    }
    return true;
}

BpResult bp_run(const BpWiring &wiring, const DetectorErrorModel &model, const BitVec &syndrome,
                const BpConfig &config) {
    config.validate();
    if (syndrome.size() != model.num_detectors) {
        throw std::invalid_argument("syndrome length does not match the model's detector count");
    }
    BpResult result;
    result.posterior_llrs = model.llrs;
    result.hard_decision.assign(wiring.num_vars, 0);
    for (uint32_t v = 0; v < wiring.num_vars; v++) {
        result.hard_decision[v] = result.posterior_llrs[v] < 0 ? 1 : 0;
    }
    if (hard_decision_matches(wiring, result.hard_decision, syndrome)) {
        result.converged = true;
    } else {
        std::vector<double> msg_vc(wiring.num_edges);
        std::vector<double> msg_cv(wiring.num_edges, 0.0);
        for (uint32_t e = 0; e < wiring.num_edges; e++) {
            msg_vc[e] = model.llrs[wiring.edge_var[e]];
        }
        for (uint32_t iteration = 0; iteration < config.max_iterations; iteration++) {
            for (uint32_t c = 0; c < wiring.num_checks; c++) {
                uint32_t begin = wiring.check_start[c];
                uint32_t end = wiring.check_start[c + 1];
                double min1 = kMaxMessage;
                double min2 = kMaxMessage;
                uint32_t argmin = begin;
                double sign_product = syndrome[c] ? -1.0 : 1.0;
                for (uint32_t e = begin; e < end; e++) {
                    double magnitude = std::fabs(msg_vc[e]);
                    if (magnitude < min1) {
                        min2 = min1;
                        min1 = magnitude;
                        argmin = e;
                    } else if (magnitude < min2) {
                        min2 = magnitude;
                    }
                    if (msg_vc[e] < 0) {
                        sign_product = -sign_product;
                    }
                }
                for (uint32_t e = begin; e < end; e++) {
                    double excluded_min = e == argmin ? min2 : min1;
                    double sign = msg_vc[e] < 0 ? -sign_product : sign_product;
                    msg_cv[e] = config.scale * sign * excluded_min;
                }
            }
            for (uint32_t v = 0; v < wiring.num_vars; v++) {
                double total = model.llrs[v];
                for (uint32_t i = wiring.var_start[v]; i < wiring.var_start[v + 1]; i++) {
                    total += msg_cv[wiring.var_edge[i]];
                }
                result.posterior_llrs[v] = total;
                result.hard_decision[v] = total < 0 ? 1 : 0;
                for (uint32_t i = wiring.var_start[v]; i < wiring.var_start[v + 1]; i++) {
                    msg_vc[wiring.var_edge[i]] = total - msg_cv[wiring.var_edge[i]];
                }
            }
            if (hard_decision_matches(wiring, result.hard_decision, syndrome)) {
                result.converged = true;
                break;
            }
        }
    }
    for (double &llr : result.posterior_llrs) {
        llr = std::clamp(llr, -config.llr_clamp, config.llr_clamp);
    }
    return result;
}

// Symmetric difference of two ascending row lists.
std::vector<uint32_t> xor_sorted(const std::vector<uint32_t> &a, const std::vector<uint32_t> &b) {
    std::vector<uint32_t> out;
    out.reserve(a.size() + b.size());
    size_t i = 0;
    size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else if (b[j] < a[i]) {
            out.push_back(b[j++]);
        } else {
            i++;
            j++;
        }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
    return out;
}

void insert_sorted(std::vector<uint32_t> &rows, uint32_t row) {
    rows.insert(std::lower_bound(rows.begin(), rows.end(), row), row);
}

struct HeapEntry {
    double llr;
    uint32_t mech;
};

struct HeapLater {
    bool operator()(const HeapEntry &a, const HeapEntry &b) const {
        return a.llr != b.llr ? a.llr > b.llr : a.mech > b.mech;
    }
};

struct ClusterState {
    bool alive = true;
    std::vector<uint32_t> mechs;
    std::vector<uint32_t> dets;
    // Echelon basis of the columns added so far: pivot row -> reduced column
    // whose minimum row is that pivot.
    std::map<uint32_t, std::vector<uint32_t>> pivots;
    // Syndrome restricted to owned detectors, forward-reduced until its
    // minimum row is not a pivot. Empty means the cluster is solvable.
    std::vector<uint32_t> residual;
    std::vector<HeapEntry> frontier;
};

class LsdRun {
   public:
    LsdRun(const DetectorErrorModel &model, const FaultGraph &graph, const BitVec &syndrome,
           const std::vector<double> &posterior_llrs, LsdTrace *trace)
        : model_(model),
          graph_(graph),
          syndrome_(syndrome),
          llrs_(posterior_llrs),
          trace_(trace),
          mech_owner_(model.num_mechanisms, kUnowned),
          det_owner_(model.num_detectors, kUnowned) {}

    std::vector<Cluster> run() {
        seed();
        grow_until_solvable();
        return finalize();
    }

   private:
    static constexpr uint32_t kUnowned = UINT32_MAX;

    uint32_t find(uint32_t id) {
        while (parent_[id] != id) {
            parent_[id] = parent_[parent_[id]];
            id = parent_[id];
        }
        return id;
    }

    uint32_t merge(uint32_t a, uint32_t b) {
        uint32_t survivor = std::min(a, b);
        uint32_t absorbed = std::max(a, b);
        ClusterState &into = clusters_[survivor];
        ClusterState &from = clusters_[absorbed];
        into.mechs.insert(into.mechs.end(), from.mechs.begin(), from.mechs.end());
        into.dets.insert(into.dets.end(), from.dets.begin(), from.dets.end());
        into.pivots.merge(std::move(from.pivots));
        into.residual = xor_sorted(into.residual, from.residual);
        into.frontier.insert(into.frontier.end(), from.frontier.begin(), from.frontier.end());
        std::make_heap(into.frontier.begin(), into.frontier.end(), HeapLater{});
        from = ClusterState{};
        from.alive = false;
        parent_[absorbed] = survivor;
        return survivor;
    }

    void reduce_residual(ClusterState &cluster) {
        while (!cluster.residual.empty()) {
            auto it = cluster.pivots.find(cluster.residual.front());
            if (it == cluster.pivots.end()) {
                break;
            }
            cluster.residual = xor_sorted(cluster.residual, it->second);
        }
    }

    // Adds a mechanism to the cluster rooted at `root`, claiming its
    // detectors (merging with any cluster already holding one) and folding
    // its column into the elimination state. Returns the resulting root.
    uint32_t add_mechanism(uint32_t root, uint32_t mech) {
        mech_owner_[mech] = root;
        clusters_[root].mechs.push_back(mech);
        if (trace_ != nullptr) {
            trace_->added.push_back(mech);
        }
        const std::vector<uint32_t> &dets = model_.check_matrix.col(mech);
        for (uint32_t det : dets) {
            uint32_t owner = det_owner_[det];
            if (owner == kUnowned) {
                det_owner_[det] = root;
                clusters_[root].dets.push_back(det);
                if (syndrome_[det]) {
                    insert_sorted(clusters_[root].residual, det);
                }
            } else {
                uint32_t other = find(owner);
                if (other != root) {
                    root = merge(root, other);
                }
            }
        }
        ClusterState &cluster = clusters_[root];
        std::vector<uint32_t> column = dets;
        while (!column.empty()) {
            auto it = cluster.pivots.find(column.front());
            if (it == cluster.pivots.end()) {
                break;
            }
            column = xor_sorted(column, it->second);
        }
        if (!column.empty()) {
            uint32_t pivot_row = column.front();
            cluster.pivots.emplace(pivot_row, std::move(column));
        }
        reduce_residual(cluster);
        for (uint32_t neighbor : graph_.neighbors[mech]) {
            if (mech_owner_[neighbor] == kUnowned) {
                cluster.frontier.push_back(HeapEntry{llrs_[neighbor], neighbor});
                std::push_heap(cluster.frontier.begin(), cluster.frontier.end(), HeapLater{});
            }
        }
        return root;
    }

    void seed() {
        for (uint32_t det = 0; det < model_.num_detectors; det++) {
            if (!syndrome_[det] || det_owner_[det] != kUnowned) {
                continue;
            }
            const std::vector<uint32_t> &incident = model_.check_matrix.row(det);
            if (incident.empty()) {
                throw std::runtime_error("syndrome violates a detector that no mechanism touches");
            }
            uint32_t best = incident[0];
            for (uint32_t mech : incident) {
                if (llrs_[mech] < llrs_[best] || (llrs_[mech] == llrs_[best] && mech < best)) {
                    best = mech;
                }
            }
            uint32_t id = static_cast<uint32_t>(clusters_.size());
            clusters_.emplace_back();
            parent_.push_back(id);
            add_mechanism(id, best);
        }
    }

    void grow_once(uint32_t root) {
        ClusterState &cluster = clusters_[root];
        while (true) {
            if (cluster.frontier.empty()) {
                throw std::runtime_error("decoder cluster has an unsolvable syndrome and no room to grow");
            }
            std::pop_heap(cluster.frontier.begin(), cluster.frontier.end(), HeapLater{});
            HeapEntry top = cluster.frontier.back();
            cluster.frontier.pop_back();
            if (mech_owner_[top.mech] != kUnowned) {
                continue;
            }
            add_mechanism(root, top.mech);
            return;
        }
    }

    void grow_until_solvable() {
        while (true) {
            bool all_solvable = true;
            for (uint32_t id = 0; id < clusters_.size(); id++) {
                if (!clusters_[id].alive || clusters_[id].residual.empty()) {
                    continue;
                }
                all_solvable = false;
                grow_once(id);
            }
            if (all_solvable) {
                return;
            }
        }
    }

    Cluster solve(const ClusterState &state) const {
        Cluster cluster;
        cluster.mechanisms = state.mechs;
        std::sort(cluster.mechanisms.begin(), cluster.mechanisms.end());
        for (uint32_t mech : cluster.mechanisms) {
            cluster.llr_mass += model_.llrs[mech];
        }
        std::vector<uint32_t> rows = state.dets;
        std::sort(rows.begin(), rows.end());
        std::vector<uint32_t> order = cluster.mechanisms;
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return llrs_[a] != llrs_[b] ? llrs_[a] < llrs_[b] : a < b;
        });
        size_t row_words = (rows.size() + 63) / 64;
        size_t combo_words = (order.size() + 63) / 64;
        std::vector<std::vector<uint64_t>> basis_cols;
        std::vector<std::vector<uint64_t>> basis_combos;
        std::vector<size_t> pivot_of_row(rows.size(), SIZE_MAX);
        auto lowest_row = [&](const std::vector<uint64_t> &bits) -> size_t {
            for (size_t w = 0; w < bits.size(); w++) {
                if (bits[w] != 0) {
                    return w * 64 + static_cast<size_t>(std::countr_zero(bits[w]));
                }
            }
            return SIZE_MAX;
        };
        auto xor_words = [](std::vector<uint64_t> &into, const std::vector<uint64_t> &from) {
            for (size_t w = 0; w < into.size(); w++) {
                into[w] ^= from[w];
            }
        };
        auto local_row = [&](uint32_t det) {
            return static_cast<size_t>(std::lower_bound(rows.begin(), rows.end(), det) - rows.begin());
        };
        for (size_t i = 0; i < order.size(); i++) {
            std::vector<uint64_t> column(row_words, 0);
            for (uint32_t det : model_.check_matrix.col(order[i])) {
                size_t row = local_row(det);
                column[row / 64] |= uint64_t{1} << (row % 64);
            }
            std::vector<uint64_t> combo(combo_words, 0);
            combo[i / 64] |= uint64_t{1} << (i % 64);
            while (true) {
                size_t row = lowest_row(column);
                if (row == SIZE_MAX) {
                    break;
                }
                size_t pivot = pivot_of_row[row];
                if (pivot == SIZE_MAX) {
                    pivot_of_row[row] = basis_cols.size();
                    basis_cols.push_back(std::move(column));
                    basis_combos.push_back(std::move(combo));
                    break;
                }
                xor_words(column, basis_cols[pivot]);
                xor_words(combo, basis_combos[pivot]);
            }
        }
        std::vector<uint64_t> rhs(row_words, 0);
        for (size_t r = 0; r < rows.size(); r++) {
            if (syndrome_[rows[r]]) {
                rhs[r / 64] |= uint64_t{1} << (r % 64);
            }
        }
        std::vector<uint64_t> chosen(combo_words, 0);
        while (true) {
            size_t row = lowest_row(rhs);
            if (row == SIZE_MAX) {
                break;
            }
            size_t pivot = pivot_of_row[row];
            if (pivot == SIZE_MAX) {
                throw std::runtime_error("cluster marked solvable has no solution");
            }
            xor_words(rhs, basis_cols[pivot]);
            xor_words(chosen, basis_combos[pivot]);
        }
        std::vector<uint32_t> selected;
        for (size_t i = 0; i < order.size(); i++) {
            if ((chosen[i / 64] >> (i % 64)) & 1) {
                selected.push_back(order[i]);
            }
        }
        std::sort(selected.begin(), selected.end());
        cluster.local_solution.assign(cluster.mechanisms.size(), 0);
        for (size_t j = 0; j < cluster.mechanisms.size(); j++) {
            if (std::binary_search(selected.begin(), selected.end(), cluster.mechanisms[j])) {
                cluster.local_solution[j] = 1;
            }
        }
        return cluster;
    }

    std::vector<Cluster> finalize() const {
        std::vector<Cluster> out;
        for (const ClusterState &state : clusters_) {
            if (state.alive) {
                out.push_back(solve(state));
            }
        }
        return out;
    }

    const DetectorErrorModel &model_;
    const FaultGraph &graph_;
    const BitVec &syndrome_;
    const std::vector<double> &llrs_;
    LsdTrace *trace_;
    std::vector<uint32_t> mech_owner_;
    std::vector<uint32_t> det_owner_;
    std::vector<ClusterState> clusters_;
    std::vector<uint32_t> parent_;
};

}  // namespace

void BpConfig::validate() const {
    if (max_iterations == 0) {
        throw std::invalid_argument("max_iterations must be at least 1");
    }
    if (!(scale > 0.0) || scale > 1.0) {
        throw std::invalid_argument("scale must be in (0, 1]");
    }
    if (!(llr_clamp > 0.0)) {
        throw std::invalid_argument("llr_clamp must be positive");
    }
}

BpResult bp_decode(const DetectorErrorModel &model, const BitVec &syndrome, const BpConfig &config) {
    return bp_run(build_wiring(model), model, syndrome, config);
}

std::vector<Cluster> lsd_decode(const DetectorErrorModel &model, const FaultGraph &graph, const BitVec &syndrome,
                                const std::vector<double> &posterior_llrs, LsdTrace *trace) {
    if (syndrome.size() != model.num_detectors) {
        throw std::invalid_argument("syndrome length does not match the model's detector count");
    }
    if (posterior_llrs.size() != model.num_mechanisms) {
        throw std::invalid_argument("posterior llr count does not match the model's mechanism count");
    }
    LsdRun run(model, graph, syndrome, posterior_llrs, trace);
    return run.run();
}

BpLsdDecoder::BpLsdDecoder(const DetectorErrorModel &model, BpConfig config, bool converged_max_confidence)
    : model_(&model),
      graph_(build_fault_graph(model)),
      config_(config),
      converged_max_confidence_(converged_max_confidence) {
    config_.validate();
    model.validate();
    wiring_ = std::make_shared<const internal::BpWiring>(build_wiring(model));
}

DecodeOutcome BpLsdDecoder::decode(const BitVec &syndrome) const {
    DecodeOutcome outcome;
    outcome.syndrome = syndrome;
    BpResult bp = bp_run(*wiring_, *model_, syndrome, config_);
    outcome.bp_converged = bp.converged;
    if (!bp.converged || !converged_max_confidence_) {
        outcome.clusters = lsd_decode(*model_, graph_, syndrome, bp.posterior_llrs);
    }
    if (bp.converged) {
        outcome.correction = std::move(bp.hard_decision);
    } else {
        outcome.correction.assign(model_->num_mechanisms, 0);
        for (const Cluster &cluster : outcome.clusters) {
            for (size_t j = 0; j < cluster.mechanisms.size(); j++) {
                if (cluster.local_solution[j]) {
                    outcome.correction[cluster.mechanisms[j]] = 1;
                }
            }
        }
    }
    outcome.posterior_llrs = std::move(bp.posterior_llrs);
    outcome.predicted_flips = model_->observable_matrix.mul_vec(outcome.correction);
    return outcome;
}

}  // namespace clusterps
