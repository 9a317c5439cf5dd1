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

#include "clusterps/window.h"

#include <algorithm>
#include <stdexcept>

namespace clusterps {

void WindowConfig::validate() const {
    if (window_size < 1) {
        throw std::invalid_argument("window size must be at least 1 round");
    }
    if (commit_size < 1 || commit_size > window_size) {
        throw std::invalid_argument("commit size must be in [1, window size]");
    }
}

namespace {

void require_times(const DetectorErrorModel &model) {
    if (!model.has_detector_times()) {
        throw std::invalid_argument("sliding-window decoding needs detector time coordinates");
    }
}

}  // namespace

std::vector<uint32_t> window_detectors(const DetectorErrorModel &model, const WindowConfig &config, uint32_t w) {
    config.validate();
    require_times(model);
    uint64_t lo = static_cast<uint64_t>(w) * config.commit_size;
    uint64_t hi = lo + config.window_size - 1;
    std::vector<uint32_t> out;
    for (uint32_t det = 0; det < model.num_detectors; det++) {
        uint32_t t = model.detector_times[det];
        if (t >= lo && t <= hi) {
            out.push_back(det);
        }
    }
    return out;
}

std::vector<uint32_t> active_mechanisms(const DetectorErrorModel &model, const std::vector<uint32_t> &detectors,
                                        const BitVec &committed) {
    BitVec seen(model.num_mechanisms, 0);
    std::vector<uint32_t> out;
    for (uint32_t det : detectors) {
        for (uint32_t mech : model.check_matrix.row(det)) {
            if (!seen[mech] && !committed[mech]) {
                seen[mech] = 1;
                out.push_back(mech);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

size_t count_windows(const DetectorErrorModel &model, const WindowConfig &config) {
    config.validate();
    require_times(model);
    uint32_t t_max = 0;
    for (uint32_t t : model.detector_times) {
        t_max = std::max(t_max, t);
    }
    if (config.window_size >= t_max + 1) {
        return 1;
    }
    size_t uncovered = t_max + 1 - config.window_size;
    return (uncovered + config.commit_size - 1) / config.commit_size + 1;
}

SlidingWindowDecoder::SlidingWindowDecoder(const DetectorErrorModel &model, const WindowConfig &config,
                                           BpConfig bp_config, bool converged_max_confidence)
    : model_(&model), config_(config) {
    config.validate();
    model.validate();
    require_times(model);
    size_t total = count_windows(model, config);
    BitVec committed(model.num_mechanisms, 0);
    std::vector<uint32_t> det_local(model.num_detectors, 0);
    for (size_t w = 0; w < total; w++) {
        auto step = std::make_unique<WindowStep>();
        step->index = static_cast<uint32_t>(w);
        step->is_final = w + 1 == total;
        step->detectors = window_detectors(model, config, step->index);
        step->active = active_mechanisms(model, step->detectors, committed);
        uint64_t commit_lo = static_cast<uint64_t>(w) * config.commit_size;
        uint64_t commit_hi = commit_lo + config.commit_size - 1;
        step->commit_local.assign(step->active.size(), 0);
        for (size_t i = 0; i < step->active.size(); i++) {
            uint32_t mech = step->active[i];
            bool commit = step->is_final;
            if (!commit) {
                for (uint32_t det : model.check_matrix.col(mech)) {
                    uint32_t t = model.detector_times[det];
                    if (t >= commit_lo && t <= commit_hi) {
                        commit = true;
                        break;
                    }
                }
            }
            if (commit) {
                step->commit_local[i] = 1;
                step->commit.push_back(mech);
                committed[mech] = 1;
            }
        }
        for (size_t i = 0; i < step->detectors.size(); i++) {
            det_local[step->detectors[i]] = static_cast<uint32_t>(i);
        }
        BitVec in_window(model.num_detectors, 0);
        for (uint32_t det : step->detectors) {
            in_window[det] = 1;
        }
        std::vector<std::vector<uint32_t>> columns(step->active.size());
        std::vector<double> priors(step->active.size());
        for (size_t i = 0; i < step->active.size(); i++) {
            for (uint32_t det : model.check_matrix.col(step->active[i])) {
                if (in_window[det]) {
                    columns[i].push_back(det_local[det]);
                }
            }
            priors[i] = model.priors[step->active[i]];
        }
        std::vector<std::vector<uint32_t>> no_observables(step->active.size());
        step->sub_model =
            make_dem(step->detectors.size(), 0, std::move(columns), std::move(no_observables), std::move(priors));
        step->sub_decoder = std::make_unique<BpLsdDecoder>(step->sub_model, bp_config, converged_max_confidence);
        steps_.push_back(std::move(step));
    }
}

WindowRunResult SlidingWindowDecoder::run(const BitVec &syndrome) const {
    return run(syndrome, WindowObserver());
}

WindowRunResult SlidingWindowDecoder::run(const BitVec &syndrome, const WindowObserver &observer) const {
    if (syndrome.size() != model_->num_detectors) {
        throw std::invalid_argument("syndrome length does not match the model's detector count");
    }
    WindowRunResult result;
    result.correction.assign(model_->num_mechanisms, 0);
    result.records.reserve(steps_.size());
    BitVec residual = syndrome;
    BitVec local_syndrome;
    for (const std::unique_ptr<WindowStep> &step : steps_) {
        local_syndrome.assign(step->detectors.size(), 0);
        for (size_t i = 0; i < step->detectors.size(); i++) {
            local_syndrome[i] = residual[step->detectors[i]];
        }
        DecodeOutcome outcome = step->sub_decoder->decode(local_syndrome);
        WindowRecord record;
        record.window_index = step->index;
        record.step = step.get();
        record.clusters = std::move(outcome.clusters);
        record.local_solution = std::move(outcome.correction);
        for (size_t i = 0; i < step->active.size(); i++) {
            if (step->commit_local[i] && record.local_solution[i]) {
                uint32_t mech = step->active[i];
                result.correction[mech] = 1;
                model_->check_matrix.xor_col_into(mech, residual);
            }
        }
        result.records.push_back(std::move(record));
        result.windows_processed = step->index + 1;
        if (observer && !observer(result.records)) {
            result.completed = false;
            result.predicted_flips = model_->observable_matrix.mul_vec(result.correction);
            return result;
        }
    }
    result.completed = true;
    result.predicted_flips = model_->observable_matrix.mul_vec(result.correction);
    return result;
}

}  // namespace clusterps
