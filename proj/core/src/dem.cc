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

#include "clusterps/dem.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "clusterps/rng.h"

namespace clusterps {

namespace {

[[noreturn]] void parse_fail(size_t line_no, const std::string &what) {
    throw std::invalid_argument("dem parse error at line " + std::to_string(line_no) + ": " + what);
}

// Toggles v in the sorted set (mod-2 accumulation of repeated targets).
void toggle(std::vector<uint32_t> &set, uint32_t v) {
    auto it = std::lower_bound(set.begin(), set.end(), v);
    if (it != set.end() && *it == v) {
        set.erase(it);
    } else {
        set.insert(it, v);
    }
}

}  // namespace

uint32_t DetectorErrorModel::num_rounds() const {
    if (!has_detector_times()) {
        throw std::invalid_argument("model has no detector times");
    }
    uint32_t max_t = 0;
    for (uint32_t t : detector_times) {
        max_t = std::max(max_t, t);
    }
    return max_t + 1;
}

void DetectorErrorModel::validate() const {
    if (check_matrix.num_rows() != num_detectors || check_matrix.num_cols() != num_mechanisms) {
        throw std::invalid_argument("check matrix shape mismatch");
    }
    if (observable_matrix.num_rows() != num_observables || observable_matrix.num_cols() != num_mechanisms) {
        throw std::invalid_argument("observable matrix shape mismatch");
    }
    if (priors.size() != num_mechanisms || llrs.size() != num_mechanisms) {
        throw std::invalid_argument("prior count mismatch");
    }
    for (size_t j = 0; j < num_mechanisms; j++) {
        if (!(priors[j] > 0.0) || !(priors[j] <= 0.5)) {
            throw std::invalid_argument("prior outside (0, 0.5]");
        }
        if (check_matrix.col(j).empty() && observable_matrix.col(j).empty()) {
            throw std::invalid_argument("mechanism " + std::to_string(j) + " flips nothing");
        }
    }
    if (!detector_times.empty() && detector_times.size() != num_detectors) {
        throw std::invalid_argument("detector time count mismatch");
    }
}

DetectorErrorModel make_dem(size_t num_detectors, size_t num_observables,
                            std::vector<std::vector<uint32_t>> detector_columns,
                            std::vector<std::vector<uint32_t>> observable_columns, std::vector<double> priors,
                            std::vector<uint32_t> detector_times) {
    DetectorErrorModel m;
    m.num_detectors = num_detectors;
    m.num_observables = num_observables;
    m.num_mechanisms = priors.size();
    if (detector_columns.size() != m.num_mechanisms || observable_columns.size() != m.num_mechanisms) {
        throw std::invalid_argument("column count mismatch");
    }
    m.check_matrix = SparseBinaryMatrix::from_columns(num_detectors, std::move(detector_columns));
    m.observable_matrix = SparseBinaryMatrix::from_columns(num_observables, std::move(observable_columns));
    m.priors = std::move(priors);
    m.llrs.resize(m.num_mechanisms);
    for (size_t j = 0; j < m.num_mechanisms; j++) {
        m.llrs[j] = std::log((1.0 - m.priors[j]) / m.priors[j]);
    }
    m.detector_times = std::move(detector_times);
    m.validate();
    return m;
}

DetectorErrorModel parse_dem(const std::string &text) {
    std::vector<std::vector<uint32_t>> det_cols;
    std::vector<std::vector<uint32_t>> obs_cols;
    std::vector<double> priors;
    std::vector<uint32_t> times;
    bool have_times = false;
    bool folded = false;
    uint32_t max_detector = 0;
    uint32_t max_observable = 0;
    bool any_detector = false;
    bool any_observable = false;

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        line_no++;
        if (pos > text.size() && line.empty()) {
            break;
        }

        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::string body = line.substr(first);
        while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == '\t')) {
            body.pop_back();
        }

        if (body.rfind("times:", 0) == 0) {
            if (have_times) {
                parse_fail(line_no, "duplicate times header");
            }
            have_times = true;
            std::istringstream ss(body.substr(6));
            long long t;
            while (ss >> t) {
                if (t < 0) {
                    parse_fail(line_no, "negative detector time");
                }
                times.push_back((uint32_t)t);
            }
            if (!ss.eof()) {
                parse_fail(line_no, "malformed times header");
            }
            continue;
        }

        if (body.rfind("error(", 0) != 0) {
            parse_fail(line_no, "expected error(...) instruction");
        }
        size_t close = body.find(')');
        if (close == std::string::npos) {
            parse_fail(line_no, "missing ')'");
        }
        double p;
        try {
            size_t used = 0;
            p = std::stod(body.substr(6, close - 6), &used);
            if (used != close - 6) {
                parse_fail(line_no, "malformed probability");
            }
        } catch (const std::logic_error &) {
            parse_fail(line_no, "malformed probability");
        }
        if (!(p > 0.0) || !(p < 1.0)) {
            parse_fail(line_no, "probability outside (0, 1)");
        }
        if (p >= 0.5) {
            p = 1.0 - p;
            folded = true;
        }

        std::vector<uint32_t> dets;
        std::vector<uint32_t> obs;
        std::istringstream targets(body.substr(close + 1));
        std::string tok;
        size_t target_count = 0;
        while (targets >> tok) {
            if (tok.size() < 2 || (tok[0] != 'D' && tok[0] != 'L')) {
                parse_fail(line_no, "bad target '" + tok + "'");
            }
            uint32_t idx;
            try {
                size_t used = 0;
                unsigned long v = std::stoul(tok.substr(1), &used);
                if (used != tok.size() - 1 || v > 0xffffffffULL) {
                    parse_fail(line_no, "bad target '" + tok + "'");
                }
                idx = (uint32_t)v;
            } catch (const std::logic_error &) {
                parse_fail(line_no, "bad target '" + tok + "'");
            }
            target_count++;
            if (tok[0] == 'D') {
                toggle(dets, idx);
                max_detector = std::max(max_detector, idx);
                any_detector = true;
            } else {
                toggle(obs, idx);
                max_observable = std::max(max_observable, idx);
                any_observable = true;
            }
        }
        if (target_count == 0) {
            parse_fail(line_no, "error line with no targets");
        }
        if (dets.empty() && obs.empty()) {
            parse_fail(line_no, "targets cancel to nothing");
        }
        det_cols.push_back(std::move(dets));
        obs_cols.push_back(std::move(obs));
        priors.push_back(p);
    }

    size_t num_detectors = any_detector ? (size_t)max_detector + 1 : 0;
    size_t num_observables = any_observable ? (size_t)max_observable + 1 : 0;
    if (have_times) {
        if (times.size() < num_detectors) {
            throw std::invalid_argument("times header covers fewer detectors than referenced");
        }
        num_detectors = times.size();
    }

    auto model = make_dem(num_detectors, num_observables, std::move(det_cols), std::move(obs_cols), std::move(priors),
                          std::move(times));
    model.priors_were_folded = folded;
    return model;
}

std::string serialize_dem(const DetectorErrorModel &model) {
    std::string out;
    if (model.has_detector_times()) {
        out += "times:";
        for (uint32_t t : model.detector_times) {
            out += ' ';
            out += std::to_string(t);
        }
        out += '\n';
    }
    for (size_t j = 0; j < model.num_mechanisms; j++) {
        out += "error(";
        out += format_double(model.priors[j]);
        out += ')';
        for (uint32_t d : model.check_matrix.col(j)) {
            out += " D";
            out += std::to_string(d);
        }
        for (uint32_t l : model.observable_matrix.col(j)) {
            out += " L";
            out += std::to_string(l);
        }
        out += '\n';
    }
    return out;
}

FaultGraph build_fault_graph(const DetectorErrorModel &model) {
    FaultGraph g;
    g.neighbors.resize(model.num_mechanisms);
    std::vector<uint32_t> stamp(model.num_mechanisms, UINT32_MAX);
    for (uint32_t j = 0; j < model.num_mechanisms; j++) {
        auto &nbrs = g.neighbors[j];
        for (uint32_t i : model.check_matrix.col(j)) {
            for (uint32_t other : model.check_matrix.row(i)) {
                if (other != j && stamp[other] != j) {
                    stamp[other] = j;
                    nbrs.push_back(other);
                }
            }
        }
        std::sort(nbrs.begin(), nbrs.end());
    }
    return g;
}

ShotSample sample_shot(const DetectorErrorModel &model, uint64_t seed, uint64_t shot_index) {
    ShotRng rng(seed, shot_index);
    ShotSample s;
    s.faults.assign(model.num_mechanisms, 0);
    s.syndrome.assign(model.num_detectors, 0);
    s.observable_flips.assign(model.num_observables, 0);
    for (size_t j = 0; j < model.num_mechanisms; j++) {
        if (rng.next_double() < model.priors[j]) {
            s.faults[j] = 1;
            model.check_matrix.xor_col_into(j, s.syndrome);
            model.observable_matrix.xor_col_into(j, s.observable_flips);
        }
    }
    return s;
}

std::vector<ShotSample> sample_shots(const DetectorErrorModel &model, uint64_t num_shots, uint64_t seed) {
    std::vector<ShotSample> out;
    out.reserve(num_shots);
    for (uint64_t i = 0; i < num_shots; i++) {
        out.push_back(sample_shot(model, seed, i));
    }
    return out;
}

}  // namespace clusterps
