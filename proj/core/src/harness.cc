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

#include "clusterps/harness.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "clusterps/version.h"
#include "json.hpp"

namespace clusterps {

const char *run_mode_name(RunMode mode) {
    return mode == RunMode::kGlobal ? "global" : "realtime";
}

void ExperimentConfig::validate() const {
    if (shots < 1) {
        throw std::invalid_argument("need at least one shot");
    }
    if (threads < 1) {
        throw std::invalid_argument("need at least one thread");
    }
    if (metrics.empty()) {
        throw std::invalid_argument("need at least one metric");
    }
    bp.validate();
    for (const MetricSpec &spec : metrics) {
        spec.validate();
        if (mode == RunMode::kRealtime && !spec.is_cluster_family()) {
            throw std::invalid_argument("realtime mode supports only cluster metric families");
        }
    }
    if (mode == RunMode::kRealtime) {
        window.validate();
        if (lookback < 1) {
            throw std::invalid_argument("lookback must be at least 1");
        }
    }
}

void parallel_for(uint64_t n, uint32_t threads, const std::function<void(uint64_t, uint64_t)> &body) {
    if (n == 0) {
        return;
    }
    if (threads <= 1 || n < 2) {
        body(0, n);
        return;
    }
    uint64_t workers = std::min<uint64_t>(threads, n);
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (uint64_t t = 0; t < workers; t++) {
        uint64_t begin = n * t / workers;
        uint64_t end = n * (t + 1) / workers;
        pool.emplace_back([&, begin, end]() {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> hold(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (std::thread &worker : pool) {
        worker.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

namespace {

constexpr double kAutoQuantiles[] = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.995, 0.999, 1.0};

std::vector<double> resolve_cutoffs(const std::vector<double> &configured, const std::vector<double> &observed) {
    std::vector<double> grid;
    if (!configured.empty()) {
        grid = configured;
    } else {
        std::vector<double> sorted = observed;
        std::sort(sorted.begin(), sorted.end());
        for (double q : kAutoQuantiles) {
            grid.push_back(sorted_quantile(sorted, q));
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Restriction shared by every cluster metric of the run: either all
// mechanisms or the ones that touch at least one detector.
std::shared_ptr<const MechanismSet> build_restriction(const DetectorErrorModel &model, bool detectable_only) {
    if (!detectable_only) {
        return std::make_shared<const MechanismSet>(MechanismSet::all(model.num_mechanisms));
    }
    std::vector<uint32_t> ids;
    for (uint32_t mech = 0; mech < model.num_mechanisms; mech++) {
        if (!model.check_matrix.col(mech).empty()) {
            ids.push_back(mech);
        }
    }
    return std::make_shared<const MechanismSet>(MechanismSet::from_ids(std::move(ids), model.num_mechanisms));
}

std::vector<MetricSpec> prepare_specs(const DetectorErrorModel &model, const ExperimentConfig &config) {
    std::shared_ptr<const MechanismSet> restriction = build_restriction(model, config.restrict_to_detectable);
    std::vector<MetricSpec> specs = config.metrics;
    for (MetricSpec &spec : specs) {
        if (spec.is_cluster_family() && spec.restriction == nullptr) {
            spec.restriction = restriction;
        }
    }
    return specs;
}

SweepRow make_row(const MetricSpec &spec, double cutoff, uint64_t shots, uint64_t accepted, uint64_t errors,
                  uint64_t rounds_sum, uint64_t early_aborts) {
    SweepRow row;
    row.metric = metric_family_name(spec.family);
    if (spec.is_cluster_family()) {
        row.alpha = spec.alpha;
    }
    row.cutoff = cutoff;
    row.shots = shots;
    row.accepted = accepted;
    row.errors = errors;
    row.p_abort = 1.0 - static_cast<double>(accepted) / static_cast<double>(shots);
    row.early_aborts = early_aborts;
    if (accepted > 0) {
        row.p_log_defined = true;
        row.p_log = static_cast<double>(errors) / static_cast<double>(accepted);
        Interval interval = wilson_interval(errors, accepted);
        row.p_log_lo = interval.lo;
        row.p_log_hi = interval.hi;
        row.t_accepted_defined = true;
        row.t_accepted_mean = static_cast<double>(rounds_sum) / static_cast<double>(accepted);
    }
    return row;
}

void run_global(const DetectorErrorModel &model, const ExperimentConfig &config,
                const std::vector<MetricSpec> &specs, ExperimentResult &result) {
    BpLsdDecoder decoder(model, config.bp, config.converged_max_confidence);
    size_t num_metrics = specs.size();
    std::vector<std::vector<double>> values(num_metrics, std::vector<double>(config.shots, 0.0));
    BitVec failed(config.shots, 0);
    parallel_for(config.shots, config.threads, [&](uint64_t begin, uint64_t end) {
        for (uint64_t shot = begin; shot < end; shot++) {
            ShotSample sample = sample_shot(model, config.seed, shot);
            DecodeOutcome outcome = decoder.decode(sample.syndrome);
            failed[shot] = outcome.predicted_flips != sample.observable_flips ? 1 : 0;
            for (size_t m = 0; m < num_metrics; m++) {
                values[m][shot] = evaluate_metric(specs[m], outcome, model);
            }
        }
    });
    result.total_logical_errors = bit_weight(failed);
    uint64_t rounds = result.rounds;
    for (size_t m = 0; m < num_metrics; m++) {
        std::vector<double> grid = resolve_cutoffs(config.cutoffs, values[m]);
        for (double cutoff : grid) {
            uint64_t accepted = 0;
            uint64_t errors = 0;
            for (uint64_t shot = 0; shot < config.shots; shot++) {
                if (values[m][shot] <= cutoff) {
                    accepted++;
                    errors += failed[shot];
                }
            }
            uint64_t rounds_sum = config.shots * rounds;
            result.rows.push_back(make_row(specs[m], cutoff, config.shots, accepted, errors, rounds_sum, 0));
        }
    }
}

void run_realtime(const DetectorErrorModel &model, const ExperimentConfig &config,
                  const std::vector<MetricSpec> &specs, ExperimentResult &result) {
    SlidingWindowDecoder decoder(model, config.window, config.bp, config.converged_max_confidence);
    FaultGraph graph = build_fault_graph(model);
    uint32_t rounds = result.rounds;
    uint32_t last = static_cast<uint32_t>(decoder.num_windows()) - 1;
    std::vector<uint32_t> checkpoints;
    for (uint32_t w = 0; w <= last; w++) {
        if (w + 1 >= config.lookback) {
            checkpoints.push_back(w);
        }
    }
    if (checkpoints.empty()) {
        checkpoints.push_back(last);
    }
    std::vector<int32_t> checkpoint_of_window(last + 1, -1);
    for (size_t k = 0; k < checkpoints.size(); k++) {
        checkpoint_of_window[checkpoints[k]] = static_cast<int32_t>(k);
    }
    size_t num_metrics = specs.size();
    size_t num_checkpoints = checkpoints.size();
    std::vector<std::vector<double>> values(num_metrics);
    for (std::vector<double> &buf : values) {
        buf.assign(config.shots * num_checkpoints, 0.0);
    }
    BitVec failed(config.shots, 0);
    parallel_for(config.shots, config.threads, [&](uint64_t begin, uint64_t end) {
        for (uint64_t shot = begin; shot < end; shot++) {
            ShotSample sample = sample_shot(model, config.seed, shot);
            WindowObserver observer = [&](const std::vector<WindowRecord> &records) {
                uint32_t w = records.back().window_index;
                int32_t k = checkpoint_of_window[w];
                if (k < 0) {
                    return true;
                }
                uint32_t lookback = std::min<uint32_t>(config.lookback, w + 1);
                CommittedClusters committed = committed_clusters(records, graph, w, lookback);
                for (size_t m = 0; m < num_metrics; m++) {
                    values[m][shot * num_checkpoints + k] = committed_metric(committed, specs[m], model);
                }
                return true;
            };
            WindowRunResult run = decoder.run(sample.syndrome, observer);
            failed[shot] = run.predicted_flips != sample.observable_flips ? 1 : 0;
        }
    });
    result.total_logical_errors = bit_weight(failed);
    std::vector<double> shot_max(config.shots);
    for (size_t m = 0; m < num_metrics; m++) {
        for (uint64_t shot = 0; shot < config.shots; shot++) {
            double top = 0.0;
            for (size_t k = 0; k < num_checkpoints; k++) {
                top = std::max(top, values[m][shot * num_checkpoints + k]);
            }
            shot_max[shot] = top;
        }
        std::vector<double> grid = resolve_cutoffs(config.cutoffs, shot_max);
        for (double cutoff : grid) {
            uint64_t accepted = 0;
            uint64_t errors = 0;
            uint64_t rounds_sum = 0;
            uint64_t early_aborts = 0;
            for (uint64_t shot = 0; shot < config.shots; shot++) {
                if (shot_max[shot] <= cutoff) {
                    accepted++;
                    errors += failed[shot];
                    rounds_sum += rounds;
                    continue;
                }
                size_t k = 0;
                while (values[m][shot * num_checkpoints + k] <= cutoff) {
                    k++;
                }
                uint32_t w = checkpoints[k];
                rounds_sum += std::min<uint64_t>(
                    rounds, static_cast<uint64_t>(w) * config.window.commit_size + config.window.window_size);
                if (w < last) {
                    early_aborts++;
                }
            }
            result.rows.push_back(
                make_row(specs[m], cutoff, config.shots, accepted, errors, rounds_sum, early_aborts));
        }
    }
}

std::string csv_double(double value) {
    return format_double(value);
}

std::string csv_alpha(double alpha) {
    if (std::isnan(alpha)) {
        return "";
    }
    if (std::isinf(alpha)) {
        return "inf";
    }
    return format_double(alpha);
}

}  // namespace

ExperimentResult run_experiment(const DetectorErrorModel &model, const ExperimentConfig &config) {
    config.validate();
    model.validate();
    if (config.mode == RunMode::kRealtime && !model.has_detector_times()) {
        throw std::invalid_argument("realtime mode needs detector time coordinates");
    }
    std::vector<MetricSpec> specs = prepare_specs(model, config);
    ExperimentResult result;
    result.rounds = model.has_detector_times() ? model.num_rounds() : 1;
    if (config.mode == RunMode::kGlobal) {
        run_global(model, config, specs, result);
    } else {
        run_realtime(model, config, specs, result);
    }
    return result;
}

RoundFit per_round_fit(const std::vector<RoundPoint> &points) {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<const RoundPoint *> used;
    for (const RoundPoint &point : points) {
        if (point.p_abort >= 1.0) {
            continue;  // log(0) point dropped
        }
        xs.push_back(point.rounds);
        ys.push_back(std::log1p(-point.p_abort));
        used.push_back(&point);
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        throw std::invalid_argument("per-round fit needs at least three distinct round counts");
    }
    LinearFit fit = linear_fit(xs, ys);
    RoundFit out;
    out.g = -fit.slope;
    out.p_abort_round = -std::expm1(-out.g);
    out.r_squared = fit.r_squared;
    out.points_used = xs.size();
    std::vector<double> per_round;
    for (const RoundPoint *point : used) {
        per_round.push_back(point->p_log / point->rounds);
    }
    out.p_log_per_round = per_round;
    out.p_log_per_round_slope = linear_fit(xs, per_round).slope;
    return out;
}

std::string results_csv(const ExperimentConfig &config, const ExperimentResult &result) {
    std::string out =
        "code,p,T,mode,W,F,L,metric,alpha,cutoff,shots,accepted,errors,"
        "p_log,p_log_lo,p_log_hi,p_abort,t_accepted_mean\n";
    std::string prefix = config.code_name;
    prefix += ',';
    prefix += csv_double(config.noise_rate);
    prefix += ',';
    prefix += std::to_string(result.rounds);
    prefix += ',';
    prefix += run_mode_name(config.mode);
    prefix += ',';
    if (config.mode == RunMode::kRealtime) {
        prefix += std::to_string(config.window.window_size);
        prefix += ',';
        prefix += std::to_string(config.window.commit_size);
        prefix += ',';
        prefix += std::to_string(config.lookback);
    } else {
        prefix += ",,";
    }
    for (const SweepRow &row : result.rows) {
        out += prefix;
        out += ',';
        out += row.metric;
        out += ',';
        out += csv_alpha(row.alpha);
        out += ',';
        out += csv_double(row.cutoff);
        out += ',';
        out += std::to_string(row.shots);
        out += ',';
        out += std::to_string(row.accepted);
        out += ',';
        out += std::to_string(row.errors);
        out += ',';
        if (row.p_log_defined) {
            out += csv_double(row.p_log);
            out += ',';
            out += csv_double(row.p_log_lo);
            out += ',';
            out += csv_double(row.p_log_hi);
        } else {
            out += ",,";
        }
        out += ',';
        out += csv_double(row.p_abort);
        out += ',';
        if (row.t_accepted_defined) {
            out += csv_double(row.t_accepted_mean);
        }
        out += '\n';
    }
    return out;
}

std::string results_manifest_json(const ExperimentConfig &config, const ExperimentResult &result) {
    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["code"] = config.code_name;
    manifest["p"] = config.noise_rate;
    manifest["rounds"] = result.rounds;
    manifest["shots"] = config.shots;
    manifest["seed"] = config.seed;
    manifest["mode"] = run_mode_name(config.mode);
    manifest["threads"] = config.threads;
    manifest["bp"] = {
        {"max_iterations", config.bp.max_iterations},
        {"scale", config.bp.scale},
        {"llr_clamp", config.bp.llr_clamp},
    };
    manifest["converged_max_confidence"] = config.converged_max_confidence;
    if (config.mode == RunMode::kRealtime) {
        manifest["window"] = config.window.window_size;
        manifest["commit"] = config.window.commit_size;
        manifest["lookback"] = config.lookback;
    }
    manifest["restrict"] = config.restrict_to_detectable ? "z" : "all";
    nlohmann::json metrics = nlohmann::json::array();
    for (const MetricSpec &spec : config.metrics) {
        metrics.push_back(spec.to_string());
    }
    manifest["metrics"] = metrics;
    nlohmann::json cutoffs = nlohmann::json::object();
    for (const SweepRow &row : result.rows) {
        std::string key = row.metric;
        if (!std::isnan(row.alpha)) {
            key += ':';
            key += csv_alpha(row.alpha);
        }
        cutoffs[key].push_back(row.cutoff);
    }
    manifest["cutoffs"] = cutoffs;
    manifest["total_logical_errors"] = result.total_logical_errors;
    return manifest.dump(2) + "\n";
}

namespace {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, p_log)
};

std::string svg_panel(const std::vector<PlotSeries> &series, const std::string &x_label, bool log_x, double x0,
                      double y0) {
    static const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    double min_x = 0.0;
    double max_x = 1.0;
    double min_y = 0.0;
    double max_y = 1.0;
    bool first = true;
    for (const PlotSeries &s : series) {
        for (const auto &[x, y] : s.points) {
            double px = log_x ? std::log10(x) : x;
            double py = std::log10(y);
            if (first) {
                min_x = max_x = px;
                min_y = max_y = py;
                first = false;
            } else {
                min_x = std::min(min_x, px);
                max_x = std::max(max_x, px);
                min_y = std::min(min_y, py);
                max_y = std::max(max_y, py);
            }
        }
    }
    if (max_x - min_x < 1e-12) {
        max_x = min_x + 1.0;
    }
    if (max_y - min_y < 1e-12) {
        max_y = min_y + 1.0;
    }
    double width = 360.0;
    double height = 280.0;
    auto sx = [&](double x) {
        double px = log_x ? std::log10(x) : x;
        return x0 + 50.0 + (px - min_x) / (max_x - min_x) * (width - 70.0);
    };
    auto sy = [&](double y) {
        double py = std::log10(y);
        return y0 + 20.0 + (max_y - py) / (max_y - min_y) * (height - 70.0);
    };
    std::string out;
    out += "<rect x=\"" + format_double(x0 + 50.0) + "\" y=\"" + format_double(y0 + 20.0) + "\" width=\"" +
           format_double(width - 70.0) + "\" height=\"" + format_double(height - 70.0) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    size_t color = 0;
    for (const PlotSeries &s : series) {
        const char *stroke = kColors[color % 6];
        color++;
        std::vector<std::pair<double, double>> sorted = s.points;
        std::sort(sorted.begin(), sorted.end());
        std::string path;
        for (size_t i = 0; i < sorted.size(); i++) {
            path += i == 0 ? "M" : " L";
            path += format_double(sx(sorted[i].first)) + " " + format_double(sy(sorted[i].second));
        }
        if (!path.empty()) {
            out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + stroke + "\"/>\n";
        }
        for (const auto &[x, y] : sorted) {
            out += "<circle cx=\"" + format_double(sx(x)) + "\" cy=\"" + format_double(sy(y)) +
                   "\" r=\"3\" fill=\"" + stroke + "\"/>\n";
        }
    }
    out += "<text x=\"" + format_double(x0 + width / 2.0) + "\" y=\"" + format_double(y0 + height - 25.0) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + x_label + "</text>\n";
    out += "<text x=\"" + format_double(x0 + 14.0) + "\" y=\"" + format_double(y0 + height / 2.0) +
           "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " + format_double(x0 + 14.0) + " " +
           format_double(y0 + height / 2.0) + ")\">p_log</text>\n";
    return out;
}

}  // namespace

std::string tradeoff_plot_svg(const ExperimentResult &result) {
    std::vector<PlotSeries> abort_series;
    std::vector<PlotSeries> time_series;
    std::string current;
    for (const SweepRow &row : result.rows) {
        if (!row.p_log_defined || row.p_log <= 0.0) {
            continue;
        }
        std::string label = row.metric;
        if (!std::isnan(row.alpha)) {
            label += ":" + csv_alpha(row.alpha);
        }
        if (abort_series.empty() || abort_series.back().label != label) {
            abort_series.push_back(PlotSeries{label, {}});
            time_series.push_back(PlotSeries{label, {}});
        }
        if (row.p_abort > 0.0) {
            abort_series.back().points.emplace_back(row.p_abort, row.p_log);
        }
        if (row.t_accepted_defined) {
            time_series.back().points.emplace_back(row.t_accepted_mean, row.p_log);
        }
    }
    std::string out =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"300\" "
        "font-family=\"sans-serif\">\n";
    out += svg_panel(abort_series, "p_abort", true, 0.0, 0.0);
    out += svg_panel(time_series, "mean accepted rounds", false, 380.0, 0.0);
    out += "</svg>\n";
    return out;
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    stream << content;
    if (!stream) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

}  // namespace clusterps
