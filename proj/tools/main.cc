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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clusterps/codes.h"
#include "clusterps/harness.h"
#include "clusterps/oracle.h"
#include "clusterps/version.h"

using namespace clusterps;

namespace {

// Parses "x3+y+y2" style check polynomials: terms joined by '+', each term
// "1", or x/y factors with optional decimal exponents ("x", "y2", "x3y").
std::vector<Monomial> parse_polynomial(const std::string &text) {
    std::vector<Monomial> terms;
    std::istringstream src(text);
    std::string term;
    while (std::getline(src, term, '+')) {
        if (term.empty()) {
            throw std::invalid_argument("empty term in polynomial '" + text + "'");
        }
        if (term == "1") {
            terms.push_back({0, 0});
            continue;
        }
        uint32_t x = 0;
        uint32_t y = 0;
        size_t i = 0;
        while (i < term.size()) {
            char var = term[i];
            if (var != 'x' && var != 'y') {
                throw std::invalid_argument("bad factor '" + term + "' in polynomial '" + text + "'");
            }
            i++;
            uint32_t exponent = 1;
            if (i < term.size() && std::isdigit(static_cast<unsigned char>(term[i]))) {
                exponent = 0;
                while (i < term.size() && std::isdigit(static_cast<unsigned char>(term[i]))) {
                    exponent = exponent * 10 + (term[i] - '0');
                    i++;
                }
            }
            (var == 'x' ? x : y) = exponent;
        }
        terms.push_back({x, y});
    }
    if (terms.empty()) {
        throw std::invalid_argument("polynomial '" + text + "' has no terms");
    }
    return terms;
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Flags shared by `build-dem` and the --code path of `simulate`.
struct CodeOptions {
    std::string code;
    uint32_t distance = 3;
    uint32_t rounds = 1;
    double p_data = 0.0;
    double p_meas = 0.0;
    uint32_t bb_l = 6;
    uint32_t bb_m = 6;
    std::string bb_a = "x3+y+y2";
    std::string bb_b = "y3+x+x2";
    std::string hgp_h1;
};

void add_code_flags(CLI::App *cmd, CodeOptions &opt, bool required) {
    auto *code = cmd->add_option("--code", opt.code, "code family: rep, surface, bb, hgp")
                     ->check(CLI::IsMember({"rep", "surface", "bb", "hgp"}));
    if (required) {
        code->required();
    }
    cmd->add_option("--d", opt.distance, "code distance (rep, surface)");
    cmd->add_option("--rounds", opt.rounds, "number of noisy measurement rounds")->check(CLI::PositiveNumber);
    cmd->add_option("--p-data", opt.p_data, "per-round data error rate");
    cmd->add_option("--p-meas", opt.p_meas, "per-round measurement error rate");
    cmd->add_option("--bb-l", opt.bb_l, "bicycle group order l");
    cmd->add_option("--bb-m", opt.bb_m, "bicycle group order m");
    cmd->add_option("--bb-a", opt.bb_a, "bicycle polynomial a, e.g. x3+y+y2");
    cmd->add_option("--bb-b", opt.bb_b, "bicycle polynomial b, e.g. y3+x+x2");
    cmd->add_option("--hgp-h1", opt.hgp_h1, "classical check matrix file (0/1 rows); built-in 9x12 when omitted");
}

CssCodeSpec build_code(const CodeOptions &opt) {
    if (opt.code == "rep") {
        return repetition_code(opt.distance);
    }
    if (opt.code == "surface") {
        return rotated_surface_code(opt.distance);
    }
    if (opt.code == "bb") {
        return bivariate_bicycle_code(opt.bb_l, opt.bb_m, parse_polynomial(opt.bb_a), parse_polynomial(opt.bb_b));
    }
    if (opt.code == "hgp") {
        SparseBinaryMatrix h1 =
            opt.hgp_h1.empty() ? ldpc_34_check_matrix() : parse_check_matrix(read_text_file(opt.hgp_h1));
        return hgp_code(h1, h1);
    }
    throw std::invalid_argument("unknown code family '" + opt.code + "'");
}

std::string code_label(const CodeOptions &opt, const CssCodeSpec &code) {
    if (opt.code == "rep" || opt.code == "surface") {
        return opt.code + std::to_string(opt.distance);
    }
    return opt.code + std::to_string(code.num_qubits);
}

std::string file_stem(const std::string &path) {
    size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = name.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

int run_build_dem(const CodeOptions &opt, const std::string &out_path) {
    CssCodeSpec code = build_code(opt);
    DetectorErrorModel model = phenomenological_dem(code, opt.rounds, opt.p_data, opt.p_meas);
    std::string text = serialize_dem(model);
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_text_file(out_path, text);
        std::fprintf(stderr, "wrote %s: %zu detectors, %zu mechanisms, %zu observables, %u rounds\n",
                     out_path.c_str(), model.num_detectors, model.num_observables, model.num_mechanisms,
                     model.num_rounds());
    }
    return 0;
}

std::vector<MetricSpec> parse_metric_list(const std::string &text) {
    std::vector<MetricSpec> specs;
    std::istringstream src(text);
    std::string item;
    while (std::getline(src, item, ',')) {
        specs.push_back(parse_metric_spec(item));
    }
    if (specs.empty()) {
        throw std::invalid_argument("--metric list is empty");
    }
    return specs;
}

std::vector<double> parse_cutoff_list(const std::string &text) {
    std::vector<double> cutoffs;
    std::istringstream src(text);
    std::string item;
    while (std::getline(src, item, ',')) {
        size_t used = 0;
        double value = std::stod(item, &used);
        if (used != item.size()) {
            throw std::invalid_argument("bad cutoff '" + item + "'");
        }
        cutoffs.push_back(value);
    }
    return cutoffs;
}

void print_oracle_comparison(const DetectorErrorModel &model, const ExperimentConfig &config) {
    ExhaustiveOracle oracle(model, OracleLimit{20});
    BpLsdDecoder decoder(model, config.bp, config.converged_max_confidence);
    uint64_t oracle_errors = 0;
    uint64_t decoder_errors = 0;
    for (uint64_t i = 0; i < config.shots; i++) {
        ShotSample s = sample_shot(model, config.seed, i);
        uint64_t actual = 0;
        for (size_t b = 0; b < s.observable_flips.size(); b++) {
            actual |= uint64_t(s.observable_flips[b]) << b;
        }
        oracle_errors += oracle.decode(s.syndrome).best_class != actual;
        decoder_errors += decoder.decode(s.syndrome).predicted_flips != s.observable_flips;
    }
    std::printf("oracle: p_log=%.6g (exhaustive) vs %.6g (decoder) over %llu shots\n",
                double(oracle_errors) / config.shots, double(decoder_errors) / config.shots,
                (unsigned long long)config.shots);
}

int run_simulate(const DetectorErrorModel &model, ExperimentConfig &config, const std::string &out_path,
                 const std::string &plot_path, bool with_oracle) {
    ExperimentResult result = run_experiment(model, config);
    write_text_file(out_path, results_csv(config, result));
    write_text_file(out_path + ".manifest.json", results_manifest_json(config, result));
    if (!plot_path.empty()) {
        write_text_file(plot_path, tradeoff_plot_svg(result));
    }
    std::printf("%zu sweep rows -> %s (T=%u, %llu shots, %llu raw logical errors)\n", result.rows.size(),
                out_path.c_str(), result.rounds, (unsigned long long)config.shots,
                (unsigned long long)result.total_logical_errors);
    if (with_oracle) {
        print_oracle_comparison(model, config);
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"cluster-statistics post-selection toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CodeOptions build_opt;
    std::string build_out;
    CLI::App *build = app.add_subcommand("build-dem", "construct a detector error model and print or save it");
    add_code_flags(build, build_opt, true);
    build->add_option("--out", build_out, "output path (stdout when omitted)");

    CodeOptions sim_code;
    std::string dem_path;
    std::string mode = "global";
    std::string metric_list = "llr:2";
    std::string cutoff_list = "auto";
    std::string restrict_scope;
    std::string sim_out = "results.csv";
    std::string plot_path;
    bool conv_max_conf = false;
    bool with_oracle = false;
    ExperimentConfig config;
    CLI::App *sim = app.add_subcommand("simulate", "sample, decode, and sweep post-selection cutoffs");
    add_code_flags(sim, sim_code, false);
    sim->add_option("--dem", dem_path, "detector error model file (alternative to --code)");
    sim->add_option("--shots", config.shots, "number of Monte Carlo shots")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", config.seed, "RNG stream seed");
    sim->add_option("--mode", mode, "global or realtime")->check(CLI::IsMember({"global", "realtime"}));
    sim->add_option("--window", config.window.window_size, "window size W in rounds (realtime)");
    sim->add_option("--commit", config.window.commit_size, "commit size F in rounds (realtime)");
    sim->add_option("--lookback", config.lookback, "checkpoint lookback L in windows (realtime)");
    sim->add_option("--metric", metric_list, "comma list, e.g. size:2,llr:2,llr:inf,weight,density");
    sim->add_option("--cutoffs", cutoff_list, "'auto' or a comma list of cutoff values");
    sim->add_option("--restrict", restrict_scope, "'z' restricts cluster metrics to detector-coupled mechanisms")
        ->check(CLI::IsMember({"z", "all"}));
    sim->add_option("--out", sim_out, "CSV output path (manifest written alongside)");
    sim->add_option("--plot", plot_path, "also write the trade-off plot SVG here");
    sim->add_option("--threads", config.threads, "worker threads across shots")->check(CLI::PositiveNumber);
    sim->add_option("--bp-iterations", config.bp.max_iterations, "belief propagation iteration limit");
    sim->add_flag("--conv-max-conf", conv_max_conf, "treat converged shots as maximally confident (no clusters)");
    sim->add_flag("--with-oracle", with_oracle, "also decode every shot with the exhaustive oracle (small models)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            return run_build_dem(build_opt, build_out);
        }
        if (dem_path.empty() == sim_code.code.empty()) {
            throw std::invalid_argument("simulate needs exactly one of --dem or --code");
        }
        DetectorErrorModel model;
        if (!dem_path.empty()) {
            model = parse_dem(read_text_file(dem_path));
            config.code_name = file_stem(dem_path);
            config.noise_rate = sim_code.p_data;
        } else {
            CssCodeSpec code = build_code(sim_code);
            model = phenomenological_dem(code, sim_code.rounds, sim_code.p_data, sim_code.p_meas);
            config.code_name = code_label(sim_code, code);
            config.noise_rate = sim_code.p_data;
        }
        config.mode = mode == "realtime" ? RunMode::kRealtime : RunMode::kGlobal;
        config.converged_max_confidence = conv_max_conf;
        config.metrics = parse_metric_list(metric_list);
        if (cutoff_list != "auto") {
            config.cutoffs = parse_cutoff_list(cutoff_list);
        }
        config.restrict_to_detectable = restrict_scope == "z";
        return run_simulate(model, config, sim_out, plot_path, with_oracle);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
