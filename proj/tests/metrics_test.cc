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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "clusterps/codes.h"
#include "clusterps/decoder.h"
#include "clusterps/dem.h"
#include "clusterps/oracle.h"
#include "test_util.h"

using namespace clusterps;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Cluster make_cluster(std::vector<uint32_t> mechanisms, const DetectorErrorModel &model) {
    Cluster c;
    c.mechanisms = std::move(mechanisms);
    for (uint32_t mech : c.mechanisms) {
        c.llr_mass += model.llrs[mech];
    }
    c.local_solution.assign(c.mechanisms.size(), 0);
    return c;
}

// A 10-mechanism model whose llrs are all equal (p=0.1 everywhere).
DetectorErrorModel uniform_model(size_t n = 10) {
    std::vector<std::vector<uint32_t>> det_cols(n);
    for (size_t j = 0; j < n; j++) {
        det_cols[j] = {static_cast<uint32_t>(j)};
    }
    return make_dem(n, 0, std::move(det_cols), std::vector<std::vector<uint32_t>>(n), std::vector<double>(n, 0.1));
}

}  // namespace

TEST(Metrics, ParseSpecStrings) {
    MetricSpec s = parse_metric_spec("size:2");
    EXPECT_EQ(s.family, MetricFamily::kClusterSize);
    EXPECT_EQ(s.alpha, 2.0);
    s = parse_metric_spec("llr:inf");
    EXPECT_EQ(s.family, MetricFamily::kClusterLlr);
    EXPECT_TRUE(std::isinf(s.alpha));
    s = parse_metric_spec("llr:0.5");
    EXPECT_EQ(s.alpha, 0.5);
    EXPECT_EQ(parse_metric_spec("weight").family, MetricFamily::kCorrectionWeight);
    EXPECT_EQ(parse_metric_spec("density").family, MetricFamily::kDetectorDensity);
}

TEST(Metrics, ParseSpecRejectsMalformed) {
    EXPECT_THROW(parse_metric_spec(""), std::invalid_argument);
    EXPECT_THROW(parse_metric_spec("size"), std::invalid_argument);      // alpha required
    EXPECT_THROW(parse_metric_spec("weight:2"), std::invalid_argument);  // alpha forbidden
    EXPECT_THROW(parse_metric_spec("density:1"), std::invalid_argument);
    EXPECT_THROW(parse_metric_spec("size:0"), std::invalid_argument);
    EXPECT_THROW(parse_metric_spec("size:-1"), std::invalid_argument);
    EXPECT_THROW(parse_metric_spec("size:abc"), std::invalid_argument);
    EXPECT_THROW(parse_metric_spec("size:2x"), std::invalid_argument);
    EXPECT_THROW(parse_metric_spec("blah:2"), std::invalid_argument);
}

TEST(Metrics, SpecToStringRoundTrip) {
    for (const char *text : {"size:2", "size:0.5", "llr:1", "llr:inf", "weight", "density"}) {
        MetricSpec s = parse_metric_spec(text);
        EXPECT_EQ(s.to_string(), text);
    }
}

TEST(Metrics, SizeNormFractionExamples) {
    DetectorErrorModel m = uniform_model();
    MechanismSet all = MechanismSet::all(10);
    std::vector<Cluster> clusters = {make_cluster({0, 1}, m), make_cluster({2, 3, 4}, m)};
    EXPECT_EQ(cluster_size_norm_fraction({}, all, 2.0), 0.0);
    EXPECT_NEAR(cluster_size_norm_fraction(clusters, all, 2.0), std::sqrt(13.0) / 10.0, 1e-15);
    EXPECT_NEAR(cluster_size_norm_fraction(clusters, all, kInf), 0.3, 1e-15);
    std::vector<uint32_t> everything(10);
    for (uint32_t i = 0; i < 10; i++) {
        everything[i] = i;
    }
    std::vector<Cluster> full = {make_cluster(everything, m)};
    for (double alpha : {0.5, 1.0, 2.0, kInf}) {
        EXPECT_NEAR(cluster_size_norm_fraction(full, all, alpha), 1.0, 1e-15) << alpha;
    }
}

TEST(Metrics, LlrNormFractionExamples) {
    // Two clusters with llr masses 1 and 2 against a total mass of 10.
    std::vector<double> priors;
    auto prior_for_llr = [](double w) { return 1.0 / (1.0 + std::exp(w)); };
    priors.push_back(prior_for_llr(1.0));
    priors.push_back(prior_for_llr(2.0));
    for (int i = 0; i < 4; i++) {
        priors.push_back(prior_for_llr(7.0 / 4.0));
    }
    std::vector<std::vector<uint32_t>> det_cols(priors.size());
    for (size_t j = 0; j < priors.size(); j++) {
        det_cols[j] = {static_cast<uint32_t>(j)};
    }
    DetectorErrorModel m =
        make_dem(priors.size(), 0, std::move(det_cols), std::vector<std::vector<uint32_t>>(priors.size()), priors);
    MechanismSet all = MechanismSet::all(m.num_mechanisms);
    double total = 0;
    for (double w : m.llrs) {
        total += w;
    }
    ASSERT_NEAR(total, 10.0, 1e-12);
    std::vector<Cluster> clusters = {make_cluster({0}, m), make_cluster({1}, m)};
    EXPECT_NEAR(cluster_llr_norm_fraction(clusters, all, 1.0, m.llrs), 0.3, 1e-12);
    EXPECT_EQ(cluster_llr_norm_fraction({}, all, 1.0, m.llrs), 0.0);
}

TEST(Metrics, LlrUndefinedWhenAllPriorsHalf) {
    size_t n = 4;
    std::vector<std::vector<uint32_t>> det_cols(n);
    for (size_t j = 0; j < n; j++) {
        det_cols[j] = {static_cast<uint32_t>(j)};
    }
    DetectorErrorModel m =
        make_dem(n, 0, std::move(det_cols), std::vector<std::vector<uint32_t>>(n), std::vector<double>(n, 0.5));
    MechanismSet all = MechanismSet::all(n);
    std::vector<Cluster> clusters = {make_cluster({0, 1}, m)};
    EXPECT_THROW(cluster_llr_norm_fraction(clusters, all, 1.0, m.llrs), std::domain_error);
}

TEST(Metrics, UniformPriorsMakeLlrEqualSize) {
    DetectorErrorModel m = uniform_model();
    MechanismSet all = MechanismSet::all(10);
    std::vector<Cluster> clusters = {make_cluster({0, 1}, m), make_cluster({4, 5, 6}, m)};
    for (double alpha : {0.5, 1.0, 2.0, 3.0, kInf}) {
        double size_q = cluster_size_norm_fraction(clusters, all, alpha);
        double llr_q = cluster_llr_norm_fraction(clusters, all, alpha, m.llrs);
        EXPECT_NEAR(llr_q, size_q, 1e-12 * std::max(1.0, std::abs(size_q))) << alpha;
    }
}

TEST(Metrics, CorrectionWeightExamples) {
    std::vector<double> llrs = {std::log(99.0), 1.5, 0.0};
    EXPECT_EQ(correction_weight(BitVec{0, 0, 0}, llrs), 0.0);
    EXPECT_NEAR(correction_weight(BitVec{1, 0, 0}, llrs), 4.59512, 1e-5);
    EXPECT_NEAR(correction_weight(BitVec{1, 1, 0}, llrs), std::log(99.0) + 1.5, 1e-12);
    EXPECT_EQ(correction_weight(BitVec{0, 0, 1}, llrs), 0.0);  // prior 0.5 weighs nothing
}

TEST(Metrics, DetectorDensityExamples) {
    EXPECT_EQ(detector_density(BitVec(12, 0)), 0.0);
    EXPECT_EQ(detector_density(BitVec(12, 1)), 1.0);
    BitVec three(12, 0);
    three[0] = three[5] = three[11] = 1;
    EXPECT_EQ(detector_density(three), 0.25);
    EXPECT_THROW(detector_density(BitVec{}), std::invalid_argument);
}

TEST(Metrics, AlphaMonotonicityOnRandomConfigurations) {
    std::mt19937_64 rng(51);
    DetectorErrorModel m = uniform_model(40);
    MechanismSet all = MechanismSet::all(40);
    std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0, 4.0, 16.0, kInf};
    for (int trial = 0; trial < 1000; trial++) {
        std::vector<Cluster> clusters;
        std::vector<uint32_t> pool(40);
        for (uint32_t i = 0; i < 40; i++) {
            pool[i] = i;
        }
        std::shuffle(pool.begin(), pool.end(), rng);
        size_t used = 0;
        size_t count = 1 + rng() % 5;
        for (size_t c = 0; c < count && used < pool.size(); c++) {
            size_t take = 1 + rng() % 6;
            take = std::min(take, pool.size() - used);
            clusters.push_back(
                make_cluster(std::vector<uint32_t>(pool.begin() + used, pool.begin() + used + take), m));
            used += take;
        }
        double prev_size = std::numeric_limits<double>::infinity();
        double prev_llr = std::numeric_limits<double>::infinity();
        for (double alpha : alphas) {
            double qs = cluster_size_norm_fraction(clusters, all, alpha);
            double ql = cluster_llr_norm_fraction(clusters, all, alpha, m.llrs);
            EXPECT_LE(qs, prev_size * (1 + 1e-12));
            EXPECT_LE(ql, prev_llr * (1 + 1e-12));
            prev_size = qs;
            prev_llr = ql;
        }
    }
}

TEST(Metrics, RestrictionUsesOnlyIntersections) {
    DetectorErrorModel m = uniform_model(10);
    MechanismSet restricted = MechanismSet::from_ids({0, 1, 2, 3, 4}, 10);
    // Mechanisms 7..9 lie outside the restriction and must not matter.
    std::vector<Cluster> a = {make_cluster({0, 1, 7, 8, 9}, m)};
    std::vector<Cluster> b = {make_cluster({0, 1}, m)};
    for (double alpha : {1.0, 2.0, kInf}) {
        EXPECT_EQ(cluster_size_norm_fraction(a, restricted, alpha), cluster_size_norm_fraction(b, restricted, alpha));
        EXPECT_EQ(cluster_llr_norm_fraction(a, restricted, alpha, m.llrs),
                  cluster_llr_norm_fraction(b, restricted, alpha, m.llrs));
    }
    // A cluster entirely outside the restriction is dropped.
    std::vector<Cluster> outside = {make_cluster({7, 8}, m)};
    EXPECT_EQ(cluster_size_norm_fraction(outside, restricted, 2.0), 0.0);
}

TEST(Metrics, MechanismSetValidation) {
    EXPECT_THROW(MechanismSet::from_ids({5}, 3), std::invalid_argument);
    MechanismSet s = MechanismSet::from_ids({2, 0, 2}, 3);  // sorted, deduplicated
    EXPECT_EQ(s.ids, (std::vector<uint32_t>{0, 2}));
    EXPECT_TRUE(s.contains(0));
    EXPECT_FALSE(s.contains(1));
}

TEST(Metrics, EvaluateDispatch) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 2, 0.05, 0.05);
    BpLsdDecoder decoder(m);
    DecodeOutcome zero = decoder.decode(BitVec(m.num_detectors, 0));
    EXPECT_EQ(evaluate_metric(parse_metric_spec("density"), zero, m), 0.0);
    EXPECT_EQ(evaluate_metric(parse_metric_spec("llr:2"), zero, m), 0.0);
    EXPECT_EQ(evaluate_metric(parse_metric_spec("weight"), zero, m), 0.0);
    ShotSample s = sample_shot(m, 61, 3);
    DecodeOutcome out = decoder.decode(s.syndrome);
    EXPECT_EQ(evaluate_metric(parse_metric_spec("density"), out, m),
              static_cast<double>(bit_weight(s.syndrome)) / static_cast<double>(m.num_detectors));
    EXPECT_EQ(evaluate_metric(parse_metric_spec("weight"), out, m), correction_weight(out.correction, m.llrs));
}

TEST(Metrics, EvaluateMatchesIndependentReference) {
    DetectorErrorModel m = phenomenological_dem(rotated_surface_code(3), 3, 0.04, 0.04);
    BpLsdDecoder decoder(m);
    std::vector<MetricSpec> specs = {parse_metric_spec("size:1"),   parse_metric_spec("size:2"),
                                     parse_metric_spec("size:inf"), parse_metric_spec("llr:1"),
                                     parse_metric_spec("llr:2"),    parse_metric_spec("llr:inf"),
                                     parse_metric_spec("weight"),   parse_metric_spec("density")};
    uint64_t nontrivial = 0;
    for (uint64_t i = 0; i < 1000; i++) {
        ShotSample s = sample_shot(m, 71, i);
        DecodeOutcome out = decoder.decode(s.syndrome);
        nontrivial += !out.clusters.empty();
        for (const MetricSpec &spec : specs) {
            double got = evaluate_metric(spec, out, m);
            double want = metric_reference(out, m, spec);
            EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, std::abs(want))) << spec.to_string() << " shot " << i;
        }
    }
    EXPECT_GT(nontrivial, 100u);
}
