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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "clusterps/codes.h"
#include "clusterps/dem.h"
#include "clusterps/metrics.h"
#include "clusterps/oracle.h"
#include "test_util.h"

using namespace clusterps;

namespace {

// Restricted system check: within each cluster, the local solution must
// reproduce the syndrome on every detector any cluster member touches.
void expect_cluster_solves_locally(const DetectorErrorModel &model, const Cluster &cluster, const BitVec &syndrome) {
    std::set<uint32_t> touched;
    for (uint32_t mech : cluster.mechanisms) {
        for (uint32_t det : model.check_matrix.col(mech)) {
            touched.insert(det);
        }
    }
    for (uint32_t det : touched) {
        int acc = 0;
        for (size_t i = 0; i < cluster.mechanisms.size(); i++) {
            if (!cluster.local_solution[i]) {
                continue;
            }
            const std::vector<uint32_t> &col = model.check_matrix.col(cluster.mechanisms[i]);
            if (std::find(col.begin(), col.end(), det) != col.end()) {
                acc ^= 1;
            }
        }
        EXPECT_EQ(acc, syndrome[det]) << "detector " << det;
    }
}

void expect_outcome_well_formed(const DetectorErrorModel &model, const FaultGraph &graph, const BitVec &syndrome,
                                const DecodeOutcome &outcome) {
    ASSERT_EQ(test_util::reference_mul(model.check_matrix, outcome.correction), syndrome);
    ASSERT_EQ(test_util::reference_mul(model.observable_matrix, outcome.correction), outcome.predicted_flips);
    BitVec seen(model.num_mechanisms, 0);
    for (const Cluster &cluster : outcome.clusters) {
        ASSERT_FALSE(cluster.mechanisms.empty());
        EXPECT_TRUE(std::is_sorted(cluster.mechanisms.begin(), cluster.mechanisms.end()));
        EXPECT_EQ(cluster.size(), cluster.mechanisms.size());
        double mass = 0;
        for (uint32_t mech : cluster.mechanisms) {
            EXPECT_FALSE(seen[mech]) << "clusters overlap at " << mech;
            seen[mech] = 1;
            mass += model.llrs[mech];
        }
        EXPECT_NEAR(cluster.llr_mass, mass, 1e-9);
        EXPECT_TRUE(test_util::is_connected(cluster.mechanisms, graph));
        ASSERT_EQ(cluster.local_solution.size(), cluster.mechanisms.size());
        expect_cluster_solves_locally(model, cluster, syndrome);
    }
}

}  // namespace

TEST(Bp, ZeroSyndromeConvergesImmediately) {
    DetectorErrorModel m = parse_dem("error(0.1) D0 D1\nerror(0.2) D1\nerror(0.3) D0");
    BpResult r = bp_decode(m, BitVec(2, 0));
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.hard_decision, BitVec(3, 0));
    EXPECT_EQ(r.posterior_llrs, m.llrs);
}

TEST(Bp, SingleMechanismForced) {
    DetectorErrorModel m = parse_dem("error(0.1) D0");
    BpResult r = bp_decode(m, BitVec{1});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.hard_decision, BitVec{1});
    EXPECT_LT(r.posterior_llrs[0], 0.0);
}

TEST(Bp, RecoversSingleDataError) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 1, 0.1, 0.0);
    BitVec faults(m.num_mechanisms, 0);
    faults[2] = 1;  // middle qubit, flips two adjacent checks
    BitVec syndrome = test_util::reference_mul(m.check_matrix, faults);
    ASSERT_EQ(bit_weight(syndrome), 2u);
    BpResult r = bp_decode(m, syndrome);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.hard_decision, faults);
    // The exhaustive reference agrees this is the minimum-weight answer.
    ExhaustiveDecode ml = ml_decode_exhaustive(m, syndrome);
    EXPECT_EQ(ml.best_fault, faults);
}

TEST(Bp, SymmetricTieDoesNotConverge) {
    DetectorErrorModel m = parse_dem("error(0.1) D0\nerror(0.1) D0");
    BpResult r = bp_decode(m, BitVec{1});
    EXPECT_FALSE(r.converged);
}

TEST(Bp, ConfigValidation) {
    DetectorErrorModel m = parse_dem("error(0.1) D0");
    BpConfig bad;
    bad.max_iterations = 0;
    EXPECT_THROW(bp_decode(m, BitVec{1}, bad), std::invalid_argument);
    bad = BpConfig{};
    bad.scale = 0.0;
    EXPECT_THROW(bp_decode(m, BitVec{1}, bad), std::invalid_argument);
    bad = BpConfig{};
    bad.scale = 1.5;
    EXPECT_THROW(bp_decode(m, BitVec{1}, bad), std::invalid_argument);
}

TEST(Bp, PosteriorsClamped) {
    BpConfig config;
    config.llr_clamp = 10.0;
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 2, 0.01, 0.01);
    BitVec syndrome(m.num_detectors, 0);
    syndrome[0] = 1;
    BpResult r = bp_decode(m, syndrome, config);
    for (double v : r.posterior_llrs) {
        EXPECT_LE(std::abs(v), 10.0);
    }
}

TEST(Lsd, ZeroSyndromeGivesNoClusters) {
    DetectorErrorModel m = parse_dem("error(0.1) D0 D1\nerror(0.2) D1");
    FaultGraph g = build_fault_graph(m);
    BpResult r = bp_decode(m, BitVec(2, 0));
    EXPECT_TRUE(lsd_decode(m, g, BitVec(2, 0), r.posterior_llrs).empty());
}

TEST(Lsd, SolvesTriangularSystem) {
    DetectorErrorModel m = parse_dem("error(0.1) D0\nerror(0.1) D0 D1");
    FaultGraph g = build_fault_graph(m);
    BitVec syndrome{1, 1};
    BpResult r = bp_decode(m, syndrome);
    std::vector<Cluster> clusters = lsd_decode(m, g, syndrome, r.posterior_llrs);
    ASSERT_FALSE(clusters.empty());
    BitVec correction(m.num_mechanisms, 0);
    for (const Cluster &cluster : clusters) {
        for (size_t i = 0; i < cluster.mechanisms.size(); i++) {
            if (cluster.local_solution[i]) {
                correction[cluster.mechanisms[i]] = 1;
            }
        }
    }
    EXPECT_EQ(test_util::reference_mul(m.check_matrix, correction), syndrome);
}

TEST(Lsd, ThrowsOnUncoverableDetector) {
    DetectorErrorModel m = parse_dem("error(0.1) D0");
    // Detector 1 exists but nothing touches it; build it by hand.
    DetectorErrorModel wide = make_dem(2, 0, {{0}}, {{}}, {0.1});
    FaultGraph g = build_fault_graph(wide);
    BpResult r = bp_decode(wide, BitVec{0, 1});
    EXPECT_THROW(lsd_decode(wide, g, BitVec{0, 1}, r.posterior_llrs), std::runtime_error);
    (void)m;
}

TEST(Lsd, GrowthTraceIsMonotone) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(7), 3, 0.05, 0.05);
    FaultGraph g = build_fault_graph(m);
    for (uint64_t i = 0; i < 200; i++) {
        ShotSample s = sample_shot(m, 11, i);
        if (is_zero(s.syndrome)) {
            continue;
        }
        BpResult r = bp_decode(m, s.syndrome);
        LsdTrace trace;
        std::vector<Cluster> clusters = lsd_decode(m, g, s.syndrome, r.posterior_llrs, &trace);
        std::set<uint32_t> added(trace.added.begin(), trace.added.end());
        EXPECT_EQ(added.size(), trace.added.size()) << "a mechanism was added twice";
        std::set<uint32_t> final_members;
        for (const Cluster &cluster : clusters) {
            final_members.insert(cluster.mechanisms.begin(), cluster.mechanisms.end());
        }
        for (uint32_t mech : added) {
            EXPECT_TRUE(final_members.count(mech)) << "added mechanism dropped";
        }
    }
}

TEST(Decoder, ZeroSyndrome) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 2, 0.1, 0.1);
    BpLsdDecoder decoder(m);
    DecodeOutcome out = decoder.decode(BitVec(m.num_detectors, 0));
    EXPECT_TRUE(is_zero(out.correction));
    EXPECT_TRUE(is_zero(out.predicted_flips));
    EXPECT_TRUE(out.clusters.empty());
    EXPECT_TRUE(out.bp_converged);
}

TEST(Decoder, ValidityAndClusterShapeOverManyShots) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(7), 3, 0.03, 0.03);
    BpLsdDecoder decoder(m);
    const FaultGraph &g = decoder.fault_graph();
    for (uint64_t i = 0; i < 10000; i++) {
        ShotSample s = sample_shot(m, 13, i);
        DecodeOutcome out = decoder.decode(s.syndrome);
        expect_outcome_well_formed(m, g, s.syndrome, out);
        if (HasFatalFailure()) {
            FAIL() << "shot " << i;
        }
    }
}

TEST(Decoder, ForcedClusteringRunsEvenWhenBpConverges) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 1, 0.1, 0.0);
    BpLsdDecoder decoder(m);
    BitVec faults(m.num_mechanisms, 0);
    faults[2] = 1;
    BitVec syndrome = test_util::reference_mul(m.check_matrix, faults);
    DecodeOutcome out = decoder.decode(syndrome);
    EXPECT_TRUE(out.bp_converged);
    EXPECT_EQ(out.correction, faults);  // converged BP answer wins
    EXPECT_FALSE(out.clusters.empty()); // but clusters are still reported
}

TEST(Decoder, ConvergedMaxConfidenceSkipsClustering) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 1, 0.1, 0.0);
    BpLsdDecoder decoder(m, {}, true);
    BitVec faults(m.num_mechanisms, 0);
    faults[2] = 1;
    BitVec syndrome = test_util::reference_mul(m.check_matrix, faults);
    DecodeOutcome out = decoder.decode(syndrome);
    EXPECT_TRUE(out.bp_converged);
    EXPECT_EQ(out.correction, faults);
    EXPECT_TRUE(out.clusters.empty());
    MetricSpec spec = parse_metric_spec("size:2");
    EXPECT_EQ(evaluate_metric(spec, out, m), 0.0);
}

TEST(Decoder, NonConvergedTieHandledDeterministically) {
    DetectorErrorModel m = parse_dem("error(0.1) D0\nerror(0.1) D0");
    BpLsdDecoder decoder(m);
    DecodeOutcome out = decoder.decode(BitVec{1});
    EXPECT_FALSE(out.bp_converged);
    EXPECT_EQ(test_util::reference_mul(m.check_matrix, out.correction), BitVec{1});
    EXPECT_EQ(bit_weight(out.correction), 1u);
    EXPECT_EQ(out.correction[0], 1);  // lowest index wins the tie
}

TEST(Decoder, DeterministicAcrossRepeatedCalls) {
    DetectorErrorModel m = phenomenological_dem(rotated_surface_code(3), 3, 0.03, 0.03);
    BpLsdDecoder decoder(m);
    for (uint64_t i = 0; i < 200; i++) {
        ShotSample s = sample_shot(m, 21, i);
        DecodeOutcome a = decoder.decode(s.syndrome);
        DecodeOutcome b = decoder.decode(s.syndrome);
        EXPECT_EQ(a.correction, b.correction);
        EXPECT_EQ(a.posterior_llrs, b.posterior_llrs);
        ASSERT_EQ(a.clusters.size(), b.clusters.size());
        for (size_t c = 0; c < a.clusters.size(); c++) {
            EXPECT_EQ(a.clusters[c].mechanisms, b.clusters[c].mechanisms);
            EXPECT_EQ(a.clusters[c].local_solution, b.clusters[c].local_solution);
        }
    }
}

TEST(Decoder, OutcomeKeepsSyndromeCopy) {
    DetectorErrorModel m = phenomenological_dem(repetition_code(5), 2, 0.05, 0.05);
    BpLsdDecoder decoder(m);
    ShotSample s = sample_shot(m, 31, 5);
    DecodeOutcome out = decoder.decode(s.syndrome);
    EXPECT_EQ(out.syndrome, s.syndrome);
}

// Error-rate comparison against exhaustive maximum-likelihood decoding,
// restricted to shots whose violated detectors touch at most 18 mechanisms
// so the reference enumeration stays tractable.
TEST(Decoder, NearOptimalOnEasySurfaceShots) {
    DetectorErrorModel m = phenomenological_dem(rotated_surface_code(5), 5, 0.01, 0.01);
    BpLsdDecoder decoder(m);
    uint64_t compared = 0;
    uint64_t decoder_errors = 0;
    uint64_t oracle_errors = 0;
    for (uint64_t i = 0; i < 10000; i++) {
        ShotSample s = sample_shot(m, 37, i);
        if (is_zero(s.syndrome)) {
            compared++;
            continue;
        }
        std::set<uint32_t> active_set;
        for (size_t det = 0; det < m.num_detectors; det++) {
            if (!s.syndrome[det]) {
                continue;
            }
            for (uint32_t mech : m.check_matrix.row(det)) {
                active_set.insert(mech);
            }
        }
        if (active_set.size() > 18) {
            continue;
        }
        std::vector<uint32_t> active(active_set.begin(), active_set.end());
        std::vector<std::vector<uint32_t>> det_cols;
        std::vector<std::vector<uint32_t>> obs_cols;
        std::vector<double> priors;
        for (uint32_t mech : active) {
            det_cols.push_back(m.check_matrix.col(mech));
            obs_cols.push_back(m.observable_matrix.col(mech));
            priors.push_back(m.priors[mech]);
        }
        DetectorErrorModel sub =
            make_dem(m.num_detectors, m.num_observables, std::move(det_cols), std::move(obs_cols), std::move(priors));
        ExhaustiveDecode ml;
        try {
            ml = ml_decode_exhaustive(sub, s.syndrome, OracleLimit{18});
        } catch (const std::exception &) {
            continue;  // not solvable within the restricted set
        }
        compared++;
        DecodeOutcome out = decoder.decode(s.syndrome);
        if (out.predicted_flips != s.observable_flips) {
            decoder_errors++;
        }
        uint64_t true_mask = 0;
        for (size_t l = 0; l < s.observable_flips.size(); l++) {
            if (s.observable_flips[l]) {
                true_mask |= 1ull << l;
            }
        }
        if (ml.best_class != true_mask) {
            oracle_errors++;
        }
    }
    ASSERT_GT(compared, 5000u);
    // The reference is optimal up to degeneracy: the decoder cannot do much
    // better, and on these easy shots it stays within 2x plus noise.
    EXPECT_LE(decoder_errors, 2 * oracle_errors + 10);
    EXPECT_GE(decoder_errors + 3, oracle_errors);
}
