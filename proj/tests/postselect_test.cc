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

#include "clusterps/postselect.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "clusterps/codes.h"
#include "clusterps/dem.h"
#include "test_util.h"

using namespace clusterps;

namespace {

DetectorErrorModel rep_dem(uint32_t d, uint32_t rounds, double p = 0.05) {
    return phenomenological_dem(repetition_code(d), rounds, p, p);
}

// Syndrome produced by a single fault mechanism.
BitVec syndrome_of_mechanism(const DetectorErrorModel &model, uint32_t mech) {
    BitVec fault(model.num_mechanisms, 0);
    fault[mech] = 1;
    return test_util::reference_mul(model.check_matrix, fault);
}

}  // namespace

TEST(RealtimePolicy, Validation) {
    RealtimePolicy ok{parse_metric_spec("size:2"), 0.5, 2};
    ok.validate();
    RealtimePolicy weight{parse_metric_spec("weight"), 0.5, 2};
    EXPECT_THROW(weight.validate(), std::invalid_argument);
    RealtimePolicy density{parse_metric_spec("density"), 0.5, 2};
    EXPECT_THROW(density.validate(), std::invalid_argument);
    RealtimePolicy zero_lookback{parse_metric_spec("llr:2"), 0.5, 0};
    EXPECT_THROW(zero_lookback.validate(), std::invalid_argument);
}

TEST(GlobalDecide, CutoffOneAcceptsEveryClusterMetricShot) {
    DetectorErrorModel m = rep_dem(5, 3, 0.1);
    BpLsdDecoder dec(m);
    GlobalPolicy policy{parse_metric_spec("size:2"), 1.0};
    policy.metric.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    for (uint64_t i = 0; i < 500; i++) {
        ShotSample s = sample_shot(m, 41, i);
        DecodeOutcome out = dec.decode(s.syndrome);
        ShotVerdict v = global_decide(policy, out, m);
        EXPECT_TRUE(v.accepted);
        EXPECT_FALSE(v.abort_window.has_value());
        EXPECT_LE(v.metric_value, 1.0);
    }
}

TEST(GlobalDecide, CutoffZeroAcceptsOnlyClusterFreeShots) {
    DetectorErrorModel m = rep_dem(5, 3, 0.1);
    BpLsdDecoder dec(m);
    GlobalPolicy policy{parse_metric_spec("size:1"), 0.0};
    policy.metric.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    size_t accepted = 0;
    size_t rejected = 0;
    for (uint64_t i = 0; i < 500; i++) {
        ShotSample s = sample_shot(m, 43, i);
        DecodeOutcome out = dec.decode(s.syndrome);
        ShotVerdict v = global_decide(policy, out, m);
        EXPECT_EQ(v.accepted, out.clusters.empty());
        accepted += v.accepted;
        rejected += !v.accepted;
    }
    EXPECT_GT(accepted, 0u);
    EXPECT_GT(rejected, 0u);
}

TEST(GlobalDecide, AcceptanceIsMonotoneInCutoff) {
    DetectorErrorModel m = rep_dem(7, 4, 0.08);
    BpLsdDecoder dec(m);
    MetricSpec spec = parse_metric_spec("llr:2");
    spec.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    std::vector<double> cutoffs = {0.0, 0.02, 0.05, 0.1, 0.3, 1.0};
    for (uint64_t i = 0; i < 300; i++) {
        ShotSample s = sample_shot(m, 47, i);
        DecodeOutcome out = dec.decode(s.syndrome);
        bool prev = false;
        for (double cutoff : cutoffs) {
            ShotVerdict v = global_decide(GlobalPolicy{spec, cutoff}, out, m);
            EXPECT_TRUE(!prev || v.accepted) << "acceptance lost as cutoff grew";
            prev = v.accepted;
        }
    }
}

TEST(CommittedClusters, EmptyWhenWindowsHaveNoClusters) {
    DetectorErrorModel m = rep_dem(3, 3);
    SlidingWindowDecoder dec(m, WindowConfig{2, 1});
    FaultGraph graph = build_fault_graph(m);
    WindowRunResult r = dec.run(BitVec(m.num_detectors, 0));
    ASSERT_TRUE(r.completed);
    CommittedClusters cc = committed_clusters(r.records, graph, 1, 2);
    EXPECT_TRUE(cc.components.empty());
    MetricSpec spec = parse_metric_spec("size:2");
    spec.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    EXPECT_EQ(committed_metric(cc, spec, m), 0.0);
    EXPECT_FALSE(cc.denominator.empty());  // commit sets are nonempty regardless
}

TEST(CommittedClusters, RequiresEnoughHistory) {
    DetectorErrorModel m = rep_dem(3, 3);
    SlidingWindowDecoder dec(m, WindowConfig{2, 1});
    FaultGraph graph = build_fault_graph(m);
    WindowRunResult r = dec.run(BitVec(m.num_detectors, 0));
    EXPECT_THROW(committed_clusters(r.records, graph, 0, 2), std::invalid_argument);
}

TEST(CommittedClusters, HandWorkedSingleFaultTrace) {
    // d=3, T=3, (W,F)=(2,1): window 0 commits {0,1,2,9,10} and window 1
    // commits the remaining 8 mechanisms. A fault on data mechanism 1
    // (middle qubit, round 0) violates detectors 0 and 1, both inside
    // window 0, and the correction commits at window 0.
    DetectorErrorModel m = rep_dem(3, 3, 0.05);
    SlidingWindowDecoder dec(m, WindowConfig{2, 1});
    FaultGraph graph = build_fault_graph(m);
    BitVec syndrome = syndrome_of_mechanism(m, 1);
    WindowRunResult r = dec.run(syndrome);
    ASSERT_TRUE(r.completed);
    BitVec expect(m.num_mechanisms, 0);
    expect[1] = 1;
    ASSERT_EQ(r.correction, expect);

    MetricSpec spec = parse_metric_spec("size:1");
    spec.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));

    // Window 0 with L=1: one committed component {1} over denominator
    // {0,1,2,9,10}, so the metric is 1/5.
    CommittedClusters w0 = committed_clusters(r.records, graph, 0, 1);
    ASSERT_EQ(w0.components.size(), 1u);
    EXPECT_EQ(w0.components[0], (std::vector<uint32_t>{1}));
    EXPECT_EQ(w0.denominator, (std::vector<uint32_t>{0, 1, 2, 9, 10}));
    EXPECT_NEAR(committed_metric(w0, spec, m), 1.0 / 5.0, 1e-15);

    // Window 1 with L=2: all 13 mechanisms are in the denominator and the
    // committed cluster is still {1}, so the metric is 1/13.
    CommittedClusters w1 = committed_clusters(r.records, graph, 1, 2);
    ASSERT_EQ(w1.components.size(), 1u);
    EXPECT_EQ(w1.components[0], (std::vector<uint32_t>{1}));
    EXPECT_EQ(w1.denominator.size(), 13u);
    EXPECT_NEAR(committed_metric(w1, spec, m), 1.0 / 13.0, 1e-15);

    // Window 1 with L=1: the committed fault at window 0 is out of scope.
    CommittedClusters w1_short = committed_clusters(r.records, graph, 1, 1);
    EXPECT_TRUE(w1_short.components.empty());
    EXPECT_EQ(w1_short.denominator.size(), 8u);
}

TEST(CommittedClusters, ComponentsAreConnectedAndDisjoint) {
    DetectorErrorModel m = rep_dem(7, 6, 0.08);
    SlidingWindowDecoder dec(m, WindowConfig{3, 1});
    FaultGraph graph = build_fault_graph(m);
    size_t seen_components = 0;
    for (uint64_t i = 0; i < 200; i++) {
        ShotSample s = sample_shot(m, 53, i);
        WindowRunResult r = dec.run(s.syndrome);
        ASSERT_TRUE(r.completed);
        for (uint32_t w = 1; w < r.records.size(); w++) {
            CommittedClusters cc = committed_clusters(r.records, graph, w, 2);
            std::set<uint32_t> used;
            for (const std::vector<uint32_t> &comp : cc.components) {
                ASSERT_FALSE(comp.empty());
                EXPECT_TRUE(std::is_sorted(comp.begin(), comp.end()));
                EXPECT_TRUE(test_util::is_connected(comp, graph));
                for (uint32_t mech : comp) {
                    EXPECT_TRUE(used.insert(mech).second) << "component overlap";
                }
                seen_components++;
            }
        }
    }
    EXPECT_GT(seen_components, 50u);
}

TEST(RealtimeDecide, CutoffOneNeverAbortsAndMatchesPlainRun) {
    DetectorErrorModel m = rep_dem(5, 5, 0.08);
    SlidingWindowDecoder dec(m, WindowConfig{3, 1});
    FaultGraph graph = build_fault_graph(m);
    RealtimePolicy policy{parse_metric_spec("size:2"), 1.0, 2};
    policy.metric.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    for (uint64_t i = 0; i < 300; i++) {
        ShotSample s = sample_shot(m, 59, i);
        RealtimeOutcome out = realtime_decide(policy, dec, graph, s.syndrome);
        ASSERT_TRUE(out.verdict.accepted);
        EXPECT_EQ(out.verdict.rounds_elapsed, m.num_rounds());
        WindowRunResult plain = dec.run(s.syndrome);
        EXPECT_EQ(out.predicted_flips, plain.predicted_flips);
    }
}

TEST(RealtimeDecide, ZeroSyndromeAcceptedWithZeroValues) {
    DetectorErrorModel m = rep_dem(5, 5);
    SlidingWindowDecoder dec(m, WindowConfig{3, 1});
    FaultGraph graph = build_fault_graph(m);
    RealtimePolicy policy{parse_metric_spec("size:2"), 0.0, 2};
    policy.metric.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    RealtimeOutcome out = realtime_decide(policy, dec, graph, BitVec(m.num_detectors, 0));
    EXPECT_TRUE(out.verdict.accepted);
    ASSERT_FALSE(out.checkpoint_values.empty());
    for (double v : out.checkpoint_values) {
        EXPECT_EQ(v, 0.0);
    }
    EXPECT_TRUE(std::is_sorted(out.checkpoint_windows.begin(), out.checkpoint_windows.end()));
    // Checkpoints start at window L-1 and end at the final window.
    EXPECT_EQ(out.checkpoint_windows.front(), policy.lookback - 1);
    EXPECT_EQ(out.checkpoint_windows.back(), dec.num_windows() - 1);
}

TEST(RealtimeDecide, AbortChargesPartialRounds) {
    DetectorErrorModel m = rep_dem(11, 11, 0.05);
    SlidingWindowDecoder dec(m, WindowConfig{3, 1});
    FaultGraph graph = build_fault_graph(m);
    RealtimePolicy policy{parse_metric_spec("llr:2"), 0.02, 2};
    policy.metric.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    size_t aborts = 0;
    size_t early_aborts = 0;
    for (uint64_t i = 0; i < 500; i++) {
        ShotSample s = sample_shot(m, 61, i);
        RealtimeOutcome out = realtime_decide(policy, dec, graph, s.syndrome);
        if (out.verdict.accepted) {
            EXPECT_EQ(out.verdict.rounds_elapsed, m.num_rounds());
            EXPECT_FALSE(out.verdict.abort_window.has_value());
            continue;
        }
        aborts++;
        ASSERT_TRUE(out.verdict.abort_window.has_value());
        uint32_t w = *out.verdict.abort_window;
        uint32_t expect_rounds =
            std::min<uint32_t>(m.num_rounds(), w * dec.config().commit_size + dec.config().window_size);
        EXPECT_EQ(out.verdict.rounds_elapsed, expect_rounds);
        EXPECT_GT(out.verdict.metric_value, policy.cutoff);
        EXPECT_EQ(out.checkpoint_windows.back(), w);
        early_aborts += w + 1 < dec.num_windows();
    }
    EXPECT_GT(aborts, 20u);
    EXPECT_GT(early_aborts, 0u) << "tight cutoff should abort before the final window sometimes";
}

TEST(RealtimeDecide, ShortRunsClampTheLookback) {
    // One window total (W = T): the only checkpoint is the final window with
    // lookback clamped from 3 to 1.
    DetectorErrorModel m = rep_dem(5, 3, 0.08);
    SlidingWindowDecoder dec(m, WindowConfig{3, 3});
    ASSERT_EQ(dec.num_windows(), 1u);
    FaultGraph graph = build_fault_graph(m);
    RealtimePolicy policy{parse_metric_spec("size:2"), 1.0, 3};
    policy.metric.restriction = std::make_shared<MechanismSet>(MechanismSet::all(m.num_mechanisms));
    RealtimeOutcome out = realtime_decide(policy, dec, graph, sample_shot(m, 67, 0).syndrome);
    EXPECT_TRUE(out.verdict.accepted);
    EXPECT_EQ(out.checkpoint_windows, (std::vector<uint32_t>{0}));
}
