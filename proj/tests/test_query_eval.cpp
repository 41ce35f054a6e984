// Copyright 2026-present the annkit project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "annkit/errors.hpp"
#include "annkit/query_eval.hpp"
#include "test_util.hpp"

using namespace annkit;
using namespace annkit::testing;

TEST(EvaluatorTest, IdentityDenseMatchesKernels) {
    std::mt19937 rng(1);
    auto ds = Dataset::dense(10);
    std::vector<DenseVector> vs;
    for (int i = 0; i < 40; ++i) {
        vs.push_back(random_dense(rng, 10));
        ds.push(vs.back());
    }
    const auto q = random_dense(rng, 10);
    for (Measure m : {Measure::SquaredL2, Measure::InnerProduct}) {
        const auto ev = make_evaluator(q, ds, m);
        EXPECT_EQ(ev.mode(), QueryEvaluator::Mode::Exact);
        for (NodeId i = 0; i < 40; ++i) {
            EXPECT_EQ(ev.eval(i), score(m, q.view(), vs[i].view()));
        }
        EXPECT_THROW(ev.eval(40), NotFound);
    }
}

TEST(EvaluatorTest, SparseMatchesKernel) {
    std::mt19937 rng(2);
    auto ds = Dataset::sparse();
    const auto vs = random_sparse_set(rng, 30, 100, 1, 20);
    for (const auto& v : vs) {
        ds.push(v);
    }
    const auto q = random_sparse(rng, 100, 15);
    const auto ev = make_evaluator(q, ds, Measure::InnerProduct);
    for (NodeId i = 0; i < 30; ++i) {
        EXPECT_EQ(ev.eval(i), dot_sparse(q.view(), vs[i].view()));
    }
    EXPECT_THROW(make_evaluator(q, ds, Measure::SquaredL2), UnsupportedCombination);
}

TEST(EvaluatorTest, PqModes) {
    std::mt19937 rng(3);
    PqTrainParams p;
    p.m = 4;
    p.ks = 16;
    p.iters = 5;
    const auto cb = train_pq(random_gaussian(rng, 300, 8), p);
    auto ds = Dataset::dense(8, Quantizer(cb), true);
    std::vector<DenseVector> vs;
    for (int i = 0; i < 25; ++i) {
        vs.push_back(random_dense(rng, 8));
        ds.push(vs.back());
    }
    const auto q = random_dense(rng, 8);
    for (Measure m : {Measure::SquaredL2, Measure::InnerProduct}) {
        const auto stored = make_evaluator(q, ds, m);
        EXPECT_EQ(stored.mode(), QueryEvaluator::Mode::Tabled);
        const auto table = build_distance_table(q.view(), cb, m);
        const auto raw = make_evaluator(q, ds, m, Representation::Raw);
        EXPECT_EQ(raw.mode(), QueryEvaluator::Mode::Exact);
        for (NodeId i = 0; i < 25; ++i) {
            EXPECT_EQ(stored.eval(i), adc_score(encode(vs[i].view(), cb).view(), table));
            EXPECT_EQ(raw.eval(i), score(m, q.view(), vs[i].view()));
        }
    }
    ds.drop_raw_cache();
    EXPECT_THROW(make_evaluator(q, ds, Measure::SquaredL2, Representation::Raw), StateError);
}

TEST(EvaluatorTest, QueryShapeErrors) {
    std::mt19937 rng(4);
    auto ds = Dataset::dense(4);
    ds.push(random_dense(rng, 4));
    EXPECT_THROW(make_evaluator(random_dense(rng, 5), ds, Measure::SquaredL2), InvalidArgument);
    EXPECT_THROW(make_evaluator(SparseVector({1}, {1.0f}), ds, Measure::InnerProduct), InvalidArgument);
    EXPECT_THROW(check_measure(VectorKind::Sparse, Measure::SquaredL2), UnsupportedCombination);
    EXPECT_NO_THROW(check_measure(VectorKind::Dense, Measure::SquaredL2));
}

TEST(TopKTest, MatchesSortOracle) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> small(0, 20);
    for (int trial = 0; trial < 500; ++trial) {
        const Measure m = trial % 2 ? Measure::InnerProduct : Measure::SquaredL2;
        const std::size_t n = 1 + trial % 60;
        const std::size_t k = 1 + trial % 17;
        std::vector<float> scores(n);
        for (auto& s : scores) {
            // Coarse values so ties are common.
            s = static_cast<float>(small(rng)) * 0.5f;
        }
        TopK top(k, m);
        std::vector<NodeId> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = static_cast<NodeId>(i);
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (auto id : order) {
            top.push(id, scores[id]);
        }
        const auto res = top.finalize();
        const auto want = brute_force_ids(scores, m, k);
        ASSERT_EQ(res.ids(), want);
        for (std::size_t i = 0; i < res.size(); ++i) {
            EXPECT_EQ(res[i].score, scores[res[i].id]);
        }
    }
}

TEST(TopKTest, ThresholdIsMonotone) {
    std::mt19937 rng(6);
    for (Measure m : {Measure::SquaredL2, Measure::InnerProduct}) {
        TopK top(5, m);
        std::optional<float> prev;
        for (NodeId i = 0; i < 200; ++i) {
            top.push(i, random_floats(rng, 1)[0]);
            const auto t = top.threshold();
            EXPECT_EQ(t.has_value(), i >= 4);
            if (prev && t) {
                EXPECT_FALSE(better(m, *prev, *t));
            }
            prev = t;
        }
    }
}

TEST(TopKTest, ZeroKRejected) {
    EXPECT_THROW(TopK(0, Measure::SquaredL2), InvalidArgument);
}
