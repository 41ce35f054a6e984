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

#include <cmath>
#include <random>
#include <sstream>

#include "annkit/builder.hpp"
#include "annkit/errors.hpp"
#include "annkit/io.hpp"
#include "test_util.hpp"

using namespace annkit;
using namespace annkit::testing;

namespace {

std::string
bytes_of(const HnswIndex& index) {
    std::ostringstream out;
    index.save(out);
    return out.str();
}

std::vector<float>
flatten(const std::vector<DenseVector>& vs) {
    std::vector<float> out;
    for (const auto& v : vs) {
        out.insert(out.end(), v.values().begin(), v.values().end());
    }
    return out;
}

}  // namespace

TEST(BuilderTest, MatrixAndListBuildsAreByteIdentical) {
    std::mt19937 rng(1);
    const auto vs = random_gaussian(rng, 800, 16);
    const auto flat = flatten(vs);
    for (bool pq : {false, true}) {
        BuildParams p;
        p.measure = Measure::InnerProduct;
        p.product_quantizer = pq;
        p.pq.m = 4;
        p.pq.ks = 16;
        p.pq.iters = 5;
        p.hnsw.ef_construction = 50;
        const auto a = build_dense_index(vs, p);
        const auto b = build_dense_index(std::span<const float>(flat), 16, p);
        EXPECT_EQ(bytes_of(a), bytes_of(b));
        EXPECT_EQ(a.dataset().has_raw(), !pq);
    }
}

TEST(BuilderTest, CsrTripletMatchesListBuild) {
    std::mt19937 rng(2);
    const auto vs = random_sparse_set(rng, 400, 500, 0, 25);
    std::vector<std::uint64_t> offsets{0};
    std::vector<std::uint32_t> indices;
    std::vector<float> values;
    for (const auto& v : vs) {
        indices.insert(indices.end(), v.indices().begin(), v.indices().end());
        values.insert(values.end(), v.values().begin(), v.values().end());
        offsets.push_back(indices.size());
    }
    BuildParams p;
    p.measure = Measure::InnerProduct;
    const auto a = build_sparse_index(vs, p);
    const auto b = build_sparse_index(offsets, indices, values, p);
    EXPECT_EQ(bytes_of(a), bytes_of(b));

    std::vector<std::uint64_t> bad = offsets;
    bad.back() += 1;
    EXPECT_THROW(build_sparse_index(bad, indices, values, p), InvalidArgument);
    p.product_quantizer = true;
    EXPECT_THROW(build_sparse_index(vs, p), UnsupportedCombination);
}

TEST(BuilderTest, EmptyAndRaggedInputs) {
    BuildParams p;
    EXPECT_THROW(build_dense_index(std::vector<DenseVector>{}, p), InvalidArgument);
    EXPECT_THROW(build_dense_index(std::span<const float>(), 4, p), InvalidArgument);
    const std::vector<float> ragged(10, 1.0f);
    EXPECT_THROW(build_dense_index(std::span<const float>(ragged), 4, p), InvalidArgument);
    EXPECT_THROW(build_sparse_index(std::vector<SparseVector>{}, p), InvalidArgument);
    const std::vector<DenseVector> mixed{DenseVector({1.0f}), DenseVector({1.0f, 2.0f})};
    EXPECT_THROW(build_dense_index(mixed, p), InvalidArgument);
}

TEST(BuilderTest, SearchBatchMatchesCoreSearch) {
    std::mt19937 rng(3);
    const auto vs = random_gaussian(rng, 1000, 8);
    const auto index = build_dense_index(vs, BuildParams{});
    const auto queries = random_gaussian(rng, 100, 8);
    const auto views = as_views(queries);
    const auto batch = search_batch(index, views, 10, 32);
    ASSERT_EQ(batch.rows, 100u);
    ASSERT_EQ(batch.width, 10u);
    for (std::size_t i = 0; i < 100; ++i) {
        const auto r = index.search(queries[i], 10, 32);
        for (std::size_t j = 0; j < 10; ++j) {
            EXPECT_EQ(batch.ids[i * 10 + j], r[j].id);
            EXPECT_EQ(batch.scores[i * 10 + j], r[j].score);
        }
    }

    const std::vector<DenseVector> self{vs[123]};
    const auto one = search_batch(index, as_views(self), 1, 10);
    EXPECT_EQ(one.ids[0], 123u);
    EXPECT_EQ(one.scores[0], 0.0f);

    const std::vector<DenseVector> wrong{random_dense(rng, 9)};
    EXPECT_THROW(search_batch(index, as_views(wrong), 1, 10), InvalidArgument);
}

TEST(BuilderTest, KBeyondSizeIsTruncated) {
    std::mt19937 rng(4);
    const auto index = build_dense_index(random_gaussian(rng, 5, 3), BuildParams{});
    const std::vector<DenseVector> q{random_dense(rng, 3)};
    const auto batch = search_batch(index, as_views(q), 20, 20);
    EXPECT_EQ(batch.width, 5u);
    for (auto id : batch.ids) {
        EXPECT_NE(id, HnswGraph::kNoNode);
    }
    for (auto s : batch.scores) {
        EXPECT_FALSE(std::isnan(s));
    }
}
