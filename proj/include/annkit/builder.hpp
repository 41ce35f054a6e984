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

#pragma once

// One-call build and batched search. This is the surface the command line
// tool and language bindings share, so equal inputs and seeds give
// byte-identical index files whichever front end was used.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "annkit/hnsw.hpp"
#include "annkit/quantizer.hpp"

namespace annkit {

struct BuildParams {
    Measure measure = Measure::SquaredL2;
    HnswConfig hnsw;
    bool product_quantizer = false;
    PqTrainParams pq;
    /// PQ is trained on at most this many rows, drawn with pq.seed.
    std::size_t max_training_rows = 262144;
};

HnswIndex
build_dense_index(std::span<const DenseVector> rows, const BuildParams& params);

/// Row-major float32 matrix of `rows.size() / dim` vectors.
HnswIndex
build_dense_index(std::span<const float> rows, std::size_t dim, const BuildParams& params);

HnswIndex
build_sparse_index(std::span<const SparseVector> rows, const BuildParams& params);

/// CSR triplet: offsets has n + 1 entries.
HnswIndex
build_sparse_index(std::span<const std::uint64_t> offsets, std::span<const std::uint32_t> indices,
                   std::span<const float> values, const BuildParams& params);

/// Row-major results of a query batch. Each row holds min(k, index size)
/// slots; unfilled slots carry HnswGraph::kNoNode and a NaN score.
struct BatchResults {
    std::size_t rows = 0;
    std::size_t width = 0;
    std::vector<NodeId> ids;
    std::vector<float> scores;
};

BatchResults
search_batch(const HnswIndex& index, std::span<const VectorView> queries, std::size_t k, std::size_t ef);

}  // namespace annkit
