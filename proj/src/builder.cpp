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

#include "annkit/builder.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "annkit/errors.hpp"

namespace annkit {

HnswIndex
build_dense_index(std::span<const DenseVector> rows, const BuildParams& params) {
    if (rows.empty()) {
        throw InvalidArgument("cannot build an index from an empty matrix");
    }
    const std::size_t dim = rows.front().dim();
    for (const auto& r : rows) {
        if (r.dim() != dim) {
            throw InvalidArgument("input rows have mixed dimensionality");
        }
    }

    Quantizer quantizer;
    if (params.product_quantizer) {
        const auto picked = select_training_sample(rows.size(), params.max_training_rows, params.pq.seed);
        std::vector<DenseVector> sample;
        sample.reserve(picked.size());
        for (auto i : picked) {
            sample.push_back(rows[i]);
        }
        quantizer = Quantizer(train_pq(sample, params.pq));
    }

    auto ds = Dataset::dense(dim, std::move(quantizer), true);
    ds.reserve(rows.size());
    for (const auto& r : rows) {
        ds.push(r);
    }
    HnswIndex index(std::move(ds), params.measure, params.hnsw);
    index.insert_pending();
    index.finish_build();
    return index;
}

HnswIndex
build_dense_index(std::span<const float> rows, std::size_t dim, const BuildParams& params) {
    if (dim == 0 || rows.empty() || rows.size() % dim != 0) {
        throw InvalidArgument("dense input must be a non-empty row-major matrix with " + std::to_string(dim) +
                              " columns");
    }
    std::vector<DenseVector> vectors;
    vectors.reserve(rows.size() / dim);
    for (std::size_t i = 0; i < rows.size(); i += dim) {
        vectors.emplace_back(std::vector<float>(rows.begin() + static_cast<std::ptrdiff_t>(i),
                                                rows.begin() + static_cast<std::ptrdiff_t>(i + dim)));
    }
    return build_dense_index(vectors, params);
}

HnswIndex
build_sparse_index(std::span<const SparseVector> rows, const BuildParams& params) {
    if (rows.empty()) {
        throw InvalidArgument("cannot build an index from an empty matrix");
    }
    if (params.product_quantizer) {
        throw UnsupportedCombination("sparse vectors are stored unquantized");
    }
    auto ds = Dataset::sparse();
    ds.reserve(rows.size());
    for (const auto& r : rows) {
        ds.push(r);
    }
    HnswIndex index(std::move(ds), params.measure, params.hnsw);
    index.insert_pending();
    index.finish_build();
    return index;
}

HnswIndex
build_sparse_index(std::span<const std::uint64_t> offsets, std::span<const std::uint32_t> indices,
                   std::span<const float> values, const BuildParams& params) {
    if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != indices.size() ||
        indices.size() != values.size()) {
        throw InvalidArgument("CSR triplet is inconsistent (offsets must start at 0 and end at nnz)");
    }
    std::vector<SparseVector> rows;
    rows.reserve(offsets.size() - 1);
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
        if (offsets[i + 1] < offsets[i]) {
            throw InvalidArgument("CSR offsets decrease at row " + std::to_string(i + 1));
        }
        const auto b = static_cast<std::ptrdiff_t>(offsets[i]);
        const auto e = static_cast<std::ptrdiff_t>(offsets[i + 1]);
        rows.emplace_back(std::vector<std::uint32_t>(indices.begin() + b, indices.begin() + e),
                          std::vector<float>(values.begin() + b, values.begin() + e));
    }
    return build_sparse_index(rows, params);
}

BatchResults
search_batch(const HnswIndex& index, std::span<const VectorView> queries, std::size_t k, std::size_t ef) {
    BatchResults out;
    out.rows = queries.size();
    out.width = std::min(k, index.size());
    out.ids.assign(out.rows * out.width, HnswGraph::kNoNode);
    out.scores.assign(out.rows * out.width, std::numeric_limits<float>::quiet_NaN());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto res = index.search(queries[i], k, ef);
        for (std::size_t j = 0; j < res.size() && j < out.width; ++j) {
            out.ids[i * out.width + j] = res[j].id;
            out.scores[i * out.width + j] = res[j].score;
        }
    }
    return out;
}

}  // namespace annkit
