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

#include "annkit/query_eval.hpp"

#include <algorithm>
#include <string>

#include "annkit/errors.hpp"

namespace annkit {

std::vector<NodeId>
SearchResults::ids() const {
    std::vector<NodeId> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.id);
    }
    return out;
}

TopK::TopK(std::size_t k, Measure m) : k_(k), order_{m} {
    if (k == 0) {
        throw InvalidArgument("top-k accumulator needs k >= 1");
    }
    heap_.reserve(k);
}

void
TopK::push(NodeId id, float score) {
    const Neighbor entry{id, score};
    if (heap_.size() < k_) {
        heap_.push_back(entry);
        std::push_heap(heap_.begin(), heap_.end(), order_);
    } else if (order_(entry, heap_.front())) {
        std::pop_heap(heap_.begin(), heap_.end(), order_);
        heap_.back() = entry;
        std::push_heap(heap_.begin(), heap_.end(), order_);
    }
}

std::optional<float>
TopK::threshold() const noexcept {
    if (!full()) {
        return std::nullopt;
    }
    return heap_.front().score;
}

SearchResults
TopK::finalize() const {
    SearchResults out;
    out.k = k_;
    out.entries = heap_;
    std::sort(out.entries.begin(), out.entries.end(), order_);
    return out;
}

float
QueryEvaluator::eval(NodeId id) const {
    if (id >= n_) {
        throw NotFound("id " + std::to_string(id) + " is out of range (size " + std::to_string(n_) + ")");
    }
    return std::visit([id](const auto& e) { return e(id); }, impl_);
}

void
check_measure(VectorKind kind, Measure m) {
    if (kind == VectorKind::Sparse && m != Measure::InnerProduct) {
        throw UnsupportedCombination("sparse vectors only support the inner-product measure");
    }
}

QueryEvaluator
make_evaluator(const VectorView& query, const Dataset& ds, Measure m, Representation rep) {
    check_measure(ds.kind(), m);
    if (const auto* sparse = std::get_if<SparseView>(&query)) {
        if (ds.kind() != VectorKind::Sparse) {
            throw InvalidArgument("sparse query against a dense dataset");
        }
        SparseVector q({sparse->indices.begin(), sparse->indices.end()},
                       {sparse->values.begin(), sparse->values.end()});
        return QueryEvaluator(SparseExactEvaluator(std::move(q), ds), m, ds.size());
    }

    const auto dense = std::get<DenseView>(query);
    if (ds.kind() != VectorKind::Dense) {
        throw InvalidArgument("dense query against a sparse dataset");
    }
    if (dense.size() != ds.dim()) {
        throw InvalidArgument("query dimension " + std::to_string(dense.size()) +
                              " does not match dataset dimension " + std::to_string(ds.dim()));
    }
    validate(dense);
    std::vector<float> q(dense.begin(), dense.end());

    if (!ds.is_quantized()) {
        return QueryEvaluator(DenseExactEvaluator(std::move(q), ds.dense_row(0), ds.dim(), m), m, ds.size());
    }
    if (rep == Representation::Raw) {
        if (!ds.has_raw()) {
            throw StateError("raw vectors are not available for construction-time scoring");
        }
        return QueryEvaluator(DenseExactEvaluator(std::move(q), ds.raw_row(0), ds.dim(), m), m, ds.size());
    }
    auto table = build_distance_table(dense, ds.quantizer().codebook(), m);
    return QueryEvaluator(TabledEvaluator(std::move(table), ds.code_row(0)), m, ds.size());
}

}  // namespace annkit
