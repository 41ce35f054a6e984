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

#include "annkit/dataset.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "annkit/errors.hpp"

namespace annkit {

Dataset
Dataset::dense(std::size_t dim, Quantizer quantizer, bool retain_raw) {
    if (dim == 0) {
        throw InvalidArgument("dense dataset needs dimensionality > 0");
    }
    Dataset ds;
    ds.kind_ = VectorKind::Dense;
    ds.dim_ = dim;
    ds.quantizer_ = std::move(quantizer);
    if (ds.is_quantized()) {
        const auto& cb = ds.quantizer_.codebook();
        if (cb.dim() != dim) {
            throw InvalidArgument("codebook dimension " + std::to_string(cb.dim()) +
                                  " does not match dataset dimension " + std::to_string(dim));
        }
        ds.code_size_ = cb.m();
        ds.retain_raw_ = retain_raw;
    }
    return ds;
}

Dataset
Dataset::sparse() {
    Dataset ds;
    ds.kind_ = VectorKind::Sparse;
    return ds;
}

NodeId
Dataset::next_id() const {
    if (n_ >= std::numeric_limits<NodeId>::max()) {
        throw InvalidArgument("dataset is full");
    }
    return static_cast<NodeId>(n_);
}

void
Dataset::check_id(NodeId id) const {
    if (id >= n_) {
        throw NotFound("id " + std::to_string(id) + " is out of range (size " + std::to_string(n_) + ")");
    }
}

void
Dataset::reserve(std::size_t n) {
    if (kind_ == VectorKind::Sparse) {
        offsets_.reserve(n + 1);
    } else if (is_quantized()) {
        codes_.reserve(n * code_size_);
        if (retain_raw_) {
            raw_.reserve(n * dim_);
        }
    } else {
        dense_.reserve(n * dim_);
    }
}

NodeId
Dataset::push(const DenseVector& v) {
    if (kind_ != VectorKind::Dense) {
        throw InvalidArgument("cannot push a dense vector into a sparse dataset");
    }
    if (v.dim() != dim_) {
        throw InvalidArgument("vector dimension " + std::to_string(v.dim()) + " does not match dataset dimension " +
                              std::to_string(dim_));
    }
    const NodeId id = next_id();
    if (is_quantized()) {
        codes_.resize(codes_.size() + code_size_);
        encode_into(v.view(), quantizer_.codebook(), codes_.data() + std::size_t{id} * code_size_);
        if (retain_raw_) {
            raw_.insert(raw_.end(), v.values().begin(), v.values().end());
        }
    } else {
        dense_.insert(dense_.end(), v.values().begin(), v.values().end());
    }
    ++n_;
    return id;
}

NodeId
Dataset::push(const SparseVector& v) {
    if (kind_ != VectorKind::Sparse) {
        throw InvalidArgument("cannot push a sparse vector into a dense dataset");
    }
    const NodeId id = next_id();
    indices_.insert(indices_.end(), v.indices().begin(), v.indices().end());
    values_.insert(values_.end(), v.values().begin(), v.values().end());
    offsets_.push_back(indices_.size());
    ++n_;
    return id;
}

Payload
Dataset::get(NodeId id) const {
    check_id(id);
    if (kind_ == VectorKind::Sparse) {
        return sparse_row(id);
    }
    if (is_quantized()) {
        return CodeView{code_row(id), code_size_};
    }
    return DenseView{dense_row(id), dim_};
}

bool
Dataset::has_raw() const noexcept {
    return !is_quantized() || (retain_raw_ && raw_.size() == n_ * dim_);
}

VectorView
Dataset::get_raw(NodeId id) const {
    check_id(id);
    if (kind_ == VectorKind::Sparse) {
        return sparse_row(id);
    }
    if (!has_raw()) {
        throw StateError("raw vectors are not available (cache dropped or never retained)");
    }
    return DenseView{raw_row(id), dim_};
}

DenseVector
Dataset::get_decoded(NodeId id) const {
    check_id(id);
    if (kind_ == VectorKind::Sparse) {
        throw UnsupportedCombination("sparse datasets have no dense decoding");
    }
    if (is_quantized()) {
        return decode(CodeView{code_row(id), code_size_}, quantizer_.codebook());
    }
    return DenseVector(std::vector<float>(dense_row(id), dense_row(id) + dim_));
}

void
Dataset::drop_raw_cache() noexcept {
    if (!is_quantized()) {
        return;
    }
    retain_raw_ = false;
    raw_.clear();
    raw_.shrink_to_fit();
}

Dataset
Dataset::restore_dense(std::size_t dim, Quantizer quantizer, std::size_t n, std::vector<float> data,
                       std::vector<std::uint8_t> codes) {
    Dataset ds = dense(dim, std::move(quantizer), false);
    ds.n_ = n;
    ds.dense_ = std::move(data);
    ds.codes_ = std::move(codes);
    ds.check_invariants();
    return ds;
}

Dataset
Dataset::restore_sparse(std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> indices,
                        std::vector<float> values) {
    Dataset ds = sparse();
    if (offsets.empty()) {
        throw StateError("sparse offsets must contain at least one entry");
    }
    ds.n_ = offsets.size() - 1;
    ds.offsets_ = std::move(offsets);
    ds.indices_ = std::move(indices);
    ds.values_ = std::move(values);
    ds.check_invariants();
    return ds;
}

void
Dataset::check_invariants() const {
    if (kind_ == VectorKind::Sparse) {
        if (offsets_.size() != n_ + 1 || offsets_.front() != 0) {
            throw StateError("sparse offsets must have n+1 entries starting at 0");
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (offsets_[i + 1] < offsets_[i]) {
                throw StateError("sparse offsets decrease at row " + std::to_string(i));
            }
        }
        if (offsets_.back() != indices_.size() || indices_.size() != values_.size()) {
            throw StateError("sparse payload size does not match offsets");
        }
        for (std::size_t i = 0; i < n_; ++i) {
            try {
                validate(sparse_row(static_cast<NodeId>(i)));
            } catch (const InvalidArgument& e) {
                throw StateError("sparse row " + std::to_string(i) + ": " + e.what());
            }
        }
        return;
    }
    if (is_quantized()) {
        const auto ks = quantizer_.codebook().ks();
        if (codes_.size() != n_ * code_size_ || !dense_.empty()) {
            throw StateError("PQ code storage does not match n * m");
        }
        for (auto c : codes_) {
            if (c >= ks) {
                throw StateError("PQ code entry out of range");
            }
        }
        if (!raw_.empty() && raw_.size() != n_ * dim_) {
            throw StateError("raw cache size does not match n * d");
        }
        return;
    }
    if (dense_.size() != n_ * dim_ || !codes_.empty()) {
        throw StateError("dense storage does not match n * d");
    }
    for (float x : dense_) {
        if (!std::isfinite(x)) {
            throw StateError("dense payload contains a non-finite value");
        }
    }
}

}  // namespace annkit
