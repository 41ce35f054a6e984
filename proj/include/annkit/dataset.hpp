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

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "annkit/quantizer.hpp"
#include "annkit/vectors.hpp"

namespace annkit {

enum class VectorKind : std::uint32_t {
    Dense = 0,
    Sparse = 1,
};

/// Stored representation of one item: raw floats, sparse pairs or a PQ code.
using Payload = std::variant<DenseView, SparseView, CodeView>;

/// Append-only collection of vectors of one kind, bound to one quantizer.
///
/// Ids are assigned densely in insertion order. A PQ-quantized dataset can
/// additionally keep the original vectors ("raw cache") while the graph is
/// being built; drop_raw_cache() releases them once construction is over.
/// Views handed out by get()/get_raw() are invalidated by the next push().
class Dataset {
public:
    static Dataset
    dense(std::size_t dim, Quantizer quantizer = Quantizer::identity(), bool retain_raw = true);

    static Dataset
    sparse();

    VectorKind
    kind() const noexcept {
        return kind_;
    }
    /// Dimensionality for dense datasets; 0 for sparse ones.
    std::size_t
    dim() const noexcept {
        return dim_;
    }
    std::size_t
    size() const noexcept {
        return n_;
    }
    bool
    empty() const noexcept {
        return n_ == 0;
    }
    const Quantizer&
    quantizer() const noexcept {
        return quantizer_;
    }
    bool
    is_quantized() const noexcept {
        return !quantizer_.is_identity();
    }

    NodeId
    push(const DenseVector& v);
    NodeId
    push(const SparseVector& v);

    void
    reserve(std::size_t n);

    Payload
    get(NodeId id) const;

    /// Original representation. For PQ datasets this needs the raw cache.
    VectorView
    get_raw(NodeId id) const;

    /// PQ datasets: decode(code). Identity datasets: the stored vector.
    DenseVector
    get_decoded(NodeId id) const;

    bool
    has_raw() const noexcept;

    void
    drop_raw_cache() noexcept;

    // Unchecked row access for evaluators.
    const float*
    dense_row(NodeId id) const noexcept {
        return dense_.data() + std::size_t{id} * dim_;
    }
    const float*
    raw_row(NodeId id) const noexcept {
        return (is_quantized() ? raw_.data() : dense_.data()) + std::size_t{id} * dim_;
    }
    const std::uint8_t*
    code_row(NodeId id) const noexcept {
        return codes_.data() + std::size_t{id} * code_size_;
    }
    SparseView
    sparse_row(NodeId id) const noexcept {
        const auto begin = offsets_[id];
        const auto len = offsets_[std::size_t{id} + 1] - begin;
        return {{indices_.data() + begin, len}, {values_.data() + begin, len}};
    }

    // Bulk storage, used by serialization.
    std::span<const float>
    dense_data() const noexcept {
        return dense_;
    }
    std::span<const std::uint8_t>
    code_data() const noexcept {
        return codes_;
    }
    std::span<const std::uint64_t>
    sparse_offsets() const noexcept {
        return offsets_;
    }
    std::span<const std::uint32_t>
    sparse_indices() const noexcept {
        return indices_;
    }
    std::span<const float>
    sparse_values() const noexcept {
        return values_;
    }

    /// Rebuild from serialized storage; validates every invariant.
    static Dataset
    restore_dense(std::size_t dim, Quantizer quantizer, std::size_t n, std::vector<float> data,
                  std::vector<std::uint8_t> codes);
    static Dataset
    restore_sparse(std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> indices,
                   std::vector<float> values);

    /// Throws StateError describing the first violated invariant.
    void
    check_invariants() const;

private:
    Dataset() = default;

    NodeId
    next_id() const;
    void
    check_id(NodeId id) const;

    VectorKind kind_ = VectorKind::Dense;
    std::size_t dim_ = 0;
    std::size_t n_ = 0;
    Quantizer quantizer_;
    std::size_t code_size_ = 0;
    bool retain_raw_ = false;

    std::vector<float> dense_;          // Identity dense payloads
    std::vector<std::uint8_t> codes_;   // PQ payloads
    std::vector<float> raw_;            // PQ construction cache
    std::vector<std::uint64_t> offsets_{0};
    std::vector<std::uint32_t> indices_;
    std::vector<float> values_;
};

}  // namespace annkit
