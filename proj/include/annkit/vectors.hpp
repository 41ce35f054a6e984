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
#include <string_view>
#include <variant>
#include <vector>

namespace annkit {

using NodeId = std::uint32_t;

/// Similarity measure. SquaredL2 ranks ascending, InnerProduct descending.
enum class Measure : std::uint32_t {
    SquaredL2 = 0,
    InnerProduct = 1,
};

/// True when score `a` ranks strictly ahead of score `b` under `m`.
constexpr bool
better(Measure m, float a, float b) noexcept {
    return m == Measure::SquaredL2 ? a < b : a > b;
}

std::string_view
to_string(Measure m) noexcept;

/// Accepts "l2" / "ip" (also the long forms). Throws InvalidArgument.
Measure
parse_measure(std::string_view name);

using DenseView = std::span<const float>;

struct SparseView {
    std::span<const std::uint32_t> indices;
    std::span<const float> values;

    std::size_t
    nnz() const noexcept {
        return indices.size();
    }
};

using VectorView = std::variant<DenseView, SparseView>;

/// Dense float vector. Non-empty and finite.
class DenseVector {
public:
    explicit DenseVector(std::vector<float> values);

    DenseView
    view() const noexcept {
        return values_;
    }
    std::size_t
    dim() const noexcept {
        return values_.size();
    }
    const std::vector<float>&
    values() const noexcept {
        return values_;
    }

    friend bool
    operator==(const DenseVector&, const DenseVector&) = default;

private:
    std::vector<float> values_;
};

/// Sparse float vector: strictly increasing indices, finite nonzero values.
class SparseVector {
public:
    SparseVector() = default;
    SparseVector(std::vector<std::uint32_t> indices, std::vector<float> values);

    SparseView
    view() const noexcept {
        return {indices_, values_};
    }
    std::size_t
    nnz() const noexcept {
        return indices_.size();
    }
    const std::vector<std::uint32_t>&
    indices() const noexcept {
        return indices_;
    }
    const std::vector<float>&
    values() const noexcept {
        return values_;
    }

    /// Dense expansion of length `dim`; every index must be below `dim`.
    std::vector<float>
    to_dense(std::size_t dim) const;

    friend bool
    operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::vector<std::uint32_t> indices_;
    std::vector<float> values_;
};

/// Throws InvalidArgument unless `v` satisfies the SparseVector invariants.
void
validate(SparseView v);

/// Throws InvalidArgument unless `v` is non-empty and finite.
void
validate(DenseView v);

// Unchecked kernels used on the search path. Accumulation uses eight
// interleaved float lanes reduced in a fixed order, so results are
// deterministic and symmetric in their arguments.
namespace kernel {

inline float
dot(const float* a, const float* b, std::size_t n) noexcept {
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        for (std::size_t j = 0; j < 8; ++j) {
            acc[j] += a[i + j] * b[i + j];
        }
    }
    for (std::size_t j = 0; i < n; ++i, ++j) {
        acc[j] += a[i] * b[i];
    }
    return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
}

inline float
squared_l2(const float* a, const float* b, std::size_t n) noexcept {
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        for (std::size_t j = 0; j < 8; ++j) {
            const float diff = a[i + j] - b[i + j];
            acc[j] += diff * diff;
        }
    }
    for (std::size_t j = 0; i < n; ++i, ++j) {
        const float diff = a[i] - b[i];
        acc[j] += diff * diff;
    }
    return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
}

inline float
dot_sparse(SparseView a, SparseView b) noexcept {
    float sum = 0.0f;
    std::size_t i = 0;
    std::size_t j = 0;
    const std::size_t na = a.nnz();
    const std::size_t nb = b.nnz();
    while (i < na && j < nb) {
        const auto ia = a.indices[i];
        const auto ib = b.indices[j];
        if (ia == ib) {
            sum += a.values[i] * b.values[j];
            ++i;
            ++j;
        } else if (ia < ib) {
            ++i;
        } else {
            ++j;
        }
    }
    return sum;
}

}  // namespace kernel

float
dot_dense(DenseView a, DenseView b);

float
squared_l2(DenseView a, DenseView b);

/// Inner product of two sparse vectors; validates both inputs.
float
dot_sparse(SparseView a, SparseView b);

float
score(Measure m, DenseView a, DenseView b);

/// Only InnerProduct is defined for sparse vectors.
float
score(Measure m, SparseView a, SparseView b);

float
score(Measure m, const VectorView& a, const VectorView& b);

}  // namespace annkit
