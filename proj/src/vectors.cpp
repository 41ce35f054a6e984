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

#include "annkit/vectors.hpp"

#include <cmath>
#include <string>

#include "annkit/errors.hpp"

namespace annkit {

std::string_view
to_string(Measure m) noexcept {
    return m == Measure::SquaredL2 ? "l2" : "ip";
}

Measure
parse_measure(std::string_view name) {
    if (name == "l2" || name == "L2" || name == "squared_l2") {
        return Measure::SquaredL2;
    }
    if (name == "ip" || name == "IP" || name == "inner_product") {
        return Measure::InnerProduct;
    }
    throw InvalidArgument("unknown measure '" + std::string(name) + "' (expected l2 or ip)");
}

void
validate(DenseView v) {
    if (v.empty()) {
        throw InvalidArgument("dense vector must have dimensionality > 0");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw InvalidArgument("dense vector component " + std::to_string(i) + " is not finite");
        }
    }
}

void
validate(SparseView v) {
    if (v.indices.size() != v.values.size()) {
        throw InvalidArgument("sparse vector has " + std::to_string(v.indices.size()) + " indices but " +
                              std::to_string(v.values.size()) + " values");
    }
    for (std::size_t i = 0; i < v.nnz(); ++i) {
        if (i > 0 && v.indices[i] <= v.indices[i - 1]) {
            throw InvalidArgument("sparse indices must be strictly increasing (position " + std::to_string(i) +
                                  ")");
        }
        if (!std::isfinite(v.values[i]) || v.values[i] == 0.0f) {
            throw InvalidArgument("sparse value at position " + std::to_string(i) + " must be finite and nonzero");
        }
    }
}

DenseVector::DenseVector(std::vector<float> values) : values_(std::move(values)) {
    validate(view());
}

SparseVector::SparseVector(std::vector<std::uint32_t> indices, std::vector<float> values)
    : indices_(std::move(indices)), values_(std::move(values)) {
    validate(view());
}

std::vector<float>
SparseVector::to_dense(std::size_t dim) const {
    std::vector<float> out(dim, 0.0f);
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] >= dim) {
            throw InvalidArgument("sparse index " + std::to_string(indices_[i]) + " exceeds dimension " +
                                  std::to_string(dim));
        }
        out[indices_[i]] = values_[i];
    }
    return out;
}

namespace {

void
check_same_dim(DenseView a, DenseView b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

}  // namespace

float
dot_dense(DenseView a, DenseView b) {
    check_same_dim(a, b);
    return kernel::dot(a.data(), b.data(), a.size());
}

float
squared_l2(DenseView a, DenseView b) {
    check_same_dim(a, b);
    return kernel::squared_l2(a.data(), b.data(), a.size());
}

float
dot_sparse(SparseView a, SparseView b) {
    validate(a);
    validate(b);
    return kernel::dot_sparse(a, b);
}

float
score(Measure m, DenseView a, DenseView b) {
    return m == Measure::SquaredL2 ? squared_l2(a, b) : dot_dense(a, b);
}

float
score(Measure m, SparseView a, SparseView b) {
    if (m != Measure::InnerProduct) {
        throw UnsupportedCombination("squared L2 is not supported on sparse vectors");
    }
    return dot_sparse(a, b);
}

float
score(Measure m, const VectorView& a, const VectorView& b) {
    if (a.index() != b.index()) {
        throw InvalidArgument("cannot score a dense vector against a sparse vector");
    }
    if (const auto* da = std::get_if<DenseView>(&a)) {
        return score(m, *da, std::get<DenseView>(b));
    }
    return score(m, std::get<SparseView>(a), std::get<SparseView>(b));
}

}  // namespace annkit
