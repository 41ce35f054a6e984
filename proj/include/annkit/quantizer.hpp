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

#include "annkit/vectors.hpp"

namespace annkit {

using CodeView = std::span<const std::uint8_t>;

/// Trained product-quantizer centroids, stored in [subspace][centroid][dim]
/// order.
class PqCodebook {
public:
    PqCodebook(std::uint32_t m, std::uint32_t ks, std::uint32_t dsub, std::vector<float> centroids);

    std::uint32_t
    m() const noexcept {
        return m_;
    }
    std::uint32_t
    ks() const noexcept {
        return ks_;
    }
    std::uint32_t
    dsub() const noexcept {
        return dsub_;
    }
    std::size_t
    dim() const noexcept {
        return std::size_t{m_} * dsub_;
    }

    std::span<const float>
    centroid(std::uint32_t subspace, std::uint32_t c) const noexcept {
        return {centroids_.data() + (std::size_t{subspace} * ks_ + c) * dsub_, dsub_};
    }
    const std::vector<float>&
    centroids() const noexcept {
        return centroids_;
    }

    friend bool
    operator==(const PqCodebook&, const PqCodebook&) = default;

private:
    std::uint32_t m_;
    std::uint32_t ks_;
    std::uint32_t dsub_;
    std::vector<float> centroids_;
};

struct PqCode {
    std::vector<std::uint8_t> codes;

    CodeView
    view() const noexcept {
        return codes;
    }
};

/// Per-query partial scores, one row of `ks` entries per subspace.
class DistanceTable {
public:
    DistanceTable(std::uint32_t m, std::uint32_t ks) : m_(m), ks_(ks), table_(std::size_t{m} * ks, 0.0f) {
    }

    std::uint32_t
    m() const noexcept {
        return m_;
    }
    std::uint32_t
    ks() const noexcept {
        return ks_;
    }
    float
    at(std::uint32_t subspace, std::uint32_t c) const noexcept {
        return table_[std::size_t{subspace} * ks_ + c];
    }
    float&
    at(std::uint32_t subspace, std::uint32_t c) noexcept {
        return table_[std::size_t{subspace} * ks_ + c];
    }
    const float*
    data() const noexcept {
        return table_.data();
    }

    /// Sum of the selected entries; no shape checks.
    float
    lookup(const std::uint8_t* code) const noexcept {
        float sum = 0.0f;
        const float* row = table_.data();
        for (std::uint32_t j = 0; j < m_; ++j, row += ks_) {
            sum += row[code[j]];
        }
        return sum;
    }

private:
    std::uint32_t m_;
    std::uint32_t ks_;
    std::vector<float> table_;
};

struct KMeansResult {
    std::vector<float> centroids;  // k x dim
    /// Mean squared distance of every point to its assigned centroid, one
    /// entry per assignment pass. Non-increasing.
    std::vector<double> objective;
    bool converged = false;
};

/// Lloyd's k-means over `points` (row-major, `dim` columns). Initialised
/// from `k` distinct sample points chosen with `seed`; an empty cluster is
/// moved onto the point farthest from its current centroid. Stops after
/// `iters` updates or when no assignment changes.
KMeansResult
kmeans(std::span<const float> points, std::size_t dim, std::uint32_t k, std::uint32_t iters, std::uint64_t seed);

struct PqTrainParams {
    std::uint32_t m = 16;
    std::uint32_t ks = 256;
    std::uint32_t iters = 25;
    std::uint64_t seed = 42;
};

struct PqTrainReport {
    std::vector<std::vector<double>> objective;  // per subspace
};

PqCodebook
train_pq(std::span<const DenseVector> sample, const PqTrainParams& params, PqTrainReport* report = nullptr);

/// `limit` distinct row ids out of [0, n), sorted; all rows if n <= limit.
std::vector<std::size_t>
select_training_sample(std::size_t n, std::size_t limit, std::uint64_t seed);

PqCode
encode(DenseView v, const PqCodebook& cb);

/// Writes the code of `v` into `out` (size m). Unchecked.
void
encode_into(DenseView v, const PqCodebook& cb, std::uint8_t* out) noexcept;

DenseVector
decode(CodeView code, const PqCodebook& cb);

DistanceTable
build_distance_table(DenseView q, const PqCodebook& cb, Measure m);

float
adc_score(CodeView code, const DistanceTable& table);

struct IdentityQuantizer {
    friend bool
    operator==(const IdentityQuantizer&, const IdentityQuantizer&) = default;
};

/// Identity (data kept as is) or a product quantizer.
class Quantizer {
public:
    Quantizer() = default;
    explicit Quantizer(PqCodebook cb) : impl_(std::move(cb)) {
    }

    static Quantizer
    identity() {
        return Quantizer{};
    }

    bool
    is_identity() const noexcept {
        return std::holds_alternative<IdentityQuantizer>(impl_);
    }
    const PqCodebook&
    codebook() const;

    friend bool
    operator==(const Quantizer&, const Quantizer&) = default;

private:
    std::variant<IdentityQuantizer, PqCodebook> impl_;
};

}  // namespace annkit
