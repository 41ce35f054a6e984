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

#include "annkit/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "annkit/detail/random.hpp"
#include "annkit/errors.hpp"

namespace annkit {

PqCodebook::PqCodebook(std::uint32_t m, std::uint32_t ks, std::uint32_t dsub, std::vector<float> centroids)
    : m_(m), ks_(ks), dsub_(dsub), centroids_(std::move(centroids)) {
    if (m_ == 0 || dsub_ == 0) {
        throw InvalidArgument("codebook needs m > 0 and dsub > 0");
    }
    if (ks_ == 0 || ks_ > 256) {
        throw InvalidArgument("codebook ks must be in [1, 256], got " + std::to_string(ks_));
    }
    if (centroids_.size() != std::size_t{m_} * ks_ * dsub_) {
        throw InvalidArgument("codebook has " + std::to_string(centroids_.size()) + " floats, expected m*ks*dsub = " +
                              std::to_string(std::size_t{m_} * ks_ * dsub_));
    }
    for (float x : centroids_) {
        if (!std::isfinite(x)) {
            throw InvalidArgument("codebook centroid is not finite");
        }
    }
}

const PqCodebook&
Quantizer::codebook() const {
    if (const auto* cb = std::get_if<PqCodebook>(&impl_)) {
        return *cb;
    }
    throw StateError("identity quantizer has no codebook");
}

namespace {

// Nearest centroid, lowest index on ties.
std::pair<std::uint32_t, float>
nearest_centroid(const float* x, const float* centroids, std::uint32_t k, std::size_t dim) noexcept {
    std::uint32_t best = 0;
    float best_dist = kernel::squared_l2(x, centroids, dim);
    for (std::uint32_t c = 1; c < k; ++c) {
        const float dist = kernel::squared_l2(x, centroids + std::size_t{c} * dim, dim);
        if (dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    return {best, best_dist};
}

}  // namespace

std::vector<std::size_t>
select_training_sample(std::size_t n, std::size_t limit, std::uint64_t seed) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    if (n <= limit) {
        return ids;
    }
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < limit; ++i) {
        const auto j = i + detail::uniform_below(rng, n - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(limit);
    std::sort(ids.begin(), ids.end());
    return ids;
}

KMeansResult
kmeans(std::span<const float> points, std::size_t dim, std::uint32_t k, std::uint32_t iters, std::uint64_t seed) {
    if (dim == 0 || points.empty() || points.size() % dim != 0) {
        throw InvalidArgument("k-means needs a non-empty row-major sample");
    }
    if (k == 0) {
        throw InvalidArgument("k-means needs k > 0");
    }
    const std::size_t n = points.size() / dim;

    KMeansResult result;
    result.centroids.resize(std::size_t{k} * dim);

    // Initial centroids: k distinct points drawn uniformly. With fewer
    // points than centroids the draw wraps around and repeats points.
    {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        const std::size_t take = std::min<std::size_t>(k, n);
        for (std::size_t i = 0; i < take; ++i) {
            const auto j = i + detail::uniform_below(rng, n - i);
            std::swap(perm[i], perm[j]);
        }
        for (std::uint32_t c = 0; c < k; ++c) {
            const std::size_t src = perm[c % take];
            std::copy_n(points.data() + src * dim, dim, result.centroids.data() + std::size_t{c} * dim);
        }
    }

    std::vector<std::uint32_t> assign(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<float> dist(n);
    std::vector<double> sums(std::size_t{k} * dim);
    std::vector<std::size_t> counts(k);

    auto assignment_pass = [&]() {
        bool changed = false;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto [c, d] = nearest_centroid(points.data() + i * dim, result.centroids.data(), k, dim);
            if (c != assign[i]) {
                changed = true;
                assign[i] = c;
            }
            dist[i] = d;
            total += d;
        }
        result.objective.push_back(total / static_cast<double>(n));
        return changed;
    };

    for (std::uint32_t it = 0; it < iters; ++it) {
        if (!assignment_pass()) {
            result.converged = true;
            return result;
        }

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const float* x = points.data() + i * dim;
            double* s = sums.data() + std::size_t{assign[i]} * dim;
            for (std::size_t t = 0; t < dim; ++t) {
                s[t] += x[t];
            }
            ++counts[assign[i]];
        }
        for (std::uint32_t c = 0; c < k; ++c) {
            float* centroid = result.centroids.data() + std::size_t{c} * dim;
            if (counts[c] > 0) {
                const double* s = sums.data() + std::size_t{c} * dim;
                for (std::size_t t = 0; t < dim; ++t) {
                    centroid[t] = static_cast<float>(s[t] / static_cast<double>(counts[c]));
                }
                continue;
            }
            // Empty cluster: take over the worst-served point.
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (dist[i] > dist[far]) {
                    far = i;
                }
            }
            std::copy_n(points.data() + far * dim, dim, centroid);
            dist[far] = -1.0f;
        }
    }
    // Final pass so the objective reflects the returned centroids.
    result.converged = !assignment_pass();
    return result;
}

PqCodebook
train_pq(std::span<const DenseVector> sample, const PqTrainParams& params, PqTrainReport* report) {
    if (sample.empty()) {
        throw InvalidArgument("PQ training sample is empty");
    }
    const std::size_t d = sample.front().dim();
    if (params.m == 0 || d % params.m != 0) {
        throw InvalidArgument("dimension " + std::to_string(d) + " is not divisible by m = " +
                              std::to_string(params.m));
    }
    if (params.ks == 0 || params.ks > 256) {
        throw InvalidArgument("ks must be in [1, 256]");
    }
    for (const auto& v : sample) {
        if (v.dim() != d) {
            throw InvalidArgument("PQ training sample has mixed dimensionality");
        }
    }
    const std::size_t n = sample.size();
    const std::size_t dsub = d / params.m;

    std::vector<float> centroids(std::size_t{params.m} * params.ks * dsub);
    std::vector<float> sub(n * dsub);
    if (report) {
        report->objective.assign(params.m, {});
    }
    for (std::uint32_t j = 0; j < params.m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(sample[i].values().data() + j * dsub, dsub, sub.data() + i * dsub);
        }
        auto km = kmeans(sub, dsub, params.ks, params.iters, detail::splitmix64(params.seed + j));
        std::copy(km.centroids.begin(), km.centroids.end(), centroids.begin() + std::size_t{j} * params.ks * dsub);
        if (report) {
            report->objective[j] = std::move(km.objective);
        }
    }
    return PqCodebook(params.m, params.ks, static_cast<std::uint32_t>(dsub), std::move(centroids));
}

void
encode_into(DenseView v, const PqCodebook& cb, std::uint8_t* out) noexcept {
    const std::size_t dsub = cb.dsub();
    for (std::uint32_t j = 0; j < cb.m(); ++j) {
        auto [c, d] = nearest_centroid(v.data() + j * dsub, cb.centroid(j, 0).data(), cb.ks(), dsub);
        (void)d;
        out[j] = static_cast<std::uint8_t>(c);
    }
}

PqCode
encode(DenseView v, const PqCodebook& cb) {
    if (v.size() != cb.dim()) {
        throw InvalidArgument("cannot encode a vector of dimension " + std::to_string(v.size()) +
                              " with a codebook of dimension " + std::to_string(cb.dim()));
    }
    PqCode code;
    code.codes.resize(cb.m());
    encode_into(v, cb, code.codes.data());
    return code;
}

DenseVector
decode(CodeView code, const PqCodebook& cb) {
    if (code.size() != cb.m()) {
        throw InvalidArgument("code length " + std::to_string(code.size()) + " does not match m = " +
                              std::to_string(cb.m()));
    }
    std::vector<float> out;
    out.reserve(cb.dim());
    for (std::uint32_t j = 0; j < cb.m(); ++j) {
        if (code[j] >= cb.ks()) {
            throw InvalidArgument("code entry " + std::to_string(code[j]) + " is out of range for ks = " +
                                  std::to_string(cb.ks()));
        }
        const auto c = cb.centroid(j, code[j]);
        out.insert(out.end(), c.begin(), c.end());
    }
    return DenseVector(std::move(out));
}

DistanceTable
build_distance_table(DenseView q, const PqCodebook& cb, Measure m) {
    if (q.size() != cb.dim()) {
        throw InvalidArgument("query dimension " + std::to_string(q.size()) + " does not match codebook dimension " +
                              std::to_string(cb.dim()));
    }
    DistanceTable table(cb.m(), cb.ks());
    const std::size_t dsub = cb.dsub();
    for (std::uint32_t j = 0; j < cb.m(); ++j) {
        const float* sub = q.data() + j * dsub;
        for (std::uint32_t c = 0; c < cb.ks(); ++c) {
            const float* centroid = cb.centroid(j, c).data();
            table.at(j, c) = m == Measure::SquaredL2 ? kernel::squared_l2(sub, centroid, dsub)
                                                     : kernel::dot(sub, centroid, dsub);
        }
    }
    return table;
}

float
adc_score(CodeView code, const DistanceTable& table) {
    if (code.size() != table.m()) {
        throw InvalidArgument("code length does not match the distance table");
    }
    for (auto c : code) {
        if (c >= table.ks()) {
            throw InvalidArgument("code entry out of range for the distance table");
        }
    }
    return table.lookup(code.data());
}

}  // namespace annkit
