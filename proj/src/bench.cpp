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

#include "annkit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>

#include "annkit/errors.hpp"

namespace annkit {

std::vector<BenchmarkRecord>
bench_sweep(const HnswIndex& index, std::span<const VectorView> queries, const GroundTruth& truth, std::size_t k,
            std::span<const std::size_t> ef_list) {
    if (k == 0) {
        throw InvalidArgument("k must be >= 1");
    }
    if (ef_list.empty()) {
        throw InvalidArgument("ef list is empty");
    }
    for (std::size_t i = 0; i < ef_list.size(); ++i) {
        if (ef_list[i] < k) {
            throw InvalidArgument("ef " + std::to_string(ef_list[i]) + " is smaller than k " + std::to_string(k));
        }
        if (i > 0 && ef_list[i] <= ef_list[i - 1]) {
            throw InvalidArgument("ef list must be strictly increasing");
        }
    }
    if (queries.empty()) {
        throw InvalidArgument("no queries");
    }
    if (truth.size() != queries.size()) {
        throw InvalidArgument("ground truth has " + std::to_string(truth.size()) + " rows for " +
                              std::to_string(queries.size()) + " queries");
    }
    for (const auto& row : truth) {
        if (row.size() < k) {
            throw InvalidArgument("ground-truth rows are shorter than k");
        }
    }
    if (index.size() < k) {
        throw InvalidArgument("index holds fewer than k items");
    }

    using Clock = std::chrono::steady_clock;
    std::vector<BenchmarkRecord> records;
    std::vector<SearchResults> results(queries.size());
    for (std::size_t ef : ef_list) {
        for (const auto& q : queries) {
            (void)index.search(q, k, ef);
        }
        const auto start = Clock::now();
        for (std::size_t i = 0; i < queries.size(); ++i) {
            results[i] = index.search(queries[i], k, ef);
        }
        const auto stop = Clock::now();
        const double seconds = std::chrono::duration<double>(stop - start).count();

        double recall_sum = 0.0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            auto ids = results[i].ids();
            // Absent entries count as misses.
            ids.resize(std::max(ids.size(), k), HnswGraph::kNoNode);
            recall_sum += recall_at_k(ids, truth[i], k);
        }
        BenchmarkRecord rec;
        rec.ef = ef;
        rec.k = k;
        rec.recall = recall_sum / static_cast<double>(queries.size());
        rec.qps = static_cast<double>(queries.size()) / std::max(seconds, 1e-12);
        rec.mean_latency_us = seconds * 1e6 / static_cast<double>(queries.size());
        records.push_back(rec);
    }
    return records;
}

void
write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRecord> records) {
    out << "ef,k,recall,qps,mean_latency_us\n";
    char line[160];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), "%zu,%zu,%.6f,%.1f,%.3f\n", r.ef, r.k, r.recall, r.qps, r.mean_latency_us);
        out << line;
    }
}

}  // namespace annkit
