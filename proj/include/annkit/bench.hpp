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
#include <iosfwd>
#include <span>
#include <vector>

#include "annkit/hnsw.hpp"
#include "annkit/io.hpp"

namespace annkit {

struct BenchmarkRecord {
    std::size_t ef = 0;
    std::size_t k = 0;
    double recall = 0.0;  // mean recall@k over the query set
    double qps = 0.0;
    double mean_latency_us = 0.0;
};

/// For every ef: one untimed warm-up pass, then one timed single-threaded
/// pass over all queries. `ef_list` must be strictly increasing with every
/// entry >= k; this is checked before anything is timed.
std::vector<BenchmarkRecord>
bench_sweep(const HnswIndex& index, std::span<const VectorView> queries, const GroundTruth& truth, std::size_t k,
            std::span<const std::size_t> ef_list);

/// Header `ef,k,recall,qps,mean_latency_us`, one row per record.
void
write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRecord> records);

}  // namespace annkit
