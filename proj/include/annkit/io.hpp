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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "annkit/dataset.hpp"
#include "annkit/vectors.hpp"

namespace annkit {

constexpr std::size_t kAllRows = std::numeric_limits<std::size_t>::max();

/// fvecs: per record, an int32 dimension d followed by d float32 values.
/// All records must share d. Reads at most `max_rows` records.
std::vector<DenseVector>
read_fvecs(const std::string& path, std::size_t max_rows = kAllRows);

/// ivecs: like fvecs with int32 payloads.
std::vector<std::vector<std::int32_t>>
read_ivecs(const std::string& path, std::size_t max_rows = kAllRows);

void
write_fvecs(const std::string& path, std::span<const DenseVector> rows);

void
write_ivecs(const std::string& path, std::span<const std::vector<std::int32_t>> rows);

/// Row repairs applied while reading a CSR file.
struct SparseReadStats {
    std::uint64_t ncols = 0;
    std::size_t unsorted_rows = 0;     // rows that had to be sorted
    std::size_t merged_duplicates = 0; // repeated indices summed together
    std::size_t dropped_zeros = 0;     // explicit zero values removed
};

/// Sparse CSR: u64 nrows, u64 ncols, u64 nnz, u64 offsets[nrows + 1],
/// i32 indices[nnz], f32 values[nnz].
std::vector<SparseVector>
read_sparse_csr(const std::string& path, SparseReadStats* stats = nullptr, std::size_t max_rows = kAllRows);

void
write_sparse_csr(const std::string& path, std::span<const SparseVector> rows, std::uint64_t ncols);

std::vector<VectorView>
as_views(std::span<const DenseVector> rows);
std::vector<VectorView>
as_views(std::span<const SparseVector> rows);

using GroundTruth = std::vector<std::vector<NodeId>>;

/// Exhaustive top-k per query under the global tie-break (better score,
/// then lower id). Requires an unquantized dataset. `threads` = 0 uses the
/// hardware concurrency.
GroundTruth
compute_ground_truth(const Dataset& base, std::span<const VectorView> queries, std::size_t k, Measure m,
                     unsigned threads = 0);

/// Converts ivecs rows to ids; negative entries are a FormatError.
GroundTruth
ground_truth_from_ivecs(const std::vector<std::vector<std::int32_t>>& rows);

std::vector<std::vector<std::int32_t>>
ground_truth_to_ivecs(const GroundTruth& truth);

/// |first k of retrieved  ∩  first k of truth| / k.
double
recall_at_k(std::span<const NodeId> retrieved, std::span<const NodeId> truth, std::size_t k);

}  // namespace annkit
