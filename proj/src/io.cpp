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

#include "annkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "annkit/detail/binary.hpp"
#include "annkit/errors.hpp"
#include "annkit/query_eval.hpp"

namespace annkit {

namespace {

/// Sequential binary reader over a file that knows its byte position.
class FileReader {
public:
    explicit FileReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) {
            throw NotFound("cannot open '" + path + "'");
        }
        in_.seekg(0, std::ios::end);
        size_ = static_cast<std::uint64_t>(in_.tellg());
        in_.seekg(0, std::ios::beg);
    }

    std::uint64_t
    offset() const noexcept {
        return pos_;
    }
    std::uint64_t
    size() const noexcept {
        return size_;
    }
    bool
    at_end() const noexcept {
        return pos_ >= size_;
    }

    void
    read(void* out, std::uint64_t bytes, const char* what) {
        if (bytes > size_ - pos_) {
            throw FormatError(path_ + ": truncated " + what, pos_);
        }
        in_.read(static_cast<char*>(out), static_cast<std::streamsize>(bytes));
        if (!in_) {
            throw FormatError(path_ + ": read error in " + what, pos_);
        }
        pos_ += bytes;
    }

    template <typename T>
    T
    get(const char* what) {
        unsigned char buf[sizeof(T)];
        read(buf, sizeof(T), what);
        return detail::load_le<T>(buf);
    }

    template <typename T>
    std::vector<T>
    get_array(std::uint64_t count, const char* what) {
        if (count > (size_ - pos_) / sizeof(T)) {
            throw FormatError(path_ + ": truncated " + what, pos_);
        }
        std::vector<unsigned char> raw(count * sizeof(T));
        read(raw.data(), raw.size(), what);
        std::vector<T> out(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            out[i] = detail::load_le<T>(raw.data() + i * sizeof(T));
        }
        return out;
    }

    void
    seek(std::uint64_t pos) {
        if (pos > size_) {
            throw FormatError(path_ + ": seek past end of file", size_);
        }
        in_.seekg(static_cast<std::streamoff>(pos));
        pos_ = pos;
    }

    const std::string&
    path() const noexcept {
        return path_;
    }

private:
    std::ifstream in_;
    std::string path_;
    std::uint64_t size_ = 0;
    std::uint64_t pos_ = 0;
};

template <typename T, typename Emit>
void
read_vecs(const std::string& path, std::size_t max_rows, Emit&& emit) {
    FileReader r(path);
    std::int32_t dim = 0;
    for (std::size_t row = 0; row < max_rows && !r.at_end(); ++row) {
        const auto record_offset = r.offset();
        const auto d = r.get<std::int32_t>("record header");
        if (d <= 0) {
            throw FormatError(path + ": record " + std::to_string(row) + " has dimension " + std::to_string(d),
                              record_offset);
        }
        if (row == 0) {
            dim = d;
        } else if (d != dim) {
            throw FormatError(path + ": record " + std::to_string(row) + " has dimension " + std::to_string(d) +
                                  ", expected " + std::to_string(dim),
                              record_offset);
        }
        if (std::uint64_t(d) * sizeof(T) > r.size() - r.offset()) {
            throw FormatError(path + ": truncated record " + std::to_string(row), record_offset);
        }
        emit(r.get_array<T>(static_cast<std::uint64_t>(d), "record payload"), record_offset);
    }
}

template <typename T, typename Row>
void
write_vecs(const std::string& path, std::span<const Row> rows, auto&& payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    detail::ByteWriter w(out);
    for (const auto& row : rows) {
        const std::span<const T> values = payload(row);
        w.put<std::int32_t>(static_cast<std::int32_t>(values.size()));
        w.put_array(values);
    }
    out.close();
    if (!out) {
        throw Error("failed to write '" + path + "'");
    }
}

}  // namespace

std::vector<DenseVector>
read_fvecs(const std::string& path, std::size_t max_rows) {
    std::vector<DenseVector> out;
    read_vecs<float>(path, max_rows, [&](std::vector<float> values, std::uint64_t offset) {
        try {
            out.emplace_back(std::move(values));
        } catch (const InvalidArgument& e) {
            throw FormatError(path + ": record " + std::to_string(out.size()) + ": " + e.what(), offset);
        }
    });
    return out;
}

std::vector<std::vector<std::int32_t>>
read_ivecs(const std::string& path, std::size_t max_rows) {
    std::vector<std::vector<std::int32_t>> out;
    read_vecs<std::int32_t>(path, max_rows,
                            [&](std::vector<std::int32_t> values, std::uint64_t) { out.push_back(std::move(values)); });
    return out;
}

void
write_fvecs(const std::string& path, std::span<const DenseVector> rows) {
    write_vecs<float>(path, rows, [](const DenseVector& v) { return v.view(); });
}

void
write_ivecs(const std::string& path, std::span<const std::vector<std::int32_t>> rows) {
    write_vecs<std::int32_t>(path, rows,
                             [](const std::vector<std::int32_t>& v) { return std::span<const std::int32_t>(v); });
}

std::vector<SparseVector>
read_sparse_csr(const std::string& path, SparseReadStats* stats, std::size_t max_rows) {
    FileReader r(path);
    const auto nrows = r.get<std::uint64_t>("header");
    const auto ncols = r.get<std::uint64_t>("header");
    const auto nnz = r.get<std::uint64_t>("header");
    const std::uint64_t offsets_at = r.offset();
    if (nrows >= std::numeric_limits<NodeId>::max() || ncols > (std::uint64_t{1} << 32)) {
        throw FormatError(path + ": header out of range", 0);
    }
    const auto offsets = r.get_array<std::uint64_t>(nrows + 1, "row offsets");
    if (offsets.front() != 0) {
        throw FormatError(path + ": first row offset must be 0", offsets_at);
    }
    for (std::uint64_t i = 0; i < nrows; ++i) {
        if (offsets[i + 1] < offsets[i]) {
            throw FormatError(path + ": row offsets decrease at row " + std::to_string(i + 1),
                              offsets_at + (i + 1) * 8);
        }
    }
    if (offsets.back() != nnz) {
        throw FormatError(path + ": last row offset " + std::to_string(offsets.back()) + " does not match nnz " +
                              std::to_string(nnz),
                          offsets_at + nrows * 8);
    }

    const std::uint64_t rows = std::min<std::uint64_t>(nrows, max_rows);
    const std::uint64_t used = offsets[rows];
    const std::uint64_t indices_at = r.offset();
    const std::uint64_t values_at = indices_at + nnz * 4;
    if (nnz > (r.size() - indices_at) / 8) {
        throw FormatError(path + ": truncated index/value arrays", std::min(r.size(), values_at));
    }
    if (rows == nrows && r.size() != values_at + nnz * 4) {
        throw FormatError(path + ": trailing bytes after the value array", values_at + nnz * 4);
    }
    const auto indices = r.get_array<std::int32_t>(used, "column indices");
    r.seek(values_at);
    const auto values = r.get_array<float>(used, "values");

    SparseReadStats local;
    local.ncols = ncols;
    std::vector<SparseVector> out;
    out.reserve(rows);
    std::vector<std::pair<std::uint32_t, float>> entries;
    for (std::uint64_t row = 0; row < rows; ++row) {
        entries.clear();
        bool sorted = true;
        for (std::uint64_t p = offsets[row]; p < offsets[row + 1]; ++p) {
            const auto idx = indices[p];
            if (idx < 0 || static_cast<std::uint64_t>(idx) >= ncols) {
                throw FormatError(path + ": column index " + std::to_string(idx) + " out of range in row " +
                                      std::to_string(row),
                                  indices_at + p * 4);
            }
            if (!std::isfinite(values[p])) {
                throw FormatError(path + ": non-finite value in row " + std::to_string(row), values_at + p * 4);
            }
            if (!entries.empty() && static_cast<std::uint32_t>(idx) <= entries.back().first) {
                sorted = false;
            }
            entries.emplace_back(static_cast<std::uint32_t>(idx), values[p]);
        }
        if (!sorted) {
            ++local.unsorted_rows;
            std::stable_sort(entries.begin(), entries.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        std::vector<std::uint32_t> idx;
        std::vector<float> val;
        idx.reserve(entries.size());
        val.reserve(entries.size());
        for (const auto& [i, v] : entries) {
            if (!idx.empty() && idx.back() == i) {
                val.back() += v;
                ++local.merged_duplicates;
                continue;
            }
            idx.push_back(i);
            val.push_back(v);
        }
        std::size_t keep = 0;
        for (std::size_t t = 0; t < idx.size(); ++t) {
            if (val[t] == 0.0f) {
                ++local.dropped_zeros;
                continue;
            }
            idx[keep] = idx[t];
            val[keep] = val[t];
            ++keep;
        }
        idx.resize(keep);
        val.resize(keep);
        out.emplace_back(std::move(idx), std::move(val));
    }
    if (stats) {
        *stats = local;
    }
    return out;
}

void
write_sparse_csr(const std::string& path, std::span<const SparseVector> rows, std::uint64_t ncols) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    detail::ByteWriter w(out);
    std::vector<std::uint64_t> offsets{0};
    for (const auto& row : rows) {
        if (!row.indices().empty() && row.indices().back() >= ncols) {
            throw InvalidArgument("sparse index exceeds ncols");
        }
        offsets.push_back(offsets.back() + row.nnz());
    }
    w.put<std::uint64_t>(rows.size());
    w.put<std::uint64_t>(ncols);
    w.put<std::uint64_t>(offsets.back());
    w.put_array(std::span<const std::uint64_t>(offsets));
    for (const auto& row : rows) {
        for (auto i : row.indices()) {
            w.put<std::int32_t>(static_cast<std::int32_t>(i));
        }
    }
    for (const auto& row : rows) {
        w.put_array(std::span<const float>(row.values()));
    }
    out.close();
    if (!out) {
        throw Error("failed to write '" + path + "'");
    }
}

std::vector<VectorView>
as_views(std::span<const DenseVector> rows) {
    std::vector<VectorView> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.emplace_back(r.view());
    }
    return out;
}

std::vector<VectorView>
as_views(std::span<const SparseVector> rows) {
    std::vector<VectorView> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.emplace_back(r.view());
    }
    return out;
}

GroundTruth
compute_ground_truth(const Dataset& base, std::span<const VectorView> queries, std::size_t k, Measure m,
                     unsigned threads) {
    if (k == 0) {
        throw InvalidArgument("ground truth needs k >= 1");
    }
    if (base.is_quantized()) {
        throw InvalidArgument("ground truth needs exact scores (identity quantizer)");
    }
    check_measure(base.kind(), m);
    GroundTruth truth(queries.size());
    if (base.empty()) {
        return truth;
    }
    const std::size_t kk = std::min(k, base.size());
    // Validate every query up front so worker threads cannot throw.
    std::vector<QueryEvaluator> evaluators;
    evaluators.reserve(queries.size());
    for (const auto& q : queries) {
        evaluators.push_back(make_evaluator(q, base, m));
    }

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, queries.size())));
    const auto n = static_cast<NodeId>(base.size());
    auto work = [&](unsigned worker) {
        for (std::size_t qi = worker; qi < queries.size(); qi += threads) {
            TopK top(kk, m);
            evaluators[qi].visit([&](const auto& score) {
                for (NodeId id = 0; id < n; ++id) {
                    top.push(id, score(id));
                }
            });
            truth[qi] = top.finalize().ids();
        }
    };
    if (threads == 1) {
        work(0);
        return truth;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back(work, t);
    }
    for (auto& t : pool) {
        t.join();
    }
    return truth;
}

GroundTruth
ground_truth_from_ivecs(const std::vector<std::vector<std::int32_t>>& rows) {
    GroundTruth out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<NodeId> ids;
        ids.reserve(rows[i].size());
        for (auto v : rows[i]) {
            if (v < 0) {
                throw FormatError("negative id in ground-truth row " + std::to_string(i), 0);
            }
            ids.push_back(static_cast<NodeId>(v));
        }
        out.push_back(std::move(ids));
    }
    return out;
}

std::vector<std::vector<std::int32_t>>
ground_truth_to_ivecs(const GroundTruth& truth) {
    std::vector<std::vector<std::int32_t>> out;
    out.reserve(truth.size());
    for (const auto& row : truth) {
        out.emplace_back(row.begin(), row.end());
    }
    return out;
}

double
recall_at_k(std::span<const NodeId> retrieved, std::span<const NodeId> truth, std::size_t k) {
    if (k == 0) {
        throw InvalidArgument("recall needs k >= 1");
    }
    if (retrieved.size() < k || truth.size() < k) {
        throw InvalidArgument("recall@" + std::to_string(k) + " needs at least k retrieved and k true ids");
    }
    std::unordered_set<NodeId> expected(truth.begin(), truth.begin() + static_cast<std::ptrdiff_t>(k));
    std::size_t hits = 0;
    std::unordered_set<NodeId> counted;
    for (std::size_t i = 0; i < k; ++i) {
        if (expected.count(retrieved[i]) != 0 && counted.insert(retrieved[i]).second) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

}  // namespace annkit
