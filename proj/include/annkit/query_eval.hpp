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
#include <optional>
#include <variant>
#include <vector>

#include "annkit/dataset.hpp"
#include "annkit/quantizer.hpp"
#include "annkit/vectors.hpp"

namespace annkit {

struct Neighbor {
    NodeId id;
    float score;

    friend bool
    operator==(const Neighbor&, const Neighbor&) = default;
};

/// Global result order: better score first, ascending id on equal scores.
struct RankOrder {
    Measure measure;

    bool
    operator()(const Neighbor& a, const Neighbor& b) const noexcept {
        if (a.score != b.score) {
            return better(measure, a.score, b.score);
        }
        return a.id < b.id;
    }
};

struct SearchResults {
    std::vector<Neighbor> entries;  // best first
    std::size_t k = 0;

    std::size_t
    size() const noexcept {
        return entries.size();
    }
    bool
    empty() const noexcept {
        return entries.empty();
    }
    const Neighbor&
    operator[](std::size_t i) const noexcept {
        return entries[i];
    }
    std::vector<NodeId>
    ids() const;

    friend bool
    operator==(const SearchResults&, const SearchResults&) = default;
};

/// Bounded accumulator keeping the k best entries seen so far.
class TopK {
public:
    TopK(std::size_t k, Measure m);

    void
    push(NodeId id, float score);

    bool
    full() const noexcept {
        return heap_.size() == k_;
    }
    std::size_t
    size() const noexcept {
        return heap_.size();
    }
    /// Score of the current k-th best entry once k entries were seen.
    std::optional<float>
    threshold() const noexcept;

    SearchResults
    finalize() const;

private:
    std::size_t k_;
    RankOrder order_;
    std::vector<Neighbor> heap_;  // worst entry on top
};

class DenseExactEvaluator {
public:
    DenseExactEvaluator(std::vector<float> query, const float* base, std::size_t dim, Measure m)
        : query_(std::move(query)), base_(base), dim_(dim), measure_(m) {
    }

    float
    operator()(NodeId id) const noexcept {
        const float* row = base_ + std::size_t{id} * dim_;
        return measure_ == Measure::SquaredL2 ? kernel::squared_l2(query_.data(), row, dim_)
                                              : kernel::dot(query_.data(), row, dim_);
    }

private:
    std::vector<float> query_;
    const float* base_;
    std::size_t dim_;
    Measure measure_;
};

class SparseExactEvaluator {
public:
    SparseExactEvaluator(SparseVector query, const Dataset& ds) : query_(std::move(query)), ds_(&ds) {
    }

    float
    operator()(NodeId id) const noexcept {
        return kernel::dot_sparse(query_.view(), ds_->sparse_row(id));
    }

private:
    SparseVector query_;
    const Dataset* ds_;
};

class TabledEvaluator {
public:
    TabledEvaluator(DistanceTable table, const std::uint8_t* codes)
        : table_(std::move(table)), codes_(codes), code_size_(table_.m()) {
    }

    float
    operator()(NodeId id) const noexcept {
        return table_.lookup(codes_ + std::size_t{id} * code_size_);
    }

    const DistanceTable&
    table() const noexcept {
        return table_;
    }

private:
    DistanceTable table_;
    const std::uint8_t* codes_;
    std::size_t code_size_;
};

/// Which representation of the stored items an evaluator scores against.
/// Raw is the construction-time view of a PQ dataset.
enum class Representation {
    Stored,
    Raw,
};

/// Per-query scoring state bound to one dataset. The dataset must not be
/// modified while the evaluator is alive.
class QueryEvaluator {
public:
    enum class Mode {
        Exact,
        Tabled,
    };

    using Impl = std::variant<DenseExactEvaluator, SparseExactEvaluator, TabledEvaluator>;

    QueryEvaluator(Impl impl, Measure m, std::size_t n) : impl_(std::move(impl)), measure_(m), n_(n) {
    }

    Mode
    mode() const noexcept {
        return std::holds_alternative<TabledEvaluator>(impl_) ? Mode::Tabled : Mode::Exact;
    }
    Measure
    measure() const noexcept {
        return measure_;
    }

    /// Score of item `id`; throws NotFound when out of range.
    float
    eval(NodeId id) const;

    /// Calls `f` with the concrete evaluator so hot loops are monomorphic.
    template <typename F>
    decltype(auto)
    visit(F&& f) const {
        return std::visit(std::forward<F>(f), impl_);
    }

private:
    Impl impl_;
    Measure measure_;
    std::size_t n_;
};

QueryEvaluator
make_evaluator(const VectorView& query, const Dataset& ds, Measure m,
               Representation rep = Representation::Stored);

inline QueryEvaluator
make_evaluator(const DenseVector& query, const Dataset& ds, Measure m,
               Representation rep = Representation::Stored) {
    return make_evaluator(VectorView{query.view()}, ds, m, rep);
}

inline QueryEvaluator
make_evaluator(const SparseVector& query, const Dataset& ds, Measure m,
               Representation rep = Representation::Stored) {
    return make_evaluator(VectorView{query.view()}, ds, m, rep);
}

/// Throws UnsupportedCombination when `m` is not defined for `kind`.
void
check_measure(VectorKind kind, Measure m);

}  // namespace annkit
