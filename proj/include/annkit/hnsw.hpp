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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "annkit/dataset.hpp"
#include "annkit/query_eval.hpp"
#include "annkit/vectors.hpp"

namespace annkit {

struct HnswConfig {
    std::uint32_t M = 16;
    std::uint32_t M0 = 0;  // 0 selects 2 * M
    std::uint32_t ef_construction = 200;
    double mL = 0.0;       // 0 selects 1 / ln(M)
    std::uint64_t seed = 42;
    /// Prune overflowing neighbor lists with the diversity heuristic;
    /// false keeps the closest entries only.
    bool heuristic_pruning = true;

    /// Copy with defaults filled in; throws InvalidArgument on bad values.
    HnswConfig
    resolved() const;

    friend bool
    operator==(const HnswConfig&, const HnswConfig&) = default;
};

/// floor(-ln(u) * mL) for u in (0, 1].
std::uint32_t
level_from_uniform(double u, double mL);

/// Seeded level sampler: floor(-ln(U) * mL), U uniform in (0, 1].
class LevelGenerator {
public:
    LevelGenerator(double mL, std::uint64_t seed);

    std::uint32_t
    next();

private:
    double mL_;
    std::mt19937_64 rng_;
};

/// Multi-level adjacency with fixed per-level capacities.
class HnswGraph {
public:
    static constexpr NodeId kNoNode = 0xFFFFFFFFu;

    HnswGraph(std::uint32_t M, std::uint32_t M0);

    std::size_t
    size() const noexcept {
        return levels_.size();
    }
    bool
    empty() const noexcept {
        return levels_.empty();
    }
    std::uint32_t
    max_level() const noexcept {
        return max_level_;
    }
    std::optional<NodeId>
    entry_point() const noexcept {
        if (entry_ == kNoNode) {
            return std::nullopt;
        }
        return entry_;
    }
    std::uint32_t
    level(NodeId id) const noexcept {
        return levels_[id];
    }
    const std::vector<std::uint32_t>&
    levels() const noexcept {
        return levels_;
    }
    std::uint32_t
    capacity(std::uint32_t level) const noexcept {
        return level == 0 ? M0_ : M_;
    }

    std::span<const NodeId>
    neighbors(NodeId id, std::uint32_t level) const noexcept {
        const NodeId* slot = slot_ptr(id, level);
        return {slot + 1, slot[0]};
    }

    /// Replaces a neighbor list; throws InvalidArgument over capacity.
    void
    set_neighbors(NodeId id, std::uint32_t level, std::span<const NodeId> ids);

    /// Appends a node with the given top level and no edges.
    NodeId
    add_node(std::uint32_t level);

    void
    set_entry_point(NodeId id);

    /// Throws StateError describing the first violated invariant.
    void
    check_invariants() const;

private:
    const NodeId*
    slot_ptr(NodeId id, std::uint32_t level) const noexcept {
        if (level == 0) {
            return level0_.data() + std::size_t{id} * (M0_ + 1);
        }
        return upper_[id].data() + std::size_t{level - 1} * (M_ + 1);
    }
    NodeId*
    slot_ptr(NodeId id, std::uint32_t level) noexcept {
        return const_cast<NodeId*>(std::as_const(*this).slot_ptr(id, level));
    }

    std::uint32_t M_;
    std::uint32_t M0_;
    std::uint32_t max_level_ = 0;
    NodeId entry_ = kNoNode;
    std::vector<std::uint32_t> levels_;
    // Each slot is [count, id_0 .. id_{cap-1}].
    std::vector<NodeId> level0_;
    std::vector<std::vector<NodeId>> upper_;
};

/// Epoch-stamped visited marks; reset is O(1) amortized.
class VisitedTable {
public:
    explicit VisitedTable(std::size_t n = 0) : marks_(n, 0) {
    }

    void
    reset(std::size_t n) {
        if (marks_.size() < n) {
            marks_.resize(n, 0);
        }
        if (++epoch_ == 0) {
            std::fill(marks_.begin(), marks_.end(), 0);
            epoch_ = 1;
        }
    }

    /// Marks `id`; returns false if it was already marked this epoch.
    bool
    insert(NodeId id) noexcept {
        if (marks_[id] == epoch_) {
            return false;
        }
        marks_[id] = epoch_;
        return true;
    }

private:
    std::vector<std::uint32_t> marks_;
    std::uint32_t epoch_ = 0;
};

struct SearchStats {
    std::size_t evaluations = 0;
};

/// Greedy walk on one level: moves to the best neighbor until none improves.
template <typename Scorer>
Neighbor
greedy_closest(const HnswGraph& g, const Scorer& score, Neighbor start, std::uint32_t level, Measure m,
               SearchStats* stats = nullptr) {
    const RankOrder order{m};
    Neighbor cur = start;
    bool moved = true;
    while (moved) {
        moved = false;
        for (NodeId nb : g.neighbors(cur.id, level)) {
            const Neighbor cand{nb, score(nb)};
            if (stats) {
                ++stats->evaluations;
            }
            if (order(cand, cur)) {
                cur = cand;
                moved = true;
            }
        }
    }
    return cur;
}

/// Best-first beam search on one level. `entries` are already scored.
/// Returns at most `ef` entries, best first.
template <typename Scorer>
std::vector<Neighbor>
search_layer(const HnswGraph& g, const Scorer& score, std::span<const Neighbor> entries, std::size_t ef,
             std::uint32_t level, Measure m, VisitedTable& visited, SearchStats* stats = nullptr) {
    const RankOrder order{m};
    const auto best_on_top = [&order](const Neighbor& a, const Neighbor& b) { return order(b, a); };

    visited.reset(g.size());
    std::vector<Neighbor> results;     // heap, worst on top
    std::vector<Neighbor> candidates;  // heap, best on top
    results.reserve(ef + 1);

    for (const auto& e : entries) {
        if (!visited.insert(e.id)) {
            continue;
        }
        candidates.push_back(e);
        std::push_heap(candidates.begin(), candidates.end(), best_on_top);
        results.push_back(e);
        std::push_heap(results.begin(), results.end(), order);
        if (results.size() > ef) {
            std::pop_heap(results.begin(), results.end(), order);
            results.pop_back();
        }
    }

    while (!candidates.empty()) {
        const Neighbor current = candidates.front();
        if (order(results.front(), current)) {
            break;
        }
        std::pop_heap(candidates.begin(), candidates.end(), best_on_top);
        candidates.pop_back();

        for (NodeId nb : g.neighbors(current.id, level)) {
            if (!visited.insert(nb)) {
                continue;
            }
            const Neighbor cand{nb, score(nb)};
            if (stats) {
                ++stats->evaluations;
            }
            if (results.size() < ef || order(cand, results.front())) {
                candidates.push_back(cand);
                std::push_heap(candidates.begin(), candidates.end(), best_on_top);
                results.push_back(cand);
                std::push_heap(results.begin(), results.end(), order);
                if (results.size() > ef) {
                    std::pop_heap(results.begin(), results.end(), order);
                    results.pop_back();
                }
            }
        }
    }

    std::sort(results.begin(), results.end(), order);
    return results;
}

/// Diversity heuristic: walking candidates best first, keep `c` unless some
/// already kept `r` scores better against `c` than the base point does.
/// Rejected candidates backfill the remaining capacity in rank order.
/// `pair_score(a, b)` scores two stored items.
template <typename PairScore>
std::vector<NodeId>
select_neighbors_heuristic(std::span<const Neighbor> candidates, std::size_t max_count, Measure m,
                           const PairScore& pair_score) {
    std::vector<Neighbor> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end(), RankOrder{m});

    std::vector<NodeId> kept;
    std::vector<NodeId> rejected;
    kept.reserve(max_count);
    for (const auto& c : sorted) {
        if (kept.size() >= max_count) {
            break;
        }
        bool occluded = false;
        for (NodeId r : kept) {
            if (better(m, pair_score(c.id, r), c.score)) {
                occluded = true;
                break;
            }
        }
        if (occluded) {
            rejected.push_back(c.id);
        } else {
            kept.push_back(c.id);
        }
    }
    for (std::size_t i = 0; i < rejected.size() && kept.size() < max_count; ++i) {
        kept.push_back(rejected[i]);
    }
    return kept;
}

/// Closest `max_count` candidates in rank order.
std::vector<NodeId>
select_neighbors_simple(std::span<const Neighbor> candidates, std::size_t max_count, Measure m);

/// HNSW index over a Dataset. Works unchanged for dense or sparse vectors,
/// Identity or PQ storage, and either measure. Construction always scores
/// raw vectors; queries score the stored (possibly quantized) form.
class HnswIndex {
public:
    HnswIndex(Dataset ds, Measure m, HnswConfig cfg = {});
    ~HnswIndex();
    HnswIndex(HnswIndex&&) noexcept;
    HnswIndex&
    operator=(HnswIndex&&) noexcept;

    NodeId
    add(const DenseVector& v);
    NodeId
    add(const SparseVector& v);

    /// Links the item `id`, which must be the next dataset item not yet in
    /// the graph.
    void
    insert(NodeId id);

    /// Inserts every dataset item not yet in the graph.
    void
    insert_pending();

    /// Ends construction: releases the raw cache of quantized datasets.
    void
    finish_build();

    SearchResults
    search(const VectorView& query, std::size_t k, std::size_t ef, SearchStats* stats = nullptr) const;

    SearchResults
    search(const DenseVector& query, std::size_t k, std::size_t ef, SearchStats* stats = nullptr) const {
        return search(VectorView{query.view()}, k, ef, stats);
    }
    SearchResults
    search(const SparseVector& query, std::size_t k, std::size_t ef, SearchStats* stats = nullptr) const {
        return search(VectorView{query.view()}, k, ef, stats);
    }

    const HnswGraph&
    graph() const noexcept {
        return graph_;
    }
    const Dataset&
    dataset() const noexcept {
        return ds_;
    }
    const HnswConfig&
    config() const noexcept {
        return cfg_;
    }
    Measure
    measure() const noexcept {
        return measure_;
    }
    std::size_t
    size() const noexcept {
        return graph_.size();
    }

    void
    save(std::ostream& out) const;
    void
    save(const std::string& path) const;
    static HnswIndex
    load(std::istream& in);
    static HnswIndex
    load(const std::string& path);

    /// Graph and dataset invariants; throws StateError.
    void
    check_invariants() const;

private:
    struct VisitedPool;

    HnswIndex(Dataset ds, Measure m, HnswConfig cfg, HnswGraph graph);

    template <typename Scorer, typename PairScore>
    void
    link(NodeId id, std::uint32_t level, const Scorer& score, const PairScore& pair_score);

    Dataset ds_;
    Measure measure_;
    HnswConfig cfg_;
    HnswGraph graph_;
    LevelGenerator levels_;
    VisitedTable build_visited_;
    std::unique_ptr<VisitedPool> pool_;
};

}  // namespace annkit
