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

#include "annkit/hnsw.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include "annkit/detail/random.hpp"
#include "annkit/errors.hpp"

namespace annkit {

HnswConfig
HnswConfig::resolved() const {
    HnswConfig out = *this;
    if (out.M < 2) {
        throw InvalidArgument("HNSW M must be >= 2");
    }
    if (out.M0 == 0) {
        out.M0 = 2 * out.M;
    }
    if (out.M0 < out.M) {
        throw InvalidArgument("HNSW M0 must be >= M");
    }
    if (out.ef_construction < out.M) {
        throw InvalidArgument("HNSW ef_construction must be >= M");
    }
    if (out.mL == 0.0) {
        out.mL = 1.0 / std::log(static_cast<double>(out.M));
    }
    if (!(out.mL > 0.0) || !std::isfinite(out.mL)) {
        throw InvalidArgument("HNSW mL must be a positive finite number");
    }
    return out;
}

std::uint32_t
level_from_uniform(double u, double mL) {
    if (!(u > 0.0 && u <= 1.0)) {
        throw InvalidArgument("level draw must be in (0, 1]");
    }
    // -ln(1) is -0.0; the floor of a tiny negative rounds to level 0 anyway.
    const double level = std::floor(-std::log(u) * mL);
    return level <= 0.0 ? 0u : static_cast<std::uint32_t>(level);
}

LevelGenerator::LevelGenerator(double mL, std::uint64_t seed) : mL_(mL), rng_(seed) {
}

std::uint32_t
LevelGenerator::next() {
    return level_from_uniform(1.0 - detail::uniform_unit(rng_), mL_);
}

HnswGraph::HnswGraph(std::uint32_t M, std::uint32_t M0) : M_(M), M0_(M0) {
}

NodeId
HnswGraph::add_node(std::uint32_t level) {
    if (levels_.size() >= kNoNode) {
        throw InvalidArgument("graph is full");
    }
    const auto id = static_cast<NodeId>(levels_.size());
    levels_.push_back(level);
    level0_.resize(level0_.size() + M0_ + 1, 0);
    upper_.emplace_back(std::size_t{level} * (M_ + 1), 0);
    return id;
}

void
HnswGraph::set_neighbors(NodeId id, std::uint32_t level, std::span<const NodeId> ids) {
    if (id >= size() || level > levels_[id]) {
        throw InvalidArgument("node " + std::to_string(id) + " has no level " + std::to_string(level));
    }
    if (ids.size() > capacity(level)) {
        throw InvalidArgument("neighbor list exceeds capacity " + std::to_string(capacity(level)));
    }
    NodeId* slot = slot_ptr(id, level);
    slot[0] = static_cast<NodeId>(ids.size());
    std::copy(ids.begin(), ids.end(), slot + 1);
}

void
HnswGraph::set_entry_point(NodeId id) {
    if (id >= size()) {
        throw InvalidArgument("entry point out of range");
    }
    entry_ = id;
    max_level_ = levels_[id];
}

void
HnswGraph::check_invariants() const {
    const auto n = size();
    if (n == 0) {
        if (entry_ != kNoNode || max_level_ != 0) {
            throw StateError("empty graph must have no entry point");
        }
        return;
    }
    if (entry_ >= n) {
        throw StateError("entry point out of range");
    }
    if (levels_[entry_] != max_level_) {
        throw StateError("entry point level differs from max level");
    }
    std::vector<std::uint32_t> seen(n, 0);
    std::uint32_t stamp = 0;
    for (NodeId id = 0; id < n; ++id) {
        if (levels_[id] > max_level_) {
            throw StateError("node " + std::to_string(id) + " is above the max level");
        }
        for (std::uint32_t l = 0; l <= levels_[id]; ++l) {
            const auto list = neighbors(id, l);
            if (list.size() > capacity(l)) {
                throw StateError("node " + std::to_string(id) + " exceeds capacity at level " + std::to_string(l));
            }
            ++stamp;
            for (NodeId nb : list) {
                if (nb >= n) {
                    throw StateError("node " + std::to_string(id) + " links to unknown id " + std::to_string(nb));
                }
                if (nb == id) {
                    throw StateError("node " + std::to_string(id) + " has a self-loop");
                }
                if (levels_[nb] < l) {
                    throw StateError("node " + std::to_string(id) + " links to " + std::to_string(nb) +
                                     " below its level");
                }
                if (seen[nb] == stamp) {
                    throw StateError("node " + std::to_string(id) + " has a duplicate neighbor");
                }
                seen[nb] = stamp;
            }
        }
    }
}

std::vector<NodeId>
select_neighbors_simple(std::span<const Neighbor> candidates, std::size_t max_count, Measure m) {
    std::vector<Neighbor> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end(), RankOrder{m});
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < sorted.size() && i < max_count; ++i) {
        out.push_back(sorted[i].id);
    }
    return out;
}

struct HnswIndex::VisitedPool {
    std::mutex mu;
    std::vector<std::unique_ptr<VisitedTable>> free;

    std::unique_ptr<VisitedTable>
    acquire() {
        std::lock_guard lock(mu);
        if (free.empty()) {
            return std::make_unique<VisitedTable>();
        }
        auto table = std::move(free.back());
        free.pop_back();
        return table;
    }

    void
    release(std::unique_ptr<VisitedTable> table) {
        std::lock_guard lock(mu);
        free.push_back(std::move(table));
    }
};

HnswIndex::HnswIndex(Dataset ds, Measure m, HnswConfig cfg)
    : HnswIndex(std::move(ds), m, cfg.resolved(), HnswGraph(cfg.resolved().M, cfg.resolved().M0)) {
}

HnswIndex::HnswIndex(Dataset ds, Measure m, HnswConfig cfg, HnswGraph graph)
    : ds_(std::move(ds)),
      measure_(m),
      cfg_(cfg),
      graph_(std::move(graph)),
      // A restored graph continues from a generator keyed on its size.
      levels_(cfg.mL, graph_.empty() ? cfg.seed : detail::splitmix64(cfg.seed ^ graph_.size())),
      pool_(std::make_unique<VisitedPool>()) {
    check_measure(ds_.kind(), measure_);
}

HnswIndex::~HnswIndex() = default;
HnswIndex::HnswIndex(HnswIndex&&) noexcept = default;
HnswIndex&
HnswIndex::operator=(HnswIndex&&) noexcept = default;

NodeId
HnswIndex::add(const DenseVector& v) {
    if (graph_.size() != ds_.size()) {
        throw StateError("dataset has items that are not linked yet");
    }
    const NodeId id = ds_.push(v);
    insert(id);
    return id;
}

NodeId
HnswIndex::add(const SparseVector& v) {
    if (graph_.size() != ds_.size()) {
        throw StateError("dataset has items that are not linked yet");
    }
    const NodeId id = ds_.push(v);
    insert(id);
    return id;
}

void
HnswIndex::insert_pending() {
    while (graph_.size() < ds_.size()) {
        insert(static_cast<NodeId>(graph_.size()));
    }
}

void
HnswIndex::finish_build() {
    ds_.drop_raw_cache();
}

template <typename Scorer, typename PairScore>
void
HnswIndex::link(NodeId id, std::uint32_t level, const Scorer& score, const PairScore& pair_score) {
    const Measure m = measure_;
    const auto entry = *graph_.entry_point();
    const auto top = graph_.max_level();

    Neighbor cur{entry, score(entry)};
    for (std::uint32_t l = top; l > level; --l) {
        cur = greedy_closest(graph_, score, cur, l, m);
    }

    std::vector<Neighbor> entries{cur};
    for (std::uint32_t l = std::min(level, top) + 1; l-- > 0;) {
        auto found = search_layer(graph_, score, entries, cfg_.ef_construction, l, m, build_visited_);
        const auto cap = graph_.capacity(l);
        const auto selected = cfg_.heuristic_pruning ? select_neighbors_heuristic(found, cap, m, pair_score)
                                                     : select_neighbors_simple(found, cap, m);
        graph_.set_neighbors(id, l, selected);

        for (NodeId nb : selected) {
            const auto existing = graph_.neighbors(nb, l);
            if (existing.size() < cap) {
                std::vector<NodeId> grown(existing.begin(), existing.end());
                grown.push_back(id);
                graph_.set_neighbors(nb, l, grown);
                continue;
            }
            std::vector<Neighbor> pool;
            pool.reserve(existing.size() + 1);
            for (NodeId x : existing) {
                pool.push_back({x, pair_score(nb, x)});
            }
            pool.push_back({id, pair_score(nb, id)});
            const auto pruned = cfg_.heuristic_pruning ? select_neighbors_heuristic(pool, cap, m, pair_score)
                                                       : select_neighbors_simple(pool, cap, m);
            graph_.set_neighbors(nb, l, pruned);
        }
        entries = std::move(found);
    }
}

void
HnswIndex::insert(NodeId id) {
    if (id >= ds_.size()) {
        throw InvalidArgument("id " + std::to_string(id) + " is not in the dataset");
    }
    if (id != graph_.size()) {
        throw InvalidArgument("id " + std::to_string(id) + " is not the next item to link (expected " +
                              std::to_string(graph_.size()) + ")");
    }
    if (!ds_.has_raw()) {
        throw StateError("construction needs raw vectors, but the raw cache was dropped");
    }

    const std::uint32_t level = levels_.next();
    const bool first = graph_.empty();
    graph_.add_node(level);
    if (first) {
        graph_.set_entry_point(id);
        return;
    }

    const Measure m = measure_;
    auto evaluator = make_evaluator(ds_.get_raw(id), ds_, m, Representation::Raw);
    if (ds_.kind() == VectorKind::Dense) {
        const std::size_t dim = ds_.dim();
        const Dataset& ds = ds_;
        const auto pair = [&ds, dim, m](NodeId a, NodeId b) {
            const float* x = ds.raw_row(a);
            const float* y = ds.raw_row(b);
            return m == Measure::SquaredL2 ? kernel::squared_l2(x, y, dim) : kernel::dot(x, y, dim);
        };
        evaluator.visit([&](const auto& score) { link(id, level, score, pair); });
    } else {
        const Dataset& ds = ds_;
        const auto pair = [&ds](NodeId a, NodeId b) { return kernel::dot_sparse(ds.sparse_row(a), ds.sparse_row(b)); };
        evaluator.visit([&](const auto& score) { link(id, level, score, pair); });
    }

    if (level > graph_.max_level()) {
        graph_.set_entry_point(id);
    }
}

SearchResults
HnswIndex::search(const VectorView& query, std::size_t k, std::size_t ef, SearchStats* stats) const {
    if (k == 0) {
        throw InvalidArgument("k must be >= 1");
    }
    if (ef < k) {
        throw InvalidArgument("ef (" + std::to_string(ef) + ") must be >= k (" + std::to_string(k) + ")");
    }
    SearchResults out;
    out.k = k;
    const auto entry = graph_.entry_point();
    if (!entry) {
        return out;
    }

    auto evaluator = make_evaluator(query, ds_, measure_);
    auto visited = pool_->acquire();
    const Measure m = measure_;
    std::vector<Neighbor> found = evaluator.visit([&](const auto& score) {
        Neighbor cur{*entry, score(*entry)};
        if (stats) {
            ++stats->evaluations;
        }
        for (std::uint32_t l = graph_.max_level(); l > 0; --l) {
            cur = greedy_closest(graph_, score, cur, l, m, stats);
        }
        const Neighbor start[] = {cur};
        return search_layer(graph_, score, std::span<const Neighbor>(start), ef, 0, m, *visited, stats);
    });
    pool_->release(std::move(visited));

    if (found.size() > k) {
        found.resize(k);
    }
    out.entries = std::move(found);
    return out;
}

void
HnswIndex::check_invariants() const {
    ds_.check_invariants();
    graph_.check_invariants();
    if (graph_.size() > ds_.size()) {
        throw StateError("graph has more nodes than the dataset");
    }
}

}  // namespace annkit
