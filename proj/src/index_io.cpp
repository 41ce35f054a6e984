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

// Index file layout (all integers unsigned little-endian, floats IEEE-754
// binary32 little-endian):
//
//   magic "AKIX", version u32
//   config:   M u32, M0 u32, ef_construction u32, heuristic_pruning u32,
//             mL f64, seed u64, measure u32
//   dataset:  kind u32, dim u32, n u64, quantizer u32
//             [PQ] m u32, ks u32, dsub u32, centroids f32[m*ks*dsub]
//             dense+identity: f32[n*dim]
//             dense+PQ:       u8[n*m]
//             sparse:         offsets u64[n+1], indices u32[nnz], values f32[nnz]
//   graph:    levels u32[n], max_level u32, entry_point u32 (0xFFFFFFFF if empty)
//             for level 0..max_level, for each node at that level in id order:
//                 count u32, ids u32[count]

#include <fstream>
#include <iterator>
#include <sstream>

#include "annkit/detail/binary.hpp"
#include "annkit/errors.hpp"
#include "annkit/hnsw.hpp"

namespace annkit {

namespace {

constexpr char kMagic[4] = {'A', 'K', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kQuantizerIdentity = 0;
constexpr std::uint32_t kQuantizerPq = 1;
// Levels are geometric with mean < 1 for any sane M; anything this large
// is corruption.
constexpr std::uint32_t kMaxLevel = 64;

}  // namespace

void
HnswIndex::save(std::ostream& out) const {
    if (graph_.size() != ds_.size()) {
        throw StateError("cannot save an index with unlinked dataset items");
    }
    detail::ByteWriter w(out);
    w.put_bytes(kMagic, sizeof(kMagic));
    w.put<std::uint32_t>(kVersion);

    w.put<std::uint32_t>(cfg_.M);
    w.put<std::uint32_t>(cfg_.M0);
    w.put<std::uint32_t>(cfg_.ef_construction);
    w.put<std::uint32_t>(cfg_.heuristic_pruning ? 1 : 0);
    w.put<double>(cfg_.mL);
    w.put<std::uint64_t>(cfg_.seed);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(measure_));

    w.put<std::uint32_t>(static_cast<std::uint32_t>(ds_.kind()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ds_.dim()));
    w.put<std::uint64_t>(ds_.size());
    w.put<std::uint32_t>(ds_.is_quantized() ? kQuantizerPq : kQuantizerIdentity);
    if (ds_.kind() == VectorKind::Sparse) {
        w.put_array(ds_.sparse_offsets());
        w.put_array(ds_.sparse_indices());
        w.put_array(ds_.sparse_values());
    } else if (ds_.is_quantized()) {
        const auto& cb = ds_.quantizer().codebook();
        w.put<std::uint32_t>(cb.m());
        w.put<std::uint32_t>(cb.ks());
        w.put<std::uint32_t>(cb.dsub());
        w.put_array(std::span<const float>(cb.centroids()));
        w.put_array(ds_.code_data());
    } else {
        w.put_array(ds_.dense_data());
    }

    w.put_array(std::span<const std::uint32_t>(graph_.levels()));
    w.put<std::uint32_t>(graph_.max_level());
    w.put<std::uint32_t>(graph_.entry_point().value_or(HnswGraph::kNoNode));
    if (!graph_.empty()) {
        for (std::uint32_t l = 0; l <= graph_.max_level(); ++l) {
            for (NodeId id = 0; id < graph_.size(); ++id) {
                if (graph_.level(id) < l) {
                    continue;
                }
                const auto list = graph_.neighbors(id, l);
                w.put<std::uint32_t>(static_cast<std::uint32_t>(list.size()));
                w.put_array(list);
            }
        }
    }
    if (!out) {
        throw Error("failed to write index");
    }
}

void
HnswIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    save(out);
    out.close();
    if (!out) {
        throw Error("failed to write '" + path + "'");
    }
}

HnswIndex
HnswIndex::load(std::istream& in) {
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    detail::ByteReader r(bytes);

    char magic[4];
    r.get_bytes(magic, sizeof(magic), "magic");
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
        throw FormatError("not an index file (bad magic)", 0);
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kVersion) {
        throw FormatError("unsupported index format version " + std::to_string(version), 4);
    }

    const auto config_offset = r.offset();
    HnswConfig cfg;
    cfg.M = r.get<std::uint32_t>("M");
    cfg.M0 = r.get<std::uint32_t>("M0");
    cfg.ef_construction = r.get<std::uint32_t>("ef_construction");
    const auto heuristic = r.get<std::uint32_t>("pruning flag");
    cfg.mL = r.get<double>("mL");
    cfg.seed = r.get<std::uint64_t>("seed");
    const auto measure_tag = r.get<std::uint32_t>("measure");
    if (heuristic > 1 || measure_tag > 1) {
        throw FormatError("invalid config tag", config_offset);
    }
    cfg.heuristic_pruning = heuristic == 1;
    const auto measure = static_cast<Measure>(measure_tag);
    try {
        if (cfg.resolved() != cfg) {
            throw InvalidArgument("config is not fully resolved");
        }
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid index config: ") + e.what(), config_offset);
    }

    const auto dataset_offset = r.offset();
    const auto kind_tag = r.get<std::uint32_t>("vector kind");
    const auto dim = r.get<std::uint32_t>("dimension");
    const auto n = r.get<std::uint64_t>("item count");
    const auto quantizer_tag = r.get<std::uint32_t>("quantizer");
    if (kind_tag > 1 || quantizer_tag > 1 || n >= HnswGraph::kNoNode) {
        throw FormatError("invalid dataset header", dataset_offset);
    }
    const auto kind = static_cast<VectorKind>(kind_tag);

    auto dataset = [&]() -> Dataset {
        try {
            if (kind == VectorKind::Sparse) {
                if (dim != 0 || quantizer_tag != kQuantizerIdentity) {
                    throw FormatError("sparse datasets must be unquantized with dimension 0", dataset_offset);
                }
                auto offsets = r.get_array<std::uint64_t>(n + 1, "sparse offsets");
                const auto nnz = offsets.back();
                auto indices = r.get_array<std::uint32_t>(nnz, "sparse indices");
                auto values = r.get_array<float>(nnz, "sparse values");
                return Dataset::restore_sparse(std::move(offsets), std::move(indices), std::move(values));
            }
            if (dim == 0) {
                throw FormatError("dense dataset with dimension 0", dataset_offset);
            }
            if (quantizer_tag == kQuantizerPq) {
                const auto m = r.get<std::uint32_t>("PQ m");
                const auto ks = r.get<std::uint32_t>("PQ ks");
                const auto dsub = r.get<std::uint32_t>("PQ dsub");
                if (std::uint64_t{m} * dsub != dim || ks == 0 || ks > 256) {
                    throw FormatError("codebook shape does not match the dataset", r.offset());
                }
                auto centroids = r.get_array<float>(std::size_t{m} * ks * dsub, "PQ centroids");
                Quantizer q(PqCodebook(m, ks, dsub, std::move(centroids)));
                auto codes = r.get_array<std::uint8_t>(n * m, "PQ codes");
                return Dataset::restore_dense(dim, std::move(q), n, {}, std::move(codes));
            }
            auto data = r.get_array<float>(n * dim, "dense vectors");
            return Dataset::restore_dense(dim, Quantizer::identity(), n, std::move(data), {});
        } catch (const FormatError&) {
            throw;
        } catch (const Error& e) {
            throw FormatError(std::string("invalid dataset block: ") + e.what(), r.offset());
        }
    }();

    const auto graph_offset = r.offset();
    auto levels = r.get_array<std::uint32_t>(n, "node levels");
    const auto max_level = r.get<std::uint32_t>("max level");
    const auto entry = r.get<std::uint32_t>("entry point");
    HnswGraph graph(cfg.M, cfg.M0);
    try {
        for (auto level : levels) {
            if (level > max_level || level > kMaxLevel) {
                throw FormatError("node level exceeds the max level", graph_offset);
            }
            graph.add_node(level);
        }
        if (n == 0) {
            if (entry != HnswGraph::kNoNode || max_level != 0) {
                throw FormatError("empty graph with an entry point", graph_offset);
            }
        } else {
            if (entry >= n) {
                throw FormatError("entry point out of range", graph_offset);
            }
            graph.set_entry_point(entry);
            if (graph.max_level() != max_level) {
                throw FormatError("entry point is not on the max level", graph_offset);
            }
            for (std::uint32_t l = 0; l <= max_level; ++l) {
                for (NodeId id = 0; id < n; ++id) {
                    if (levels[id] < l) {
                        continue;
                    }
                    const auto count_offset = r.offset();
                    const auto count = r.get<std::uint32_t>("neighbor count");
                    if (count > graph.capacity(l)) {
                        throw FormatError("neighbor list exceeds capacity", count_offset);
                    }
                    const auto ids = r.get_array<NodeId>(count, "neighbor ids");
                    graph.set_neighbors(id, l, ids);
                }
            }
        }
        if (r.remaining() != 0) {
            throw FormatError("trailing bytes after the index", r.offset());
        }
        graph.check_invariants();
        return HnswIndex(std::move(dataset), measure, cfg, std::move(graph));
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw FormatError(std::string("invalid graph: ") + e.what(), r.offset());
    }
}

HnswIndex
HnswIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFound("cannot open index file '" + path + "'");
    }
    return load(in);
}

}  // namespace annkit
