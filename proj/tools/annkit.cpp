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


// Command line front end: build, search, bench, ground-truth.
//
// Exit codes: 0 success, 2 malformed input file, 3 invalid arguments,
// 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "annkit/bench.hpp"
#include "annkit/builder.hpp"
#include "annkit/errors.hpp"
#include "annkit/io.hpp"

namespace {

using namespace annkit;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitFormat = 2;
constexpr int kExitArgs = 3;

struct BuildOptions {
    std::string data;
    std::string format = "fvecs";
    std::string metric = "l2";
    std::uint32_t m = 16;
    std::uint32_t efc = 200;
    std::string quantizer = "none";
    std::uint32_t pq_m = 16;
    std::uint32_t pq_ks = 256;
    std::uint32_t train_iters = 25;
    std::uint64_t seed = 42;
    std::size_t max_rows = kAllRows;
    std::string output;
};

struct SearchOptions {
    std::string index;
    std::string queries;
    std::size_t k = 10;
    std::size_t ef = 100;
    std::size_t max_rows = kAllRows;
    std::string output;
};

struct BenchOptions {
    std::string index;
    std::string queries;
    std::string ground_truth;
    std::size_t k = 10;
    std::vector<std::size_t> ef_list{10, 20, 40, 80, 160};
    std::size_t max_rows = kAllRows;
    std::string csv;
};

struct TruthOptions {
    std::string data;
    std::string queries;
    std::string format = "fvecs";
    std::size_t k = 100;
    std::string measure = "l2";
    std::size_t max_rows = kAllRows;
    unsigned threads = 0;
    std::string output;
};

/// Queries in the file format that matches the index kind.
struct QuerySet {
    std::vector<DenseVector> dense;
    std::vector<SparseVector> sparse;

    std::vector<VectorView>
    views() const {
        return dense.empty() ? as_views(sparse) : as_views(dense);
    }
    std::size_t
    size() const {
        return dense.size() + sparse.size();
    }
};

QuerySet
read_queries(const std::string& path, VectorKind kind, std::size_t max_rows) {
    QuerySet q;
    if (kind == VectorKind::Dense) {
        q.dense = read_fvecs(path, max_rows);
    } else {
        q.sparse = read_sparse_csr(path, nullptr, max_rows);
    }
    return q;
}

void
report_repairs(const SparseReadStats& s) {
    if (s.unsorted_rows || s.merged_duplicates || s.dropped_zeros) {
        std::fprintf(stderr, "warning: repaired %zu unsorted rows (%zu duplicates merged, %zu zeros dropped)\n",
                     s.unsorted_rows, s.merged_duplicates, s.dropped_zeros);
    }
}

int
run_build(const BuildOptions& o) {
    BuildParams p;
    p.measure = parse_measure(o.metric);
    p.hnsw.M = o.m;
    p.hnsw.ef_construction = o.efc;
    p.hnsw.seed = o.seed;
    p.product_quantizer = o.quantizer == "pq";
    p.pq.m = o.pq_m;
    p.pq.ks = o.pq_ks;
    p.pq.iters = o.train_iters;
    p.pq.seed = o.seed;

    HnswIndex index = [&] {
        if (o.format == "csr") {
            SparseReadStats stats;
            const auto rows = read_sparse_csr(o.data, &stats, o.max_rows);
            report_repairs(stats);
            std::fprintf(stderr, "building over %zu sparse rows\n", rows.size());
            return build_sparse_index(rows, p);
        }
        const auto rows = read_fvecs(o.data, o.max_rows);
        std::fprintf(stderr, "building over %zu dense rows\n", rows.size());
        return build_dense_index(rows, p);
    }();
    index.save(o.output);
    std::fprintf(stderr, "wrote %s (%zu items, max level %u)\n", o.output.c_str(), index.size(),
                 index.graph().max_level());
    return kExitOk;
}

int
run_search(const SearchOptions& o) {
    const auto index = HnswIndex::load(o.index);
    const auto queries = read_queries(o.queries, index.dataset().kind(), o.max_rows);
    const auto batch = search_batch(index, queries.views(), o.k, o.ef);

    std::ofstream file;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) {
            throw Error("cannot open '" + o.output + "' for writing");
        }
    }
    std::ostream& out = o.output.empty() ? std::cout : file;
    out << "query,rank,id,score\n";
    char line[96];
    for (std::size_t i = 0; i < batch.rows; ++i) {
        for (std::size_t j = 0; j < batch.width; ++j) {
            const auto id = batch.ids[i * batch.width + j];
            if (id == HnswGraph::kNoNode) {
                break;
            }
            std::snprintf(line, sizeof(line), "%zu,%zu,%u,%.9g\n", i, j, id, batch.scores[i * batch.width + j]);
            out << line;
        }
    }
    out.flush();
    if (!out) {
        throw Error("failed to write search results");
    }
    return kExitOk;
}

int
run_bench(const BenchOptions& o) {
    const auto index = HnswIndex::load(o.index);
    const auto queries = read_queries(o.queries, index.dataset().kind(), o.max_rows);
    auto truth = ground_truth_from_ivecs(read_ivecs(o.ground_truth, o.max_rows));
    const auto records = bench_sweep(index, queries.views(), truth, o.k, o.ef_list);
    if (o.csv.empty()) {
        write_benchmark_csv(std::cout, records);
        return kExitOk;
    }
    std::ofstream file(o.csv);
    if (!file) {
        throw Error("cannot open '" + o.csv + "' for writing");
    }
    write_benchmark_csv(file, records);
    if (!file.flush()) {
        throw Error("failed to write '" + o.csv + "'");
    }
    return kExitOk;
}

int
run_ground_truth(const TruthOptions& o) {
    const Measure m = parse_measure(o.measure);
    GroundTruth truth;
    if (o.format == "csr") {
        SparseReadStats stats;
        const auto base = read_sparse_csr(o.data, &stats, o.max_rows);
        report_repairs(stats);
        auto ds = Dataset::sparse();
        ds.reserve(base.size());
        for (const auto& v : base) {
            ds.push(v);
        }
        const auto queries = read_sparse_csr(o.queries);
        truth = compute_ground_truth(ds, as_views(queries), o.k, m, o.threads);
    } else {
        const auto base = read_fvecs(o.data, o.max_rows);
        if (base.empty()) {
            throw InvalidArgument("base file is empty");
        }
        auto ds = Dataset::dense(base.front().dim());
        ds.reserve(base.size());
        for (const auto& v : base) {
            ds.push(v);
        }
        const auto queries = read_fvecs(o.queries);
        truth = compute_ground_truth(ds, as_views(queries), o.k, m, o.threads);
    }
    write_ivecs(o.output, ground_truth_to_ivecs(truth));
    return kExitOk;
}

}  // namespace

int
main(int argc, char** argv) {
    CLI::App app{"annkit: graph-based approximate nearest neighbor search"};
    app.require_subcommand(1);

    BuildOptions build;
    auto* b = app.add_subcommand("build", "Build an index and save it");
    b->add_option("--data", build.data, "Base vectors")->required();
    b->add_option("--format", build.format, "Input format")->check(CLI::IsMember({"fvecs", "csr"}))->capture_default_str();
    b->add_option("--metric", build.metric, "Similarity measure")->check(CLI::IsMember({"l2", "ip"}))->capture_default_str();
    b->add_option("--m", build.m, "Graph degree M")->capture_default_str();
    b->add_option("--efc", build.efc, "Construction beam width")->capture_default_str();
    b->add_option("--quantizer", build.quantizer, "Storage")->check(CLI::IsMember({"none", "pq"}))->capture_default_str();
    b->add_option("--pq-m", build.pq_m, "PQ subspaces")->capture_default_str();
    b->add_option("--pq-ks", build.pq_ks, "PQ centroids per subspace")->capture_default_str();
    b->add_option("--train-iters", build.train_iters, "k-means iterations")->capture_default_str();
    b->add_option("--seed", build.seed, "Random seed")->capture_default_str();
    b->add_option("--max-rows", build.max_rows, "Read at most this many base rows");
    b->add_option("--output", build.output, "Index file")->required();

    SearchOptions search;
    auto* s = app.add_subcommand("search", "Search a saved index, CSV output");
    s->add_option("--index", search.index, "Index file")->required();
    s->add_option("--queries", search.queries, "Queries (fvecs or csr, following the index)")->required();
    s->add_option("--k", search.k, "Neighbors per query")->capture_default_str();
    s->add_option("--ef", search.ef, "Search beam width")->capture_default_str();
    s->add_option("--max-rows", search.max_rows, "Read at most this many queries");
    s->add_option("--output", search.output, "CSV file (default stdout)");

    BenchOptions bench;
    auto* be = app.add_subcommand("bench", "Recall and throughput over an ef sweep");
    be->add_option("--index", bench.index, "Index file")->required();
    be->add_option("--queries", bench.queries, "Queries")->required();
    be->add_option("--ground-truth", bench.ground_truth, "Ground truth ivecs")->required();
    be->add_option("--k", bench.k, "Recall cutoff")->capture_default_str();
    be->add_option("--ef-list", bench.ef_list, "Comma separated beam widths")->delimiter(',')->capture_default_str();
    be->add_option("--max-rows", bench.max_rows, "Use at most this many queries");
    be->add_option("--csv", bench.csv, "CSV file (default stdout)");

    TruthOptions truth;
    auto* g = app.add_subcommand("ground-truth", "Exhaustive top-k ids as ivecs");
    g->add_option("--data", truth.data, "Base vectors")->required();
    g->add_option("--queries", truth.queries, "Queries")->required();
    g->add_option("--format", truth.format, "Input format")->check(CLI::IsMember({"fvecs", "csr"}))->capture_default_str();
    g->add_option("--k", truth.k, "Neighbors per query")->capture_default_str();
    g->add_option("--measure", truth.measure, "Similarity measure")->check(CLI::IsMember({"l2", "ip"}))->capture_default_str();
    g->add_option("--max-rows", truth.max_rows, "Read at most this many base rows");
    g->add_option("--threads", truth.threads, "Worker threads, 0 for all cores");
    g->add_option("--output", truth.output, "Output ivecs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitArgs;
    }

    try {
        if (*b) {
            return run_build(build);
        }
        if (*s) {
            return run_search(search);
        }
        if (*be) {
            return run_bench(bench);
        }
        return run_ground_truth(truth);
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitFormat;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kExitArgs;
    } catch (const UnsupportedCombination& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kExitArgs;
    } catch (const NotFound& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kExitArgs;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOther;
    }
}
