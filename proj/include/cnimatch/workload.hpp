#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "cnimatch/filter.hpp"
#include "cnimatch/graph.hpp"
#include "cnimatch/search.hpp"

namespace cni {

enum class WalkMode { Sparse, Dense };

struct WorkloadSpec {
    unsigned query_size = 4;
    unsigned count = 1;
    WalkMode mode = WalkMode::Sparse;
    std::uint64_t seed = 0;
    unsigned max_restarts = 100;
};

namespace detail {

// One walk attempt; returns the visited vertices in visit order, or an
// incomplete set when the walk got stuck.
inline std::vector<VertexId> walk_once(const Graph& g, unsigned size, WalkMode mode,
                                       std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick_start(0, g.vertex_count() - 1);
    VertexId current = static_cast<VertexId>(pick_start(rng));
    std::vector<VertexId> visited{current};
    std::unordered_set<VertexId> in_visited{current};
    const unsigned step_budget = 50 * size + 50;
    for (unsigned step = 0; step < step_budget && visited.size() < size; ++step) {
        const auto nbrs = g.adjacent_vertices(current);
        if (nbrs.empty()) break;
        // Step to an unvisited neighbor of extreme degree when one exists;
        // otherwise pass through a visited one. A pure greedy step can bounce
        // between two mutually minimal vertices forever.
        auto select = [&](bool unvisited_only) -> std::vector<VertexId> {
            std::size_t best =
                mode == WalkMode::Sparse ? std::numeric_limits<std::size_t>::max() : 0;
            std::vector<VertexId> pool;
            for (VertexId w : nbrs) {
                if (unvisited_only && in_visited.count(w)) continue;
                const std::size_t d = g.degree(w);
                if (d == best) {
                    pool.push_back(w);
                } else if (mode == WalkMode::Sparse ? d < best : d > best) {
                    best = d;
                    pool.assign(1, w);
                }
            }
            return pool;
        };
        std::vector<VertexId> pool = select(true);
        if (pool.empty()) pool = select(false);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        current = pool[pick(rng)];
        if (in_visited.insert(current).second) visited.push_back(current);
    }
    return visited;
}

}  // namespace detail

// Connected queries sampled as random walks on the data graph; the query is
// the subgraph induced by the visited vertices, numbered in visit order.
// Identical spec (including seed) reproduces the workload exactly.
inline std::vector<Graph> generate_queries(const Graph& g, const WorkloadSpec& spec) {
    if (spec.query_size == 0 || spec.count == 0)
        throw std::invalid_argument("generate_queries: size and count must be >= 1");
    if (g.vertex_count() == 0)
        throw std::invalid_argument("generate_queries: empty data graph");
    std::mt19937_64 rng(spec.seed);
    const char* mode_name = spec.mode == WalkMode::Sparse ? "sparse" : "dense";
    std::vector<Graph> out;
    for (unsigned i = 0; i < spec.count; ++i) {
        std::vector<VertexId> visited;
        unsigned restarts = 0;
        while (true) {
            visited = detail::walk_once(g, spec.query_size, spec.mode, rng);
            if (visited.size() == spec.query_size) break;
            if (++restarts > spec.max_restarts)
                throw std::runtime_error(
                    "generate_queries: could not collect " + std::to_string(spec.query_size) +
                    " vertices after " + std::to_string(spec.max_restarts) + " restarts");
        }
        Graph query(g.directed(), "q_" + std::to_string(spec.query_size) + "_" + mode_name +
                                      "_" + std::to_string(i));
        std::vector<VertexId> new_id(g.vertex_count(), 0);
        for (VertexId v : visited) new_id[v] = query.add_vertex(g.vertex_label(v));
        std::unordered_set<VertexId> in_visited(visited.begin(), visited.end());
        for (VertexId v : visited)
            for (const auto& e : g.neighbors(v)) {
                if (!in_visited.count(e.to)) continue;
                if (!g.directed() && new_id[e.to] < new_id[v]) continue;
                query.add_edge(new_id[v], new_id[e.to], e.label);
            }
        out.push_back(std::move(query));
    }
    return out;
}

struct DatasetStats {
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::size_t labels = 0;
    double avg_degree = 0.0;
};

inline DatasetStats dataset_stats(const Graph& g) {
    DatasetStats s;
    s.vertices = g.vertex_count();
    s.edges = g.edge_count();
    std::unordered_set<std::string> labels;
    for (VertexId v = 0; v < g.vertex_count(); ++v) labels.insert(g.vertex_label(v));
    s.labels = labels.size();
    if (s.vertices > 0)
        s.avg_degree = (g.directed() ? 1.0 : 2.0) * static_cast<double>(s.edges) /
                       static_cast<double>(s.vertices);
    return s;
}

// Named filter configuration for comparison runs.
struct BenchConfig {
    std::string name;
    FilterOptions filter;
};

inline BenchConfig bench_config(const std::string& name, unsigned qhops = 2) {
    FilterOptions o;
    if (name == "none") {
        o.mode = FilterMode::None;
    } else if (name == "label-degree") {
        o.mode = FilterMode::LabelDegree;
    } else if (name == "nlf-mnd") {
        o.mode = FilterMode::NlfMnd;
    } else if (name == "cni") {
        o.mode = FilterMode::Cni;
    } else if (name == "cni+qhop") {
        o.qhops = std::max(2u, qhops);
    } else {
        throw std::invalid_argument("unknown filter config `" + name + "`");
    }
    return {name, o};
}

struct QueryBenchRecord {
    std::string query_id;
    std::string filter_mode;
    FilterStats stats;
    std::uint64_t embeddings = 0;
    double filter_ms = 0.0;
    double search_ms = 0.0;
    double total_ms = 0.0;
    std::size_t total_candidates = 0;
    // order-independent digest of the embedding set, for cross-config checks
    std::uint64_t embedding_digest = 0;
};

struct BenchAggregate {
    std::string filter_mode;
    std::size_t queries = 0;
    double mean_total_ms = 0.0;
    double mean_filter_ms = 0.0;
    double mean_search_ms = 0.0;
    double mean_candidates = 0.0;
    double mean_embeddings = 0.0;
};

struct BenchReport {
    std::vector<QueryBenchRecord> per_query;
    std::vector<BenchAggregate> aggregates;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

// Runs every query under every configuration and requires all
// configurations to produce the same embedding set per query.
inline BenchReport run_benchmark(const Graph& g, const std::vector<Graph>& queries,
                                 const std::vector<BenchConfig>& configs,
                                 const SearchConfig& search_cfg = {}) {
    if (configs.empty())
        throw std::invalid_argument("run_benchmark: no configurations");
    BenchReport report;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const Graph& q = queries[qi];
        const std::string qid = q.name().empty() ? "q" + std::to_string(qi) : q.name();
        bool have_reference = false;
        std::uint64_t ref_count = 0, ref_digest = 0;
        for (const auto& cfg : configs) {
            QueryBenchRecord rec;
            rec.query_id = qid;
            rec.filter_mode = cfg.name;
            auto t0 = std::chrono::steady_clock::now();
            FilterResult fr = run_filter(g, q, cfg.filter);
            auto t1 = std::chrono::steady_clock::now();
            std::uint64_t digest = 0;
            std::uint64_t count = 0;
            enumerate_embeddings(g, q, fr.candidates, search_cfg, [&](const Embedding& e) {
                ++count;
                digest += detail::fnv1a(serialize_embedding(e));
                return true;
            });
            auto t2 = std::chrono::steady_clock::now();
            rec.stats = fr.state.stats;
            rec.embeddings = count;
            rec.embedding_digest = digest;
            for (std::size_t s : fr.state.stats.candidate_set_sizes) rec.total_candidates += s;
            rec.filter_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            rec.search_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
            rec.total_ms = rec.filter_ms + rec.search_ms;
            if (!have_reference) {
                have_reference = true;
                ref_count = count;
                ref_digest = digest;
            } else if (count != ref_count || digest != ref_digest) {
                throw std::runtime_error("benchmark: configuration `" + cfg.name +
                                         "` disagrees on query " + qid + " (" +
                                         std::to_string(count) + " vs " +
                                         std::to_string(ref_count) + " embeddings)");
            }
            report.per_query.push_back(std::move(rec));
        }
    }
    for (const auto& cfg : configs) {
        BenchAggregate agg;
        agg.filter_mode = cfg.name;
        for (const auto& rec : report.per_query) {
            if (rec.filter_mode != cfg.name) continue;
            ++agg.queries;
            agg.mean_total_ms += rec.total_ms;
            agg.mean_filter_ms += rec.filter_ms;
            agg.mean_search_ms += rec.search_ms;
            agg.mean_candidates += static_cast<double>(rec.total_candidates);
            agg.mean_embeddings += static_cast<double>(rec.embeddings);
        }
        if (agg.queries > 0) {
            agg.mean_total_ms /= static_cast<double>(agg.queries);
            agg.mean_filter_ms /= static_cast<double>(agg.queries);
            agg.mean_search_ms /= static_cast<double>(agg.queries);
            agg.mean_candidates /= static_cast<double>(agg.queries);
            agg.mean_embeddings /= static_cast<double>(agg.queries);
        }
        report.aggregates.push_back(std::move(agg));
    }
    return report;
}

}  // namespace cni
