#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cnimatch/filter.hpp"
#include "cnimatch/graph.hpp"

namespace cni {

// Injective query-vertex -> data-vertex mapping; partial while the search
// runs, total when reported.
struct Embedding {
    std::vector<std::pair<VertexId, VertexId>> pairs;  // (query, data)

    std::optional<VertexId> image_of(VertexId query_vertex) const {
        for (const auto& [qu, dv] : pairs)
            if (qu == query_vertex) return dv;
        return std::nullopt;
    }
};

// One line per embedding, `u0:v3 u1:v7 ...` ordered by query vertex id.
inline std::string serialize_embedding(const Embedding& m) {
    auto pairs = m.pairs;
    std::sort(pairs.begin(), pairs.end());
    std::ostringstream out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) out << ' ';
        out << 'u' << pairs[i].first << ":v" << pairs[i].second;
    }
    return out.str();
}

enum class OrderPolicy { InputOrder, LeastCandidatesConnected };

struct SearchConfig {
    OrderPolicy order_policy = OrderPolicy::LeastCandidatesConnected;
    std::optional<std::uint64_t> embedding_limit;
    bool parallel_roots = false;
};

// True iff every already-mapped query neighbor of u maps to a data neighbor
// of v through an equally labeled edge.
inline bool neighbor_check(const Graph& q, const Graph& g, VertexId u, VertexId v,
                           const Embedding& m) {
    for (const auto& [up, vp] : m.pairs) {
        if (auto ql = q.edge_label(u, up)) {
            auto gl = g.edge_label(v, vp);
            if (!gl || *gl != *ql) return false;
        }
        if (q.directed()) {
            if (auto ql = q.edge_label(up, u)) {
                auto gl = g.edge_label(vp, v);
                if (!gl || *gl != *ql) return false;
            }
        }
    }
    return true;
}

// Next query vertex to extend the partial embedding with. The
// least-candidates policy prefers unmatched vertices adjacent to the matched
// set, picking the smallest candidate set and breaking ties by id; with
// nothing adjacent (start, or a disconnected query) it falls back to the
// global minimum.
inline VertexId choose_next_vertex(const Graph& q, const Embedding& m,
                                   const CandidateSets& cs, OrderPolicy policy) {
    const std::size_t n = q.vertex_count();
    if (m.pairs.size() >= n)
        throw std::invalid_argument("choose_next_vertex: embedding already total");
    std::vector<char> matched(n, 0);
    for (const auto& [qu, dv] : m.pairs) matched[qu] = 1;

    if (policy == OrderPolicy::InputOrder) {
        for (VertexId u = 0; u < n; ++u)
            if (!matched[u]) return u;
    }

    auto better = [&](VertexId a, std::optional<VertexId> b) {
        return !b || cs.sets[a].size() < cs.sets[*b].size();
    };
    std::optional<VertexId> best_connected;
    std::optional<VertexId> best_any;
    for (VertexId u = 0; u < n; ++u) {
        if (matched[u]) continue;
        if (better(u, best_any)) best_any = u;
        bool touches = false;
        for (const auto& [qu, dv] : m.pairs)
            if (q.has_edge(u, qu) || q.has_edge(qu, u)) { touches = true; break; }
        if (touches && better(u, best_connected)) best_connected = u;
    }
    return best_connected ? *best_connected : *best_any;
}

namespace detail {

struct SearchDriver {
    const Graph& g;
    const Graph& q;
    const CandidateSets& cs;
    OrderPolicy policy;
    const std::function<bool(const Embedding&)>& emit;
    std::vector<char> used;
    Embedding m;
    bool stopped = false;

    void recurse() {
        if (stopped) return;
        if (m.pairs.size() == q.vertex_count()) {
            Embedding report = m;
            std::sort(report.pairs.begin(), report.pairs.end());
            if (!emit(report)) stopped = true;
            return;  // a total embedding is a leaf
        }
        const VertexId u = choose_next_vertex(q, m, cs, policy);
        for (VertexId v : cs.sets[u]) {
            if (used[v]) continue;
            if (!neighbor_check(q, g, u, v, m)) continue;
            used[v] = 1;
            m.pairs.emplace_back(u, v);
            recurse();
            m.pairs.pop_back();
            used[v] = 0;
            if (stopped) return;
        }
    }
};

inline void search_sequential(const Graph& g, const Graph& q, const CandidateSets& cs,
                              OrderPolicy policy,
                              const std::function<bool(const Embedding&)>& emit,
                              std::optional<std::pair<VertexId, VertexId>> seed_pair) {
    SearchDriver drv{g, q, cs, policy, emit, std::vector<char>(g.vertex_count(), 0), {}, false};
    if (seed_pair) {
        drv.used[seed_pair->second] = 1;
        drv.m.pairs.push_back(*seed_pair);
    }
    drv.recurse();
}

inline void search_parallel_roots(const Graph& g, const Graph& q, const CandidateSets& cs,
                                  OrderPolicy policy,
                                  const std::function<bool(const Embedding&)>& emit,
                                  std::optional<std::uint64_t> limit) {
    const VertexId u0 = choose_next_vertex(q, Embedding{}, cs, policy);
    const auto& roots = cs.sets[u0];
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(roots.size())));
    std::vector<std::future<std::vector<Embedding>>> futures;
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w]() {
            std::vector<Embedding> local;
            // any worker alone can satisfy the limit, so cap local collection
            auto collect = [&local, &limit](const Embedding& e) {
                local.push_back(e);
                return !limit || local.size() < *limit;
            };
            // contiguous chunk keeps the merged order equal to sequential order
            const std::size_t lo = roots.size() * w / workers;
            const std::size_t hi = roots.size() * (w + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) {
                if (limit && local.size() >= *limit) break;
                search_sequential(g, q, cs, policy, collect,
                                  std::make_pair(u0, roots[i]));
            }
            return local;
        }));
    }
    for (auto& f : futures)
        for (const auto& e : f.get())
            if (!emit(e)) return;
}

}  // namespace detail

// Depth-first enumeration of every embedding of q in g over the candidate
// sets. The visitor returns false to stop early.
inline void enumerate_embeddings(const Graph& g, const Graph& q, const CandidateSets& cs,
                                 const SearchConfig& cfg,
                                 const std::function<bool(const Embedding&)>& visit) {
    if (q.vertex_count() == 0 || !cs.viable)
        return;
    std::uint64_t emitted = 0;
    auto emit = [&](const Embedding& e) {
        if (cfg.embedding_limit && emitted >= *cfg.embedding_limit)
            return false;
        ++emitted;
        if (!visit(e))
            return false;
        return !cfg.embedding_limit || emitted < *cfg.embedding_limit;
    };
    if (cfg.parallel_roots)
        detail::search_parallel_roots(g, q, cs, cfg.order_policy, emit, cfg.embedding_limit);
    else
        detail::search_sequential(g, q, cs, cfg.order_policy, emit, std::nullopt);
}

inline std::vector<Embedding> find_all_embeddings(const Graph& g, const Graph& q,
                                                  const CandidateSets& cs,
                                                  const SearchConfig& cfg = {}) {
    std::vector<Embedding> out;
    enumerate_embeddings(g, q, cs, cfg, [&](const Embedding& e) {
        out.push_back(e);
        return true;
    });
    return out;
}

inline std::uint64_t count_embeddings(const Graph& g, const Graph& q,
                                      const CandidateSets& cs, const SearchConfig& cfg = {}) {
    std::uint64_t n = 0;
    enumerate_embeddings(g, q, cs, cfg, [&](const Embedding&) {
        ++n;
        return true;
    });
    return n;
}

}  // namespace cni
