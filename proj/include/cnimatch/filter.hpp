#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cnimatch/cni.hpp"
#include "cnimatch/graph.hpp"
#include "cnimatch/pairing.hpp"

namespace cni {

// Per-vertex filter signature. degree_q and counts are restricted to query
// labels and kept consistent while the filter removes vertices.
struct VertexSignature {
    unsigned label_index = 0;   // 0 means: not a query label, never a candidate
    std::uint32_t degree_q = 0;
    BigInt cni;
    LabelCounts counts;
    // edge-label mode only: per-component encodings of the incident edge
    // labels (undirected) or of the in/out arcs (directed)
    LabelCounts edge_counts;
    LabelCounts in_edge_counts;
    LabelCounts out_edge_counts;
    std::uint32_t edge_degree = 0;
    std::uint32_t in_degree = 0;
    std::uint32_t out_degree = 0;
    BigInt edge_cni;
    BigInt in_cni;
    BigInt out_cni;
    std::optional<LayeredCni> layered;
    std::optional<PacketedCni> packeted;
};

// The two-branch candidate rule on a (degree, cni) pair: either both values
// of the query side are strictly below the data side's, or both are equal.
inline bool degree_cni_pass(std::uint32_t u_deg, const BigInt& u_cni,
                            std::uint32_t v_deg, const BigInt& v_cni) {
    return (u_deg < v_deg && u_cni < v_cni) || (u_deg == v_deg && u_cni == v_cni);
}

// Label, degree and CNI filters in one test: v is a candidate for u.
inline bool cni_verify(const VertexSignature& v_sig, const VertexSignature& u_sig) {
    if (u_sig.label_index == 0 || v_sig.label_index != u_sig.label_index)
        return false;
    return degree_cni_pass(u_sig.degree_q, u_sig.cni, v_sig.degree_q, v_sig.cni);
}

// Baseline filter: constant-time maximum-neighbor-degree rejection, then
// neighborhood label frequency containment. Callers pre-apply the label
// filter. Operates on the raw graphs, not on maintained signatures.
inline bool nlf_mnd_verify(const Graph& g, const Graph& q, VertexId v, VertexId u) {
    std::size_t mnd_v = 0;
    for (VertexId w : g.adjacent_vertices(v)) mnd_v = std::max(mnd_v, g.degree(w));
    std::size_t mnd_u = 0;
    for (VertexId w : q.adjacent_vertices(u)) mnd_u = std::max(mnd_u, q.degree(w));
    if (mnd_v < mnd_u)
        return false;

    std::unordered_map<std::string, std::uint32_t> need;
    for (VertexId w : q.adjacent_vertices(u)) ++need[q.vertex_label(w)];
    if (need.empty())
        return true;
    std::unordered_map<std::string, std::uint32_t> have;
    for (VertexId w : g.adjacent_vertices(v)) {
        const std::string& l = g.vertex_label(w);
        if (need.count(l)) ++have[l];
    }
    for (const auto& [label, cnt] : need)
        if (have[label] < cnt) return false;
    return true;
}

// Hop-by-hop candidate test to depth q, radius 1 first so a shallow failure
// short-circuits the deeper ones. Each hop compares the radius-j balls, not
// the exact-distance layers: an embedding maps a length-j path onto a walk
// that extra data edges may shorten, so a query vertex's layer-j population
// can surface at shallower data layers, and only the cumulative counts stay
// containment-monotone. Radius 1 coincides with cni_verify.
inline bool qhop_verify(const VertexSignature& v_sig, const VertexSignature& u_sig, unsigned q) {
    if (u_sig.label_index == 0 || v_sig.label_index != u_sig.label_index)
        return false;
    if (!v_sig.layered || !u_sig.layered ||
        v_sig.layered->depth() < q || u_sig.layered->depth() < q)
        throw std::invalid_argument("qhop_verify: layered depth mismatch");
    for (unsigned j = 0; j < q; ++j) {
        if (!degree_cni_pass(u_sig.layered->ball_degrees[j], u_sig.layered->balls[j],
                             v_sig.layered->ball_degrees[j], v_sig.layered->balls[j]))
            return false;
    }
    return true;
}

// Edge-label mode: the vertex-label test plus a two-branch test per
// edge-label component. Components are compared separately because a data
// vertex may carry extra arcs between already-matched endpoints; a combined
// encoding would push such a vertex out of the equality branch even though
// it hosts an embedding.
inline bool edge_component_verify(const VertexSignature& v_sig, const VertexSignature& u_sig,
                                  bool directed) {
    if (!cni_verify(v_sig, u_sig))
        return false;
    if (!directed)
        return degree_cni_pass(u_sig.edge_degree, u_sig.edge_cni,
                               v_sig.edge_degree, v_sig.edge_cni);
    return degree_cni_pass(u_sig.in_degree, u_sig.in_cni, v_sig.in_degree, v_sig.in_cni) &&
           degree_cni_pass(u_sig.out_degree, u_sig.out_cni, v_sig.out_degree, v_sig.out_cni);
}

// Packeted candidate test: every packet must pass the two-branch rule with
// its own label-restricted degree.
inline bool packeted_verify(const VertexSignature& v_sig, const VertexSignature& u_sig) {
    if (u_sig.label_index == 0 || v_sig.label_index != u_sig.label_index)
        return false;
    if (!v_sig.packeted || !u_sig.packeted ||
        v_sig.packeted->packets.size() != u_sig.packeted->packets.size())
        throw std::invalid_argument("packeted_verify: packet layout mismatch");
    const auto& pv = *v_sig.packeted;
    const auto& pu = *u_sig.packeted;
    for (std::size_t i = 0; i < pv.packets.size(); ++i) {
        if (!degree_cni_pass(pu.packet_degrees[i], pu.packets[i],
                             pv.packet_degrees[i], pv.packets[i]))
            return false;
    }
    return true;
}

struct FilterStats {
    std::uint64_t pruned_label = 0;
    std::uint64_t pruned_degree = 0;
    std::uint64_t pruned_cni = 0;
    std::uint64_t pruned_qhop = 0;
    unsigned iterations = 0;
    std::vector<std::uint64_t> pruned_per_iteration;
    std::vector<std::size_t> candidate_set_sizes;

    std::uint64_t total_pruned() const {
        return pruned_label + pruned_degree + pruned_cni + pruned_qhop;
    }
};

struct FilterState {
    std::vector<char> alive;
    std::vector<VertexSignature> signatures;
    std::vector<VertexSignature> query_signatures;
    unsigned iteration_count = 0;
    FilterStats stats;

    std::vector<VertexId> alive_vertices() const {
        std::vector<VertexId> out;
        for (VertexId v = 0; v < alive.size(); ++v)
            if (alive[v]) out.push_back(v);
        return out;
    }
};

// Per-query-vertex candidate sets. viable is false when some set came out
// empty; the sets are cleared in that case (no embedding can exist).
struct CandidateSets {
    std::vector<std::vector<VertexId>> sets;
    bool viable = false;
};

enum class FilterMode { None, LabelDegree, NlfMnd, Cni };

struct FilterOptions {
    FilterMode mode = FilterMode::Cni;
    // > 1 turns on the layered pre-filter before the one-hop fixpoint
    unsigned qhops = 1;
    // > 0 compares packeted CNIs of that packet size instead of one value
    unsigned packet_size = 0;
    // fold incident edge labels into the signatures (combined CNIs)
    bool use_edge_labels = false;
    // test hook: shuffle the scan order of each filtering iteration
    std::optional<std::uint64_t> scan_shuffle_seed;
};

struct FilterResult {
    FilterState state;
    CandidateSets candidates;
};

namespace detail {

class IlgfEngine {
public:
    IlgfEngine(const Graph& g, const Graph& q, const FilterOptions& opt)
        : g_(g), q_(q), opt_(opt), dict_(build_label_dict(q)) {
        if (g.directed() != q.directed())
            throw std::invalid_argument("data and query graphs must share directedness");
        if (opt_.packet_size > 0 && opt_.use_edge_labels)
            throw std::invalid_argument("packeted and edge-label modes are exclusive");
        if (opt_.packet_size > dict_.k())
            throw std::invalid_argument("packet size exceeds label count");
        if (opt_.use_edge_labels)
            edict_ = build_edge_label_dict(q);
    }

    FilterResult run() {
        init_query_signatures();
        init_data_signatures();
        if (opt_.qhops > 1)
            qhop_prefilter();
        fixpoint();
        return finish();
    }

private:
    bool verify(const VertexSignature& v, const VertexSignature& u) const {
        if (opt_.packet_size > 0) return packeted_verify(v, u);
        if (opt_.use_edge_labels) return edge_component_verify(v, u, g_.directed());
        return cni_verify(v, u);
    }

    void fill_value(VertexSignature& s) const {
        s.cni = g_tuple(s.counts);
        if (opt_.use_edge_labels) {
            if (g_.directed()) {
                s.in_cni = g_tuple(s.in_edge_counts);
                s.out_cni = g_tuple(s.out_edge_counts);
            } else {
                s.edge_cni = g_tuple(s.edge_counts);
            }
        }
        if (opt_.packet_size > 0)
            s.packeted = packeted_cni(s.counts, opt_.packet_size);
    }

    VertexSignature make_signature(const Graph& host, VertexId v) const {
        VertexSignature s;
        s.label_index = dict_.ord(host.vertex_label(v));
        s.counts = neighbor_label_counts(host, v, dict_);
        s.degree_q = std::accumulate(s.counts.begin(), s.counts.end(), std::uint32_t{0});
        if (opt_.use_edge_labels) {
            if (host.directed()) {
                s.in_edge_counts = in_edge_label_counts(host, v, dict_, edict_);
                s.out_edge_counts = out_edge_label_counts(host, v, dict_, edict_);
                s.in_degree = std::accumulate(s.in_edge_counts.begin(), s.in_edge_counts.end(),
                                              std::uint32_t{0});
                s.out_degree = std::accumulate(s.out_edge_counts.begin(), s.out_edge_counts.end(),
                                               std::uint32_t{0});
            } else {
                s.edge_counts = incident_edge_label_counts(host, v, dict_, edict_);
                s.edge_degree = std::accumulate(s.edge_counts.begin(), s.edge_counts.end(),
                                                std::uint32_t{0});
            }
        }
        fill_value(s);
        return s;
    }

    void init_query_signatures() {
        state_.query_signatures.reserve(q_.vertex_count());
        for (VertexId u = 0; u < q_.vertex_count(); ++u) {
            state_.query_signatures.push_back(make_signature(q_, u));
            query_by_label_[state_.query_signatures.back().label_index].push_back(u);
        }
        if (opt_.qhops > 1)
            for (VertexId u = 0; u < q_.vertex_count(); ++u)
                state_.query_signatures[u].layered = layered_cni(q_, u, dict_, opt_.qhops);
    }

    void init_data_signatures() {
        const std::size_t n = g_.vertex_count();
        state_.alive.assign(n, 0);
        state_.signatures.resize(n);
        for (VertexId v = 0; v < n; ++v) {
            unsigned idx = dict_.ord(g_.vertex_label(v));
            if (idx == 0) {
                state_.signatures[v].label_index = 0;
                ++state_.stats.pruned_label;
                continue;
            }
            state_.signatures[v] = make_signature(g_, v);
            state_.alive[v] = 1;
        }
    }

    void qhop_prefilter() {
        for (VertexId v = 0; v < g_.vertex_count(); ++v)
            if (state_.alive[v])
                state_.signatures[v].layered = layered_cni(g_, v, dict_, opt_.qhops);
        std::vector<VertexId> dummy;
        std::vector<char> scheduled(g_.vertex_count(), 1);  // suppress scheduling
        for (VertexId v = 0; v < g_.vertex_count(); ++v) {
            if (!state_.alive[v]) continue;
            bool ok = false;
            for (VertexId u : query_bucket(state_.signatures[v].label_index))
                if (qhop_verify(state_.signatures[v], state_.query_signatures[u], opt_.qhops)) {
                    ok = true;
                    break;
                }
            if (!ok) {
                ++state_.stats.pruned_qhop;
                remove_vertex(v, dummy, scheduled);
            }
        }
    }

    const std::vector<VertexId>& query_bucket(unsigned label_index) const {
        static const std::vector<VertexId> empty;
        auto it = query_by_label_.find(label_index);
        return it == query_by_label_.end() ? empty : it->second;
    }

    bool accepted_by_some_query(VertexId v) const {
        const auto& sig = state_.signatures[v];
        for (VertexId u : query_bucket(sig.label_index))
            if (verify(sig, state_.query_signatures[u])) return true;
        return false;
    }

    // degree is charged when v sits below every same-label query vertex's
    // label-restricted degree; otherwise the CNI comparison was decisive.
    void attribute_prune(VertexId v) {
        const auto& sig = state_.signatures[v];
        for (VertexId u : query_bucket(sig.label_index))
            if (state_.query_signatures[u].degree_q <= sig.degree_q) {
                ++state_.stats.pruned_cni;
                return;
            }
        ++state_.stats.pruned_degree;
    }

    void remove_vertex(VertexId v, std::vector<VertexId>& next, std::vector<char>& scheduled) {
        state_.alive[v] = 0;
        const unsigned lbl = state_.signatures[v].label_index;
        for (VertexId w : g_.adjacent_vertices(v)) {
            if (!state_.alive[w]) continue;
            auto& ws = state_.signatures[w];
            if (ws.label_index == 0) continue;
            --ws.counts[lbl - 1];
            --ws.degree_q;
            if (opt_.use_edge_labels)
                drop_edge_labels(v, w, ws);
            fill_value(ws);
            if (!scheduled[w]) {
                scheduled[w] = 1;
                next.push_back(w);
            }
        }
    }

    // The removed vertex always carries a query label, so every one of its
    // edge labels in edict was counted by its neighbors.
    void drop_edge_labels(VertexId removed, VertexId w, VertexSignature& ws) const {
        if (!g_.directed()) {
            if (auto l = g_.edge_label(removed, w)) {
                unsigned idx = edict_.ord(std::string(*l));
                if (idx > 0) {
                    --ws.edge_counts[idx - 1];
                    --ws.edge_degree;
                }
            }
            return;
        }
        // removed -> w is an ingoing arc of w, w -> removed an outgoing one
        if (auto l = g_.edge_label(removed, w)) {
            unsigned idx = edict_.ord(std::string(*l));
            if (idx > 0) {
                --ws.in_edge_counts[idx - 1];
                --ws.in_degree;
            }
        }
        if (auto l = g_.edge_label(w, removed)) {
            unsigned idx = edict_.ord(std::string(*l));
            if (idx > 0) {
                --ws.out_edge_counts[idx - 1];
                --ws.out_degree;
            }
        }
    }

    void fixpoint() {
        std::vector<VertexId> to_filter = state_.alive_vertices();
        std::vector<char> scheduled(g_.vertex_count(), 0);
        std::mt19937_64 shuffle_rng(opt_.scan_shuffle_seed.value_or(0));
        while (true) {
            ++state_.iteration_count;
            if (opt_.scan_shuffle_seed)
                std::shuffle(to_filter.begin(), to_filter.end(), shuffle_rng);
            std::vector<VertexId> next;
            std::uint64_t removed_now = 0;
            for (VertexId v : to_filter) {
                if (!state_.alive[v]) continue;  // removed earlier this iteration
                if (accepted_by_some_query(v)) continue;
                attribute_prune(v);
                remove_vertex(v, next, scheduled);
                ++removed_now;
            }
            state_.stats.pruned_per_iteration.push_back(removed_now);
            if (next.empty()) break;
            for (VertexId w : next) scheduled[w] = 0;
            to_filter = std::move(next);
        }
        state_.stats.iterations = state_.iteration_count;
    }

    FilterResult finish() {
        CandidateSets cs;
        cs.sets.resize(q_.vertex_count());
        const auto alive = state_.alive_vertices();
        bool any_empty = false;
        for (VertexId u = 0; u < q_.vertex_count(); ++u) {
            for (VertexId v : alive)
                if (verify(state_.signatures[v], state_.query_signatures[u]))
                    cs.sets[u].push_back(v);
            state_.stats.candidate_set_sizes.push_back(cs.sets[u].size());
            if (cs.sets[u].empty()) any_empty = true;
        }
        cs.viable = !any_empty;
        if (any_empty)
            cs.sets.assign(q_.vertex_count(), {});
        return FilterResult{std::move(state_), std::move(cs)};
    }

    const Graph& g_;
    const Graph& q_;
    FilterOptions opt_;
    LabelDict dict_;
    LabelDict edict_;
    FilterState state_;
    std::unordered_map<unsigned, std::vector<VertexId>> query_by_label_;
};

}  // namespace detail

// Iterative local-global filtering: removes every vertex no query vertex
// accepts, propagates degree/CNI updates to the removed vertex's neighbors,
// and repeats on exactly the touched vertices until nothing changes.
inline FilterResult ilgf_filter(const Graph& g, const Graph& q, const FilterOptions& opt = {}) {
    FilterOptions o = opt;
    o.mode = FilterMode::Cni;
    return detail::IlgfEngine(g, q, o).run();
}

namespace detail {

// The non-iterating baselines share one single-pass skeleton.
inline FilterResult single_pass_filter(const Graph& g, const Graph& q, const FilterOptions& opt) {
    if (g.directed() != q.directed())
        throw std::invalid_argument("data and query graphs must share directedness");
    const LabelDict dict = build_label_dict(q);
    FilterState state;
    state.query_signatures.reserve(q.vertex_count());
    std::unordered_map<unsigned, std::vector<VertexId>> by_label;
    for (VertexId u = 0; u < q.vertex_count(); ++u) {
        VertexSignature s;
        s.label_index = dict.ord(q.vertex_label(u));
        s.counts = neighbor_label_counts(q, u, dict);
        s.degree_q = std::accumulate(s.counts.begin(), s.counts.end(), std::uint32_t{0});
        by_label[s.label_index].push_back(u);
        state.query_signatures.push_back(std::move(s));
    }

    const std::size_t n = g.vertex_count();
    state.alive.assign(n, 0);
    state.signatures.resize(n);
    CandidateSets cs;
    cs.sets.resize(q.vertex_count());

    for (VertexId v = 0; v < n; ++v) {
        auto& sig = state.signatures[v];
        sig.label_index = dict.ord(g.vertex_label(v));
        if (sig.label_index == 0) {
            ++state.stats.pruned_label;
            continue;
        }
        sig.counts = neighbor_label_counts(g, v, dict);
        sig.degree_q = std::accumulate(sig.counts.begin(), sig.counts.end(), std::uint32_t{0});

        bool in_any = false;
        bool any_degree_ok = false;
        for (VertexId u : by_label[sig.label_index]) {
            const auto& us = state.query_signatures[u];
            bool pass = false;
            switch (opt.mode) {
                case FilterMode::None:
                    pass = true;
                    break;
                case FilterMode::LabelDegree:
                    pass = sig.degree_q >= us.degree_q;
                    break;
                case FilterMode::NlfMnd:
                    pass = nlf_mnd_verify(g, q, v, u);
                    break;
                case FilterMode::Cni:
                    break;  // handled by ilgf_filter
            }
            if (sig.degree_q >= us.degree_q) any_degree_ok = true;
            if (pass) {
                cs.sets[u].push_back(v);
                in_any = true;
            }
        }
        if (in_any) {
            state.alive[v] = 1;
        } else if (!any_degree_ok) {
            ++state.stats.pruned_degree;
        } else {
            ++state.stats.pruned_cni;  // neighborhood containment was decisive
        }
    }

    bool any_empty = false;
    for (VertexId u = 0; u < q.vertex_count(); ++u) {
        state.stats.candidate_set_sizes.push_back(cs.sets[u].size());
        if (cs.sets[u].empty()) any_empty = true;
    }
    cs.viable = !any_empty;
    if (any_empty)
        cs.sets.assign(q.vertex_count(), {});
    return FilterResult{std::move(state), std::move(cs)};
}

}  // namespace detail

inline FilterResult run_filter(const Graph& g, const Graph& q, const FilterOptions& opt = {}) {
    if (opt.mode == FilterMode::Cni)
        return ilgf_filter(g, q, opt);
    return detail::single_pass_filter(g, q, opt);
}

// Per-query-vertex candidate sets against a converged state; the overall
// result is reported empty as soon as one set is empty.
inline CandidateSets build_candidate_sets(const FilterState& state, const Graph& q) {
    CandidateSets cs;
    cs.sets.resize(q.vertex_count());
    bool any_empty = false;
    for (VertexId u = 0; u < q.vertex_count(); ++u) {
        for (VertexId v = 0; v < state.alive.size(); ++v)
            if (state.alive[v] && cni_verify(state.signatures[v], state.query_signatures[u]))
                cs.sets[u].push_back(v);
        if (cs.sets[u].empty()) any_empty = true;
    }
    cs.viable = !any_empty;
    if (any_empty)
        cs.sets.assign(q.vertex_count(), {});
    return cs;
}

// Induced subgraph on the surviving vertices, renumbered contiguously in
// ascending original id order.
struct SurvivorSubgraph {
    Graph graph;
    std::vector<VertexId> original_ids;
};

inline SurvivorSubgraph survivor_subgraph(const Graph& g, const FilterState& state) {
    SurvivorSubgraph out;
    out.graph = Graph(g.directed(), g.name() + "_filtered");
    std::vector<VertexId> new_id(g.vertex_count(), 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (!state.alive[v]) continue;
        new_id[v] = out.graph.add_vertex(g.vertex_label(v));
        out.original_ids.push_back(v);
    }
    for (VertexId v : out.original_ids)
        for (const auto& e : g.neighbors(v)) {
            if (!state.alive[e.to]) continue;
            if (!g.directed() && e.to < v) continue;
            out.graph.add_edge(new_id[v], new_id[e.to], e.label);
        }
    return out;
}

}  // namespace cni
