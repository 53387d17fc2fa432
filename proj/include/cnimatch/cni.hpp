#pragma once

#include <cstdint>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cnimatch/graph.hpp"
#include "cnimatch/pairing.hpp"

namespace cni {

// One-hop compact neighborhood index: g_k over the neighbor label counts.
inline BigInt vertex_cni(const Graph& g, VertexId v, const LabelDict& dict) {
    return g_tuple(neighbor_label_counts(g, v, dict));
}

// Edge-labeled graphs: separate sub-CNIs for neighbor vertex labels and for
// incident edge labels, combined with the dimension-2 pairing. Passing the
// same dict twice makes both sub-CNIs share one dimension.
inline BigInt edge_labeled_cni(const Graph& g, VertexId v,
                               const LabelDict& vdict, const LabelDict& edict) {
    const BigInt cv = g_tuple(neighbor_label_counts(g, v, vdict));
    const BigInt ce = g_tuple(incident_edge_label_counts(g, v, vdict, edict));
    return g_tuple({cv, ce});
}

// Directed graphs: vertex-label sub-CNI over all adjacent vertices plus
// edge-label sub-CNIs for ingoing and outgoing arcs, combined at dimension 3.
inline BigInt directed_cni(const Graph& g, VertexId v,
                           const LabelDict& vdict, const LabelDict& edict) {
    if (!g.directed())
        throw std::invalid_argument("directed_cni: graph is not directed");
    const BigInt cv = g_tuple(neighbor_label_counts(g, v, vdict));
    const BigInt cin = g_tuple(in_edge_label_counts(g, v, vdict, edict));
    const BigInt cout = g_tuple(out_edge_label_counts(g, v, vdict, edict));
    return g_tuple({cv, cin, cout});
}

namespace detail {

// BFS distances from v, relaying only through query-labeled vertices.
// Vertices with non-query labels get no distance and never forward paths.
// Exploration stops at max_depth.
inline std::vector<int> label_filtered_distances(const Graph& g, VertexId v,
                                                 const LabelDict& dict, unsigned max_depth) {
    std::vector<int> dist(g.vertex_count(), -1);
    dist[v] = 0;
    std::deque<VertexId> queue{v};
    while (!queue.empty()) {
        VertexId cur = queue.front();
        queue.pop_front();
        if (dist[cur] >= static_cast<int>(max_depth)) continue;
        for (VertexId w : g.adjacent_vertices(cur)) {
            if (dist[w] >= 0) continue;
            if (dict.ord(g.vertex_label(w)) == 0) continue;
            dist[w] = dist[cur] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

}  // namespace detail

// Single CNI over the ball of radius q centred at v (v itself excluded).
inline BigInt ball_cni(const Graph& g, VertexId v, const LabelDict& dict, unsigned q) {
    if (q == 0)
        throw std::invalid_argument("ball_cni: q must be >= 1");
    const auto dist = detail::label_filtered_distances(g, v, dict, q);
    LabelCounts counts(dict.k(), 0);
    for (VertexId w = 0; w < g.vertex_count(); ++w) {
        if (w == v || dist[w] < 0) continue;
        unsigned idx = dict.ord(g.vertex_label(w));
        if (idx > 0) ++counts[idx - 1];
    }
    return g_tuple(counts);
}

// One CNI per hop layer: layers[j-1] encodes the vertices at shortest-path
// distance exactly j from v, layer_degrees[j-1] counts them. balls[j-1]
// encodes the whole radius-j ball (distance 1..j); an embedding can only
// shrink distances, so ball counts are containment-monotone where exact
// layer counts are not, and the filters compare balls.
struct LayeredCni {
    std::vector<BigInt> layers;
    std::vector<std::uint32_t> layer_degrees;
    std::vector<BigInt> balls;
    std::vector<std::uint32_t> ball_degrees;

    unsigned depth() const { return static_cast<unsigned>(layers.size()); }
};

inline LayeredCni layered_cni(const Graph& g, VertexId v, const LabelDict& dict, unsigned q) {
    if (q == 0)
        throw std::invalid_argument("layered_cni: q must be >= 1");
    const auto dist = detail::label_filtered_distances(g, v, dict, q);
    std::vector<LabelCounts> per_layer(q, LabelCounts(dict.k(), 0));
    for (VertexId w = 0; w < g.vertex_count(); ++w) {
        if (w == v || dist[w] <= 0) continue;
        unsigned idx = dict.ord(g.vertex_label(w));
        if (idx > 0) ++per_layer[dist[w] - 1][idx - 1];
    }
    LayeredCni out;
    LabelCounts ball(dict.k(), 0);
    std::uint32_t ball_degree = 0;
    for (unsigned j = 0; j < q; ++j) {
        out.layers.push_back(g_tuple(per_layer[j]));
        out.layer_degrees.push_back(
            std::accumulate(per_layer[j].begin(), per_layer[j].end(), std::uint32_t{0}));
        for (std::size_t i = 0; i < ball.size(); ++i) ball[i] += per_layer[j][i];
        ball_degree += out.layer_degrees.back();
        out.balls.push_back(g_tuple(ball));
        out.ball_degrees.push_back(ball_degree);
    }
    return out;
}

// Single value folding all layers, g_q(cni_1..cni_q). Strictly weaker than
// comparing layers one by one; kept for compact storage.
inline BigInt combined_layered_value(const LayeredCni& lc) {
    return g_tuple(std::span<const BigInt>(lc.layers.data(), lc.layers.size()));
}

// Label indices processed in packets of s: packet i encodes indices
// i*s+1 .. min((i+1)*s, k) via g over that sub-tuple.
struct PacketedCni {
    unsigned packet_size = 0;
    std::vector<BigInt> packets;
    std::vector<std::uint32_t> packet_degrees;
};

inline PacketedCni packeted_cni(const LabelCounts& counts, unsigned s) {
    const unsigned k = static_cast<unsigned>(counts.size());
    if (s == 0 || s > k)
        throw std::invalid_argument("packeted_cni: packet size out of range 1..k");
    PacketedCni out;
    out.packet_size = s;
    for (unsigned start = 0; start < k; start += s) {
        const unsigned len = std::min(s, k - start);
        std::span<const std::uint32_t> sub(counts.data() + start, len);
        out.packets.push_back(g_tuple(sub));
        out.packet_degrees.push_back(
            std::accumulate(sub.begin(), sub.end(), std::uint32_t{0}));
    }
    return out;
}

}  // namespace cni
