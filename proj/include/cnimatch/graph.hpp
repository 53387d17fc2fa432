#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cni {

using VertexId = std::uint32_t;

// Number of occurrences of each query-label index (1..k stored at 0..k-1)
// in a chosen neighborhood. Neighbors whose label is not a query label
// are excluded entirely.
using LabelCounts = std::vector<std::uint32_t>;

struct ParseError : std::runtime_error {
    ParseError(std::size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
    std::size_t line;
};

struct AdjEntry {
    VertexId to;
    std::string label;
};

// Labeled, optionally directed, optionally edge-labeled simple graph with
// contiguous vertex ids. Immutable once built; safe to share read-only
// across threads.
class Graph {
public:
    explicit Graph(bool directed = false, std::string name = "0")
        : directed_(directed), name_(std::move(name)) {}

    bool directed() const { return directed_; }
    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    VertexId add_vertex(std::string label) {
        labels_.push_back(std::move(label));
        adj_.emplace_back();
        if (directed_) in_adj_.emplace_back();
        return static_cast<VertexId>(labels_.size() - 1);
    }

    // Rejects self-loops, parallel edges and dangling endpoints.
    void add_edge(VertexId u, VertexId v, std::string label = "_") {
        if (u >= vertex_count() || v >= vertex_count())
            throw std::out_of_range("add_edge: dangling endpoint");
        if (u == v)
            throw std::invalid_argument("add_edge: self-loop");
        if (has_edge(u, v))
            throw std::invalid_argument("add_edge: duplicate edge");
        adj_[u].push_back({v, label});
        if (directed_)
            in_adj_[v].push_back({u, label});
        else
            adj_[v].push_back({u, std::move(label)});
        ++edge_count_;
    }

    const std::string& vertex_label(VertexId v) const {
        check_vertex(v);
        return labels_[v];
    }

    // Out-adjacency for directed graphs, full adjacency otherwise.
    std::span<const AdjEntry> neighbors(VertexId v) const {
        check_vertex(v);
        return adj_[v];
    }

    std::span<const AdjEntry> in_neighbors(VertexId v) const {
        check_vertex(v);
        return directed_ ? std::span<const AdjEntry>(in_adj_[v])
                         : std::span<const AdjEntry>(adj_[v]);
    }

    // Total incident edge count: |adj| for undirected, out+in for directed.
    std::size_t degree(VertexId v) const {
        check_vertex(v);
        return directed_ ? adj_[v].size() + in_adj_[v].size() : adj_[v].size();
    }

    bool has_edge(VertexId u, VertexId v) const {
        for (const auto& e : adj_[u])
            if (e.to == v) return true;
        return false;
    }

    // Label of edge (u,v); nullopt if absent. Directed graphs look up the
    // arc u->v only.
    std::optional<std::string_view> edge_label(VertexId u, VertexId v) const {
        if (u >= vertex_count() || v >= vertex_count()) return std::nullopt;
        for (const auto& e : adj_[u])
            if (e.to == v) return std::string_view(e.label);
        return std::nullopt;
    }

    // Distinct adjacent vertices (both directions for directed graphs).
    std::vector<VertexId> adjacent_vertices(VertexId v) const {
        check_vertex(v);
        if (!directed_) {
            std::vector<VertexId> out;
            out.reserve(adj_[v].size());
            for (const auto& e : adj_[v]) out.push_back(e.to);
            return out;
        }
        std::vector<VertexId> out;
        out.reserve(adj_[v].size() + in_adj_[v].size());
        for (const auto& e : adj_[v]) out.push_back(e.to);
        for (const auto& e : in_adj_[v]) {
            bool dup = false;
            for (const auto& o : adj_[v])
                if (o.to == e.to) { dup = true; break; }
            if (!dup) out.push_back(e.to);
        }
        return out;
    }

private:
    void check_vertex(VertexId v) const {
        if (v >= vertex_count())
            throw std::out_of_range("invalid vertex id " + std::to_string(v));
    }

    bool directed_;
    std::string name_;
    std::vector<std::string> labels_;
    std::vector<std::vector<AdjEntry>> adj_;
    std::vector<std::vector<AdjEntry>> in_adj_;  // directed only
    std::size_t edge_count_ = 0;
};

// Bijection between query labels and 1..k; tokens absent from the query
// map to 0 and are excluded from every count.
class LabelDict {
public:
    LabelDict() = default;

    explicit LabelDict(std::vector<std::string> ordered_tokens)
        : reverse_(std::move(ordered_tokens)) {
        for (std::size_t i = 0; i < reverse_.size(); ++i) {
            auto [it, fresh] = forward_.emplace(reverse_[i], static_cast<unsigned>(i + 1));
            if (!fresh)
                throw std::invalid_argument("LabelDict: duplicate token " + reverse_[i]);
        }
    }

    unsigned k() const { return static_cast<unsigned>(reverse_.size()); }

    unsigned ord(const std::string& token) const {
        auto it = forward_.find(token);
        return it == forward_.end() ? 0u : it->second;
    }

    // index in 1..k
    const std::string& token(unsigned index) const {
        if (index == 0 || index > reverse_.size())
            throw std::out_of_range("LabelDict::token: index out of range");
        return reverse_[index - 1];
    }

private:
    std::unordered_map<std::string, unsigned> forward_;
    std::vector<std::string> reverse_;
};

// Labels numbered 1..k in order of first appearance over ascending vertex id.
inline LabelDict build_label_dict(const Graph& query) {
    if (query.vertex_count() == 0)
        throw std::invalid_argument("build_label_dict: query has no vertices");
    std::vector<std::string> ordered;
    std::unordered_map<std::string, bool> seen;
    for (VertexId v = 0; v < query.vertex_count(); ++v) {
        const std::string& l = query.vertex_label(v);
        if (!seen.count(l)) {
            seen[l] = true;
            ordered.push_back(l);
        }
    }
    return LabelDict(std::move(ordered));
}

// Edge labels numbered by first appearance scanning vertices in id order;
// undirected edges are visited once, at their smaller endpoint.
inline LabelDict build_edge_label_dict(const Graph& query) {
    std::vector<std::string> ordered;
    std::unordered_map<std::string, bool> seen;
    for (VertexId v = 0; v < query.vertex_count(); ++v) {
        for (const auto& e : query.neighbors(v)) {
            if (!query.directed() && e.to < v) continue;
            if (!seen.count(e.label)) {
                seen[e.label] = true;
                ordered.push_back(e.label);
            }
        }
    }
    return LabelDict(std::move(ordered));
}

// counts[j] = number of neighbors of v whose label maps to j+1 under dict.
// Directed graphs count distinct adjacent vertices in either direction.
inline LabelCounts neighbor_label_counts(const Graph& g, VertexId v, const LabelDict& dict) {
    LabelCounts counts(dict.k(), 0);
    for (VertexId w : g.adjacent_vertices(v)) {
        unsigned idx = dict.ord(g.vertex_label(w));
        if (idx > 0) ++counts[idx - 1];
    }
    return counts;
}

// Incident edge labels restricted to edict. Edges whose far endpoint has a
// non-query vertex label are excluded, like the endpoint itself: the counts
// describe the label-filtered graph. vdict carries the vertex labels.
inline LabelCounts incident_edge_label_counts(const Graph& g, VertexId v, const LabelDict& vdict,
                                              const LabelDict& edict) {
    LabelCounts counts(edict.k(), 0);
    for (const auto& e : g.neighbors(v)) {
        if (vdict.ord(g.vertex_label(e.to)) == 0) continue;
        unsigned idx = edict.ord(e.label);
        if (idx > 0) ++counts[idx - 1];
    }
    if (g.directed()) {
        for (const auto& e : g.in_neighbors(v)) {
            if (vdict.ord(g.vertex_label(e.to)) == 0) continue;
            unsigned idx = edict.ord(e.label);
            if (idx > 0) ++counts[idx - 1];
        }
    }
    return counts;
}

inline LabelCounts in_edge_label_counts(const Graph& g, VertexId v, const LabelDict& vdict,
                                        const LabelDict& edict) {
    LabelCounts counts(edict.k(), 0);
    for (const auto& e : g.in_neighbors(v)) {
        if (vdict.ord(g.vertex_label(e.to)) == 0) continue;
        unsigned idx = edict.ord(e.label);
        if (idx > 0) ++counts[idx - 1];
    }
    return counts;
}

inline LabelCounts out_edge_label_counts(const Graph& g, VertexId v, const LabelDict& vdict,
                                         const LabelDict& edict) {
    LabelCounts counts(edict.k(), 0);
    for (const auto& e : g.neighbors(v)) {
        if (vdict.ord(g.vertex_label(e.to)) == 0) continue;
        unsigned idx = edict.ord(e.label);
        if (idx > 0) ++counts[idx - 1];
    }
    return counts;
}

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

}  // namespace detail

// Text format: `t # <id>` header, `v <vid> <label>` lines with vid ascending
// from 0, then `e <src> <dst> [<elabel>]` lines (label defaults to "_").
// `#`-prefixed lines are comments.
inline Graph load_graph(std::istream& in, bool directed = false) {
    Graph g(directed);
    std::size_t line_no = 0;
    bool saw_header = false;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        if (tok[0] == "t") {
            if (tok.size() != 3 || tok[1] != "#")
                throw ParseError(line_no, "malformed header, expected `t # <id>`");
            if (saw_header)
                throw ParseError(line_no, "unexpected second graph header");
            saw_header = true;
            g.set_name(tok[2]);
        } else if (tok[0] == "v") {
            if (!saw_header)
                throw ParseError(line_no, "vertex line before `t` header");
            if (tok.size() != 3)
                throw ParseError(line_no, "malformed vertex line, expected `v <id> <label>`");
            std::size_t vid;
            try {
                vid = std::stoull(tok[1]);
            } catch (const std::exception&) {
                throw ParseError(line_no, "malformed vertex id `" + tok[1] + "`");
            }
            if (vid != g.vertex_count())
                throw ParseError(line_no, "non-contiguous vertex id " + tok[1] +
                                              ", expected " + std::to_string(g.vertex_count()));
            g.add_vertex(tok[2]);
        } else if (tok[0] == "e") {
            if (!saw_header)
                throw ParseError(line_no, "edge line before `t` header");
            if (tok.size() != 3 && tok.size() != 4)
                throw ParseError(line_no, "malformed edge line, expected `e <src> <dst> [<label>]`");
            std::size_t src, dst;
            try {
                src = std::stoull(tok[1]);
                dst = std::stoull(tok[2]);
            } catch (const std::exception&) {
                throw ParseError(line_no, "malformed edge endpoint");
            }
            if (src >= g.vertex_count() || dst >= g.vertex_count())
                throw ParseError(line_no, "dangling endpoint in edge " + tok[1] + " " + tok[2]);
            if (src == dst)
                throw ParseError(line_no, "self-loop at vertex " + tok[1]);
            try {
                g.add_edge(static_cast<VertexId>(src), static_cast<VertexId>(dst),
                           tok.size() == 4 ? tok[3] : "_");
            } catch (const std::invalid_argument&) {
                throw ParseError(line_no, "duplicate edge " + tok[1] + " " + tok[2]);
            }
        } else {
            throw ParseError(line_no, "unrecognized line tag `" + tok[0] + "`");
        }
    }
    if (!saw_header)
        throw ParseError(line_no, "missing `t # <id>` header");
    return g;
}

inline void write_graph(const Graph& g, std::ostream& out) {
    out << "t # " << g.name() << '\n';
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        out << "v " << v << ' ' << g.vertex_label(v) << '\n';
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (const auto& e : g.neighbors(v)) {
            if (!g.directed() && e.to < v) continue;
            out << "e " << v << ' ' << e.to << ' ' << e.label << '\n';
        }
    if (!out)
        throw std::runtime_error("write_graph: sink write failure");
}

}  // namespace cni
