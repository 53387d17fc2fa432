#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cnimatch/filter.hpp"
#include "cnimatch/graph.hpp"

namespace cni {

struct StreamStats {
    std::uint64_t edges_read = 0;          // records consumed
    std::uint64_t vertices_admitted = 0;   // ever entered the retained set
    std::uint64_t vertices_dropped = 0;    // removed when their group closed
    std::uint64_t label_rejected = 0;      // distinct vertices with non-query labels
    std::uint64_t peak_retained_edges = 0;
    bool sorted = true;

    bool degraded() const { return !sorted; }
};

// The retained subgraph: vertices that survived the streaming filters,
// renumbered contiguously, plus their group-close signatures (sorted mode).
struct ReducedGraph {
    Graph graph;
    std::vector<std::uint64_t> original_ids;
    std::vector<VertexSignature> signatures;  // aligned with original_ids; sorted mode only
    StreamStats stats;
};

namespace detail {

enum class StreamStatus : std::uint8_t { Pending, Rejected, Admitted, Dropped };

struct StreamVertex {
    std::string label;
    StreamStatus status = StreamStatus::Pending;
    bool closed = false;
    VertexSignature signature;  // filled at group close for admitted vertices
};

struct StreamEdge {
    std::uint64_t a, b;
    std::string label;
    bool removed = false;
};

class StreamEngine {
public:
    StreamEngine(const Graph& q) : dict_(build_label_dict(q)) {
        for (VertexId u = 0; u < q.vertex_count(); ++u) {
            VertexSignature s;
            s.label_index = dict_.ord(q.vertex_label(u));
            s.counts = neighbor_label_counts(q, u, dict_);
            s.degree_q = std::accumulate(s.counts.begin(), s.counts.end(), std::uint32_t{0});
            s.cni = g_tuple(s.counts);
            query_by_label_[s.label_index].push_back(s);
        }
    }

    ReducedGraph run(std::istream& in) {
        std::size_t line_no = 0;
        std::string line;
        bool saw_header = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            auto tok = tokenize(line);
            if (tok.empty()) continue;
            if (!saw_header) {
                if (tok.size() != 2 || tok[0] != "h" || (tok[1] != "sorted" && tok[1] != "unsorted"))
                    throw ParseError(line_no, "expected stream header `h sorted` or `h unsorted`");
                stats_.sorted = tok[1] == "sorted";
                saw_header = true;
                continue;
            }
            if (tok[0] != "s" || tok.size() != 6)
                throw ParseError(line_no, "malformed record, expected `s <x> <xlabel> <y> <ylabel> <elabel>`");
            std::uint64_t x, y;
            try {
                x = std::stoull(tok[1]);
                y = std::stoull(tok[3]);
            } catch (const std::exception&) {
                throw ParseError(line_no, "malformed vertex id");
            }
            if (x == y)
                throw ParseError(line_no, "self-loop at vertex " + tok[1]);
            ++stats_.edges_read;
            if (stats_.sorted)
                sorted_record(line_no, x, tok[2], y, tok[4], tok[5]);
            else
                unsorted_record(line_no, x, tok[2], y, tok[4], tok[5]);
        }
        if (!saw_header)
            throw ParseError(line_no, "missing stream header");
        if (stats_.sorted)
            close_group(line_no);
        return finish(line_no);
    }

private:
    static std::vector<std::string> tokenize(const std::string& line) {
        return cni::detail::tokenize(line);
    }

    StreamVertex& touch(std::size_t line_no, std::uint64_t id, const std::string& label) {
        auto [it, fresh] = seen_.try_emplace(id);
        StreamVertex& v = it->second;
        if (fresh) {
            v.label = label;
            if (dict_.ord(label) == 0) {
                v.status = StreamStatus::Rejected;
                ++stats_.label_rejected;
            }
        } else if (v.label != label) {
            throw ParseError(line_no, "vertex " + std::to_string(id) +
                                          " relabeled from " + v.label + " to " + label);
        }
        return v;
    }

    void admit(StreamVertex& v) {
        if (v.status == StreamStatus::Pending) {
            v.status = StreamStatus::Admitted;
            ++stats_.vertices_admitted;
        }
    }

    void add_edge(std::uint64_t a, std::uint64_t b, const std::string& label) {
        edges_.push_back({a, b, label, false});
        incident_[a].push_back(edges_.size() - 1);
        incident_[b].push_back(edges_.size() - 1);
        ++live_edges_;
        stats_.peak_retained_edges = std::max(stats_.peak_retained_edges, live_edges_);
    }

    void sorted_record(std::size_t line_no, std::uint64_t x, const std::string& xlabel,
                       std::uint64_t y, const std::string& ylabel, const std::string& elabel) {
        if (!current_ || *current_ != x) {
            close_group(line_no);
            if (closed_.count(x))
                throw ParseError(line_no, "stream not sorted: source " + std::to_string(x) +
                                              " reappears after its group closed");
            current_ = x;
            group_neighbors_.clear();
            group_counts_.assign(dict_.k(), 0);
            StreamVertex& xv = touch(line_no, x, xlabel);
            if (xv.status != StreamStatus::Rejected)
                admit(xv);
        } else {
            touch(line_no, x, xlabel);
        }
        if (!group_neighbors_.insert(y).second)
            throw ParseError(line_no, "duplicate edge " + std::to_string(x) + " " +
                                          std::to_string(y) + " within one group");
        StreamVertex& yv = touch(line_no, y, ylabel);
        if (seen_.at(x).status == StreamStatus::Rejected)
            return;  // whole group rejected by the label filter
        if (yv.status == StreamStatus::Rejected)
            return;
        unsigned idx = dict_.ord(ylabel);
        ++group_counts_[idx - 1];
        if (yv.closed) {
            // second copy of {x,y}: retained (or deliberately removed) when
            // y's group was processed
            return;
        }
        admit(yv);
        add_edge(x, y, elabel);
    }

    void close_group(std::size_t line_no) {
        (void)line_no;
        if (!current_) return;
        StreamVertex& v = seen_.at(*current_);
        v.closed = true;
        closed_.insert(*current_);
        if (v.status == StreamStatus::Admitted) {
            VertexSignature sig;
            sig.label_index = dict_.ord(v.label);
            sig.counts = group_counts_;
            sig.degree_q =
                std::accumulate(group_counts_.begin(), group_counts_.end(), std::uint32_t{0});
            sig.cni = g_tuple(sig.counts);
            bool ok = false;
            auto it = query_by_label_.find(sig.label_index);
            if (it != query_by_label_.end())
                for (const auto& us : it->second)
                    if (cni_verify(sig, us)) { ok = true; break; }
            if (ok) {
                v.signature = std::move(sig);
            } else {
                v.status = StreamStatus::Dropped;
                ++stats_.vertices_dropped;
                drop_edges(*current_);
            }
        }
        current_.reset();
    }

    void drop_edges(std::uint64_t id) {
        auto it = incident_.find(id);
        if (it == incident_.end()) return;
        for (std::size_t ei : it->second) {
            if (!edges_[ei].removed) {
                edges_[ei].removed = true;
                --live_edges_;
            }
        }
    }

    void unsorted_record(std::size_t line_no, std::uint64_t x, const std::string& xlabel,
                         std::uint64_t y, const std::string& ylabel, const std::string& elabel) {
        StreamVertex& xv = touch(line_no, x, xlabel);
        StreamVertex& yv = touch(line_no, y, ylabel);
        admit(xv);
        admit(yv);
        if (xv.status != StreamStatus::Admitted || yv.status != StreamStatus::Admitted)
            return;
        const auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
        auto [it, fresh] = unsorted_edges_.try_emplace(key, elabel);
        if (!fresh) {
            if (it->second != elabel)
                throw ParseError(line_no, "edge " + std::to_string(x) + " " + std::to_string(y) +
                                              " seen with conflicting labels");
            return;  // second copy of the same edge
        }
        add_edge(key.first, key.second, elabel);
    }

    ReducedGraph finish(std::size_t line_no) {
        std::vector<std::uint64_t> retained;
        for (const auto& [id, v] : seen_) {
            if (stats_.sorted) {
                if (v.status == StreamStatus::Pending ||
                    (v.status == StreamStatus::Admitted && !v.closed))
                    throw ParseError(line_no, "adjacency group for vertex " + std::to_string(id) +
                                                  " is missing; each edge must appear under both "
                                                  "endpoints in sorted mode");
            }
            if (v.status == StreamStatus::Admitted) retained.push_back(id);
        }
        std::sort(retained.begin(), retained.end());

        ReducedGraph out;
        out.stats = stats_;
        out.original_ids = retained;
        out.graph = Graph(false, "stream_filtered");
        std::unordered_map<std::uint64_t, VertexId> new_id;
        for (std::uint64_t id : retained) {
            new_id[id] = out.graph.add_vertex(seen_.at(id).label);
            if (stats_.sorted)
                out.signatures.push_back(seen_.at(id).signature);
        }
        for (const auto& e : edges_) {
            if (e.removed) continue;
            auto a = new_id.find(e.a);
            auto b = new_id.find(e.b);
            if (a == new_id.end() || b == new_id.end()) continue;  // endpoint dropped
            out.graph.add_edge(a->second, b->second, e.label);
        }
        return out;
    }

    LabelDict dict_;
    std::unordered_map<unsigned, std::vector<VertexSignature>> query_by_label_;
    StreamStats stats_;
    std::unordered_map<std::uint64_t, StreamVertex> seen_;
    std::unordered_set<std::uint64_t> closed_;
    std::optional<std::uint64_t> current_;
    std::unordered_set<std::uint64_t> group_neighbors_;
    LabelCounts group_counts_;
    std::vector<StreamEdge> edges_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> incident_;
    std::uint64_t live_edges_ = 0;

    struct PairHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
            return std::hash<std::uint64_t>{}(p.first * 0x9e3779b97f4a7c15ull ^ p.second);
        }
    };
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::string, PairHash>
        unsorted_edges_;
};

}  // namespace detail

// Single-pass filtering of an edge stream against a query. Sorted streams
// (contiguous per-vertex groups, every undirected edge appearing under both
// endpoints) get the full label+degree+CNI treatment at each group close;
// unsorted streams fall back to the label filter and leave the rest to the
// in-memory fixpoint.
inline ReducedGraph stream_filter(std::istream& in, const Graph& q) {
    return detail::StreamEngine(q).run(in);
}

// Adjacency-list serialization: one contiguous group per vertex, each edge
// appearing once under either endpoint.
inline void write_sorted_stream(const Graph& g, std::ostream& out) {
    out << "h sorted\n";
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (const auto& e : g.neighbors(v))
            out << "s " << v << ' ' << g.vertex_label(v) << ' ' << e.to << ' '
                << g.vertex_label(e.to) << ' ' << e.label << '\n';
}

// Random-arrival serialization: each edge once, in seeded shuffled order.
inline void write_unsorted_stream(const Graph& g, std::ostream& out, std::uint64_t seed) {
    struct Rec { VertexId a, b; const std::string* label; };
    std::vector<Rec> recs;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (const auto& e : g.neighbors(v)) {
            if (e.to < v) continue;
            recs.push_back({v, e.to, &e.label});
        }
    std::mt19937_64 rng(seed);
    std::shuffle(recs.begin(), recs.end(), rng);
    out << "h unsorted\n";
    for (const auto& r : recs)
        out << "s " << r.a << ' ' << g.vertex_label(r.a) << ' ' << r.b << ' '
            << g.vertex_label(r.b) << ' ' << *r.label << '\n';
}

}  // namespace cni
