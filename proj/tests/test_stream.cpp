#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "cnimatch/filter.hpp"
#include "cnimatch/stream.hpp"
#include "support/testutil.hpp"

using namespace cni;

namespace {

Graph two_b_star_query() {
    Graph q(false);
    q.add_vertex("a");
    q.add_vertex("b");
    q.add_vertex("b");
    q.add_edge(0, 1);
    q.add_edge(0, 2);
    return q;
}

// original-id survivor set of the streamed pipeline (stream filter + ilgf)
std::set<std::uint64_t> streamed_survivors(const Graph& g, const Graph& q, bool sorted,
                                           std::uint64_t seed = 0) {
    std::ostringstream out;
    if (sorted)
        write_sorted_stream(g, out);
    else
        write_unsorted_stream(g, out, seed);
    std::istringstream in(out.str());
    ReducedGraph rg = stream_filter(in, q);
    FilterResult fr = ilgf_filter(rg.graph, q);
    std::set<std::uint64_t> got;
    for (VertexId v : fr.state.alive_vertices()) got.insert(rg.original_ids[v]);
    return got;
}

std::set<std::uint64_t> inmemory_survivors(const Graph& g, const Graph& q) {
    FilterResult fr = ilgf_filter(g, q);
    std::set<std::uint64_t> got;
    for (VertexId v : fr.state.alive_vertices()) got.insert(v);
    return got;
}

}  // namespace

TEST_CASE("empty stream produces an empty reduced graph") {
    std::istringstream in("h sorted\n");
    ReducedGraph rg = stream_filter(in, two_b_star_query());
    CHECK(rg.graph.vertex_count() == 0);
    CHECK(rg.stats.edges_read == 0);
    CHECK(rg.stats.vertices_admitted == 0);
    CHECK(rg.stats.vertices_dropped == 0);
    CHECK(rg.stats.label_rejected == 0);
    CHECK(rg.stats.peak_retained_edges == 0);
    CHECK_FALSE(rg.stats.degraded());
}

TEST_CASE("streams whose labels never match give nothing back") {
    std::istringstream in(
        "h sorted\n"
        "s 0 x 1 y _\n"
        "s 1 y 0 x _\n");
    ReducedGraph rg = stream_filter(in, two_b_star_query());
    CHECK(rg.graph.vertex_count() == 0);
    CHECK(rg.stats.label_rejected == 2);
    CHECK(rg.stats.vertices_admitted == 0);
}

TEST_CASE("a vertex failing at group close is dropped with its edges") {
    // v0:a has a single b neighbor; the query hub needs two
    std::istringstream in(
        "h sorted\n"
        "s 0 a 1 b _\n"
        "s 1 b 0 a _\n");
    ReducedGraph rg = stream_filter(in, two_b_star_query());
    CHECK(rg.stats.vertices_admitted == 2);
    CHECK(rg.stats.vertices_dropped == 1);
    CHECK(rg.stats.peak_retained_edges == 1);
    REQUIRE(rg.original_ids == std::vector<std::uint64_t>{1});
    CHECK(rg.graph.edge_count() == 0);  // the edge died with vertex 0
    REQUIRE(rg.signatures.size() == 1);
    CHECK(rg.signatures[0].degree_q == 1);  // full neighborhood at close, dropped or not
    CHECK(rg.signatures[0].cni == 2);
}

TEST_CASE("group-close drops match the first fixpoint iteration") {
    std::mt19937_64 rng(89);
    for (int t = 0; t < 20; ++t) {
        Graph g = testutil::random_graph(rng, 30, 60, {"a", "b", "c", "z"});
        Graph q = testutil::random_query(rng, 3, {"a", "b", "c"});
        std::ostringstream out;
        write_sorted_stream(g, out);
        std::istringstream in(out.str());
        ReducedGraph rg = stream_filter(in, q);
        // nothing the fixpoint would keep may be dropped by the stream
        std::set<std::uint64_t> retained(rg.original_ids.begin(), rg.original_ids.end());
        const auto reference = testutil::reference_fixpoint_alive(g, q);
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (reference[v]) CHECK(retained.count(v) == 1);
    }
}

TEST_CASE("sorted streaming pipeline equals the in-memory pipeline") {
    std::mt19937_64 rng(97);
    for (int t = 0; t < 25; ++t) {
        Graph g = testutil::random_graph(rng, 60, 140, {"a", "b", "c", "z"});
        Graph q = testutil::random_query(rng, 3, {"a", "b", "c"});
        CHECK(streamed_survivors(g, q, true) == inmemory_survivors(g, q));
    }
}

TEST_CASE("surviving edges also agree between the two pipelines") {
    std::mt19937_64 rng(101);
    Graph g = testutil::random_graph(rng, 40, 90, {"a", "b", "z"});
    Graph q = testutil::random_query(rng, 3, {"a", "b"});

    std::ostringstream out;
    write_sorted_stream(g, out);
    std::istringstream in(out.str());
    ReducedGraph rg = stream_filter(in, q);
    FilterResult sf = ilgf_filter(rg.graph, q);
    std::set<std::pair<std::uint64_t, std::uint64_t>> stream_edges;
    for (VertexId v : sf.state.alive_vertices())
        for (const auto& e : rg.graph.neighbors(v)) {
            if (!sf.state.alive[e.to]) continue;
            auto a = rg.original_ids[v], b = rg.original_ids[e.to];
            stream_edges.insert({std::min(a, b), std::max(a, b)});
        }

    FilterResult mf = ilgf_filter(g, q);
    std::set<std::pair<std::uint64_t, std::uint64_t>> mem_edges;
    for (VertexId v : mf.state.alive_vertices())
        for (const auto& e : g.neighbors(v)) {
            if (!mf.state.alive[e.to]) continue;
            mem_edges.insert({std::min<std::uint64_t>(v, e.to), std::max<std::uint64_t>(v, e.to)});
        }
    CHECK(stream_edges == mem_edges);
}

TEST_CASE("unsorted streams degrade to the label filter but converge after ilgf") {
    std::mt19937_64 rng(103);
    for (int t = 0; t < 15; ++t) {
        Graph g = testutil::random_graph(rng, 50, 110, {"a", "b", "c", "z"});
        Graph q = testutil::random_query(rng, 3, {"a", "b", "c"});
        std::ostringstream out;
        write_unsorted_stream(g, out, 1000 + t);
        std::istringstream in(out.str());
        ReducedGraph rg = stream_filter(in, q);
        CHECK(rg.stats.degraded());
        CHECK(rg.stats.vertices_dropped == 0);  // degree/CNI deferred to ilgf
        FilterResult fr = ilgf_filter(rg.graph, q);
        std::set<std::uint64_t> got;
        for (VertexId v : fr.state.alive_vertices()) got.insert(rg.original_ids[v]);
        CHECK(got == inmemory_survivors(g, q));
    }
}

TEST_CASE("stream counting stays consistent") {
    std::mt19937_64 rng(107);
    Graph g = testutil::random_graph(rng, 120, 500, {"a", "b", "z", "w"});
    Graph q = testutil::random_query(rng, 3, {"a", "b"});
    std::ostringstream out;
    write_sorted_stream(g, out);
    std::istringstream in(out.str());
    ReducedGraph rg = stream_filter(in, q);

    CHECK(rg.stats.edges_read == 2 * g.edge_count());  // both copies of every edge
    std::size_t touched = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) > 0) ++touched;
    CHECK(rg.stats.vertices_admitted + rg.stats.label_rejected == touched);
    CHECK(rg.stats.vertices_admitted - rg.stats.vertices_dropped == rg.graph.vertex_count());
    // nothing beyond both-query-labeled edges is ever held
    std::size_t query_edges = 0;
    const LabelDict dict = build_label_dict(q);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (const auto& e : g.neighbors(v))
            if (e.to > v && dict.ord(g.vertex_label(v)) > 0 && dict.ord(g.vertex_label(e.to)) > 0)
                ++query_edges;
    CHECK(rg.stats.peak_retained_edges <= query_edges);
}

TEST_CASE("stream format errors") {
    Graph q = two_b_star_query();
    auto expect_error = [&](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(stream_filter(in, q), ParseError);
    };
    expect_error("s 0 a 1 b _\n");                               // missing header
    expect_error("h maybe\n");                                   // bad header
    expect_error("h sorted\ns 0 a 1\n");                         // truncated record
    expect_error("h sorted\ns 0 a 0 a _\n");                     // self-loop
    expect_error("h sorted\ns 0 a 1 b _\ns 0 a 1 b _\n");        // duplicate in group
    expect_error(
        "h sorted\n"
        "s 0 a 1 b _\n"
        "s 1 b 0 a _\n"
        "s 0 a 2 b _\n");  // source reappears after its group closed
    expect_error(
        "h sorted\n"
        "s 0 a 1 b _\n"
        "s 2 b 0 a _\n");  // vertex 1 admitted but its group never arrives
    expect_error(
        "h sorted\n"
        "s 0 a 1 b _\n"
        "s 1 c 0 a _\n");  // vertex 1 relabeled mid-stream
}

TEST_CASE("stream vertex ids beyond 32 bits survive the round trip") {
    const std::uint64_t big = 0x1'0000'0007ull;
    std::ostringstream text;
    text << "h sorted\n"
         << "s " << big << " a " << big + 1 << " b _\n"
         << "s " << big << " a " << big + 2 << " b _\n"
         << "s " << big + 1 << " b " << big << " a _\n"
         << "s " << big + 1 << " b " << big + 2 << " b _\n"
         << "s " << big + 2 << " b " << big << " a _\n"
         << "s " << big + 2 << " b " << big + 1 << " b _\n";
    std::istringstream in(text.str());
    ReducedGraph rg = stream_filter(in, two_b_star_query());
    REQUIRE(rg.graph.vertex_count() == 3);
    CHECK(rg.original_ids == std::vector<std::uint64_t>{big, big + 1, big + 2});
    FilterResult fr = ilgf_filter(rg.graph, two_b_star_query());
    CHECK(fr.candidates.viable);
}

TEST_CASE("unsorted mode accepts interleaved sources and single copies") {
    std::istringstream in(
        "h unsorted\n"
        "s 0 a 1 b _\n"
        "s 2 b 0 a _\n"
        "s 1 b 2 b _\n");
    ReducedGraph rg = stream_filter(in, two_b_star_query());
    CHECK(rg.graph.vertex_count() == 3);
    CHECK(rg.graph.edge_count() == 3);
    CHECK(rg.stats.degraded());
}
