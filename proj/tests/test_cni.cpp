#include <catch2/catch_amalgamated.hpp>

#include "cnimatch/cni.hpp"
#include "support/testutil.hpp"

using namespace cni;

TEST_CASE("worked query CNIs") {
    Graph q = testutil::worked_query();
    LabelDict d = build_label_dict(q);
    CHECK(vertex_cni(q, 0, d) == 12);
    CHECK(vertex_cni(q, 1, d) == 13);
    CHECK(vertex_cni(q, 2, d) == 49);
    CHECK(vertex_cni(q, 3, d) == 3);
    CHECK(vertex_cni(q, 4, d) == 3);
}

TEST_CASE("isolated and non-query-neighborhood vertices encode to zero") {
    Graph g(false);
    g.add_vertex("a");   // 0: isolated
    g.add_vertex("a");   // 1: only non-query neighbors
    g.add_vertex("zz");  // 2
    g.add_edge(1, 2);
    LabelDict d({"a", "b"});
    CHECK(vertex_cni(g, 0, d) == 0);
    CHECK(vertex_cni(g, 1, d) == 0);
}

TEST_CASE("edge-labeled combined CNI") {
    // hub with two b neighbors reached through edges labeled b and d;
    // vertices and edges share the label set {a,b,c,d}
    Graph g(false);
    g.add_vertex("a");
    g.add_vertex("b");
    g.add_vertex("b");
    g.add_edge(0, 1, "b");
    g.add_edge(0, 2, "d");
    LabelDict dict({"a", "b", "c", "d"});
    CHECK(g_tuple(neighbor_label_counts(g, 0, dict)) == 12);
    CHECK(g_tuple(incident_edge_label_counts(g, 0, dict, dict)) == 7);
    CHECK(edge_labeled_cni(g, 0, dict, dict) == 202);
}

TEST_CASE("edge-labeled CNI of an isolated vertex is zero") {
    Graph g(false);
    g.add_vertex("a");
    LabelDict dict({"a"});
    CHECK(edge_labeled_cni(g, 0, dict, dict) == 0);
}

TEST_CASE("edge-labeled CNI with separate dictionaries") {
    Graph g(false);
    g.add_vertex("x");
    g.add_vertex("y");
    g.add_edge(0, 1, "r");
    LabelDict vdict({"x", "y"});
    LabelDict edict({"r"});
    // cni_v = g_2(0,1) = 1, cni_e = g_1(1) = 1, combined g_2(1,1) = 1 + C(3,2) = 4
    CHECK(edge_labeled_cni(g, 0, vdict, edict) == 4);
}

TEST_CASE("edges to non-query-labeled endpoints vanish with the endpoint") {
    Graph g(false);
    g.add_vertex("x");
    g.add_vertex("y");
    g.add_vertex("zzz");  // outside the vertex dict
    g.add_edge(0, 1, "r");
    g.add_edge(0, 2, "r");  // must not be counted: its endpoint is filtered
    LabelDict vdict({"x", "y"});
    LabelDict edict({"r"});
    CHECK(incident_edge_label_counts(g, 0, vdict, edict) == LabelCounts{1});
    CHECK(edge_labeled_cni(g, 0, vdict, edict) == 4);  // same as without vertex 2
}

TEST_CASE("directed combined CNI") {
    // one ingoing arc labeled d, one outgoing arc labeled b, both neighbors b
    Graph g(true);
    g.add_vertex("a");
    g.add_vertex("b");
    g.add_vertex("b");
    g.add_edge(1, 0, "d");  // in
    g.add_edge(0, 2, "b");  // out
    LabelDict dict({"a", "b", "c", "d"});
    CHECK(g_tuple(in_edge_label_counts(g, 0, dict, dict)) == 1);
    CHECK(g_tuple(out_edge_label_counts(g, 0, dict, dict)) == 3);
    CHECK(directed_cni(g, 0, dict, dict) == 919);
}

TEST_CASE("directed CNI edge cases") {
    Graph g(true);
    g.add_vertex("a");
    g.add_vertex("b");
    g.add_edge(0, 1, "e1");  // only outgoing
    LabelDict vdict({"a", "b"});
    LabelDict edict({"e1"});
    // cni_v = g_2(0,1) = 1, cni_in = 0, cni_out = g_1(1) = 1
    // g_3(1,0,1): h(1,1)+h(2,1)+h(3,2) = 1+1+4 = 6
    CHECK(directed_cni(g, 0, vdict, edict) == 6);

    Graph iso(true);
    iso.add_vertex("a");
    CHECK(directed_cni(iso, 0, vdict, edict) == 0);

    Graph und(false);
    und.add_vertex("a");
    CHECK_THROWS_AS(directed_cni(und, 0, vdict, edict), std::invalid_argument);
}

TEST_CASE("ball CNI at radius two on the worked query") {
    Graph q = testutil::worked_query();
    LabelDict d = build_label_dict(q);
    CHECK(ball_cni(q, 0, d, 2) == 48);
}

TEST_CASE("ball at radius one equals the one-hop CNI") {
    Graph q = testutil::worked_query();
    LabelDict d = build_label_dict(q);
    for (VertexId v = 0; v < q.vertex_count(); ++v)
        CHECK(ball_cni(q, v, d, 1) == vertex_cni(q, v, d));
}

TEST_CASE("ball on a path counts both hops") {
    Graph g(false);
    g.add_vertex("a");
    g.add_vertex("b");
    g.add_vertex("c");
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    LabelDict d({"a", "b", "c"});
    // ball of radius 2 around `a` holds b and c: g_3(0,1,1) = 0+1+4 = 5
    CHECK(ball_cni(g, 0, d, 2) == 5);
}

TEST_CASE("layered CNI layers, balls and degrees") {
    Graph q = testutil::worked_query();
    LabelDict d = build_label_dict(q);
    LayeredCni lc = layered_cni(q, 0, d, 2);
    REQUIRE(lc.depth() == 2);
    CHECK(lc.layers[0] == vertex_cni(q, 0, d));  // layer 1 is the one-hop CNI
    CHECK(lc.layers[1] == 6);                    // vertices u4, u5: g_4(0,0,1,1)
    CHECK(lc.layer_degrees[0] == 2);
    CHECK(lc.layer_degrees[1] == 2);
    // cumulative balls line up with ball_cni at every radius
    CHECK(lc.balls[0] == lc.layers[0]);
    CHECK(lc.balls[1] == ball_cni(q, 0, d, 2));
    CHECK(lc.balls[1] == 48);
    CHECK(lc.ball_degrees[1] == 4);
}

TEST_CASE("combined layered value on a two-layer path") {
    Graph g(false);
    g.add_vertex("a");
    g.add_vertex("b");
    g.add_vertex("c");
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    LabelDict d({"a", "b", "c"});
    LayeredCni lc = layered_cni(g, 0, d, 2);
    CHECK(lc.layers[0] == 2);  // g_3(0,1,0)
    CHECK(lc.layers[1] == 1);  // g_3(0,0,1)
    CHECK(combined_layered_value(lc) == 8);  // g_2(2,1) = 2 + C(4,2)
}

TEST_CASE("non-query labels neither appear in layers nor relay paths") {
    // a - z - c : with z outside the query labels, c is unreachable
    Graph g(false);
    g.add_vertex("a");
    g.add_vertex("z");
    g.add_vertex("c");
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    LabelDict d({"a", "c"});
    CHECK(ball_cni(g, 0, d, 2) == 0);
    LayeredCni lc = layered_cni(g, 0, d, 2);
    CHECK(lc.layer_degrees[0] == 0);
    CHECK(lc.layer_degrees[1] == 0);
}

TEST_CASE("ball CNI depends only on the radius-q ball") {
    // two graphs identical within distance 2 of vertex 0, different beyond
    auto build = [](bool long_tail) {
        Graph g(false);
        g.add_vertex("a");
        g.add_vertex("b");
        g.add_vertex("c");
        g.add_vertex("d");
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 3);  // distance 3 from vertex 0
        if (long_tail) {
            g.add_vertex("d");
            g.add_edge(3, 4);
        }
        return g;
    };
    LabelDict d({"a", "b", "c", "d"});
    CHECK(ball_cni(build(false), 0, d, 2) == ball_cni(build(true), 0, d, 2));
}

TEST_CASE("packeted CNI") {
    LabelCounts counts{0, 2, 0, 0};
    PacketedCni p = packeted_cni(counts, 2);
    REQUIRE(p.packets.size() == 2);
    CHECK(p.packets[0] == 3);
    CHECK(p.packets[1] == 0);
    CHECK(p.packet_degrees[0] == 2);
    CHECK(p.packet_degrees[1] == 0);

    // s = k degenerates to the plain tuple encoding
    PacketedCni whole = packeted_cni(counts, 4);
    REQUIRE(whole.packets.size() == 1);
    CHECK(whole.packets[0] == g_tuple(counts));

    // s = 1 gives back the raw counts
    PacketedCni unit = packeted_cni(counts, 1);
    REQUIRE(unit.packets.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) CHECK(unit.packets[j] == counts[j]);

    CHECK_THROWS_AS(packeted_cni(counts, 0), std::invalid_argument);
    CHECK_THROWS_AS(packeted_cni(counts, 5), std::invalid_argument);
}

TEST_CASE("uneven packet split covers the tail") {
    LabelCounts counts{1, 0, 2, 1, 3};
    PacketedCni p = packeted_cni(counts, 2);
    REQUIRE(p.packets.size() == 3);
    CHECK(p.packets[2] == 3);  // final packet is the single trailing count
    CHECK(p.packet_degrees[2] == 3);
}
