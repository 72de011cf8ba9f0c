#include <sstream>

#include "cwdist/graph.hpp"
#include "cwdist/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cwdist;

TEST_CASE("sssp on small graphs") {
    const Graph p4 = testing::path_graph(4);
    CHECK(sssp(p4, 0) == DistanceVector{0, 1, 2, 3});
    CHECK(sssp(Graph(1), 0) == DistanceVector{0});

    const Graph two = testing::graph_from_edges(3, {{0, 1}});
    CHECK(sssp(two, 0)[2] == kInfinity);
}

TEST_CASE("sssp with zero weights") {
    Graph g(4);
    g.add_edge(0, 1, 0);
    g.add_edge(1, 2, 0);
    g.add_edge(0, 3, 5);
    g.add_edge(2, 3, 1);
    CHECK_FALSE(g.unit_weights());
    CHECK(sssp(g, 0) == DistanceVector{0, 0, 0, 1});
}

TEST_CASE("multi source distances") {
    const Graph p4 = testing::path_graph(4);
    const VertexSet ends{0, 3};
    CHECK(multi_source_dist(p4, ends) == DistanceVector{0, 1, 1, 0});
    const VertexSet b{1};
    CHECK(multi_source_dist(p4, b) == DistanceVector{1, 0, 1, 2});
    CHECK(multi_source_dist(p4, {}) == DistanceVector(4, kInfinity));
}

TEST_CASE("multi source equals min over single sources") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = testing::uniform(rng, 1, 40);
        const Graph g = testing::random_graph(rng, n, 0.1, round % 2 ? 4 : 1);
        VertexSet s;
        for (Vertex v = 0; v < n; ++v) {
            if (testing::uniform(rng, 0, 3) == 0) {
                s.push_back(v);
            }
        }
        const DistanceVector got = multi_source_dist(g, s);
        DistanceVector want(n, kInfinity);
        for (Vertex x : s) {
            const DistanceVector row = sssp(g, x);
            for (Vertex v = 0; v < n; ++v) {
                want[v] = std::min(want[v], row[v]);
            }
        }
        CHECK(got == want);
    }
}

TEST_CASE("sssp matches Floyd-Warshall") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 80; ++round) {
        const std::size_t n = testing::uniform(rng, 1, 64);
        const Graph g = testing::random_graph(rng, n, 0.08, round % 3 == 0 ? 1 : 6);
        const DistanceMatrix fw = oracle::floyd_warshall(g);
        for (Vertex s = 0; s < n; ++s) {
            const DistanceVector row = sssp(g, s);
            REQUIRE(std::equal(row.begin(), row.end(), fw.row(s).begin()));
        }
    }
}

TEST_CASE("saturating addition") {
    CHECK(add_dist(kInfinity, 3) == kInfinity);
    CHECK(add_dist(3, kInfinity) == kInfinity);
    CHECK(add_dist(kInfinity - 1, 5) == kInfinity);
    CHECK(add_dist(2, 3) == 5);
}

TEST_CASE("induced subgraph") {
    Graph p4 = testing::path_graph(4);
    p4.set_names({"a", "b", "c", "d"});

    const VertexSet ab{0, 1};
    InducedSubgraph s = induced_subgraph(p4, ab);
    CHECK(s.graph.vertex_count() == 2);
    CHECK(s.graph.edge_count() == 1);
    CHECK(s.graph.name(1) == "b");
    CHECK(s.from_parent[2] == kNoVertex);

    const VertexSet ac{0, 2};
    CHECK(induced_subgraph(p4, ac).graph.edge_count() == 0);

    const VertexSet all{3, 2, 1, 0};
    s = induced_subgraph(p4, all);
    CHECK(s.graph.edge_count() == 3);
    CHECK(s.to_parent[0] == 3);
    CHECK(s.graph.has_edge(0, 1));
    CHECK(s.graph.name(0) == "d");
}

TEST_CASE("connectivity") {
    CHECK(is_connected(testing::path_graph(4)));
    CHECK_FALSE(is_connected(Graph(2)));
    CHECK(is_connected(Graph(1)));
}

TEST_CASE("edge list round trip") {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2, 7);
    g.set_names({"x", "y", "z"});
    std::stringstream buf;
    write_edge_list(buf, g);
    const Graph back = read_edge_list(buf);
    CHECK(back.vertex_count() == 3);
    CHECK(back.edge_count() == 2);
    CHECK(back.has_edge(1, 2));
    CHECK(back.name(2) == "z");
    CHECK(oracle::brute_apsp(back) == oracle::brute_apsp(g));
}

TEST_CASE("edge list errors") {
    std::istringstream missing_header("e 0 1\n");
    CHECK_THROWS_AS(read_edge_list(missing_header), GraphFormatError);
    std::istringstream out_of_range("p 2 1\ne 0 5\n");
    CHECK_THROWS_AS(read_edge_list(out_of_range), GraphFormatError);
    std::istringstream count("p 2 2\ne 0 1\n");
    CHECK_THROWS_AS(read_edge_list(count), GraphFormatError);
}
