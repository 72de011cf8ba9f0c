#ifndef CWDIST_TESTS_SUPPORT_HPP
#define CWDIST_TESTS_SUPPORT_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cwdist/graph.hpp"

namespace testing {

// Vertices a, b, c, d get ids 1, 2, 3, 0: ids follow the leaf order of the expression.
inline const std::string kP4 =
    "(j 1 2 (u (v 2 d) (r 2 3 (j 1 2 (u (r 1 3 (j 1 2 (u (v 1 a) (v 2 b)))) (v 1 c))))))";
inline const std::string kStar = "(j 1 2 (u (u (v 2 x) (v 2 y)) (u (v 2 z) (v 1 c))))";
// 5-cycle a-b-c-d-e-a
inline const std::string kC5 =
    "(j 1 2 (u (r 2 3 (r 3 1 (r 1 2 (r 2 3 (r 3 1 (j 1 3 (u (r 3 1 (r 1 2 (r 2 3 (r 3 1 (j 2 3 "
    "(u (v 3 a) (v 2 e))))))) (r 1 2 (r 2 3 (r 3 1 (j 2 3 (u (v 3 c) (v 2 d))))))))))))) (v 2 b)))";
inline const std::string kTwoK2 = "(u (j 1 2 (u (v 1 a) (v 2 b))) (j 1 2 (u (v 1 c) (v 2 d))))";

inline cwdist::Graph graph_from_edges(std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
    cwdist::Graph g(n);
    for (auto [u, v] : edges) {
        g.add_edge(static_cast<cwdist::Vertex>(u), static_cast<cwdist::Vertex>(v));
    }
    return g;
}

inline cwdist::Graph path_graph(std::size_t n) {
    cwdist::Graph g(n);
    for (cwdist::Vertex v = 1; v < n; ++v) {
        g.add_edge(v - 1, v);
    }
    return g;
}

// Erdos-Renyi style, optional random weights in [0, max_weight].
inline cwdist::Graph random_graph(std::mt19937_64& rng, std::size_t n, double p, cwdist::Weight max_weight = 1) {
    cwdist::Graph g(n);
    std::bernoulli_distribution coin(p);
    std::uniform_int_distribution<cwdist::Weight> weight(max_weight == 1 ? 1 : 0, max_weight);
    for (cwdist::Vertex u = 0; u < n; ++u) {
        for (cwdist::Vertex v = u + 1; v < n; ++v) {
            if (coin(rng)) {
                g.add_edge(u, v, weight(rng));
            }
        }
    }
    return g;
}

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace testing

#endif
