#include <algorithm>

#include "cwdist/kexpr.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cwdist;

namespace {

Vertex id_of(const Graph& g, const char* name) {
    const auto v = g.find(name);
    REQUIRE(v.has_value());
    return *v;
}

// Induced P4 search by brute force over ordered quadruples.
bool has_induced_p4(const Graph& g) {
    const Vertex n = static_cast<Vertex>(g.vertex_count());
    for (Vertex a = 0; a < n; ++a) {
        for (Vertex b = 0; b < n; ++b) {
            if (b == a || !g.has_edge(a, b)) {
                continue;
            }
            for (Vertex c = 0; c < n; ++c) {
                if (c == a || c == b || !g.has_edge(b, c) || g.has_edge(a, c)) {
                    continue;
                }
                for (Vertex d = 0; d < n; ++d) {
                    if (d == a || d == b || d == c) {
                        continue;
                    }
                    if (g.has_edge(c, d) && !g.has_edge(a, d) && !g.has_edge(b, d)) {
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

// Every operation of the text form opens exactly one parenthesis.
std::size_t count_nodes(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '('));
}

bool same_tree(const KExpression& x, std::uint32_t i, const KExpression& y, std::uint32_t j) {
    const KNode& a = x.nodes()[i];
    const KNode& b = y.nodes()[j];
    if (a.kind != b.kind || a.first != b.first || a.second != b.second || a.name != b.name) {
        return false;
    }
    switch (a.kind) {
        case OpKind::kVertex:
            return true;
        case OpKind::kUnion:
            return same_tree(x, a.left, y, b.left) && same_tree(x, a.right, y, b.right);
        default:
            return same_tree(x, a.left, y, b.left);
    }
}

}  // namespace

TEST_CASE("parse the four-vertex path") {
    const KExpression e = parse_kexpression(testing::kP4);
    CHECK(e.width() == 3);
    CHECK(e.vertex_count() == 4);
    CHECK(expression_size(e) == count_nodes(testing::kP4));
    CHECK(expression_size(e) == 12);

    const Graph g = evaluate(e).graph;
    CHECK(g.edge_count() == 3);
    const Vertex a = id_of(g, "a"), b = id_of(g, "b"), c = id_of(g, "c"), d = id_of(g, "d");
    CHECK(g.has_edge(a, b));
    CHECK(g.has_edge(b, c));
    CHECK(g.has_edge(c, d));
    CHECK(d == 0);
    CHECK(a == 1);
}

TEST_CASE("single vertex") {
    const KExpression e = parse_kexpression("(v 1 a)");
    CHECK(e.width() == 1);
    CHECK(expression_size(e) == 1);
    const LabeledGraph lg = evaluate(e);
    CHECK(lg.graph.vertex_count() == 1);
    CHECK(lg.labels == std::vector<int>{1});
}

TEST_CASE("star") {
    const KExpression e = parse_kexpression(testing::kStar);
    CHECK(expression_size(e) == count_nodes(testing::kStar));
    CHECK(expression_size(e) == 8);
    const Graph g = evaluate(e).graph;
    const Vertex c = id_of(g, "c");
    CHECK(g.degree(c) == 3);
    CHECK(g.edge_count() == 3);
}

TEST_CASE("five-cycle expression") {
    const KExpression e = parse_kexpression(testing::kC5);
    CHECK(e.width() == 3);
    const Graph g = evaluate(e).graph;
    CHECK(g.edge_count() == 5);
    const char* order[] = {"a", "b", "c", "d", "e"};
    for (int i = 0; i < 5; ++i) {
        CHECK(g.has_edge(id_of(g, order[i]), id_of(g, order[(i + 1) % 5])));
    }
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(parse_kexpression("(j 1 1 (v 1 a))"), KExpressionError);
    CHECK_THROWS_AS(parse_kexpression("(u (v 1 a) (v 2 a))"), KExpressionError);
    CHECK_THROWS_AS(parse_kexpression("(v 0 a)"), KExpressionError);
    CHECK_THROWS_AS(parse_kexpression("(r 2 1 (v 1 a))"), KExpressionError);
    CHECK_THROWS_AS(parse_kexpression("(u (v 1 a))"), KExpressionError);
    CHECK_THROWS_AS(parse_kexpression(testing::kP4, 2), KExpressionError);
    // joins with an empty class are allowed
    CHECK_NOTHROW(parse_kexpression("(j 1 2 (v 1 a))"));
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_kexpression("(u (v 1 a)\n  (x 1 b))");
        FAIL("expected an error");
    } catch (const KExpressionError& err) {
        CHECK(err.line() == 2);
        CHECK(err.column() > 0);
    }
}

TEST_CASE("comments and whitespace") {
    const KExpression e = parse_kexpression("; path\n(j 1 2\n  (u (v 1 a) ; left\n     (v 2 b)))\n");
    CHECK(evaluate(e).graph.edge_count() == 1);
}

TEST_CASE("print then parse gives the same tree") {
    for (const std::string& text : {testing::kP4, testing::kStar, testing::kC5}) {
        const KExpression e = parse_kexpression(text);
        CHECK(to_string(parse_kexpression(to_string(e))) == to_string(e));
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const KExpression e = random_kexpression(1 + seed % 30, 2 + static_cast<int>(seed % 5), seed, seed % 2 == 0);
        const KExpression back = parse_kexpression(to_string(e));
        CHECK(same_tree(e, e.root(), back, back.root()));
    }
}

TEST_CASE("builder") {
    KExpressionBuilder b;
    const auto x = b.vertex(1, "x");
    const auto y = b.vertex(2, "y");
    b.join(1, 2, b.unite(x, y));
    const KExpression e = std::move(b).build();
    CHECK(evaluate(e).graph.edge_count() == 1);
}

TEST_CASE("random expressions") {
    const KExpression one = random_kexpression(1, 1, 0);
    CHECK(to_string(one) == "(v 1 v0)");
    CHECK_THROWS_AS(random_kexpression(2, 1, 0, true), std::invalid_argument);

    const KExpression e = random_kexpression(50, 4, 7);
    CHECK(e.width() <= 4);
    const KExpression again = parse_kexpression(to_string(e), 4);
    const Graph g = evaluate(again).graph;
    CHECK(g.vertex_count() == 50);
    CHECK(is_connected(g));
    CHECK(to_string(random_kexpression(50, 4, 7)) == to_string(e));

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 1 + seed % 60;
        const int k = 2 + static_cast<int>(seed % 5);
        const KExpression r = random_kexpression(n, k, seed, seed % 3 != 0);
        CHECK(r.width() <= k);
        const Graph rg = evaluate(r).graph;
        CHECK(rg.vertex_count() == n);
        if (seed % 3 != 0) {
            CHECK(is_connected(rg));
        }
        for (Vertex v = 0; v < n; ++v) {
            CHECK(rg.name(v) == "v" + std::to_string(v));
        }
    }
}

TEST_CASE("width two expressions give cographs") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const std::size_t n = 1 + seed % 32;
        const KExpression e = random_kexpression(n, 2, seed, seed % 2 == 0);
        REQUIRE(e.width() <= 2);
        CHECK_FALSE(has_induced_p4(evaluate(e).graph));
    }
    CHECK(has_induced_p4(evaluate(parse_kexpression(testing::kP4)).graph));
}
