#include <algorithm>
#include <map>
#include <set>

#include "cwdist/kexpr.hpp"
#include "cwdist/partition_tree.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cwdist;

namespace {

struct Instance {
    Graph graph;
    PartitionTree tree;
};

Instance from_text(const std::string& text) {
    const KExpression e = parse_kexpression(text);
    return {evaluate(e).graph, build_partition_tree(e)};
}

Instance random_instance(std::uint64_t seed, std::size_t n, int k, bool connected = true) {
    const KExpression e = random_kexpression(n, k, seed, connected);
    return {evaluate(e).graph, build_partition_tree(e)};
}

using Blocks = std::set<VertexSet>;

Blocks as_set(const std::vector<VertexSet>& blocks) {
    return {blocks.begin(), blocks.end()};
}

std::uint64_t subtree_leaves(const PartitionTree& t, NodeId a) {
    std::uint64_t count = 0;
    for (NodeId x = a; x < t.subtree_end(a); ++x) {
        count += t.is_leaf(x) ? 1 : 0;
    }
    return count;
}

// Weights of the components of T \ {c}: the children subtrees and the part above c.
std::vector<std::uint64_t> component_weights(const PartitionTree& t, NodeId c) {
    const std::uint64_t total = subtree_leaves(t, t.root());
    std::vector<std::uint64_t> out;
    for (NodeId ch : t.node(c).children) {
        out.push_back(subtree_leaves(t, ch));
    }
    if (c != t.root()) {
        out.push_back(total - subtree_leaves(t, c));
    }
    return out;
}

bool is_centroid(const PartitionTree& t, NodeId c) {
    const std::uint64_t total = subtree_leaves(t, t.root());
    for (std::uint64_t w : component_weights(t, c)) {
        if (2 * w > total) {
            return false;
        }
    }
    return true;
}

std::set<Vertex> outside_neighbors(const Graph& g, Vertex v, const std::vector<char>& in_a) {
    std::set<Vertex> out;
    for (const Arc& arc : g.neighbors(v)) {
        if (!in_a[arc.to]) {
            out.insert(arc.to);
        }
    }
    return out;
}

// Every block has a uniform neighbourhood outside A.
bool is_module_partition(const Graph& g, const std::vector<VertexSet>& blocks) {
    std::vector<char> in_a(g.vertex_count(), 0);
    for (const VertexSet& b : blocks) {
        for (Vertex v : b) {
            in_a[v] = 1;
        }
    }
    for (const VertexSet& b : blocks) {
        for (Vertex v : b) {
            if (outside_neighbors(g, v, in_a) != outside_neighbors(g, b.front(), in_a)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("path tree blocks") {
    // ids: d=0 a=1 b=2 c=3
    const auto [g, t] = from_text(testing::kP4);
    REQUIRE(t.node_count() == 7);
    CHECK(t.width() == 3);
    CHECK(as_set(t.partition_of(t.root())) == Blocks{{3}, {0}, {1, 2}});
    REQUIRE(t.node(t.root()).children.size() == 2);
    const NodeId leaf_d = t.node(t.root()).children[0];
    const NodeId middle = t.node(t.root()).children[1];
    CHECK(as_set(t.partition_of(leaf_d)) == Blocks{{0}});
    CHECK(as_set(t.partition_of(middle)) == Blocks{{3}, {2}, {1}});
    std::vector<Blocks> below;
    for (NodeId ch : t.node(middle).children) {
        below.push_back(as_set(t.partition_of(ch)));
    }
    CHECK(below == std::vector<Blocks>{{{1}, {2}}, {{3}}});
    CHECK_FALSE(validate_partition_tree(t, g).has_value());
}

TEST_CASE("single leaf tree") {
    const auto [g, t] = from_text("(v 1 a)");
    CHECK(t.node_count() == 1);
    CHECK(t.is_leaf(t.root()));
    CHECK(as_set(t.partition_of(0)) == Blocks{{0}});
    CHECK_FALSE(validate_partition_tree(t, g).has_value());
    CHECK(centroid(t) == t.root());
}

TEST_CASE("star tree validates with width two") {
    const auto [g, t] = from_text(testing::kStar);
    CHECK(t.width() <= 2);
    CHECK_FALSE(validate_partition_tree(t, g).has_value());
}

TEST_CASE("validation reports a broken compatibility") {
    const Graph g = testing::path_graph(4);
    using Ref = PartitionTree::Builder::BlockRef;
    auto make = [](bool swapped) {
        PartitionTree::Builder b;
        NodeId leaf[4];
        for (Vertex v = 0; v < 4; ++v) {
            leaf[v] = b.add_leaf(v);
        }
        const NodeId x = b.add_inner({leaf[0], leaf[1]}, {{Ref{leaf[0], 0}}, {Ref{leaf[1], 0}}});
        const NodeId y = b.add_inner({leaf[2], leaf[3]}, {{Ref{leaf[2], 0}}, {Ref{leaf[3], 0}}});
        std::vector<std::vector<Ref>> blocks;
        if (swapped) {
            blocks = {{Ref{x, 0}, Ref{y, 0}}, {Ref{x, 1}, Ref{y, 1}}};  // {0,2} and {1,3}
        } else {
            blocks = {{Ref{x, 0}}, {Ref{x, 1}}, {Ref{y, 0}}, {Ref{y, 1}}};
        }
        const NodeId root = b.add_inner({x, y}, std::move(blocks));
        return std::move(b).build(root);
    };
    CHECK_FALSE(validate_partition_tree(make(false), g).has_value());
    const auto bad = validate_partition_tree(make(true), g);
    REQUIRE(bad.has_value());
    CHECK(bad->property == TreeViolation::Property::kCompatibility);
    CHECK(bad->witness.size() >= 2);
    CHECK(std::string(to_string(bad->property)) == "compatibility");
}

TEST_CASE("validation reports a missing leaf") {
    const auto [g, t] = from_text(testing::kP4);
    const Graph bigger = testing::path_graph(5);
    const auto bad = validate_partition_tree(t, bigger);
    REQUIRE(bad.has_value());
    CHECK(bad->property == TreeViolation::Property::kLeafBijection);
}

TEST_CASE("leaf weights") {
    const auto [g, t] = from_text(testing::kP4);
    const auto w = leaf_weights(t);
    for (NodeId a = 0; a < t.node_count(); ++a) {
        CHECK(w[a] == (t.is_leaf(a) ? 1u : 0u));
    }
}

TEST_CASE("centroid of the path tree") {
    const auto [g, t] = from_text(testing::kP4);
    const NodeId c = centroid(t);
    CHECK(c == t.node(t.root()).children[1]);
    NodeId brute = kNoNode;
    for (NodeId a = 0; a < t.node_count() && brute == kNoNode; ++a) {
        if (is_centroid(t, a)) {
            brute = a;
        }
    }
    CHECK(c == brute);

    const Bipartition parts = bipartition_components(t, c, leaf_weights(t));
    CHECK(parts.first_weight == 2);
    CHECK(parts.second_weight == 2);
}

TEST_CASE("centroid of a two leaf tree is the root") {
    const auto [g, t] = from_text("(j 1 2 (u (v 1 a) (v 2 b)))");
    CHECK(centroid(t) == t.root());
    const Bipartition parts = bipartition_components(t, t.root(), leaf_weights(t));
    CHECK(parts.first_weight == 1);
    CHECK(parts.second_weight == 1);
}

TEST_CASE("bipartition of a four leaf star") {
    PartitionTree::Builder b;
    std::vector<NodeId> leaves;
    std::vector<std::vector<PartitionTree::Builder::BlockRef>> blocks(1);
    for (Vertex v = 0; v < 4; ++v) {
        leaves.push_back(b.add_leaf(v));
        blocks[0].push_back({leaves.back(), 0});
    }
    const NodeId root = b.add_inner(leaves, blocks);
    const PartitionTree t = std::move(b).build(root);
    CHECK(centroid(t) == t.root());
    const Bipartition parts = bipartition_components(t, t.root(), leaf_weights(t));
    CHECK(parts.first.size() == 2);
    CHECK(parts.second.size() == 2);
    CHECK(parts.first_weight == 2);
    CHECK(parts.second_weight == 2);
}

TEST_CASE("bipartition of a connected remainder") {
    // c is a leaf: T \ {c} is one component
    const auto [g, t] = from_text(testing::kP4);
    const NodeId leaf_d = t.node(t.root()).children[0];
    const Bipartition parts = bipartition_components(t, leaf_d, leaf_weights(t));
    CHECK(parts.first.size() + parts.second.size() == 1);
    CHECK(parts.first_weight + parts.second_weight == 3);
    CHECK(std::min(parts.first.size(), parts.second.size()) == 0);
}

TEST_CASE("centroid and bipartition bounds on random trees") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t n = 2 + seed % 120;
        const auto [g, t] = random_instance(seed, n, 2 + static_cast<int>(seed % 5), seed % 4 != 0);
        const auto w = leaf_weights(t);
        const NodeId c = centroid(t, w);
        REQUIRE(is_centroid(t, c));
        for (NodeId a = 0; a < c; ++a) {
            CHECK_FALSE(is_centroid(t, a));
        }
        if (t.is_leaf(c)) {
            continue;
        }
        const Bipartition parts = bipartition_components(t, c, w);
        CHECK(3 * parts.first_weight <= 2 * n + 2);
        CHECK(3 * parts.second_weight <= 2 * n + 2);
        CHECK(parts.first_weight + parts.second_weight == n);
        CHECK_FALSE(parts.first.empty());
        CHECK_FALSE(parts.second.empty());

        const std::vector<NodeId> side = cut_children(t, c);
        std::uint64_t side_weight = 0;
        for (NodeId a : side) {
            CHECK(t.node(a).parent == c);
            side_weight += subtree_leaves(t, a);
        }
        CHECK(side_weight > 0);
        CHECK(side_weight < n);
        CHECK(3 * side_weight <= 2 * n + 2);
        CHECK(3 * (n - side_weight) <= 2 * n + 2);
    }
}

TEST_CASE("minimal partition examples") {
    const Graph p4 = testing::path_graph(4);  // a=0 b=1 c=2 d=3
    CHECK(minimal_partition(p4, VertexSet{1, 2}) == std::vector<VertexSet>{{1}, {2}});
    CHECK(minimal_partition(p4, VertexSet{0, 3}) == std::vector<VertexSet>{{0}, {3}});
    const Graph star = testing::graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    CHECK(minimal_partition(star, VertexSet{1, 2, 3}) == std::vector<VertexSet>{{1, 2, 3}});
    CHECK(minimal_partition(star, VertexSet{}).empty());
    CHECK(minimal_partition(star, VertexSet{0, 1, 2, 3}) == std::vector<VertexSet>{{0, 1, 2, 3}});
}

TEST_CASE("minimal partition is the coarsest module partition") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 150; ++round) {
        const std::size_t n = testing::uniform(rng, 1, 24);
        const Graph g = testing::random_graph(rng, n, 0.3);
        VertexSet a;
        for (Vertex v = 0; v < n; ++v) {
            if (testing::uniform(rng, 0, 1)) {
                a.push_back(v);
            }
        }
        const auto blocks = minimal_partition(g, a);
        CHECK(is_module_partition(g, blocks));
        VertexSet flat;
        for (const auto& b : blocks) {
            CHECK(std::is_sorted(b.begin(), b.end()));
            flat.insert(flat.end(), b.begin(), b.end());
        }
        std::sort(flat.begin(), flat.end());
        CHECK(flat == a);
        for (std::size_t i = 1; i < blocks.size(); ++i) {
            CHECK(blocks[i - 1].front() < blocks[i].front());
        }
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            for (std::size_t j = i + 1; j < blocks.size(); ++j) {
                auto merged = blocks;
                merged[i].insert(merged[i].end(), merged[j].begin(), merged[j].end());
                merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(j));
                CHECK_FALSE(is_module_partition(g, merged));
            }
        }
    }
}

TEST_CASE("tree nodes are modules no finer than minimal") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 2 + seed % 100;
        const auto [g, t] = random_instance(seed, n, 2 + static_cast<int>(seed % 5), seed % 3 != 0);
        REQUIRE_FALSE(validate_partition_tree(t, g).has_value());
        for (NodeId a = 0; a < t.node_count(); ++a) {
            const Module m = module_of_node(t, a);
            CHECK(m.vertices == t.vertices_of(a));
            CHECK(is_module_partition(g, m.blocks));
            CHECK(minimal_partition(g, m.vertices).size() <= m.blocks.size());
            CHECK(m.blocks.size() <= t.width());
        }
    }
}

TEST_CASE("module of a node and of a child prefix") {
    const auto [g, t] = from_text(testing::kP4);
    const NodeId middle = t.node(t.root()).children[1];
    const NodeId ab = t.node(middle).children[0];
    Module m = module_of_node(t, ab);
    CHECK(m.vertices == VertexSet{1, 2});
    CHECK(as_set(m.blocks) == Blocks{{1}, {2}});

    m = module_of_node(t, t.root());
    CHECK(m.vertices == VertexSet{0, 1, 2, 3});
    CHECK(as_set(m.blocks) == Blocks{{0}, {1, 2}, {3}});

    const NodeId leaf_d = t.node(t.root()).children[0];
    const NodeId prefix[] = {leaf_d};
    m = module_of_children(t, t.root(), prefix);
    CHECK(m.vertices == VertexSet{0});
    CHECK(as_set(m.blocks) == Blocks{{0}});
}

TEST_CASE("single child prefix: both partitions are modules") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto [g, t] = random_instance(seed, 3 + seed % 80, 2 + static_cast<int>(seed % 5));
        for (NodeId a = 0; a < t.node_count(); ++a) {
            for (NodeId ch : t.node(a).children) {
                const NodeId one[] = {ch};
                const Module via_parent = module_of_children(t, a, one);
                const Module own = module_of_node(t, ch);
                CHECK(via_parent.vertices == own.vertices);
                CHECK(via_parent.blocks.size() <= own.blocks.size());
                CHECK(is_module_partition(g, via_parent.blocks));
                CHECK(is_module_partition(g, own.blocks));
            }
            const auto& children = t.node(a).children;
            for (std::size_t p = 1; p < children.size(); ++p) {
                const Module m = module_of_children(t, a, std::span(children.data(), p));
                CHECK(is_module_partition(g, m.blocks));
                CHECK(m.blocks.size() <= t.node(a).block_count);
            }
        }
    }
}

TEST_CASE("splits of the path tree") {
    const auto [g, t] = from_text(testing::kP4);
    const NodeId leaf_d = t.node(t.root()).children[0];
    const NodeId middle = t.node(t.root()).children[1];
    const NodeId prefix[] = {leaf_d};

    const PartitionTree side = split_partition_tree(t, t.root(), prefix, SplitSide::kCutSide);
    CHECK(side.node_count() == 1);
    CHECK(side.node(0).original == t.node(leaf_d).original);
    CHECK(as_set(side.partition_of(0)) == Blocks{{0}});

    const PartitionTree rest = split_partition_tree(t, t.root(), prefix, SplitSide::kComplement);
    CHECK(rest.node_count() == 5);
    CHECK(rest.node(rest.root()).original == t.node(middle).original);
    CHECK(as_set(rest.partition_of(rest.root())) == Blocks{{1}, {2}, {3}});
}

TEST_CASE("split of a two leaf tree") {
    const auto [g, t] = from_text("(j 1 2 (u (v 1 a) (v 2 b)))");
    const NodeId first[] = {t.node(t.root()).children[0]};
    const PartitionTree a = split_partition_tree(t, t.root(), first, SplitSide::kCutSide);
    const PartitionTree b = split_partition_tree(t, t.root(), first, SplitSide::kComplement);
    CHECK(a.node_count() == 1);
    CHECK(b.node_count() == 1);
    CHECK(a.vertices_of(0) == VertexSet{0});
    CHECK(b.vertices_of(0) == VertexSet{1});
}

TEST_CASE("random splits validate and keep ancestry") {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const std::size_t n = 2 + seed % 90;
        const auto [g, t] = random_instance(seed, n, 2 + static_cast<int>(seed % 5), seed % 4 != 0);
        const LcaIndex lca(t);
        const NodeId c = centroid(t);
        if (t.is_leaf(c)) {
            continue;
        }
        const std::vector<NodeId> children = cut_children(t, c);
        const VertexSet a = [&] {
            VertexSet out;
            for (NodeId ch : children) {
                const VertexSet part = t.vertices_of(ch);
                out.insert(out.end(), part.begin(), part.end());
            }
            std::sort(out.begin(), out.end());
            return out;
        }();
        const VertexSet all = t.vertices_of(t.root());
        VertexSet rest;
        std::set_difference(all.begin(), all.end(), a.begin(), a.end(), std::back_inserter(rest));
        for (const auto side : {SplitSide::kCutSide, SplitSide::kComplement}) {
            const VertexSet& part = side == SplitSide::kCutSide ? a : rest;
            const InducedSubgraph sub = induced_subgraph(g, part);
            const PartitionTree st = split_partition_tree(t, c, children, side, sub.from_parent);
            REQUIRE_FALSE(validate_partition_tree(st, sub.graph).has_value());
            CHECK(st.width() <= t.width());
            for (NodeId x = 0; x < st.node_count(); ++x) {
                if (st.node(x).parent != kNoNode) {
                    const NodeId orig_x = st.node(x).original;
                    const NodeId orig_p = st.node(st.node(x).parent).original;
                    CHECK(lca.is_strict_descendant(orig_x, orig_p));
                }
            }
        }
    }
}

TEST_CASE("restriction drops vertices and contracts") {
    const auto [g, t] = from_text(testing::kP4);
    std::vector<char> keep{1, 1, 0, 1};  // drop b
    const PartitionTree r = restrict_tree(t, keep);
    CHECK(r.vertex_count() == 3);
    for (NodeId a = 0; a < r.node_count(); ++a) {
        CHECK((r.is_leaf(a) || r.node(a).children.size() >= 2));
    }
    VertexSet kept{0, 1, 3};
    const InducedSubgraph sub = induced_subgraph(g, kept);
    CHECK_FALSE(validate_partition_tree(restrict_tree(t, keep, sub.from_parent), sub.graph).has_value());
}

TEST_CASE("lowest common ancestors") {
    const auto [g, t] = from_text(testing::kP4);
    const LcaIndex lca(t);
    const NodeId a = t.leaf_of(1);
    const NodeId b = t.leaf_of(2);
    const NodeId ab = t.node(a).parent;
    CHECK(as_set(t.partition_of(ab)) == Blocks{{1}, {2}});
    CHECK(lca.query(a, b) == ab);
    CHECK(lca.query(b, a) == ab);
    for (NodeId x = 0; x < t.node_count(); ++x) {
        CHECK(lca.query(x, x) == x);
        CHECK(lca.query(t.root(), x) == t.root());
    }
    CHECK_THROWS_AS(lca.query(0, 99), std::out_of_range);
}

TEST_CASE("lowest common ancestors against parent walks") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto [g, t] = random_instance(seed, 2 + seed % 70, 3);
        const LcaIndex lca(t);
        auto ancestors = [&](NodeId x) {
            std::set<NodeId> out;
            for (; x != kNoNode; x = t.node(x).parent) {
                out.insert(x);
            }
            return out;
        };
        for (NodeId x = 0; x < t.node_count(); ++x) {
            const auto ax = ancestors(x);
            for (NodeId y = 0; y < t.node_count(); ++y) {
                NodeId walk = y;
                while (!ax.count(walk)) {
                    walk = t.node(walk).parent;
                }
                REQUIRE(lca.query(x, y) == walk);
            }
        }
    }
}
