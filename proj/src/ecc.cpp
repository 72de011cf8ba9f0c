#include "cwdist/ecc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>
#include <random>

#include "cwdist/range_tree.hpp"

namespace cwdist {

std::vector<char> cut_sides(const PartitionTree& tu, std::size_t vertex_count, std::span<const Cluster> clusters,
                            NodeId c, std::span<const NodeId> children, const LcaIndex& lca) {
    std::vector<char> mask(vertex_count, 0);
    for (NodeId a : children) {
        for (NodeId x = a; x < tu.subtree_end(a); ++x) {
            if (tu.is_leaf(x)) {
                mask[tu.block(tu.node(x).first_block).vertex] = 1;
            }
        }
    }
    const NodeId c_orig = tu.node(c).original;
    for (const Cluster& cluster : clusters) {
        bool below = false;
        for (NodeId a : children) {
            const NodeId s = lca.query(cluster.anchor, tu.node(a).original);
            if (lca.is_strict_descendant(s, c_orig)) {
                below = true;
                break;
            }
        }
        if (below) {
            for (Vertex v : cluster.vertices) {
                mask[v] = 1;
            }
        }
    }
    return mask;
}

CutAnalysis analyze_cut(const Graph& h, std::span<const Vertex> side) {
    CutAnalysis cut;
    cut.in_side.assign(h.vertex_count(), 0);
    for (Vertex v : side) {
        cut.in_side[v] = 1;
    }
    for (Vertex v : side) {
        for (const Arc& arc : h.neighbors(v)) {
            if (!cut.in_side[arc.to] && arc.weight != 1) {
                throw InvariantViolation("weighted edge crosses the cut");
            }
        }
    }
    std::vector<VertexSet> blocks = minimal_partition(h, side);
    std::vector<VertexSet> neighbors;
    std::vector<char> mark(h.vertex_count(), 0);
    for (const VertexSet& block : blocks) {
        VertexSet out;
        for (Vertex x : block) {
            for (const Arc& arc : h.neighbors(x)) {
                if (!cut.in_side[arc.to] && !mark[arc.to]) {
                    mark[arc.to] = 1;
                    out.push_back(arc.to);
                }
            }
        }
        for (Vertex y : out) {
            mark[y] = 0;
        }
        std::sort(out.begin(), out.end());
        neighbors.push_back(std::move(out));
    }
    std::size_t isolated = blocks.size();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (neighbors[i].empty()) {
            if (isolated != blocks.size()) {
                throw InvariantViolation("two blocks without outside neighbours");
            }
            isolated = i;
        }
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i != isolated) {
            cut.blocks.push_back(std::move(blocks[i]));
            cut.neighbors.push_back(std::move(neighbors[i]));
        }
    }
    cut.active = cut.blocks.size();
    if (isolated != blocks.size()) {
        cut.blocks.push_back(std::move(blocks[isolated]));
        cut.neighbors.emplace_back();
    }
    if (cut.active == 0) {
        throw InvariantViolation("cut has no crossing edge");
    }
    for (std::size_t i = 0; i < cut.active; ++i) {
        cut.to_blocks.push_back(multi_source_dist(h, cut.blocks[i]));
        cut.to_neighbors.push_back(multi_source_dist(h, cut.neighbors[i]));
    }
    return cut;
}

namespace {

std::int64_t finite(Dist d) {
    if (d == kInfinity) {
        throw InvariantViolation("graph is disconnected across the cut");
    }
    return static_cast<std::int64_t>(d);
}

/*
 * For x in `queries` and y in `points`:
 *   d(x, y) = min_i query_dist[i][x] + 1 + point_dist[i][y].
 * Point (i, point_dist[i][y] - point_dist[j][y] for j != i) lies in the box of
 * (x, i) iff index i attains that minimum first.
 */
std::vector<FarStats> far_side(const std::vector<DistanceVector>& query_dist,
                               const std::vector<DistanceVector>& point_dist, std::span<const Vertex> queries,
                               std::span<const Vertex> points) {
    const std::size_t p = query_dist.size();
    std::vector<FarStats> out(queries.size());
    if (points.empty()) {
        return out;
    }
    std::vector<Point> cloud;
    cloud.reserve(points.size() * p);
    for (Vertex y : points) {
        for (std::size_t i = 0; i < p; ++i) {
            Point pt;
            pt.coords.reserve(p);
            pt.coords.push_back(static_cast<std::int64_t>(i));
            const std::int64_t own = finite(point_dist[i][y]);
            for (std::size_t j = 0; j < p; ++j) {
                if (j != i) {
                    pt.coords.push_back(own - finite(point_dist[j][y]));
                }
            }
            pt.value = own;
            pt.payload = y;
            cloud.push_back(std::move(pt));
        }
    }
    const RangeTree tree(p, cloud);
    cloud.clear();
    Box box(p);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const Vertex x = queries[q];
        FarStats& stats = out[q];
        for (std::size_t i = 0; i < p; ++i) {
            const std::int64_t own = finite(query_dist[i][x]);
            box[0] = Interval::exactly(static_cast<std::int64_t>(i));
            for (std::size_t j = 0; j < p; ++j) {
                const std::int64_t threshold = finite(query_dist[j][x]) - own;
                if (j < i) {
                    box[j + 1] = Interval::less_than(threshold);
                } else if (j > i) {
                    box[j] = Interval::at_most(threshold);
                }
            }
            const RangeAnswer ans = tree.query(box);
            if (ans.count == 0) {
                continue;
            }
            const auto step = static_cast<Dist>(own + 1);
            stats.max = std::max(stats.max, step + static_cast<Dist>(ans.max->value));
            stats.sum += step * ans.count + static_cast<Dist>(ans.sum);
            stats.count += ans.count;
        }
        if (stats.count != points.size()) {
            throw InvariantViolation("cross-cut boxes do not partition the opposite side");
        }
    }
    return out;
}

}  // namespace

CrossCutResult cross_cut_far(const CutAnalysis& cut, std::span<const Vertex> side_subset,
                             std::span<const Vertex> rest_subset) {
    CrossCutResult result;
    result.side = far_side(cut.to_blocks, cut.to_neighbors, side_subset, rest_subset);
    result.rest = far_side(cut.to_neighbors, cut.to_blocks, rest_subset, side_subset);
    return result;
}

CrossCutResult cross_cut_far(const Graph& h, std::span<const Vertex> side, std::span<const Vertex> side_subset,
                             std::span<const Vertex> rest_subset) {
    return cross_cut_far(analyze_cut(h, side), side_subset, rest_subset);
}

namespace {

// One gadget graph: the old vertices of one side plus fresh (i, j) vertices
// joined to join_sets[i], matched in pairs with weight d(far_sets[i], far_sets[j]).
Graph extend_side(const Graph& h, const VertexSet& old, std::size_t active, const std::vector<VertexSet>& join_sets,
                  const std::vector<VertexSet>& far_sets, const std::vector<DistanceVector>& far_dist,
                  VertexSet& fresh) {
    InducedSubgraph sub = induced_subgraph(h, old);
    Graph g = std::move(sub.graph);
    const auto base = static_cast<Vertex>(old.size());
    for (std::size_t i = 0; i < active * active; ++i) {
        fresh.push_back(g.add_vertex());
    }
    for (std::size_t i = 0; i < active; ++i) {
        for (std::size_t j = 0; j < active; ++j) {
            const auto id = static_cast<Vertex>(base + i * active + j);
            for (Vertex x : join_sets[i]) {
                g.add_edge(id, sub.from_parent[x], 1);
            }
        }
    }
    for (std::size_t i = 0; i < active; ++i) {
        for (std::size_t j = i + 1; j < active; ++j) {
            Dist w = kInfinity;
            for (Vertex y : far_sets[j]) {
                w = std::min(w, far_dist[i][y]);
            }
            g.add_edge(static_cast<Vertex>(base + i * active + j), static_cast<Vertex>(base + j * active + i),
                       static_cast<Weight>(finite(w)));
        }
    }
    return g;
}

}  // namespace

GadgetPair build_gadget_pair(const Graph& h, const CutAnalysis& cut) {
    GadgetPair pair;
    pair.active = cut.active;
    for (Vertex v = 0; v < h.vertex_count(); ++v) {
        (cut.in_side[v] ? pair.side_vertices : pair.rest_vertices).push_back(v);
    }
    pair.side = extend_side(h, pair.side_vertices, cut.active, cut.blocks, cut.neighbors, cut.to_neighbors,
                            pair.side_fresh);
    pair.rest = extend_side(h, pair.rest_vertices, cut.active, cut.neighbors, cut.blocks, cut.to_blocks,
                            pair.rest_fresh);
    return pair;
}

GadgetPair build_gadget_pair(const Graph& h, std::span<const Vertex> side, std::size_t k) {
    const CutAnalysis cut = analyze_cut(h, side);
    if (cut.blocks.size() > k) {
        throw InvariantViolation("cut has neighbourhood diversity above " + std::to_string(k));
    }
    return build_gadget_pair(h, cut);
}

namespace {

struct Frame {
    std::size_t level = 0;
    Graph h;
    std::size_t u_count = 0;  // vertices 0..u_count-1 of h are original vertices
    std::vector<Vertex> global;
    PartitionTree tree;
    std::vector<Cluster> clusters;
};

struct Context {
    const Graph& g;
    const LcaIndex& lca;
    SolveConfig cfg;
    std::size_t width = 0;
    std::size_t threshold = 0;
    unsigned parallel_levels = 0;
    FarAggregate& out;
    SolveStats stats;
    std::mutex mutex;
};

void record_frame(Context& ctx, const Frame& f) {
    std::size_t cluster_total = 0;
    std::size_t largest = 0;
    for (const Cluster& cl : f.clusters) {
        cluster_total += cl.vertices.size();
        largest = std::max(largest, cl.vertices.size());
    }
    const bool broken = f.clusters.size() > f.level || largest > ctx.width * ctx.width ||
                        cluster_total != f.h.vertex_count() - f.u_count;
    std::lock_guard lock(ctx.mutex);
    SolveStats& s = ctx.stats;
    if (s.vertices_per_level.size() <= f.level) {
        s.vertices_per_level.resize(f.level + 1, 0);
        s.clusters_per_level.resize(f.level + 1, 0);
    }
    s.depth = std::max(s.depth, f.level + 1);
    s.vertices_per_level[f.level] += f.u_count;
    s.clusters_per_level[f.level] = std::max(s.clusters_per_level[f.level], f.clusters.size());
    s.max_cluster_size = std::max(s.max_cluster_size, largest);
    s.ledger_violations += broken ? 1 : 0;
}

void audit_distances(Context& ctx, const Frame& f) {
    std::mt19937_64 rng(ctx.cfg.seed ^ (f.global[0] * 0x9e3779b97f4a7c15ull) ^ f.level);
    const auto u = static_cast<Vertex>(std::uniform_int_distribution<std::size_t>(0, f.u_count - 1)(rng));
    const DistanceVector local = sssp(f.h, u);
    const DistanceVector reference = sssp(ctx.g, f.global[u]);
    std::size_t bad = 0;
    for (Vertex v = 0; v < f.u_count; ++v) {
        bad += local[v] != reference[f.global[v]] ? 1 : 0;
    }
    std::lock_guard lock(ctx.mutex);
    ctx.stats.distance_checks += f.u_count;
    ctx.stats.distance_violations += bad;
}

void solve_base(Context& ctx, const Frame& f) {
    for (Vertex u = 0; u < f.u_count; ++u) {
        const DistanceVector d = sssp(f.h, u);
        Dist far = 0;
        Dist total = 0;
        for (Vertex v = 0; v < f.u_count; ++v) {
            if (d[v] == kInfinity) {
                throw InvariantViolation("recursion graph is disconnected");
            }
            far = std::max(far, d[v]);
            total += d[v];
        }
        const Vertex x = f.global[u];
        ctx.out.ecc[x] = std::max(ctx.out.ecc[x], far);
        ctx.out.total[x] += total;
    }
    std::lock_guard lock(ctx.mutex);
    ++ctx.stats.base_cases;
}

Frame child_frame(const Frame& f, const VertexSet& old, Graph graph, const VertexSet& fresh, NodeId c,
                  std::span<const NodeId> children, SplitSide side, const std::vector<char>& mask) {
    Frame child;
    child.level = f.level + 1;
    child.h = std::move(graph);
    std::vector<Vertex> position(f.h.vertex_count(), kNoVertex);
    std::vector<Vertex> remap(f.u_count, kNoVertex);
    for (std::size_t p = 0; p < old.size(); ++p) {
        position[old[p]] = static_cast<Vertex>(p);
        if (old[p] < f.u_count) {
            remap[old[p]] = static_cast<Vertex>(p);
            child.global.push_back(f.global[old[p]]);
            ++child.u_count;
        }
    }
    child.tree = split_partition_tree(f.tree, c, children, side, remap);
    const char wanted = side == SplitSide::kCutSide ? 1 : 0;
    for (const Cluster& cl : f.clusters) {
        if (mask[cl.vertices.front()] != wanted) {
            continue;
        }
        Cluster moved{{}, cl.anchor};
        for (Vertex v : cl.vertices) {
            moved.vertices.push_back(position[v]);
        }
        child.clusters.push_back(std::move(moved));
    }
    child.clusters.push_back({fresh, f.tree.node(c).original});
    return child;
}

void solve_frame(Context& ctx, Frame f) {
    record_frame(ctx, f);
    if (ctx.cfg.audit && f.level > 0) {
        audit_distances(ctx, f);
    }
    if (f.u_count <= ctx.threshold) {
        solve_base(ctx, f);
        return;
    }
    const NodeId c = centroid(f.tree);
    const std::vector<NodeId> children = cut_children(f.tree, c);
    const std::vector<char> mask = cut_sides(f.tree, f.h.vertex_count(), f.clusters, c, children, ctx.lca);

    VertexSet side;
    VertexSet side_u;
    VertexSet rest_u;
    std::size_t crossing = 0;
    for (Vertex v = 0; v < f.h.vertex_count(); ++v) {
        if (mask[v]) {
            side.push_back(v);
            for (const Arc& arc : f.h.neighbors(v)) {
                crossing += mask[arc.to] ? 0 : 1;
            }
        }
        if (v < f.u_count) {
            (mask[v] ? side_u : rest_u).push_back(v);
        }
    }
    GadgetPair gadget;
    {
        const CutAnalysis cut = analyze_cut(f.h, side);
        {
            std::lock_guard lock(ctx.mutex);
            SolveStats& s = ctx.stats;
            ++s.cuts;
            s.max_cut_blocks = std::max(s.max_cut_blocks, cut.blocks.size());
            s.wide_cuts += cut.blocks.size() > ctx.width ? 1 : 0;
            s.crossing_edges += crossing;
        }
        const CrossCutResult cross = cross_cut_far(cut, side_u, rest_u);
        for (std::size_t i = 0; i < side_u.size(); ++i) {
            const Vertex x = f.global[side_u[i]];
            ctx.out.ecc[x] = std::max(ctx.out.ecc[x], cross.side[i].max);
            ctx.out.total[x] += cross.side[i].sum;
        }
        for (std::size_t i = 0; i < rest_u.size(); ++i) {
            const Vertex x = f.global[rest_u[i]];
            ctx.out.ecc[x] = std::max(ctx.out.ecc[x], cross.rest[i].max);
            ctx.out.total[x] += cross.rest[i].sum;
        }
        gadget = build_gadget_pair(f.h, cut);
    }
    Frame a = child_frame(f, gadget.side_vertices, std::move(gadget.side), gadget.side_fresh, c, children,
                          SplitSide::kCutSide, mask);
    Frame b = child_frame(f, gadget.rest_vertices, std::move(gadget.rest), gadget.rest_fresh, c, children,
                          SplitSide::kComplement, mask);
    const std::size_t level = f.level;
    f = Frame();
    if (level < ctx.parallel_levels) {
        auto pending = std::async(std::launch::async, [&ctx, a = std::move(a)]() mutable {
            solve_frame(ctx, std::move(a));
        });
        solve_frame(ctx, std::move(b));
        pending.get();
    } else {
        solve_frame(ctx, std::move(a));
        solve_frame(ctx, std::move(b));
    }
}

}  // namespace

FarAggregate solve_all(const Graph& g, const PartitionTree& t, const SolveConfig& cfg, SolveStats* stats) {
    const std::size_t n = g.vertex_count();
    if (t.vertex_count() != n || t.vertex_bound() != n) {
        throw std::invalid_argument("partition tree does not match the graph");
    }
    if (!g.unit_weights()) {
        throw std::invalid_argument("input graph must be unweighted");
    }
    if (!is_connected(g)) {
        throw std::invalid_argument("input graph is disconnected");
    }
    if (!(cfg.alpha > 0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    FarAggregate out;
    out.ecc.assign(n, 0);
    out.total.assign(n, 0);
    if (n == 0) {
        return out;
    }
    const LcaIndex lca(t);
    Context ctx{g, lca, cfg, t.width(), 0, 0, out, {}, {}};
    const double scale = cfg.alpha * static_cast<double>(ctx.width * ctx.width) * std::log2(static_cast<double>(n));
    ctx.threshold = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(scale)));
    while (cfg.threads > (1u << ctx.parallel_levels)) {
        ++ctx.parallel_levels;
    }
    ctx.stats.width = ctx.width;
    ctx.stats.base_threshold = ctx.threshold;

    Frame top;
    top.h = Graph(n);
    for (Vertex u = 0; u < n; ++u) {
        for (const Arc& arc : g.neighbors(u)) {
            if (u < arc.to) {
                top.h.add_edge(u, arc.to, arc.weight);
            }
        }
    }
    top.u_count = n;
    top.global.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        top.global[v] = v;
    }
    top.tree = t;
    solve_frame(ctx, std::move(top));
    if (stats) {
        *stats = std::move(ctx.stats);
    }
    return out;
}

Dist diameter(const FarAggregate& agg) {
    return agg.ecc.empty() ? 0 : *std::max_element(agg.ecc.begin(), agg.ecc.end());
}

Dist wiener_index(const FarAggregate& agg) {
    Dist w = 0;
    for (Dist x : agg.total) {
        w += x;
    }
    return w;
}

VertexSet median_set(const FarAggregate& agg) {
    VertexSet out;
    if (agg.total.empty()) {
        return out;
    }
    const Dist best = *std::min_element(agg.total.begin(), agg.total.end());
    for (Vertex v = 0; v < agg.total.size(); ++v) {
        if (agg.total[v] == best) {
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace cwdist
