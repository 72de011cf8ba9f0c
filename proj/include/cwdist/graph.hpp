#ifndef CWDIST_GRAPH_HPP
#define CWDIST_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cwdist {

using Vertex = std::uint32_t;
using Weight = std::uint32_t;
using Dist = std::uint64_t;

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();
inline constexpr Dist kInfinity = std::numeric_limits<Dist>::max();

// Saturating: anything plus infinity stays infinity.
constexpr Dist add_dist(Dist a, Dist b) noexcept {
    if (a == kInfinity || b == kInfinity) {
        return kInfinity;
    }
    return b >= kInfinity - a ? kInfinity : a + b;
}

struct Arc {
    Vertex to;
    Weight weight;
};

/*
 * Undirected simple graph with non-negative integer edge weights. An unweighted
 * graph is one where every edge has weight 1. Vertex ids are dense, 0..n-1.
 */
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n);

    Vertex add_vertex();

    // Precondition: the edge is not already present (checked only by has_edge).
    void add_edge(Vertex u, Vertex v, Weight w = 1);

    std::size_t vertex_count() const noexcept { return adj_.size(); }
    std::size_t edge_count() const noexcept { return edges_; }
    std::span<const Arc> neighbors(Vertex v) const { return adj_[v]; }
    std::size_t degree(Vertex v) const { return adj_[v].size(); }
    bool has_edge(Vertex u, Vertex v) const;
    bool unit_weights() const noexcept { return weighted_edges_ == 0; }

    void set_names(std::vector<std::string> names);
    bool has_names() const noexcept { return !names_.empty(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::string name(Vertex v) const;
    std::optional<Vertex> find(std::string_view name) const;

private:
    std::vector<std::vector<Arc>> adj_;
    std::size_t edges_ = 0;
    std::size_t weighted_edges_ = 0;
    std::vector<std::string> names_;
};

using WeightedGraph = Graph;
using DistanceVector = std::vector<Dist>;
using VertexSet = std::vector<Vertex>;

// Dense n x n matrix of distances, kInfinity for disconnected pairs.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n, Dist fill = kInfinity) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    Dist& operator()(std::size_t u, std::size_t v) { return data_[u * n_ + v]; }
    Dist operator()(std::size_t u, std::size_t v) const { return data_[u * n_ + v]; }
    std::span<const Dist> row(std::size_t u) const { return {data_.data() + u * n_, n_}; }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Dist> data_;
};

// BFS when every edge has unit weight, binary-heap search otherwise.
DistanceVector sssp(const Graph& g, Vertex source);

// d(v, S) for every v; all kInfinity when S is empty.
DistanceVector multi_source_dist(const Graph& g, std::span<const Vertex> sources);

struct InducedSubgraph {
    Graph graph;
    std::vector<Vertex> to_parent;    // new id -> parent id
    std::vector<Vertex> from_parent;  // parent id -> new id, kNoVertex when absent
};

// New ids follow the order of `vertices`. Names are carried over.
InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> vertices);

bool is_connected(const Graph& g);

class GraphFormatError : public std::runtime_error {
public:
    GraphFormatError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// `p <n> <m>` header then `e <u> <v> [w]` lines, 0-indexed; `c` lines are comments.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace cwdist

#endif
