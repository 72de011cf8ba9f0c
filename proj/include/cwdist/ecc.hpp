#ifndef CWDIST_ECC_HPP
#define CWDIST_ECC_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cwdist/graph.hpp"
#include "cwdist/partition_tree.hpp"

namespace cwdist {

// Raised when an internal invariant of the recursion does not hold.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Gadget vertices added at one recursion level, anchored at a node of the
// original partition tree.
struct Cluster {
    VertexSet vertices;  // ids in the current graph
    NodeId anchor = kNoNode;
};

/*
 * Side of the cut holding the vertices below `children` of c, plus every
 * cluster whose anchor has, with one of these children, a least common
 * ancestor strictly below c. `tu` spans the first tu.vertex_bound() vertices
 * of a graph with `vertex_count` vertices; the result is a mask over it.
 */
std::vector<char> cut_sides(const PartitionTree& tu, std::size_t vertex_count, std::span<const Cluster> clusters,
                            NodeId c, std::span<const NodeId> children, const LcaIndex& lca);

/*
 * An unweighted cut (S, V \ S) described by the minimal partition S_1..S_p of
 * S and the outside neighbourhoods N_i = N(S_i) \ S. At most one N_i is empty
 * and it is moved last; `active` counts the non-empty ones. Distances to S_i
 * and N_i are kept for the active indices.
 */
struct CutAnalysis {
    std::vector<char> in_side;
    std::vector<VertexSet> blocks;
    std::vector<VertexSet> neighbors;
    std::size_t active = 0;
    std::vector<DistanceVector> to_blocks;
    std::vector<DistanceVector> to_neighbors;
};

// Throws InvariantViolation on a weighted crossing edge or when no block has
// an outside neighbour.
CutAnalysis analyze_cut(const Graph& h, std::span<const Vertex> side);

struct FarStats {
    Dist max = 0;
    Dist sum = 0;
    std::uint64_t count = 0;  // opposite vertices seen; 0 means none
};

struct CrossCutResult {
    std::vector<FarStats> side;  // per vertex of side_subset, distances to rest_subset
    std::vector<FarStats> rest;  // per vertex of rest_subset, distances to side_subset
};

// Range-query evaluation of all distances across the cut, restricted to the
// given subsets of each side. H must be connected.
CrossCutResult cross_cut_far(const CutAnalysis& cut, std::span<const Vertex> side_subset,
                             std::span<const Vertex> rest_subset);
CrossCutResult cross_cut_far(const Graph& h, std::span<const Vertex> side, std::span<const Vertex> side_subset,
                             std::span<const Vertex> rest_subset);

/*
 * The two side graphs of a cut, each extended by active^2 fresh vertices.
 * Old vertices keep their relative order and come first; fresh vertex (i, j)
 * has id old_count + i * active + j.
 */
struct GadgetPair {
    Graph side;
    Graph rest;
    VertexSet side_vertices;  // id in h of each old vertex of `side`
    VertexSet rest_vertices;
    VertexSet side_fresh;
    VertexSet rest_fresh;
    std::size_t active = 0;
};

GadgetPair build_gadget_pair(const Graph& h, const CutAnalysis& cut);
// Throws InvariantViolation when the minimal partition of `side` exceeds k blocks.
GadgetPair build_gadget_pair(const Graph& h, std::span<const Vertex> side, std::size_t k);

struct FarAggregate {
    std::vector<Dist> ecc;    // eccentricity per vertex
    std::vector<Dist> total;  // sum of distances per vertex
    std::size_t size() const noexcept { return ecc.size(); }
};

struct SolveConfig {
    double alpha = 1.0;     // base case below max(3, ceil(alpha k^2 log2 n)) vertices
    bool audit = false;     // sampled distance checks against the input graph
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct SolveStats {
    std::size_t width = 0;
    std::size_t base_threshold = 0;
    std::size_t depth = 0;                        // number of recursion levels
    std::vector<std::size_t> vertices_per_level;  // sum of |U| over each level
    std::vector<std::size_t> clusters_per_level;  // largest cluster list seen
    std::size_t max_cluster_size = 0;
    std::size_t ledger_violations = 0;            // cluster count, size or cover broken
    std::size_t cuts = 0;
    std::size_t max_cut_blocks = 0;
    std::size_t wide_cuts = 0;                    // cuts with more than `width` blocks
    std::size_t crossing_edges = 0;               // all checked to be unit weight
    std::size_t distance_checks = 0;
    std::size_t distance_violations = 0;
    std::size_t base_cases = 0;
};

// Exact eccentricities and total distances of a connected graph. Throws
// std::invalid_argument on a disconnected graph or a tree of another vertex set.
FarAggregate solve_all(const Graph& g, const PartitionTree& t, const SolveConfig& cfg = {},
                       SolveStats* stats = nullptr);

Dist diameter(const FarAggregate& agg);
Dist wiener_index(const FarAggregate& agg);
VertexSet median_set(const FarAggregate& agg);

}  // namespace cwdist

#endif
