#ifndef CWDIST_PARTITION_TREE_HPP
#define CWDIST_PARTITION_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwdist/graph.hpp"
#include "cwdist/kexpr.hpp"

namespace cwdist {

using NodeId = std::uint32_t;
using BlockId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();

/*
 * Partition tree (T, f) stored as its representation graph: every node owns
 * one record per block of f(node), and each block keeps arcs to the blocks of
 * the child nodes it contains (and back to its containing parent block).
 * Storage is O(width * n).
 *
 * Nodes are laid out in preorder: the root is node 0, children have larger
 * ids than their parent, and the subtree of `a` is the id range
 * [a, subtree_end(a)). Every node also remembers its id in the tree it was
 * originally built from, which survives restriction and splitting.
 */
class PartitionTree {
public:
    struct Node {
        NodeId parent = kNoNode;
        NodeId original = kNoNode;
        NodeId subtree_end = 0;
        BlockId first_block = 0;
        std::uint32_t block_count = 0;
        std::vector<NodeId> children;
    };

    struct Block {
        NodeId node = kNoNode;
        BlockId parent_block = kNoBlock;
        std::vector<BlockId> child_blocks;
        Vertex vertex = kNoVertex;  // leaves only
        std::uint32_t size = 0;     // number of vertices in the block
    };

    // Builds a tree from nodes created in any order, then lays it out in preorder.
    class Builder {
    public:
        struct BlockRef {
            NodeId node;
            std::uint32_t index;  // block index within that node
        };
        NodeId add_leaf(Vertex v);
        // blocks[i] lists the child blocks contained in the i-th block.
        NodeId add_inner(std::vector<NodeId> children, std::vector<std::vector<BlockRef>> blocks);
        PartitionTree build(NodeId root) &&;

    private:
        struct Draft {
            std::vector<NodeId> children;
            std::vector<std::vector<BlockRef>> blocks;
            Vertex vertex = kNoVertex;
        };
        std::vector<Draft> drafts_;
    };

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t block_count() const noexcept { return blocks_.size(); }
    std::size_t vertex_count() const noexcept { return vertex_count_; }
    bool empty() const noexcept { return nodes_.empty(); }
    NodeId root() const noexcept { return 0; }

    const Node& node(NodeId a) const { return nodes_[a]; }
    const Block& block(BlockId b) const { return blocks_[b]; }
    bool is_leaf(NodeId a) const { return nodes_[a].children.empty(); }
    NodeId subtree_end(NodeId a) const { return nodes_[a].subtree_end; }
    bool in_subtree(NodeId a, NodeId root_of_subtree) const {
        return a >= root_of_subtree && a < nodes_[root_of_subtree].subtree_end;
    }
    std::vector<BlockId> blocks_of(NodeId a) const;

    // Leaf holding v, kNoNode if v has none.
    NodeId leaf_of(Vertex v) const { return v < leaf_of_.size() ? leaf_of_[v] : kNoNode; }
    // max_a |f(a)|
    std::size_t width() const noexcept;
    // 1 + largest vertex id referenced by a leaf
    std::size_t vertex_bound() const noexcept { return leaf_of_.size(); }

    VertexSet vertices_of(NodeId a) const;          // the set A with f(a) a partition of A, sorted
    VertexSet vertices_of_block(BlockId b) const;   // sorted
    std::vector<VertexSet> partition_of(NodeId a) const;

    // Text dump of the representation graph, one block per line.
    std::string dump() const;

private:
    friend PartitionTree restrict_tree(const PartitionTree&, std::span<const char>, std::span<const Vertex>);
    void finish();

    std::vector<Node> nodes_;
    std::vector<Block> blocks_;
    std::vector<NodeId> leaf_of_;
    std::size_t vertex_count_ = 0;
};

/*
 * Contracts the syntactic tree of `e` at its non-branching nodes. The
 * partition of a union node is the set of label classes right after the
 * union, before the joins and relabels above it.
 */
PartitionTree build_partition_tree(const KExpression& e);

struct TreeViolation {
    enum class Property { kStructure, kLeafBijection, kPartition, kRefinement, kCompatibility };
    Property property;
    std::string message;
    std::vector<Vertex> witness;
};

const char* to_string(TreeViolation::Property p);

// Exhaustive check of the partition-tree axioms against g; nullopt when valid.
std::optional<TreeViolation> validate_partition_tree(const PartitionTree& t, const Graph& g);

// w(a) = 1 iff a is a leaf.
std::vector<std::uint64_t> leaf_weights(const PartitionTree& t);

// Node whose removal leaves components of weight <= w(T)/2; smallest id on ties.
NodeId centroid(const PartitionTree& t, std::span<const std::uint64_t> w);
NodeId centroid(const PartitionTree& t);

// One component of T \ {c}: either the subtree of a child of c, or (upper) the
// part of T outside the subtree of c.
struct TreeComponent {
    NodeId root;  // child of c, or parent of c when upper
    bool upper;
    std::uint64_t weight;
};

struct Bipartition {
    std::vector<TreeComponent> first;
    std::vector<TreeComponent> second;
    std::uint64_t first_weight = 0;
    std::uint64_t second_weight = 0;
};

// Splits the components of T \ {c} into two forests of weight <= 2 w(T) / 3.
// Components are scanned with the upper part first, then children in order.
Bipartition bipartition_components(const PartitionTree& t, NodeId c, std::span<const std::uint64_t> w);

// Children a_1..a_p of c forming the side of the cut that excludes the upper
// part of T (the A side). c must be internal.
std::vector<NodeId> cut_children(const PartitionTree& t, NodeId c);

/*
 * Minimal partition of A: the coarsest partition whose blocks have equal
 * neighbourhoods outside A. Blocks are sorted and ordered by smallest vertex.
 */
std::vector<VertexSet> minimal_partition(const Graph& g, std::span<const Vertex> a);

struct Module {
    VertexSet vertices;
    std::vector<VertexSet> blocks;
};

// A = union of f(a) with partition f(a).
Module module_of_node(const PartitionTree& t, NodeId a);
// For children a_1..a_p of `parent`: A = union of the A_i with partition {X ∩ A : X in f(parent)}.
Module module_of_children(const PartitionTree& t, NodeId parent, std::span<const NodeId> children);

/*
 * Restriction to a vertex subset S: leaves outside S and emptied blocks are
 * dropped, emptied nodes removed, and nodes left with one child contracted
 * (the child keeps its partition). When `remap` is non-empty, leaf vertex v
 * becomes remap[v].
 */
PartitionTree restrict_tree(const PartitionTree& t, std::span<const char> keep, std::span<const Vertex> remap = {});

enum class SplitSide { kCutSide, kComplement };

// Tree of G[A] (kCutSide) or G[V \ A] (kComplement) for A = vertices below `children` of c.
PartitionTree split_partition_tree(const PartitionTree& t, NodeId c, std::span<const NodeId> children, SplitSide side,
                                   std::span<const Vertex> remap = {});

// Constant-time least common ancestor over original node ids (Euler tour + sparse table).
class LcaIndex {
public:
    LcaIndex() = default;
    explicit LcaIndex(const PartitionTree& t);

    NodeId query(NodeId a, NodeId b) const;
    bool is_strict_descendant(NodeId a, NodeId ancestor) const {
        return a != ancestor && query(a, ancestor) == ancestor;
    }
    std::size_t node_count() const noexcept { return first_.size(); }

private:
    std::vector<NodeId> euler_;
    std::vector<std::uint32_t> depth_;  // per euler position
    std::vector<std::uint32_t> first_;  // per node, first euler position
    std::vector<std::vector<std::uint32_t>> table_;
};

}  // namespace cwdist

#endif
