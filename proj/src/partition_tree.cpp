#include "cwdist/partition_tree.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace cwdist {

NodeId PartitionTree::Builder::add_leaf(Vertex v) {
    drafts_.push_back({{}, {}, v});
    return static_cast<NodeId>(drafts_.size() - 1);
}

NodeId PartitionTree::Builder::add_inner(std::vector<NodeId> children, std::vector<std::vector<BlockRef>> blocks) {
    for (NodeId c : children) {
        if (c >= drafts_.size()) {
            throw std::invalid_argument("unknown child node");
        }
    }
    drafts_.push_back({std::move(children), std::move(blocks), kNoVertex});
    return static_cast<NodeId>(drafts_.size() - 1);
}

PartitionTree PartitionTree::Builder::build(NodeId root) && {
    if (root >= drafts_.size()) {
        throw std::invalid_argument("unknown root node");
    }
    PartitionTree t;
    // preorder layout
    std::vector<NodeId> new_id(drafts_.size(), kNoNode);
    std::vector<NodeId> order;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const NodeId d = stack.back();
        stack.pop_back();
        if (new_id[d] != kNoNode) {
            throw std::invalid_argument("partition tree node reached twice");
        }
        new_id[d] = static_cast<NodeId>(order.size());
        order.push_back(d);
        const auto& children = drafts_[d].children;
        for (auto it = children.rbegin(); it != children.rend(); ++it) {
            stack.push_back(*it);
        }
    }
    t.nodes_.resize(order.size());
    BlockId next_block = 0;
    for (NodeId a = 0; a < order.size(); ++a) {
        const Draft& d = drafts_[order[a]];
        Node& node = t.nodes_[a];
        node.original = a;
        node.first_block = next_block;
        node.block_count = d.children.empty() ? 1 : static_cast<std::uint32_t>(d.blocks.size());
        next_block += node.block_count;
        for (NodeId c : d.children) {
            node.children.push_back(new_id[c]);
            t.nodes_[new_id[c]].parent = a;
        }
    }
    t.blocks_.resize(next_block);
    for (NodeId a = 0; a < order.size(); ++a) {
        const Draft& d = drafts_[order[a]];
        const Node& node = t.nodes_[a];
        if (d.children.empty()) {
            if (d.vertex == kNoVertex) {
                throw std::invalid_argument("leaf without a vertex");
            }
            Block& b = t.blocks_[node.first_block];
            b.node = a;
            b.vertex = d.vertex;
            continue;
        }
        for (std::uint32_t i = 0; i < d.blocks.size(); ++i) {
            const BlockId id = node.first_block + i;
            t.blocks_[id].node = a;
            for (const BlockRef& ref : d.blocks[i]) {
                if (ref.node >= drafts_.size() || new_id[ref.node] == kNoNode ||
                    t.nodes_[new_id[ref.node]].parent != a) {
                    throw std::invalid_argument("block arc does not point to a child node");
                }
                const Node& child = t.nodes_[new_id[ref.node]];
                if (ref.index >= child.block_count) {
                    throw std::invalid_argument("block arc to a missing child block");
                }
                const BlockId cb = child.first_block + ref.index;
                if (t.blocks_[cb].parent_block != kNoBlock) {
                    throw std::invalid_argument("child block contained in two parent blocks");
                }
                t.blocks_[cb].parent_block = id;
                t.blocks_[id].child_blocks.push_back(cb);
            }
        }
    }
    for (NodeId a = 1; a < t.nodes_.size(); ++a) {
        const Node& node = t.nodes_[a];
        for (BlockId b = node.first_block; b < node.first_block + node.block_count; ++b) {
            if (t.blocks_[b].parent_block == kNoBlock) {
                throw std::invalid_argument("child block not contained in any parent block");
            }
        }
    }
    t.finish();
    return t;
}

void PartitionTree::finish() {
    for (NodeId a = static_cast<NodeId>(nodes_.size()); a-- > 0;) {
        Node& node = nodes_[a];
        node.subtree_end = node.children.empty() ? a + 1 : nodes_[node.children.back()].subtree_end;
    }
    std::size_t bound = 0;
    vertex_count_ = 0;
    for (BlockId b = static_cast<BlockId>(blocks_.size()); b-- > 0;) {
        Block& block = blocks_[b];
        if (block.vertex != kNoVertex) {
            block.size = 1;
            bound = std::max<std::size_t>(bound, block.vertex + 1);
            ++vertex_count_;
        } else {
            block.size = 0;
            for (BlockId c : block.child_blocks) {
                block.size += blocks_[c].size;
            }
        }
    }
    leaf_of_.assign(bound, kNoNode);
    for (const Block& block : blocks_) {
        if (block.vertex != kNoVertex) {
            if (leaf_of_[block.vertex] != kNoNode) {
                throw std::invalid_argument("vertex held by two leaves");
            }
            leaf_of_[block.vertex] = block.node;
        }
    }
}

std::vector<BlockId> PartitionTree::blocks_of(NodeId a) const {
    std::vector<BlockId> out(nodes_[a].block_count);
    std::iota(out.begin(), out.end(), nodes_[a].first_block);
    return out;
}

std::size_t PartitionTree::width() const noexcept {
    std::size_t w = 0;
    for (const Node& node : nodes_) {
        w = std::max<std::size_t>(w, node.block_count);
    }
    return w;
}

VertexSet PartitionTree::vertices_of(NodeId a) const {
    VertexSet out;
    for (NodeId x = a; x < nodes_[a].subtree_end; ++x) {
        if (nodes_[x].children.empty()) {
            out.push_back(blocks_[nodes_[x].first_block].vertex);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

VertexSet PartitionTree::vertices_of_block(BlockId b) const {
    VertexSet out;
    std::vector<BlockId> stack{b};
    while (!stack.empty()) {
        const Block& block = blocks_[stack.back()];
        stack.pop_back();
        if (block.vertex != kNoVertex) {
            out.push_back(block.vertex);
        }
        stack.insert(stack.end(), block.child_blocks.begin(), block.child_blocks.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VertexSet> PartitionTree::partition_of(NodeId a) const {
    std::vector<VertexSet> out;
    for (BlockId b : blocks_of(a)) {
        out.push_back(vertices_of_block(b));
    }
    return out;
}

std::string PartitionTree::dump() const {
    std::ostringstream out;
    for (BlockId b = 0; b < blocks_.size(); ++b) {
        const Block& block = blocks_[b];
        const Node& node = nodes_[block.node];
        out << "b" << b << " node=" << block.node << " orig=" << node.original;
        if (node.parent != kNoNode) {
            out << " parent=" << node.parent;
        }
        out << " {";
        const VertexSet vs = vertices_of_block(b);
        for (std::size_t i = 0; i < vs.size(); ++i) {
            out << (i ? "," : "") << vs[i];
        }
        out << "}";
        if (!block.child_blocks.empty()) {
            out << " ->";
            for (BlockId c : block.child_blocks) {
                out << " b" << c;
            }
        }
        out << '\n';
    }
    return out.str();
}

PartitionTree build_partition_tree(const KExpression& e) {
    const auto& nodes = e.nodes();
    PartitionTree::Builder builder;
    // For each syntactic node: the partition-tree node below it and, per block
    // of that node, the label its vertices carry at this point.
    struct LabelOfBlock {
        int label;
        std::uint32_t block;
        Vertex min_vertex;
    };
    std::vector<NodeId> below(nodes.size(), kNoNode);
    std::vector<std::vector<LabelOfBlock>> labels(nodes.size());

    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        const KNode& node = nodes[i];
        switch (node.kind) {
            case OpKind::kVertex:
                below[i] = builder.add_leaf(e.vertex_id(i));
                labels[i] = {{node.first, 0, e.vertex_id(i)}};
                break;
            case OpKind::kUnion: {
                // group the children's blocks by their current label, then
                // order the groups by smallest vertex
                struct Group {
                    Vertex min_vertex = kNoVertex;
                    std::vector<PartitionTree::Builder::BlockRef> refs;
                };
                std::map<int, Group> classes;
                for (std::uint32_t child : {node.left, node.right}) {
                    for (const LabelOfBlock& lb : labels[child]) {
                        Group& group = classes[lb.label];
                        group.min_vertex = std::min(group.min_vertex, lb.min_vertex);
                        group.refs.push_back({below[child], lb.block});
                    }
                }
                std::vector<std::pair<int, Group>> ordered(classes.begin(), classes.end());
                std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
                    return x.second.min_vertex < y.second.min_vertex;
                });
                std::vector<std::vector<PartitionTree::Builder::BlockRef>> blocks;
                for (auto& [label, group] : ordered) {
                    labels[i].push_back({label, static_cast<std::uint32_t>(blocks.size()), group.min_vertex});
                    blocks.push_back(std::move(group.refs));
                }
                below[i] = builder.add_inner({below[node.left], below[node.right]}, std::move(blocks));
                labels[node.left] = {};
                labels[node.right] = {};
                break;
            }
            case OpKind::kJoin:
                below[i] = below[node.left];
                labels[i] = std::move(labels[node.left]);
                break;
            case OpKind::kRelabel:
                below[i] = below[node.left];
                labels[i] = std::move(labels[node.left]);
                for (LabelOfBlock& lb : labels[i]) {
                    if (lb.label == node.first) {
                        lb.label = node.second;
                    }
                }
                break;
        }
    }
    return std::move(builder).build(below[e.root()]);
}

const char* to_string(TreeViolation::Property p) {
    switch (p) {
        case TreeViolation::Property::kStructure:
            return "structure";
        case TreeViolation::Property::kLeafBijection:
            return "leaf-bijection";
        case TreeViolation::Property::kPartition:
            return "partition";
        case TreeViolation::Property::kRefinement:
            return "refinement";
        case TreeViolation::Property::kCompatibility:
            return "compatibility";
    }
    return "?";
}

std::optional<TreeViolation> validate_partition_tree(const PartitionTree& t, const Graph& g) {
    using P = TreeViolation::Property;
    const std::size_t n = g.vertex_count();
    if (t.empty()) {
        if (n == 0) {
            return std::nullopt;
        }
        return TreeViolation{P::kLeafBijection, "empty tree for a non-empty graph", {}};
    }
    for (NodeId a = 0; a < t.node_count(); ++a) {
        const auto& node = t.node(a);
        if (!node.children.empty() && node.children.size() < 2) {
            return TreeViolation{P::kStructure, "inner node " + std::to_string(a) + " has a single child", {}};
        }
        if (node.block_count == 0) {
            return TreeViolation{P::kPartition, "node " + std::to_string(a) + " has no blocks", {}};
        }
    }
    // leaves biject with vertices
    std::vector<char> seen(n, 0);
    for (NodeId a = 0; a < t.node_count(); ++a) {
        if (!t.is_leaf(a)) {
            continue;
        }
        const auto& node = t.node(a);
        const Vertex v = t.block(node.first_block).vertex;
        if (node.block_count != 1 || v == kNoVertex || v >= n) {
            return TreeViolation{P::kLeafBijection, "leaf " + std::to_string(a) + " is not {{v}} for a vertex v", {}};
        }
        if (seen[v]) {
            return TreeViolation{P::kLeafBijection, "vertex held by two leaves", {v}};
        }
        seen[v] = 1;
    }
    for (Vertex v = 0; v < n; ++v) {
        if (!seen[v]) {
            return TreeViolation{P::kLeafBijection, "vertex without a leaf", {v}};
        }
    }
    // blocks partition the union of the children, refined by the child blocks
    std::vector<int> owners(t.block_count(), 0);
    for (BlockId b = 0; b < t.block_count(); ++b) {
        const auto& block = t.block(b);
        if (block.size == 0) {
            return TreeViolation{P::kPartition, "empty block b" + std::to_string(b), {}};
        }
        const auto& node = t.node(block.node);
        for (BlockId c : block.child_blocks) {
            const auto& child = t.block(c);
            if (t.node(child.node).parent != block.node || child.parent_block != b) {
                return TreeViolation{P::kRefinement, "block arc b" + std::to_string(b) + "->b" + std::to_string(c) +
                                                         " does not link a node to its child",
                                     {}};
            }
            ++owners[c];
        }
        if (node.children.empty() && !block.child_blocks.empty()) {
            return TreeViolation{P::kPartition, "leaf block with children", {}};
        }
    }
    for (BlockId b = 0; b < t.block_count(); ++b) {
        if (t.node(t.block(b).node).parent != kNoNode && owners[b] != 1) {
            return TreeViolation{P::kRefinement,
                                 "block b" + std::to_string(b) + " is contained in " + std::to_string(owners[b]) +
                                     " parent blocks",
                                 t.vertices_of_block(b)};
        }
    }
    // compatibility with the edges
    std::unordered_set<std::uint64_t> edges;
    for (Vertex u = 0; u < n; ++u) {
        for (const Arc& arc : g.neighbors(u)) {
            edges.insert(std::uint64_t{u} << 32 | arc.to);
        }
    }
    std::vector<std::uint32_t> depth(t.node_count(), 0);
    for (NodeId a = 1; a < t.node_count(); ++a) {
        depth[a] = depth[t.node(a).parent] + 1;
    }
    auto climb = [&](BlockId b, NodeId a) {
        while (t.block(b).node != a) {
            b = t.block(b).parent_block;
        }
        return b;
    };
    std::set<std::pair<BlockId, BlockId>> checked;
    for (Vertex u = 0; u < n; ++u) {
        for (const Arc& arc : g.neighbors(u)) {
            const Vertex v = arc.to;
            if (v < u) {
                continue;
            }
            NodeId x = t.leaf_of(u);
            NodeId y = t.leaf_of(v);
            while (depth[x] > depth[y]) {
                x = t.node(x).parent;
            }
            while (depth[y] > depth[x]) {
                y = t.node(y).parent;
            }
            while (x != y) {
                x = t.node(x).parent;
                y = t.node(y).parent;
            }
            const BlockId bx = climb(t.node(t.leaf_of(u)).first_block, x);
            const BlockId by = climb(t.node(t.leaf_of(v)).first_block, x);
            if (bx == by) {
                return TreeViolation{P::kCompatibility, "edge inside a single block of node " + std::to_string(x),
                                     {u, v}};
            }
            if (!checked.insert({std::min(bx, by), std::max(bx, by)}).second) {
                continue;
            }
            const VertexSet xs = t.vertices_of_block(bx);
            const VertexSet ys = t.vertices_of_block(by);
            for (Vertex p : xs) {
                for (Vertex q : ys) {
                    if (!edges.count(std::uint64_t{p} << 32 | q)) {
                        return TreeViolation{P::kCompatibility,
                                             "blocks b" + std::to_string(bx) + " and b" + std::to_string(by) +
                                                 " are linked by an edge but not completely joined",
                                             {u, v, p, q}};
                    }
                }
            }
        }
    }
    return std::nullopt;
}

std::vector<std::uint64_t> leaf_weights(const PartitionTree& t) {
    std::vector<std::uint64_t> w(t.node_count(), 0);
    for (NodeId a = 0; a < t.node_count(); ++a) {
        w[a] = t.is_leaf(a) ? 1 : 0;
    }
    return w;
}

namespace {

std::vector<std::uint64_t> subtree_weights(const PartitionTree& t, std::span<const std::uint64_t> w) {
    if (w.size() != t.node_count()) {
        throw std::invalid_argument("weight vector does not match the tree");
    }
    std::vector<std::uint64_t> sw(w.begin(), w.end());
    for (NodeId a = static_cast<NodeId>(t.node_count()); a-- > 1;) {
        sw[t.node(a).parent] += sw[a];
    }
    return sw;
}

}  // namespace

NodeId centroid(const PartitionTree& t, std::span<const std::uint64_t> w) {
    if (t.empty()) {
        throw std::invalid_argument("centroid of an empty tree");
    }
    const auto sw = subtree_weights(t, w);
    const std::uint64_t total = sw[0];
    for (NodeId a = 0; a < t.node_count(); ++a) {
        std::uint64_t heaviest = total - sw[a];
        for (NodeId c : t.node(a).children) {
            heaviest = std::max(heaviest, sw[c]);
        }
        if (2 * heaviest <= total) {
            return a;
        }
    }
    throw std::logic_error("no centroid found");
}

NodeId centroid(const PartitionTree& t) {
    return centroid(t, leaf_weights(t));
}

Bipartition bipartition_components(const PartitionTree& t, NodeId c, std::span<const std::uint64_t> w) {
    const auto sw = subtree_weights(t, w);
    const std::uint64_t total = sw[0];
    std::vector<TreeComponent> comps;
    if (t.node(c).parent != kNoNode) {
        comps.push_back({t.node(c).parent, true, total - sw[c]});
    }
    for (NodeId a : t.node(c).children) {
        comps.push_back({a, false, sw[a]});
    }
    Bipartition out;
    auto finish = [&]() {
        for (const auto& x : out.first) {
            out.first_weight += x.weight;
        }
        for (const auto& x : out.second) {
            out.second_weight += x.weight;
        }
        return out;
    };
    if (comps.size() <= 1 || 3 * w[c] > total) {
        // connected remainder, or heavy centroid: any split will do
        out.first.assign(comps.begin(), comps.begin() + std::min<std::size_t>(1, comps.size()));
        if (comps.size() > 1) {
            out.second.assign(comps.begin() + 1, comps.end());
        }
        return finish();
    }
    std::size_t i0 = comps.size();
    std::uint64_t prefix = 0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        prefix += comps[i].weight;
        if (3 * prefix > 2 * total) {
            i0 = i;
            break;
        }
    }
    if (i0 == comps.size()) {
        out.first.assign(comps.begin(), comps.begin() + 1);
        out.second.assign(comps.begin() + 1, comps.end());
        return finish();
    }
    std::uint64_t suffix = 0;
    for (std::size_t i = i0; i < comps.size(); ++i) {
        suffix += comps[i].weight;
    }
    if (3 * suffix <= 2 * total) {
        out.first.assign(comps.begin(), comps.begin() + static_cast<std::ptrdiff_t>(i0));
        out.second.assign(comps.begin() + static_cast<std::ptrdiff_t>(i0), comps.end());
    } else {
        out.first.push_back(comps[i0]);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (i != i0) {
                out.second.push_back(comps[i]);
            }
        }
    }
    return finish();
}

std::vector<NodeId> cut_children(const PartitionTree& t, NodeId c) {
    if (t.is_leaf(c)) {
        throw std::invalid_argument("cut at a leaf");
    }
    const auto w = leaf_weights(t);
    const Bipartition parts = bipartition_components(t, c, w);
    const bool first_has_upper =
        std::any_of(parts.first.begin(), parts.first.end(), [](const TreeComponent& x) { return x.upper; });
    const auto& side = first_has_upper ? parts.second : parts.first;
    std::vector<NodeId> out;
    for (const TreeComponent& x : side) {
        out.push_back(x.root);
    }
    if (out.empty()) {
        throw std::logic_error("cut side is empty");
    }
    return out;
}

std::vector<VertexSet> minimal_partition(const Graph& g, std::span<const Vertex> a) {
    const std::size_t n = g.vertex_count();
    if (a.empty()) {
        return {};
    }
    // Partition refinement over the members of A: classes are contiguous
    // ranges of `elems`, split by the neighbourhood of each outside vertex.
    std::vector<std::uint32_t> pos(n, kNoVertex);
    std::vector<Vertex> elems(a.begin(), a.end());
    for (std::uint32_t i = 0; i < elems.size(); ++i) {
        if (elems[i] >= n || pos[elems[i]] != kNoVertex) {
            throw std::invalid_argument("invalid vertex subset");
        }
        pos[elems[i]] = i;
    }
    std::vector<std::uint32_t> cls(elems.size(), 0);  // class per position
    std::vector<std::uint32_t> begin{0};
    std::vector<std::uint32_t> end{static_cast<std::uint32_t>(elems.size())};
    std::vector<std::uint32_t> marked{0};

    std::vector<char> outside_seen(n, 0);
    std::vector<Vertex> outside;
    for (Vertex v : a) {
        for (const Arc& arc : g.neighbors(v)) {
            if (pos[arc.to] == kNoVertex && !outside_seen[arc.to]) {
                outside_seen[arc.to] = 1;
                outside.push_back(arc.to);
            }
        }
    }
    std::vector<std::uint32_t> touched;
    for (Vertex x : outside) {
        touched.clear();
        for (const Arc& arc : g.neighbors(x)) {
            const std::uint32_t p = pos[arc.to];
            if (p == kNoVertex) {
                continue;
            }
            const std::uint32_t c = cls[p];
            if (marked[c] == 0) {
                touched.push_back(c);
            }
            // move to the marked prefix of its class
            const std::uint32_t q = begin[c] + marked[c]++;
            std::swap(elems[p], elems[q]);
            pos[elems[p]] = p;
            pos[elems[q]] = q;
        }
        for (std::uint32_t c : touched) {
            if (marked[c] < end[c] - begin[c]) {
                const auto nc = static_cast<std::uint32_t>(begin.size());
                begin.push_back(begin[c]);
                end.push_back(begin[c] + marked[c]);
                marked.push_back(0);
                for (std::uint32_t p = begin[nc]; p < end[nc]; ++p) {
                    cls[p] = nc;
                }
                begin[c] += marked[c];
            }
            marked[c] = 0;
        }
    }
    std::vector<VertexSet> blocks;
    for (std::size_t c = 0; c < begin.size(); ++c) {
        if (begin[c] < end[c]) {
            VertexSet block(elems.begin() + begin[c], elems.begin() + end[c]);
            std::sort(block.begin(), block.end());
            blocks.push_back(std::move(block));
        }
    }
    std::sort(blocks.begin(), blocks.end(), [](const VertexSet& x, const VertexSet& y) { return x[0] < y[0]; });
    return blocks;
}

Module module_of_node(const PartitionTree& t, NodeId a) {
    Module m;
    m.vertices = t.vertices_of(a);
    m.blocks = t.partition_of(a);
    return m;
}

Module module_of_children(const PartitionTree& t, NodeId parent, std::span<const NodeId> children) {
    std::vector<char> chosen(t.node_count(), 0);
    for (NodeId c : children) {
        if (c >= t.node_count() || t.node(c).parent != parent) {
            throw std::invalid_argument("node is not a child of the given parent");
        }
        chosen[c] = 1;
    }
    Module m;
    for (NodeId c : children) {
        const VertexSet vs = t.vertices_of(c);
        m.vertices.insert(m.vertices.end(), vs.begin(), vs.end());
    }
    std::sort(m.vertices.begin(), m.vertices.end());
    for (BlockId b : t.blocks_of(parent)) {
        VertexSet part;
        for (BlockId cb : t.block(b).child_blocks) {
            if (chosen[t.block(cb).node]) {
                const VertexSet vs = t.vertices_of_block(cb);
                part.insert(part.end(), vs.begin(), vs.end());
            }
        }
        if (!part.empty()) {
            std::sort(part.begin(), part.end());
            m.blocks.push_back(std::move(part));
        }
    }
    return m;
}

PartitionTree restrict_tree(const PartitionTree& t, std::span<const char> keep, std::span<const Vertex> remap) {
    const std::size_t count = t.node_count();
    auto kept_vertex = [&](Vertex v) { return v < keep.size() && keep[v] != 0; };

    std::vector<std::uint32_t> sizes(t.block_count(), 0);
    for (BlockId b = static_cast<BlockId>(t.block_count()); b-- > 0;) {
        const auto& block = t.block(b);
        if (block.vertex != kNoVertex) {
            sizes[b] = kept_vertex(block.vertex) ? 1 : 0;
        } else {
            for (BlockId c : block.child_blocks) {
                sizes[b] += sizes[c];
            }
        }
    }
    std::vector<std::uint32_t> alive(count, 0);
    for (NodeId a = 0; a < count; ++a) {
        for (BlockId b : t.blocks_of(a)) {
            alive[a] += sizes[b];
        }
    }

    PartitionTree out;
    std::vector<NodeId> host(count, kNoNode);       // nearest kept ancestor-or-self, new id
    std::vector<BlockId> block_map(t.block_count(), kNoBlock);
    for (NodeId a = 0; a < count; ++a) {
        const auto& node = t.node(a);
        if (alive[a] == 0) {
            a = node.subtree_end - 1;  // skip the whole subtree
            continue;
        }
        const NodeId up = node.parent == kNoNode ? kNoNode : host[node.parent];
        std::size_t live_children = 0;
        for (NodeId c : node.children) {
            live_children += alive[c] > 0 ? 1 : 0;
        }
        if (!node.children.empty() && live_children == 1) {
            // contract: blocks forward to the containing kept block
            host[a] = up;
            for (BlockId b : t.blocks_of(a)) {
                const BlockId pb = t.block(b).parent_block;
                block_map[b] = pb == kNoBlock ? kNoBlock : block_map[pb];
            }
            continue;
        }
        const auto id = static_cast<NodeId>(out.nodes_.size());
        host[a] = id;
        PartitionTree::Node fresh;
        fresh.parent = up;
        fresh.original = node.original;
        fresh.first_block = static_cast<BlockId>(out.blocks_.size());
        if (up != kNoNode) {
            out.nodes_[up].children.push_back(id);
        }
        for (BlockId b : t.blocks_of(a)) {
            if (sizes[b] == 0) {
                continue;
            }
            const auto nb = static_cast<BlockId>(out.blocks_.size());
            block_map[b] = nb;
            PartitionTree::Block blk;
            blk.node = id;
            const BlockId pb = t.block(b).parent_block;
            blk.parent_block = pb == kNoBlock ? kNoBlock : block_map[pb];
            if (blk.parent_block != kNoBlock) {
                out.blocks_[blk.parent_block].child_blocks.push_back(nb);
            }
            const Vertex v = t.block(b).vertex;
            blk.vertex = v == kNoVertex ? kNoVertex : (remap.empty() ? v : remap[v]);
            out.blocks_.push_back(std::move(blk));
            ++fresh.block_count;
        }
        out.nodes_.push_back(std::move(fresh));
    }
    out.finish();
    return out;
}

PartitionTree split_partition_tree(const PartitionTree& t, NodeId c, std::span<const NodeId> children, SplitSide side,
                                   std::span<const Vertex> remap) {
    std::vector<char> keep(t.vertex_bound(), side == SplitSide::kCutSide ? 0 : 1);
    for (NodeId a : children) {
        if (a >= t.node_count() || t.node(a).parent != c) {
            throw std::invalid_argument("split child is not a child of the centroid");
        }
        for (NodeId x = a; x < t.subtree_end(a); ++x) {
            if (t.is_leaf(x)) {
                keep[t.block(t.node(x).first_block).vertex] = side == SplitSide::kCutSide ? 1 : 0;
            }
        }
    }
    if (side == SplitSide::kCutSide) {
        // vertices outside the subtree of c never reach the cut side
        for (NodeId x = 0; x < t.node_count(); ++x) {
            if (t.is_leaf(x) && !t.in_subtree(x, c)) {
                keep[t.block(t.node(x).first_block).vertex] = 0;
            }
        }
    }
    return restrict_tree(t, keep, remap);
}

LcaIndex::LcaIndex(const PartitionTree& t) {
    if (t.empty()) {
        return;
    }
    NodeId max_original = 0;
    for (NodeId a = 0; a < t.node_count(); ++a) {
        max_original = std::max(max_original, t.node(a).original);
    }
    first_.assign(max_original + 1, std::numeric_limits<std::uint32_t>::max());
    euler_.reserve(2 * t.node_count());
    std::vector<std::pair<NodeId, std::size_t>> stack{{t.root(), 0}};
    std::vector<std::uint32_t> node_depth(t.node_count(), 0);
    while (!stack.empty()) {
        auto& [a, next] = stack.back();
        const NodeId orig = t.node(a).original;
        if (next == 0) {
            first_[orig] = static_cast<std::uint32_t>(euler_.size());
        }
        euler_.push_back(orig);
        depth_.push_back(node_depth[a]);
        const auto& children = t.node(a).children;
        if (next < children.size()) {
            const NodeId c = children[next++];
            node_depth[c] = node_depth[a] + 1;
            stack.emplace_back(c, 0);
        } else {
            stack.pop_back();
        }
    }
    const std::size_t m = euler_.size();
    table_.emplace_back(m);
    std::iota(table_[0].begin(), table_[0].end(), 0);
    for (std::size_t len = 2; len <= m; len *= 2) {
        const auto& prev = table_.back();
        std::vector<std::uint32_t> level(m - len + 1);
        for (std::size_t i = 0; i + len <= m; ++i) {
            const std::uint32_t x = prev[i];
            const std::uint32_t y = prev[i + len / 2];
            level[i] = depth_[x] <= depth_[y] ? x : y;
        }
        table_.push_back(std::move(level));
    }
}

NodeId LcaIndex::query(NodeId a, NodeId b) const {
    constexpr auto missing = std::numeric_limits<std::uint32_t>::max();
    if (a >= first_.size() || b >= first_.size() || first_[a] == missing || first_[b] == missing) {
        throw std::out_of_range("node id is not part of the indexed tree");
    }
    std::uint32_t lo = first_[a];
    std::uint32_t hi = first_[b];
    if (lo > hi) {
        std::swap(lo, hi);
    }
    const std::size_t len = hi - lo + 1;
    const auto level = static_cast<std::size_t>(std::bit_width(len) - 1);
    const std::uint32_t x = table_[level][lo];
    const std::uint32_t y = table_[level][hi + 1 - (std::size_t{1} << level)];
    return euler_[depth_[x] <= depth_[y] ? x : y];
}

}  // namespace cwdist
