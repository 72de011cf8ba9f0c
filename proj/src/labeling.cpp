#include "cwdist/labeling.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace cwdist {

std::size_t DistanceLabel::stored_distances() const noexcept {
    std::size_t total = 0;
    for (const LevelRecord& level : levels) {
        total += level.to_blocks.size() + level.to_block_neighbors.size();
    }
    return total;
}

namespace {

// Centroid decomposition on the current induced subgraph; ids are local,
// `to_global` maps them back.
void label_recursive(const Graph& g, const std::vector<Vertex>& to_global, const PartitionTree& t,
                     std::vector<DistanceLabel>& labels) {
    const std::size_t n = g.vertex_count();
    if (n <= 1) {
        return;
    }
    const NodeId c = centroid(t);
    const std::vector<NodeId> children = cut_children(t, c);

    std::vector<char> in_a(n, 0);
    for (NodeId a : children) {
        for (NodeId x = a; x < t.subtree_end(a); ++x) {
            if (t.is_leaf(x)) {
                in_a[t.block(t.node(x).first_block).vertex] = 1;
            }
        }
    }
    VertexSet side_a;
    VertexSet side_b;
    for (Vertex v = 0; v < n; ++v) {
        (in_a[v] ? side_a : side_b).push_back(v);
    }

    const std::vector<VertexSet> blocks = minimal_partition(g, side_a);
    std::vector<DistanceVector> to_x;
    std::vector<DistanceVector> to_y;
    std::vector<char> mark(n, 0);
    for (const VertexSet& block : blocks) {
        VertexSet outside;
        for (Vertex x : block) {
            for (const Arc& arc : g.neighbors(x)) {
                if (!in_a[arc.to] && !mark[arc.to]) {
                    mark[arc.to] = 1;
                    outside.push_back(arc.to);
                }
            }
        }
        for (Vertex y : outside) {
            mark[y] = 0;
        }
        to_x.push_back(multi_source_dist(g, block));
        to_y.push_back(multi_source_dist(g, outside));
    }
    for (Vertex v = 0; v < n; ++v) {
        LevelRecord rec;
        rec.on_cut_side = in_a[v] != 0;
        rec.to_blocks.reserve(blocks.size());
        rec.to_block_neighbors.reserve(blocks.size());
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            rec.to_blocks.push_back(to_x[i][v]);
            rec.to_block_neighbors.push_back(to_y[i][v]);
        }
        labels[to_global[v]].levels.push_back(std::move(rec));
    }
    to_x.clear();
    to_y.clear();

    for (const auto side : {SplitSide::kCutSide, SplitSide::kComplement}) {
        const VertexSet& part = side == SplitSide::kCutSide ? side_a : side_b;
        InducedSubgraph sub = induced_subgraph(g, part);
        std::vector<Vertex> global(part.size());
        for (std::size_t i = 0; i < part.size(); ++i) {
            global[i] = to_global[part[i]];
        }
        const PartitionTree sub_tree = split_partition_tree(t, c, children, side, sub.from_parent);
        label_recursive(sub.graph, global, sub_tree, labels);
    }
}

class Fnv {
public:
    void add(std::uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            hash_ ^= (x >> (8 * i)) & 0xffu;
            hash_ *= 0x100000001b3ull;
        }
    }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

std::uint64_t content_hash(const LabelSet& set) {
    Fnv h;
    h.add(set.labels.size());
    h.add(static_cast<std::uint64_t>(set.width));
    for (const DistanceLabel& label : set.labels) {
        h.add(label.levels.size());
        for (const LevelRecord& rec : label.levels) {
            h.add(rec.on_cut_side ? 1 : 0);
            h.add(rec.to_blocks.size());
            for (Dist d : rec.to_blocks) {
                h.add(d);
            }
            for (Dist d : rec.to_block_neighbors) {
                h.add(d);
            }
        }
    }
    return h.value();
}

Dist cross_term(const LevelRecord& from, const LevelRecord& to) {
    Dist best = kInfinity;
    for (std::size_t i = 0; i < from.to_blocks.size(); ++i) {
        best = std::min(best, add_dist(add_dist(from.to_blocks[i], 1), to.to_block_neighbors[i]));
    }
    return best;
}

}  // namespace

LabelSet build_labels(const Graph& g, const PartitionTree& t) {
    const std::size_t n = g.vertex_count();
    if (t.vertex_count() != n || t.vertex_bound() != n) {
        throw std::invalid_argument("partition tree does not match the graph");
    }
    LabelSet set;
    set.width = static_cast<int>(t.width());
    set.labels.resize(n);
    set.names = g.names();
    std::vector<Vertex> identity(n);
    for (Vertex v = 0; v < n; ++v) {
        identity[v] = v;
    }
    label_recursive(g, identity, t, set.labels);
    set.build = content_hash(set);
    for (DistanceLabel& label : set.labels) {
        label.build = set.build;
    }
    return set;
}

Dist decode_distance(const DistanceLabel& lu, const DistanceLabel& lv) {
    if (lu.build != lv.build) {
        throw LabelMismatchError("labels come from different builds");
    }
    if (&lu == &lv) {
        return 0;
    }
    const std::size_t depth = std::min(lu.levels.size(), lv.levels.size());
    Dist best = kInfinity;
    for (std::size_t l = 0; l < depth; ++l) {
        const LevelRecord& ru = lu.levels[l];
        const LevelRecord& rv = lv.levels[l];
        if (ru.to_blocks.size() != rv.to_blocks.size()) {
            throw LabelMismatchError("labels disagree on a cut");
        }
        if (ru.on_cut_side != rv.on_cut_side) {
            const Dist cross = ru.on_cut_side ? cross_term(ru, rv) : cross_term(rv, ru);
            return std::min(best, cross);
        }
        best = std::min({best, cross_term(ru, rv), cross_term(rv, ru)});
    }
    if (lu == lv) {
        return 0;
    }
    throw LabelMismatchError("labels are never separated by a cut");
}

DistanceMatrix apsp_via_labels(const LabelSet& labels) {
    const std::size_t n = labels.size();
    DistanceMatrix m(n);
    for (Vertex u = 0; u < n; ++u) {
        m(u, u) = 0;
        for (Vertex v = u + 1; v < n; ++v) {
            const Dist d = decode_distance(labels.labels[u], labels.labels[v]);
            m(u, v) = d;
            m(v, u) = d;
        }
    }
    return m;
}

DistanceMatrix apsp_via_labels(const Graph& g, const PartitionTree& t) {
    return apsp_via_labels(build_labels(g, t));
}

namespace {

constexpr char kMagic[4] = {'C', 'W', 'D', 'L'};

void put_fixed(std::ostream& out, std::uint64_t x, int bytes) {
    for (int i = 0; i < bytes; ++i) {
        out.put(static_cast<char>((x >> (8 * i)) & 0xffu));
    }
}

void put_varint(std::ostream& out, std::uint64_t x) {
    while (x >= 0x80) {
        out.put(static_cast<char>((x & 0x7fu) | 0x80u));
        x >>= 7;
    }
    out.put(static_cast<char>(x));
}

// 0 encodes infinity, d + 1 encodes d
void put_dist(std::ostream& out, Dist d) {
    put_varint(out, d == kInfinity ? 0 : d + 1);
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint8_t byte() {
        const int ch = in_.get();
        if (ch == std::char_traits<char>::eof()) {
            throw LabelFormatError("label file is truncated");
        }
        return static_cast<std::uint8_t>(ch);
    }
    std::uint64_t fixed(int bytes) {
        std::uint64_t x = 0;
        for (int i = 0; i < bytes; ++i) {
            x |= std::uint64_t{byte()} << (8 * i);
        }
        return x;
    }
    std::uint64_t varint() {
        std::uint64_t x = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const std::uint8_t b = byte();
            x |= std::uint64_t{b & 0x7fu} << shift;
            if (!(b & 0x80u)) {
                return x;
            }
        }
        throw LabelFormatError("malformed varint");
    }
    Dist dist() {
        const std::uint64_t x = varint();
        return x == 0 ? kInfinity : x - 1;
    }

private:
    std::istream& in_;
};

}  // namespace

void serialize_labels(std::ostream& out, const LabelSet& labels) {
    out.write(kMagic, sizeof kMagic);
    put_fixed(out, kLabelFormatVersion, 4);
    put_fixed(out, labels.build, 8);
    put_fixed(out, labels.size(), 8);
    put_fixed(out, static_cast<std::uint64_t>(labels.width), 4);
    put_fixed(out, labels.names.empty() ? 0 : 1, 1);
    for (const std::string& name : labels.names) {
        put_varint(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const DistanceLabel& label : labels.labels) {
        put_varint(out, label.levels.size());
        for (const LevelRecord& rec : label.levels) {
            out.put(rec.on_cut_side ? 1 : 0);
            put_varint(out, rec.to_blocks.size());
            for (Dist d : rec.to_blocks) {
                put_dist(out, d);
            }
            for (Dist d : rec.to_block_neighbors) {
                put_dist(out, d);
            }
        }
    }
}

LabelSet deserialize_labels(std::istream& in) {
    Reader r(in);
    for (char expected : kMagic) {
        if (static_cast<char>(r.byte()) != expected) {
            throw LabelFormatError("not a label file");
        }
    }
    const auto version = static_cast<std::uint32_t>(r.fixed(4));
    if (version != kLabelFormatVersion) {
        throw LabelFormatError("unsupported label format version " + std::to_string(version));
    }
    LabelSet set;
    set.build = r.fixed(8);
    const std::uint64_t n = r.fixed(8);
    set.width = static_cast<int>(r.fixed(4));
    const std::uint8_t has_names = r.byte();
    if (has_names > 1) {
        throw LabelFormatError("corrupted header");
    }
    if (has_names) {
        for (std::uint64_t v = 0; v < n; ++v) {
            std::string name(r.varint(), '\0');
            for (char& ch : name) {
                ch = static_cast<char>(r.byte());
            }
            set.names.push_back(std::move(name));
        }
    }
    for (std::uint64_t v = 0; v < n; ++v) {
        DistanceLabel label;
        label.build = set.build;
        const std::uint64_t levels = r.varint();
        for (std::uint64_t l = 0; l < levels; ++l) {
            LevelRecord rec;
            const std::uint8_t bit = r.byte();
            if (bit > 1) {
                throw LabelFormatError("corrupted level record");
            }
            rec.on_cut_side = bit == 1;
            const std::uint64_t blocks = r.varint();
            if (blocks > static_cast<std::uint64_t>(set.width)) {
                throw LabelFormatError("level record wider than the label width");
            }
            for (std::uint64_t i = 0; i < blocks; ++i) {
                rec.to_blocks.push_back(r.dist());
            }
            for (std::uint64_t i = 0; i < blocks; ++i) {
                rec.to_block_neighbors.push_back(r.dist());
            }
            label.levels.push_back(std::move(rec));
        }
        set.labels.push_back(std::move(label));
    }
    if (content_hash(set) != set.build) {
        throw LabelFormatError("label contents do not match the build hash");
    }
    return set;
}

}  // namespace cwdist
