#ifndef CWDIST_LABELING_HPP
#define CWDIST_LABELING_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwdist/graph.hpp"
#include "cwdist/partition_tree.hpp"

namespace cwdist {

// What one vertex stores about one cut of the centroid decomposition.
struct LevelRecord {
    bool on_cut_side = false;               // vertex lies in the side A of the cut
    std::vector<Dist> to_blocks;            // d(v, X_i) in the current subgraph
    std::vector<Dist> to_block_neighbors;   // d(v, Y_i), Y_i = N(X_i) \ A

    bool operator==(const LevelRecord&) const = default;
};

struct DistanceLabel {
    std::uint64_t build = 0;  // identifies the labelling this label belongs to
    std::vector<LevelRecord> levels;

    std::size_t stored_distances() const noexcept;
    bool operator==(const DistanceLabel&) const = default;
};

struct LabelSet {
    std::uint64_t build = 0;
    int width = 0;
    std::vector<DistanceLabel> labels;
    std::vector<std::string> names;  // empty when the graph had no names

    std::size_t size() const noexcept { return labels.size(); }
};

class LabelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LabelMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument when t does not describe the vertex set of g.
// g may be disconnected.
LabelSet build_labels(const Graph& g, const PartitionTree& t);

// Exact distance from two labels alone; kInfinity for different components.
// Throws LabelMismatchError for labels of different builds.
Dist decode_distance(const DistanceLabel& lu, const DistanceLabel& lv);

DistanceMatrix apsp_via_labels(const Graph& g, const PartitionTree& t);
DistanceMatrix apsp_via_labels(const LabelSet& labels);

inline constexpr std::uint32_t kLabelFormatVersion = 1;

void serialize_labels(std::ostream& out, const LabelSet& labels);
// Throws LabelFormatError on a bad magic, version mismatch or truncation.
LabelSet deserialize_labels(std::istream& in);

}  // namespace cwdist

#endif
