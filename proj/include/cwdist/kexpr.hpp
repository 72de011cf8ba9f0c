#ifndef CWDIST_KEXPR_HPP
#define CWDIST_KEXPR_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cwdist/graph.hpp"

namespace cwdist {

enum class OpKind : std::uint8_t { kVertex, kUnion, kJoin, kRelabel };

inline constexpr std::uint32_t kNoChild = std::numeric_limits<std::uint32_t>::max();

struct KNode {
    OpKind kind = OpKind::kVertex;
    int first = 0;   // vertex label, or i of join/relabel
    int second = 0;  // j of join/relabel
    std::uint32_t left = kNoChild;
    std::uint32_t right = kNoChild;  // unions only
    std::string name;                // vertices only
};

class KExpressionError : public std::runtime_error {
public:
    explicit KExpressionError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/*
 * A validated clique-width expression. Nodes are stored so that every child
 * precedes its parent; the root is the last node. Rules enforced on
 * construction: labels >= 1, join and relabel take distinct labels, vertex
 * names are unique, and every relabel rho(i,j) has at least one vertex
 * carrying label i below it.
 */
class KExpression {
public:
    KExpression() = default;

    // Throws KExpressionError on any rule violation. `positions` (line, column
    // per node) is only used for error messages.
    static KExpression from_nodes(std::vector<KNode> nodes,
                                  std::optional<int> max_width = std::nullopt,
                                  const std::vector<std::pair<std::size_t, std::size_t>>* positions = nullptr);

    const std::vector<KNode>& nodes() const noexcept { return nodes_; }
    std::uint32_t root() const noexcept { return static_cast<std::uint32_t>(nodes_.size() - 1); }
    int width() const noexcept { return width_; }
    std::size_t vertex_count() const noexcept { return vertex_count_; }
    bool empty() const noexcept { return nodes_.empty(); }

    // Vertex id of a kVertex node: rank in left-to-right order of the tree.
    Vertex vertex_id(std::uint32_t node) const { return vertex_ids_[node]; }

private:
    std::vector<KNode> nodes_;
    std::vector<Vertex> vertex_ids_;
    int width_ = 0;
    std::size_t vertex_count_ = 0;
};

// Incremental construction; children must be created before their parent.
class KExpressionBuilder {
public:
    std::uint32_t vertex(int label, std::string name);
    std::uint32_t unite(std::uint32_t left, std::uint32_t right);
    std::uint32_t join(int i, int j, std::uint32_t child);
    std::uint32_t relabel(int i, int j, std::uint32_t child);
    // `root` must be the last created node.
    KExpression build(std::optional<int> max_width = std::nullopt) &&;

private:
    std::vector<KNode> nodes_;
};

/*
 * Grammar (whitespace-insensitive, `;` starts a comment):
 *   expr := (v <label> <name>) | (u expr expr) | (j <i> <j> expr) | (r <i> <j> expr)
 */
KExpression parse_kexpression(std::string_view text, std::optional<int> max_width = std::nullopt);

std::string to_string(const KExpression& e);

// Number of operations: every node of the stored tree.
std::size_t expression_size(const KExpression& e);

struct LabeledGraph {
    Graph graph;              // carries vertex names
    std::vector<int> labels;  // final label per vertex
};

LabeledGraph evaluate(const KExpression& e);

/*
 * Random valid expression on n vertices with width <= k, deterministic in
 * seed. Vertices are named v0..v{n-1} in left-to-right order so that name vi
 * has id i. Throws std::invalid_argument on impossible requests.
 */
KExpression random_kexpression(std::size_t n, int k, std::uint64_t seed, bool require_connected = true);

}  // namespace cwdist

#endif
