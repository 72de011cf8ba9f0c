#ifndef CWDIST_RANGE_TREE_HPP
#define CWDIST_RANGE_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cwdist {

enum class BoundKind : std::uint8_t { kUnbounded, kClosed, kOpen };

struct Bound {
    BoundKind kind = BoundKind::kUnbounded;
    std::int64_t value = 0;
};

// One side of a box. Endpoints are independently unbounded, closed or open.
struct Interval {
    Bound lower;
    Bound upper;

    static Interval all() { return {}; }
    static Interval closed(std::int64_t lo, std::int64_t hi) {
        return {{BoundKind::kClosed, lo}, {BoundKind::kClosed, hi}};
    }
    static Interval exactly(std::int64_t x) { return closed(x, x); }
    static Interval at_most(std::int64_t hi) { return {{}, {BoundKind::kClosed, hi}}; }
    static Interval less_than(std::int64_t hi) { return {{}, {BoundKind::kOpen, hi}}; }
    static Interval at_least(std::int64_t lo) { return {{BoundKind::kClosed, lo}, {}}; }
    static Interval greater_than(std::int64_t lo) { return {{BoundKind::kOpen, lo}, {}}; }

    bool contains(std::int64_t x) const noexcept;
};

using Box = std::vector<Interval>;

struct Point {
    std::vector<std::int64_t> coords;
    std::int64_t value = 0;
    std::uint32_t payload = 0;
};

struct MaxHit {
    std::int64_t value;
    std::uint32_t payload;
    bool operator==(const MaxHit&) const = default;
};

struct RangeAnswer {
    std::uint64_t count = 0;
    std::int64_t sum = 0;
    std::optional<MaxHit> max;  // larger value wins, then smaller payload
};

enum class QueryKind : std::uint8_t { kMax, kSum, kCount };

/*
 * Static layered range tree. Each dimension but the last is a balanced tree
 * over the distinct coordinate values present; every node owns a structure for
 * the remaining dimensions over its points. The last dimension is a sorted
 * array with prefix sums and a max segment tree. Query time is
 * O(log^d distinct values), no fractional cascading.
 */
class RangeTree {
public:
    RangeTree() = default;
    // Throws std::invalid_argument if dims == 0 or a point has another dimension.
    RangeTree(std::size_t dims, std::span<const Point> points);

    std::size_t dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return size_; }

    // Throws std::invalid_argument on a box of the wrong dimension.
    RangeAnswer query(const Box& box) const;
    std::optional<MaxHit> query_max(const Box& box) const { return query(box).max; }
    std::int64_t query_sum(const Box& box) const { return query(box).sum; }
    std::uint64_t query_count(const Box& box) const { return query(box).count; }

private:
    struct Node {
        std::uint32_t key_begin;
        std::uint32_t key_end;
        std::uint32_t left;
        std::uint32_t right;
        std::uint32_t inner;  // structure over the remaining dimensions
    };
    struct Layer {
        std::uint32_t dim;
        std::vector<std::int64_t> keys;  // distinct values, sorted
        std::vector<Node> nodes;         // nodes[0] is the root
    };
    struct Last {
        std::vector<std::int64_t> coords;  // sorted
        std::vector<std::int64_t> prefix;  // prefix sums of values
        std::vector<MaxHit> best;          // segment tree, leaves at [width, 2 width)
        std::size_t width = 0;
    };

    std::uint32_t build(std::uint32_t dim, std::vector<std::uint32_t>& ids);
    std::uint32_t build_node(Layer& layer, std::uint32_t dim, std::uint32_t lo, std::uint32_t hi,
                             std::vector<std::uint32_t>& ids, const std::vector<std::uint32_t>& key_of);
    void visit(std::uint32_t structure, const Box& box, RangeAnswer& out) const;
    void visit_node(const Layer& layer, std::uint32_t node, std::uint32_t lo, std::uint32_t hi, const Box& box,
                    RangeAnswer& out) const;
    void visit_last(const Last& last, const Interval& iv, RangeAnswer& out) const;

    std::size_t dims_ = 0;
    std::size_t size_ = 0;
    std::vector<std::int64_t> coords_;  // flat, dims_ per point
    std::vector<std::int64_t> values_;
    std::vector<std::uint32_t> payloads_;
    // structure ids: even = layer index * 2, odd = last index * 2 + 1
    std::vector<Layer> layers_;
    std::vector<Last> lasts_;
    std::uint32_t root_ = 0;
};

}  // namespace cwdist

#endif
