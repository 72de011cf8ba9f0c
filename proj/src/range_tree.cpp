#include "cwdist/range_tree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cwdist {

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;

bool better(const MaxHit& a, const MaxHit& b) {
    return a.value > b.value || (a.value == b.value && a.payload < b.payload);
}

void fold_max(std::optional<MaxHit>& acc, const MaxHit& hit) {
    if (!acc || better(hit, *acc)) {
        acc = hit;
    }
}

// Half-open index range of sorted `keys` lying inside the interval.
std::pair<std::size_t, std::size_t> index_range(const std::vector<std::int64_t>& keys, const Interval& iv) {
    std::size_t lo = 0;
    std::size_t hi = keys.size();
    switch (iv.lower.kind) {
        case BoundKind::kUnbounded:
            break;
        case BoundKind::kClosed:
            lo = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), iv.lower.value) - keys.begin());
            break;
        case BoundKind::kOpen:
            lo = static_cast<std::size_t>(std::upper_bound(keys.begin(), keys.end(), iv.lower.value) - keys.begin());
            break;
    }
    switch (iv.upper.kind) {
        case BoundKind::kUnbounded:
            break;
        case BoundKind::kClosed:
            hi = static_cast<std::size_t>(std::upper_bound(keys.begin(), keys.end(), iv.upper.value) - keys.begin());
            break;
        case BoundKind::kOpen:
            hi = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), iv.upper.value) - keys.begin());
            break;
    }
    return {lo, std::max(lo, hi)};
}

}  // namespace

bool Interval::contains(std::int64_t x) const noexcept {
    switch (lower.kind) {
        case BoundKind::kUnbounded:
            break;
        case BoundKind::kClosed:
            if (x < lower.value) {
                return false;
            }
            break;
        case BoundKind::kOpen:
            if (x <= lower.value) {
                return false;
            }
            break;
    }
    switch (upper.kind) {
        case BoundKind::kUnbounded:
            return true;
        case BoundKind::kClosed:
            return x <= upper.value;
        case BoundKind::kOpen:
            return x < upper.value;
    }
    return true;
}

RangeTree::RangeTree(std::size_t dims, std::span<const Point> points) : dims_(dims), size_(points.size()) {
    if (dims == 0) {
        throw std::invalid_argument("range tree needs at least one dimension");
    }
    coords_.reserve(points.size() * dims);
    for (const Point& p : points) {
        if (p.coords.size() != dims) {
            throw std::invalid_argument("point dimension does not match the tree");
        }
        coords_.insert(coords_.end(), p.coords.begin(), p.coords.end());
        values_.push_back(p.value);
        payloads_.push_back(p.payload);
    }
    std::vector<std::uint32_t> ids(points.size());
    for (std::uint32_t i = 0; i < ids.size(); ++i) {
        ids[i] = i;
    }
    root_ = build(0, ids);
}

std::uint32_t RangeTree::build(std::uint32_t dim, std::vector<std::uint32_t>& ids) {
    auto coord = [&](std::uint32_t id) { return coords_[std::size_t{id} * dims_ + dim]; };
    std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) { return coord(a) < coord(b); });
    if (dim + 1 == dims_) {
        Last last;
        last.coords.reserve(ids.size());
        last.prefix.assign(ids.size() + 1, 0);
        last.width = 1;
        while (last.width < ids.size()) {
            last.width *= 2;
        }
        last.best.assign(2 * last.width, MaxHit{std::numeric_limits<std::int64_t>::min(), kNone});
        for (std::size_t i = 0; i < ids.size(); ++i) {
            last.coords.push_back(coord(ids[i]));
            last.prefix[i + 1] = last.prefix[i] + values_[ids[i]];
            last.best[last.width + i] = {values_[ids[i]], payloads_[ids[i]]};
        }
        for (std::size_t i = last.width; i-- > 1;) {
            const MaxHit& a = last.best[2 * i];
            const MaxHit& b = last.best[2 * i + 1];
            last.best[i] = better(b, a) ? b : a;
        }
        lasts_.push_back(std::move(last));
        return static_cast<std::uint32_t>((lasts_.size() - 1) * 2 + 1);
    }
    Layer layer;
    layer.dim = dim;
    std::vector<std::uint32_t> key_of(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::int64_t c = coord(ids[i]);
        if (layer.keys.empty() || layer.keys.back() != c) {
            layer.keys.push_back(c);
        }
        key_of[i] = static_cast<std::uint32_t>(layer.keys.size() - 1);
    }
    if (!layer.keys.empty()) {
        build_node(layer, dim, 0, static_cast<std::uint32_t>(layer.keys.size()), ids, key_of);
    }
    layers_.push_back(std::move(layer));
    return static_cast<std::uint32_t>((layers_.size() - 1) * 2);
}

// ids/key_of hold the points of keys [lo, hi) sorted by this dimension.
std::uint32_t RangeTree::build_node(Layer& layer, std::uint32_t dim, std::uint32_t lo, std::uint32_t hi,
                                    std::vector<std::uint32_t>& ids, const std::vector<std::uint32_t>& key_of) {
    const auto index = static_cast<std::uint32_t>(layer.nodes.size());
    layer.nodes.push_back({lo, hi, kNone, kNone, kNone});
    if (hi - lo > 1) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        const auto split = static_cast<std::size_t>(
            std::lower_bound(key_of.begin(), key_of.end(), mid) - key_of.begin());
        std::vector<std::uint32_t> left_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(split));
        std::vector<std::uint32_t> left_keys(key_of.begin(), key_of.begin() + static_cast<std::ptrdiff_t>(split));
        std::vector<std::uint32_t> right_ids(ids.begin() + static_cast<std::ptrdiff_t>(split), ids.end());
        std::vector<std::uint32_t> right_keys(key_of.begin() + static_cast<std::ptrdiff_t>(split), key_of.end());
        const std::uint32_t l = build_node(layer, dim, lo, mid, left_ids, left_keys);
        const std::uint32_t r = build_node(layer, dim, mid, hi, right_ids, right_keys);
        layer.nodes[index].left = l;
        layer.nodes[index].right = r;
    }
    std::vector<std::uint32_t> copy = ids;
    layer.nodes[index].inner = build(dim + 1, copy);
    return index;
}

RangeAnswer RangeTree::query(const Box& box) const {
    if (box.size() != dims_) {
        throw std::invalid_argument("box dimension does not match the tree");
    }
    RangeAnswer out;
    if (size_ > 0) {
        visit(root_, box, out);
    }
    return out;
}

void RangeTree::visit(std::uint32_t structure, const Box& box, RangeAnswer& out) const {
    if (structure & 1u) {
        const Last& last = lasts_[structure / 2];
        visit_last(last, box[dims_ - 1], out);
        return;
    }
    const Layer& layer = layers_[structure / 2];
    if (layer.nodes.empty()) {
        return;
    }
    const auto [lo, hi] = index_range(layer.keys, box[layer.dim]);
    if (lo < hi) {
        visit_node(layer, 0, static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi), box, out);
    }
}

void RangeTree::visit_node(const Layer& layer, std::uint32_t node, std::uint32_t lo, std::uint32_t hi,
                           const Box& box, RangeAnswer& out) const {
    const Node& nd = layer.nodes[node];
    if (hi <= nd.key_begin || nd.key_end <= lo) {
        return;
    }
    if (lo <= nd.key_begin && nd.key_end <= hi) {
        visit(nd.inner, box, out);
        return;
    }
    visit_node(layer, nd.left, lo, hi, box, out);
    visit_node(layer, nd.right, lo, hi, box, out);
}

void RangeTree::visit_last(const Last& last, const Interval& iv, RangeAnswer& out) const {
    const auto [lo, hi] = index_range(last.coords, iv);
    if (lo >= hi) {
        return;
    }
    out.count += hi - lo;
    out.sum += last.prefix[hi] - last.prefix[lo];
    std::optional<MaxHit> best;
    for (std::size_t l = lo + last.width, r = hi + last.width; l < r; l /= 2, r /= 2) {
        if (l & 1u) {
            fold_max(best, last.best[l++]);
        }
        if (r & 1u) {
            fold_max(best, last.best[--r]);
        }
    }
    if (best) {
        fold_max(out.max, *best);
    }
}

}  // namespace cwdist
