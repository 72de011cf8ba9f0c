#include "cwdist/oracle.hpp"

#include <algorithm>

namespace cwdist::oracle {

namespace {

std::vector<Dist> search(const Graph& g, Vertex s) {
    const std::size_t n = g.vertex_count();
    std::vector<Dist> dist(n, kInfinity);
    std::vector<char> done(n, 0);
    dist[s] = 0;
    if (g.unit_weights()) {
        std::vector<Vertex> frontier{s};
        for (Dist level = 1; !frontier.empty(); ++level) {
            std::vector<Vertex> next;
            for (Vertex u : frontier) {
                for (const Arc& arc : g.neighbors(u)) {
                    if (dist[arc.to] == kInfinity) {
                        dist[arc.to] = level;
                        next.push_back(arc.to);
                    }
                }
            }
            frontier.swap(next);
        }
        return dist;
    }
    // array scan, quadratic
    for (std::size_t round = 0; round < n; ++round) {
        Vertex u = kNoVertex;
        for (Vertex v = 0; v < n; ++v) {
            if (!done[v] && dist[v] != kInfinity && (u == kNoVertex || dist[v] < dist[u])) {
                u = v;
            }
        }
        if (u == kNoVertex) {
            break;
        }
        done[u] = 1;
        for (const Arc& arc : g.neighbors(u)) {
            if (dist[u] + arc.weight < dist[arc.to]) {
                dist[arc.to] = dist[u] + arc.weight;
            }
        }
    }
    return dist;
}

bool inside(std::int64_t x, const Interval& iv) {
    if (iv.lower.kind == BoundKind::kClosed && !(iv.lower.value <= x)) {
        return false;
    }
    if (iv.lower.kind == BoundKind::kOpen && !(iv.lower.value < x)) {
        return false;
    }
    if (iv.upper.kind == BoundKind::kClosed && !(x <= iv.upper.value)) {
        return false;
    }
    if (iv.upper.kind == BoundKind::kOpen && !(x < iv.upper.value)) {
        return false;
    }
    return true;
}

}  // namespace

DistanceMatrix brute_apsp(const Graph& g, std::size_t cap) {
    const std::size_t n = g.vertex_count();
    if (n > cap) {
        throw CapExceeded("graph has " + std::to_string(n) + " vertices, oracle cap is " + std::to_string(cap));
    }
    DistanceMatrix m(n);
    for (Vertex s = 0; s < n; ++s) {
        const std::vector<Dist> row = search(g, s);
        for (Vertex v = 0; v < n; ++v) {
            m(s, v) = row[v];
        }
    }
    return m;
}

DistanceMatrix floyd_warshall(const Graph& g) {
    const std::size_t n = g.vertex_count();
    DistanceMatrix m(n);
    for (Vertex u = 0; u < n; ++u) {
        m(u, u) = 0;
        for (const Arc& arc : g.neighbors(u)) {
            m(u, arc.to) = std::min<Dist>(m(u, arc.to), arc.weight);
        }
    }
    for (Vertex k = 0; k < n; ++k) {
        for (Vertex i = 0; i < n; ++i) {
            if (m(i, k) == kInfinity) {
                continue;
            }
            for (Vertex j = 0; j < n; ++j) {
                if (m(k, j) != kInfinity && m(i, k) + m(k, j) < m(i, j)) {
                    m(i, j) = m(i, k) + m(k, j);
                }
            }
        }
    }
    return m;
}

EccTotals brute_ecc_td(const Graph& g, std::size_t cap) {
    const DistanceMatrix m = brute_apsp(g, cap);
    const std::size_t n = g.vertex_count();
    EccTotals out{std::vector<Dist>(n, 0), std::vector<Dist>(n, 0)};
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = 0; v < n; ++v) {
            if (m(u, v) == kInfinity) {
                throw std::invalid_argument("graph is disconnected");
            }
            out.ecc[u] = std::max(out.ecc[u], m(u, v));
            out.total[u] += m(u, v);
        }
    }
    return out;
}

RangeAnswer scan_range_query(std::span<const Point> points, const Box& box) {
    RangeAnswer out;
    for (const Point& p : points) {
        bool hit = p.coords.size() == box.size();
        for (std::size_t d = 0; hit && d < box.size(); ++d) {
            hit = inside(p.coords[d], box[d]);
        }
        if (!hit) {
            continue;
        }
        ++out.count;
        out.sum += p.value;
        if (!out.max || p.value > out.max->value || (p.value == out.max->value && p.payload < out.max->payload)) {
            out.max = MaxHit{p.value, p.payload};
        }
    }
    return out;
}

}  // namespace cwdist::oracle
