#ifndef CWDIST_ORACLE_HPP
#define CWDIST_ORACLE_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "cwdist/graph.hpp"
#include "cwdist/range_tree.hpp"

// Brute-force references. Nothing here calls into the algorithms under test.
namespace cwdist::oracle {

inline constexpr std::size_t kDefaultCap = 2000;

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One search per source. Throws CapExceeded above `cap` vertices.
DistanceMatrix brute_apsp(const Graph& g, std::size_t cap = kDefaultCap);

// Cubic relaxation, for cross-checking brute_apsp on small graphs.
DistanceMatrix floyd_warshall(const Graph& g);

struct EccTotals {
    std::vector<Dist> ecc;
    std::vector<Dist> total;
};

// Throws std::invalid_argument on a disconnected graph.
EccTotals brute_ecc_td(const Graph& g, std::size_t cap = kDefaultCap);

// Linear scan with its own endpoint tests.
RangeAnswer scan_range_query(std::span<const Point> points, const Box& box);

}  // namespace cwdist::oracle

#endif
