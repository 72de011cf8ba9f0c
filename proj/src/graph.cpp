#include "cwdist/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace cwdist {

Graph::Graph(std::size_t n) : adj_(n) {}

Vertex Graph::add_vertex() {
    adj_.emplace_back();
    if (!names_.empty()) {
        names_.push_back(std::to_string(adj_.size() - 1));
    }
    return static_cast<Vertex>(adj_.size() - 1);
}

void Graph::add_edge(Vertex u, Vertex v, Weight w) {
    if (u >= adj_.size() || v >= adj_.size()) {
        throw std::out_of_range("edge endpoint out of range");
    }
    if (u == v) {
        throw std::invalid_argument("self-loops are not allowed");
    }
    adj_[u].push_back({v, w});
    adj_[v].push_back({u, w});
    ++edges_;
    if (w != 1) {
        ++weighted_edges_;
    }
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    const Vertex other = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::any_of(a.begin(), a.end(), [other](const Arc& arc) { return arc.to == other; });
}

void Graph::set_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != adj_.size()) {
        throw std::invalid_argument("name count does not match vertex count");
    }
    names_ = std::move(names);
}

std::string Graph::name(Vertex v) const {
    return names_.empty() ? std::to_string(v) : names_[v];
}

std::optional<Vertex> Graph::find(std::string_view name) const {
    for (std::size_t v = 0; v < names_.size(); ++v) {
        if (names_[v] == name) {
            return static_cast<Vertex>(v);
        }
    }
    // fall back to numeric ids
    Vertex id = 0;
    if (name.empty()) {
        return std::nullopt;
    }
    for (char ch : name) {
        if (ch < '0' || ch > '9') {
            return std::nullopt;
        }
        id = id * 10 + static_cast<Vertex>(ch - '0');
        if (id >= adj_.size()) {
            return std::nullopt;
        }
    }
    return id;
}

namespace {

DistanceVector bfs(const Graph& g, std::span<const Vertex> sources) {
    DistanceVector dist(g.vertex_count(), kInfinity);
    std::vector<Vertex> queue;
    queue.reserve(g.vertex_count());
    for (Vertex s : sources) {
        if (dist[s] != 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex u = queue[head];
        for (const Arc& arc : g.neighbors(u)) {
            if (dist[arc.to] == kInfinity) {
                dist[arc.to] = dist[u] + 1;
                queue.push_back(arc.to);
            }
        }
    }
    return dist;
}

DistanceVector heap_search(const Graph& g, std::span<const Vertex> sources) {
    using Entry = std::pair<Dist, Vertex>;
    DistanceVector dist(g.vertex_count(), kInfinity);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (Vertex s : sources) {
        if (dist[s] != 0) {
            dist[s] = 0;
            heap.emplace(0, s);
        }
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[u]) {
            continue;
        }
        for (const Arc& arc : g.neighbors(u)) {
            const Dist nd = add_dist(d, arc.weight);
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                heap.emplace(nd, arc.to);
            }
        }
    }
    return dist;
}

}  // namespace

DistanceVector sssp(const Graph& g, Vertex source) {
    if (source >= g.vertex_count()) {
        throw std::out_of_range("source vertex out of range");
    }
    return multi_source_dist(g, std::span<const Vertex>(&source, 1));
}

DistanceVector multi_source_dist(const Graph& g, std::span<const Vertex> sources) {
    for (Vertex s : sources) {
        if (s >= g.vertex_count()) {
            throw std::out_of_range("source vertex out of range");
        }
    }
    return g.unit_weights() ? bfs(g, sources) : heap_search(g, sources);
}

InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> vertices) {
    InducedSubgraph result;
    result.from_parent.assign(g.vertex_count(), kNoVertex);
    result.to_parent.assign(vertices.begin(), vertices.end());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (result.from_parent[vertices[i]] != kNoVertex) {
            throw std::invalid_argument("duplicate vertex in induced subgraph request");
        }
        result.from_parent[vertices[i]] = static_cast<Vertex>(i);
    }
    result.graph = Graph(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (const Arc& arc : g.neighbors(vertices[i])) {
            const Vertex j = result.from_parent[arc.to];
            if (j != kNoVertex && i < j) {
                result.graph.add_edge(static_cast<Vertex>(i), j, arc.weight);
            }
        }
    }
    if (g.has_names()) {
        std::vector<std::string> names;
        names.reserve(vertices.size());
        for (Vertex v : vertices) {
            names.push_back(g.names()[v]);
        }
        result.graph.set_names(std::move(names));
    }
    return result;
}

bool is_connected(const Graph& g) {
    if (g.vertex_count() <= 1) {
        return true;
    }
    const Vertex source = 0;
    const DistanceVector d = bfs(g, std::span<const Vertex>(&source, 1));
    return std::none_of(d.begin(), d.end(), [](Dist x) { return x == kInfinity; });
}

GraphFormatError::GraphFormatError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

Graph read_edge_list(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> n;
    std::size_t declared_m = 0;
    Graph g;
    std::vector<std::string> names;
    std::unordered_set<std::uint64_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag)) {
            continue;
        }
        if (tag == "c") {
            std::string kind;
            if (fields >> kind && kind == "name" && n) {
                std::size_t id = 0;
                std::string name;
                if (!(fields >> id >> name) || id >= *n) {
                    throw GraphFormatError(line_no, "malformed name line");
                }
                names[id] = name;
            }
            continue;
        }
        if (tag == "p") {
            if (n) {
                throw GraphFormatError(line_no, "duplicate header");
            }
            std::size_t nn = 0;
            if (!(fields >> nn >> declared_m)) {
                throw GraphFormatError(line_no, "malformed header");
            }
            n = nn;
            g = Graph(nn);
            names.resize(nn);
            continue;
        }
        if (tag != "e") {
            throw GraphFormatError(line_no, "unknown line tag '" + tag + "'");
        }
        if (!n) {
            throw GraphFormatError(line_no, "edge before header");
        }
        std::uint64_t u = 0;
        std::uint64_t v = 0;
        std::uint64_t w = 1;
        if (!(fields >> u >> v)) {
            throw GraphFormatError(line_no, "malformed edge");
        }
        if (!(fields >> w)) {
            w = 1;
        }
        if (u >= *n || v >= *n) {
            throw GraphFormatError(line_no, "edge endpoint out of range");
        }
        if (u == v) {
            throw GraphFormatError(line_no, "self-loop");
        }
        const std::uint64_t key = std::min(u, v) << 32 | std::max(u, v);
        if (!seen.insert(key).second) {
            throw GraphFormatError(line_no, "parallel edge");
        }
        g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v), static_cast<Weight>(w));
    }
    if (!n) {
        throw GraphFormatError(line_no, "missing header");
    }
    if (g.edge_count() != declared_m) {
        throw GraphFormatError(line_no, "edge count does not match header");
    }
    if (std::any_of(names.begin(), names.end(), [](const std::string& s) { return !s.empty(); })) {
        for (std::size_t v = 0; v < names.size(); ++v) {
            if (names[v].empty()) {
                names[v] = std::to_string(v);
            }
        }
        g.set_names(std::move(names));
    }
    return g;
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << "p " << g.vertex_count() << ' ' << g.edge_count() << '\n';
    if (g.has_names()) {
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            out << "c name " << v << ' ' << g.names()[v] << '\n';
        }
    }
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
        for (const Arc& arc : g.neighbors(u)) {
            if (u < arc.to) {
                out << "e " << u << ' ' << arc.to;
                if (arc.weight != 1) {
                    out << ' ' << arc.weight;
                }
                out << '\n';
            }
        }
    }
}

}  // namespace cwdist
