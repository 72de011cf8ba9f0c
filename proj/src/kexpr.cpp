#include "cwdist/kexpr.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_set>

namespace cwdist {

KExpressionError::KExpressionError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? what
                                   : std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

using Position = std::pair<std::size_t, std::size_t>;

[[noreturn]] void fail(const std::string& what, std::uint32_t node, const std::vector<Position>* positions) {
    if (positions != nullptr && node < positions->size()) {
        throw KExpressionError(what, (*positions)[node].first, (*positions)[node].second);
    }
    throw KExpressionError(what);
}

const char* keyword(OpKind kind) {
    switch (kind) {
        case OpKind::kVertex:
            return "v";
        case OpKind::kUnion:
            return "u";
        case OpKind::kJoin:
            return "j";
        case OpKind::kRelabel:
            return "r";
    }
    return "?";
}

}  // namespace

KExpression KExpression::from_nodes(std::vector<KNode> nodes, std::optional<int> max_width,
                                    const std::vector<Position>* positions) {
    if (nodes.empty()) {
        throw KExpressionError("empty expression");
    }
    const auto count = static_cast<std::uint32_t>(nodes.size());
    std::vector<std::uint32_t> parent(count, kNoChild);
    std::unordered_set<std::string> names;
    int width = 0;

    auto check_label = [&](int label, std::uint32_t i) {
        if (label < 1 || (max_width && label > *max_width)) {
            fail("label " + std::to_string(label) + " out of range", i, positions);
        }
        width = std::max(width, label);
    };
    auto attach = [&](std::uint32_t child, std::uint32_t i) {
        if (child == kNoChild || child >= i) {
            fail("child must precede its parent", i, positions);
        }
        if (parent[child] != kNoChild) {
            fail("node has two parents", i, positions);
        }
        parent[child] = i;
    };

    // Labels present below each node; children are released once consumed.
    std::vector<std::vector<int>> present(count);
    std::size_t vertices = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        KNode& node = nodes[i];
        switch (node.kind) {
            case OpKind::kVertex:
                check_label(node.first, i);
                if (node.name.empty()) {
                    fail("vertex without a name", i, positions);
                }
                if (!names.insert(node.name).second) {
                    fail("duplicate vertex name '" + node.name + "'", i, positions);
                }
                present[i] = {node.first};
                ++vertices;
                break;
            case OpKind::kUnion: {
                attach(node.left, i);
                attach(node.right, i);
                auto& out = present[i];
                std::set_union(present[node.left].begin(), present[node.left].end(),
                               present[node.right].begin(), present[node.right].end(), std::back_inserter(out));
                present[node.left] = {};
                present[node.right] = {};
                break;
            }
            case OpKind::kJoin:
            case OpKind::kRelabel: {
                check_label(node.first, i);
                check_label(node.second, i);
                if (node.first == node.second) {
                    fail(std::string(node.kind == OpKind::kJoin ? "join" : "relabel") + " labels must differ", i,
                         positions);
                }
                attach(node.left, i);
                present[i] = std::move(present[node.left]);
                present[node.left] = {};
                if (node.kind == OpKind::kRelabel) {
                    auto& labels = present[i];
                    auto it = std::lower_bound(labels.begin(), labels.end(), node.first);
                    if (it == labels.end() || *it != node.first) {
                        fail("unnecessary relabel: no vertex carries label " + std::to_string(node.first), i,
                             positions);
                    }
                    labels.erase(it);
                    auto jt = std::lower_bound(labels.begin(), labels.end(), node.second);
                    if (jt == labels.end() || *jt != node.second) {
                        labels.insert(jt, node.second);
                    }
                }
                break;
            }
        }
    }
    for (std::uint32_t i = 0; i + 1 < count; ++i) {
        if (parent[i] == kNoChild) {
            fail("node is not connected to the root", i, positions);
        }
    }

    KExpression e;
    e.nodes_ = std::move(nodes);
    e.width_ = width;
    e.vertex_count_ = vertices;
    e.vertex_ids_.assign(count, kNoVertex);
    // left-to-right vertex numbering
    std::vector<std::uint32_t> stack{e.root()};
    Vertex next = 0;
    while (!stack.empty()) {
        const std::uint32_t i = stack.back();
        stack.pop_back();
        const KNode& node = e.nodes_[i];
        if (node.kind == OpKind::kVertex) {
            e.vertex_ids_[i] = next++;
        } else if (node.kind == OpKind::kUnion) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
        }
    }
    return e;
}

std::uint32_t KExpressionBuilder::vertex(int label, std::string name) {
    nodes_.push_back({OpKind::kVertex, label, 0, kNoChild, kNoChild, std::move(name)});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t KExpressionBuilder::unite(std::uint32_t left, std::uint32_t right) {
    nodes_.push_back({OpKind::kUnion, 0, 0, left, right, {}});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t KExpressionBuilder::join(int i, int j, std::uint32_t child) {
    nodes_.push_back({OpKind::kJoin, i, j, child, kNoChild, {}});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t KExpressionBuilder::relabel(int i, int j, std::uint32_t child) {
    nodes_.push_back({OpKind::kRelabel, i, j, child, kNoChild, {}});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

KExpression KExpressionBuilder::build(std::optional<int> max_width) && {
    return KExpression::from_nodes(std::move(nodes_), max_width);
}

namespace {

struct Token {
    enum Kind { kOpen, kClose, kAtom, kEnd } kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;
    auto advance = [&]() {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++i;
    };
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == ';') {
            while (i < text.size() && text[i] != '\n') {
                advance();
            }
        } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
            advance();
        } else if (ch == '(' || ch == ')') {
            tokens.push_back({ch == '(' ? Token::kOpen : Token::kClose, std::string(1, ch), line, column});
            advance();
        } else {
            Token tok{Token::kAtom, {}, line, column};
            while (i < text.size() && text[i] != '(' && text[i] != ')' && text[i] != ';' && text[i] != ' ' &&
                   text[i] != '\t' && text[i] != '\n' && text[i] != '\r') {
                tok.text.push_back(text[i]);
                advance();
            }
            tokens.push_back(std::move(tok));
        }
    }
    tokens.push_back({Token::kEnd, {}, line, column});
    return tokens;
}

int parse_label(const Token& tok) {
    if (tok.kind != Token::kAtom || tok.text.empty() || tok.text.size() > 9 ||
        !std::all_of(tok.text.begin(), tok.text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw KExpressionError("expected a label", tok.line, tok.column);
    }
    return std::stoi(tok.text);
}

}  // namespace

KExpression parse_kexpression(std::string_view text, std::optional<int> max_width) {
    const std::vector<Token> tokens = tokenize(text);
    std::vector<KNode> nodes;
    std::vector<Position> positions;

    // Open operators waiting for their children.
    struct Frame {
        KNode node;
        Position pos;
        std::vector<std::uint32_t> children;
        std::size_t arity;
    };
    std::vector<Frame> stack;
    std::optional<std::uint32_t> top;

    std::size_t t = 0;
    auto expect = [&](Token::Kind kind, const char* what) -> const Token& {
        const Token& tok = tokens[t];
        if (tok.kind != kind) {
            throw KExpressionError(std::string("expected ") + what, tok.line, tok.column);
        }
        ++t;
        return tok;
    };

    auto emit = [&](KNode node, Position pos) {
        nodes.push_back(std::move(node));
        positions.push_back(pos);
        const auto id = static_cast<std::uint32_t>(nodes.size() - 1);
        // a finished node either feeds an open operator or is the whole expression
        if (stack.empty()) {
            top = id;
        } else {
            stack.back().children.push_back(id);
        }
    };

    do {
        if (top) {
            const Token& tok = tokens[t];
            throw KExpressionError("trailing input after expression", tok.line, tok.column);
        }
        const Token& open = tokens[t];
        if (open.kind == Token::kClose) {
            // closes the innermost open operator
            if (stack.empty()) {
                throw KExpressionError("unbalanced ')'", open.line, open.column);
            }
            Frame f = std::move(stack.back());
            if (f.children.size() != f.arity) {
                throw KExpressionError(std::string("operator '") + keyword(f.node.kind) + "' expects " +
                                           std::to_string(f.arity) + " operand(s)",
                                       open.line, open.column);
            }
            stack.pop_back();
            ++t;
            f.node.left = f.children[0];
            if (f.arity == 2) {
                f.node.right = f.children[1];
            }
            emit(std::move(f.node), f.pos);
            continue;
        }
        expect(Token::kOpen, "'('");
        const Token& kw = expect(Token::kAtom, "an operator keyword");
        const Position pos{open.line, open.column};
        if (!stack.empty() && stack.back().children.size() >= stack.back().arity) {
            throw KExpressionError("too many operands", open.line, open.column);
        }
        if (kw.text == "v") {
            KNode node;
            node.kind = OpKind::kVertex;
            node.first = parse_label(tokens[t++]);
            const Token& name = expect(Token::kAtom, "a vertex name");
            node.name = name.text;
            expect(Token::kClose, "')'");
            emit(std::move(node), pos);
        } else if (kw.text == "u") {
            stack.push_back({KNode{OpKind::kUnion, 0, 0, kNoChild, kNoChild, {}}, pos, {}, 2});
        } else if (kw.text == "j" || kw.text == "r") {
            KNode node;
            node.kind = kw.text == "j" ? OpKind::kJoin : OpKind::kRelabel;
            node.first = parse_label(tokens[t++]);
            node.second = parse_label(tokens[t++]);
            stack.push_back({std::move(node), pos, {}, 1});
        } else {
            throw KExpressionError("unknown operator '" + kw.text + "'", kw.line, kw.column);
        }
    } while (tokens[t].kind != Token::kEnd);

    if (!stack.empty()) {
        const Token& end = tokens[t];
        throw KExpressionError("unexpected end of input", end.line, end.column);
    }
    if (!top) {
        throw KExpressionError("empty expression", 1, 1);
    }
    return KExpression::from_nodes(std::move(nodes), max_width, &positions);
}

std::string to_string(const KExpression& e) {
    std::string out;
    if (e.empty()) {
        return out;
    }
    // (node, children already emitted)
    std::vector<std::pair<std::uint32_t, int>> stack{{e.root(), 0}};
    while (!stack.empty()) {
        auto& [i, state] = stack.back();
        const KNode& node = e.nodes()[i];
        if (state == 0) {
            if (!out.empty() && out.back() != '(') {
                out.push_back(' ');
            }
            out.push_back('(');
            out += keyword(node.kind);
            if (node.kind == OpKind::kVertex) {
                out += ' ' + std::to_string(node.first) + ' ' + node.name + ')';
                stack.pop_back();
                continue;
            }
            if (node.kind != OpKind::kUnion) {
                out += ' ' + std::to_string(node.first) + ' ' + std::to_string(node.second);
            }
        }
        const int arity = node.kind == OpKind::kUnion ? 2 : 1;
        if (state < arity) {
            const std::uint32_t child = state == 0 ? node.left : node.right;
            ++state;
            stack.emplace_back(child, 0);
        } else {
            out.push_back(')');
            stack.pop_back();
        }
    }
    return out;
}

std::size_t expression_size(const KExpression& e) {
    return e.nodes().size();
}

LabeledGraph evaluate(const KExpression& e) {
    const auto& nodes = e.nodes();
    const std::size_t n = e.vertex_count();
    const auto k = static_cast<std::size_t>(e.width());

    // Label classes as linked lists over vertices: O(1) union and relabel.
    struct ClassList {
        Vertex head = kNoVertex;
        Vertex tail = kNoVertex;
    };
    std::vector<Vertex> next(n, kNoVertex);
    std::vector<std::vector<ClassList>> state(nodes.size());
    auto splice = [&](ClassList& into, ClassList& from) {
        if (from.head == kNoVertex) {
            return;
        }
        if (into.head == kNoVertex) {
            into = from;
        } else {
            next[into.tail] = from.head;
            into.tail = from.tail;
        }
        from = {};
    };

    LabeledGraph result;
    result.graph = Graph(n);
    std::vector<std::string> names(n);
    std::unordered_set<std::uint64_t> edges;

    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        const KNode& node = nodes[i];
        switch (node.kind) {
            case OpKind::kVertex: {
                const Vertex v = e.vertex_id(i);
                names[v] = node.name;
                state[i].assign(k + 1, {});
                state[i][node.first] = {v, v};
                break;
            }
            case OpKind::kUnion: {
                state[i] = std::move(state[node.left]);
                auto& right = state[node.right];
                for (std::size_t l = 1; l <= k; ++l) {
                    splice(state[i][l], right[l]);
                }
                state[node.left] = {};
                state[node.right] = {};
                break;
            }
            case OpKind::kJoin: {
                state[i] = std::move(state[node.left]);
                const auto& cls = state[i];
                for (Vertex a = cls[node.first].head; a != kNoVertex; a = next[a]) {
                    for (Vertex b = cls[node.second].head; b != kNoVertex; b = next[b]) {
                        const std::uint64_t key = std::uint64_t{std::min(a, b)} << 32 | std::max(a, b);
                        if (edges.insert(key).second) {
                            result.graph.add_edge(a, b);
                        }
                    }
                }
                break;
            }
            case OpKind::kRelabel: {
                state[i] = std::move(state[node.left]);
                splice(state[i][node.second], state[i][node.first]);
                break;
            }
        }
    }
    result.labels.assign(n, 0);
    const auto& top = state[e.root()];
    for (std::size_t l = 1; l <= k; ++l) {
        for (Vertex v = top[l].head; v != kNoVertex; v = next[v]) {
            result.labels[v] = static_cast<int>(l);
        }
    }
    result.graph.set_names(std::move(names));
    return result;
}

namespace {

// Grows one expression by merging components; each merge joins a label of one
// side with a label of the other, so every component stays connected. With
// k >= 3 the top label is a sink that is never joined again, which keeps the
// active label classes (and so the join sizes) small.
KExpression generate(std::size_t n, int k, std::mt19937_64& rng, bool always_join) {
    const int dead = k >= 3 ? k : 0;
    const int active = k >= 3 ? k - 1 : k;
    constexpr std::uint32_t kCap = 3;

    struct Component {
        std::uint32_t node;
        std::vector<std::uint32_t> count;  // per label
    };
    std::vector<KNode> nodes;
    auto push = [&](KNode node) {
        nodes.push_back(std::move(node));
        return static_cast<std::uint32_t>(nodes.size() - 1);
    };
    auto uniform = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
    auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto present_active = [&](const Component& c) {
        std::vector<int> out;
        for (int l = 1; l <= active; ++l) {
            if (c.count[l] > 0) {
                out.push_back(l);
            }
        }
        return out;
    };
    auto relabel = [&](Component& c, int from, int to) {
        c.node = push({OpKind::kRelabel, from, to, c.node, kNoChild, {}});
        c.count[to] += c.count[from];
        c.count[from] = 0;
    };

    std::vector<Component> pool;
    pool.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        Component c{0, std::vector<std::uint32_t>(k + 1, 0)};
        const int label = 1 + static_cast<int>(uniform(static_cast<std::size_t>(active)));
        c.node = push({OpKind::kVertex, label, 0, kNoChild, kNoChild, "t" + std::to_string(v)});
        c.count[label] = 1;
        pool.push_back(std::move(c));
    }

    while (pool.size() > 1) {
        std::size_t i = uniform(pool.size());
        std::size_t j = uniform(pool.size() - 1);
        if (j >= i) {
            ++j;
        }
        Component left = std::move(pool[i]);
        Component right = std::move(pool[j]);
        if (i < j) {
            std::swap(i, j);
        }
        pool[i] = std::move(pool.back());
        pool.pop_back();
        pool[j] = std::move(pool.back());
        pool.pop_back();

        const bool connect = always_join || chance(0.85);
        int a = 0;
        int b = 0;
        if (connect && active >= 2) {
            const auto left_labels = present_active(left);
            a = left_labels[uniform(left_labels.size())];
            auto right_labels = present_active(right);
            std::erase(right_labels, a);
            if (right_labels.empty()) {
                // right only carries label a: move it to another active label
                int to = 1 + static_cast<int>(uniform(static_cast<std::size_t>(active - 1)));
                if (to >= a) {
                    ++to;
                }
                relabel(right, a, to);
                right_labels = {to};
            }
            b = right_labels[uniform(right_labels.size())];
        }

        Component merged{0, std::vector<std::uint32_t>(k + 1, 0)};
        merged.node = chance(0.5) ? push({OpKind::kUnion, 0, 0, left.node, right.node, {}})
                                  : push({OpKind::kUnion, 0, 0, right.node, left.node, {}});
        for (int l = 1; l <= k; ++l) {
            merged.count[l] = left.count[l] + right.count[l];
        }
        if (a != 0) {
            merged.node = push({OpKind::kJoin, a, b, merged.node, kNoChild, {}});
            auto labels = present_active(merged);
            if (labels.size() >= 2 && chance(0.3)) {
                const int x = labels[uniform(labels.size())];
                int y = labels[uniform(labels.size())];
                if (x != y) {
                    merged.node = push({OpKind::kJoin, x, y, merged.node, kNoChild, {}});
                }
            }
        }

        auto labels = present_active(merged);
        if (labels.size() >= 2 && chance(0.1)) {
            // merge two active classes (creates twins)
            relabel(merged, labels[0], labels[1]);
            labels = present_active(merged);
        }
        if (dead != 0) {
            // retire oversized classes, always keeping one active class
            std::sort(labels.begin(), labels.end(),
                      [&](int x, int y) { return merged.count[x] < merged.count[y]; });
            for (std::size_t t = labels.size(); t-- > 1;) {
                if (merged.count[labels[t]] > kCap || chance(0.25)) {
                    relabel(merged, labels[t], dead);
                }
            }
        }
        pool.push_back(std::move(merged));
    }
    KExpression e = KExpression::from_nodes(std::move(nodes));
    std::vector<KNode> renamed = e.nodes();
    for (std::uint32_t i = 0; i < renamed.size(); ++i) {
        if (renamed[i].kind == OpKind::kVertex) {
            renamed[i].name = "v" + std::to_string(e.vertex_id(i));
        }
    }
    return KExpression::from_nodes(std::move(renamed));
}

}  // namespace

KExpression random_kexpression(std::size_t n, int k, std::uint64_t seed, bool require_connected) {
    if (n == 0) {
        throw std::invalid_argument("random expression needs at least one vertex");
    }
    if (k < 1) {
        throw std::invalid_argument("width must be at least 1");
    }
    if (n > 1 && k < 2 && require_connected) {
        throw std::invalid_argument("a connected graph on more than one vertex needs width >= 2");
    }
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        KExpression e = generate(n, k, rng, require_connected);
        if (!require_connected || is_connected(evaluate(e).graph)) {
            return e;
        }
    }
    throw std::runtime_error("could not generate a connected expression");
}

}  // namespace cwdist
