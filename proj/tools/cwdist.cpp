// cwdist: distances, eccentricities and labels for graphs given by a clique-width expression.

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cwdist/ecc.hpp"
#include "cwdist/graph.hpp"
#include "cwdist/kexpr.hpp"
#include "cwdist/labeling.hpp"
#include "cwdist/oracle.hpp"
#include "cwdist/partition_tree.hpp"

namespace {

using namespace cwdist;
using json = nlohmann::ordered_json;

constexpr int kJsonVersion = 1;

// Input problems: bad files, bad syntax, bad arguments.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Timer {
public:
    void start(const std::string& stage) {
        stage_ = stage;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop() {
        timings_[stage_] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }
    template <class F>
    auto measure(const std::string& stage, F&& f) {
        start(stage);
        auto result = f();
        stop();
        return result;
    }
    json to_json() const {
        json out = json::object();
        for (const auto& [k, v] : timings_) {
            out[k] = v;
        }
        return out;
    }

private:
    std::string stage_;
    std::chrono::steady_clock::time_point t0_;
    std::map<std::string, double> timings_;
};

struct Options {
    std::string input = "-";
    std::string output = "-";
    bool json = false;
    bool audit = false;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    int max_width = 0;
};

std::string read_text(const std::string& path) {
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), {});
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw InputError("cannot write '" + path + "'");
    }
}

bool looks_like_expression(const std::string& text) {
    for (char ch : text) {
        if (ch == ';' || ch == '(') {
            return true;
        }
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            return false;
        }
    }
    return false;
}

struct Instance {
    KExpression expr;
    LabeledGraph lg;
    PartitionTree tree;
};

Instance load_instance(const Options& opt, Timer& timer) {
    Instance in;
    const std::string text = read_text(opt.input);
    in.expr = timer.measure("parse", [&] {
        return parse_kexpression(text, opt.max_width > 0 ? std::optional<int>(opt.max_width) : std::nullopt);
    });
    in.lg = timer.measure("evaluate", [&] { return evaluate(in.expr); });
    in.tree = timer.measure("tree", [&] { return build_partition_tree(in.expr); });
    return in;
}

Graph load_graph(const Options& opt) {
    const std::string text = read_text(opt.input);
    if (looks_like_expression(text)) {
        return evaluate(parse_kexpression(text)).graph;
    }
    std::istringstream in(text);
    return read_edge_list(in);
}

std::string dist_text(Dist d) {
    return d == kInfinity ? "inf" : std::to_string(d);
}

json dist_json(Dist d) {
    return d == kInfinity ? json(nullptr) : json(d);
}

void emit(const Options& opt, const std::string& command, json result, const Timer& timer,
          const std::function<void(std::ostream&)>& text) {
    if (opt.json) {
        json doc;
        doc["version"] = kJsonVersion;
        doc["command"] = command;
        doc["result"] = std::move(result);
        doc["timings"] = timer.to_json();
        std::cout << doc.dump(2) << '\n';
    } else {
        text(std::cout);
    }
}

int cmd_parse(const Options& opt) {
    Timer timer;
    const std::string text = read_text(opt.input);
    const KExpression e = timer.measure("parse", [&] {
        return parse_kexpression(text, opt.max_width > 0 ? std::optional<int>(opt.max_width) : std::nullopt);
    });
    json r;
    r["width"] = e.width();
    r["size"] = expression_size(e);
    r["vertices"] = e.vertex_count();
    emit(opt, "parse", r, timer, [&](std::ostream& out) {
        out << "width " << e.width() << "\nsize " << expression_size(e) << "\nvertices " << e.vertex_count() << '\n';
    });
    return 0;
}

int cmd_eval(const Options& opt) {
    Timer timer;
    const std::string text = read_text(opt.input);
    const KExpression e = timer.measure("parse", [&] { return parse_kexpression(text); });
    const LabeledGraph lg = timer.measure("evaluate", [&] { return evaluate(e); });
    std::ostringstream edges;
    write_edge_list(edges, lg.graph);
    if (opt.json) {
        if (opt.output != "-") {
            write_text(opt.output, edges.str());
        }
        json r;
        r["vertices"] = lg.graph.vertex_count();
        r["edges"] = lg.graph.edge_count();
        r["labels"] = lg.labels;
        emit(opt, "eval", r, timer, {});
    } else {
        write_text(opt.output, edges.str());
    }
    return 0;
}

int cmd_tree(const Options& opt) {
    Timer timer;
    const Instance in = load_instance(opt, timer);
    const auto violation = timer.measure("validate", [&] { return validate_partition_tree(in.tree, in.lg.graph); });
    if (violation) {
        std::cerr << "error: built tree is invalid (" << to_string(violation->property) << "): " << violation->message
                  << '\n';
        return 2;
    }
    json r;
    r["nodes"] = in.tree.node_count();
    r["blocks"] = in.tree.block_count();
    r["width"] = in.tree.width();
    r["names"] = in.lg.graph.names();
    r["dump"] = in.tree.dump();
    emit(opt, "tree", r, timer, [&](std::ostream& out) {
        out << "# nodes " << in.tree.node_count() << " blocks " << in.tree.block_count() << " width "
            << in.tree.width() << '\n';
        for (Vertex v = 0; v < in.lg.graph.vertex_count(); ++v) {
            out << "# vertex " << v << ' ' << in.lg.graph.name(v) << '\n';
        }
        out << in.tree.dump();
    });
    return 0;
}

int cmd_label(const Options& opt) {
    Timer timer;
    const Instance in = load_instance(opt, timer);
    const LabelSet labels = timer.measure("label", [&] { return build_labels(in.lg.graph, in.tree); });
    std::ostringstream bytes;
    serialize_labels(bytes, labels);
    std::size_t max_levels = 0;
    std::size_t max_distances = 0;
    for (const DistanceLabel& l : labels.labels) {
        max_levels = std::max(max_levels, l.levels.size());
        max_distances = std::max(max_distances, l.stored_distances());
    }
    if (opt.output == "-" && !opt.json) {
        std::cout << bytes.str();
        return 0;
    }
    if (opt.output != "-") {
        write_text(opt.output, bytes.str());
    }
    json r;
    r["vertices"] = labels.size();
    r["width"] = labels.width;
    r["build"] = labels.build;
    r["bytes"] = bytes.str().size();
    r["max_levels"] = max_levels;
    r["max_distances"] = max_distances;
    emit(opt, "label", r, timer, [&](std::ostream& out) {
        out << "vertices " << labels.size() << "\nbytes " << bytes.str().size() << "\nmax_levels " << max_levels
            << "\nmax_distances " << max_distances << '\n';
    });
    return 0;
}

Vertex resolve(const LabelSet& labels, const std::string& who) {
    for (std::size_t v = 0; v < labels.names.size(); ++v) {
        if (labels.names[v] == who) {
            return static_cast<Vertex>(v);
        }
    }
    try {
        std::size_t used = 0;
        const unsigned long id = std::stoul(who, &used);
        if (used == who.size() && id < labels.size()) {
            return static_cast<Vertex>(id);
        }
    } catch (const std::exception&) {
    }
    throw InputError("unknown vertex '" + who + "'");
}

int cmd_query(const Options& opt, const std::string& u, const std::string& v, const std::string& label_path) {
    Timer timer;
    const std::string bytes = read_text(label_path);
    std::istringstream in(bytes);
    const LabelSet labels = timer.measure("load", [&] { return deserialize_labels(in); });
    const Vertex a = resolve(labels, u);
    const Vertex b = resolve(labels, v);
    const Dist d = timer.measure("decode", [&] { return decode_distance(labels.labels[a], labels.labels[b]); });
    json r;
    r["u"] = u;
    r["v"] = v;
    r["distance"] = dist_json(d);
    emit(opt, "query", r, timer, [&](std::ostream& out) { out << dist_text(d) << '\n'; });
    return 0;
}

int cmd_apsp(const Options& opt) {
    Timer timer;
    const Instance in = load_instance(opt, timer);
    const LabelSet labels = timer.measure("label", [&] { return build_labels(in.lg.graph, in.tree); });
    const DistanceMatrix m = timer.measure("decode", [&] { return apsp_via_labels(labels); });
    const std::size_t n = m.size();
    json r;
    r["names"] = json::array();
    for (Vertex v = 0; v < n; ++v) {
        r["names"].push_back(in.lg.graph.name(v));
    }
    r["matrix"] = json::array();
    for (Vertex u = 0; u < n; ++u) {
        json row = json::array();
        for (Vertex v = 0; v < n; ++v) {
            row.push_back(dist_json(m(u, v)));
        }
        r["matrix"].push_back(std::move(row));
    }
    emit(opt, "apsp", r, timer, [&](std::ostream& out) {
        for (Vertex u = 0; u < n; ++u) {
            for (Vertex v = 0; v < n; ++v) {
                out << (v ? " " : "") << dist_text(m(u, v));
            }
            out << '\n';
        }
    });
    return 0;
}

int cmd_ecc(const Options& opt) {
    Timer timer;
    const Instance in = load_instance(opt, timer);
    SolveConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.audit = opt.audit;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    SolveStats stats;
    const FarAggregate agg = timer.measure("solve", [&] { return solve_all(in.lg.graph, in.tree, cfg, &stats); });
    const Graph& g = in.lg.graph;

    bool audit_ok = true;
    json audit;
    if (opt.audit) {
        const auto bound = static_cast<std::size_t>(std::ceil(std::log(std::max<double>(g.vertex_count(), 1)) /
                                                             std::log(1.5))) + 1;
        bool levels_ok = stats.depth <= bound;
        for (std::size_t r = 0; r < stats.vertices_per_level.size(); ++r) {
            levels_ok = levels_ok && stats.vertices_per_level[r] <= g.vertex_count() && stats.clusters_per_level[r] <= r;
        }
        audit["cuts"] = stats.cuts;
        audit["max_cut_blocks"] = stats.max_cut_blocks;
        audit["wide_cuts"] = stats.wide_cuts;
        audit["crossing_edges_checked"] = stats.crossing_edges;
        audit["distance_checks"] = stats.distance_checks;
        audit["distance_violations"] = stats.distance_violations;
        audit["ledger_violations"] = stats.ledger_violations;
        audit["depth"] = stats.depth;
        audit["depth_bound"] = bound;
        audit["max_cluster_size"] = stats.max_cluster_size;
        audit_ok = stats.wide_cuts == 0 && stats.distance_violations == 0 && stats.ledger_violations == 0 &&
                   levels_ok && stats.max_cluster_size <= stats.width * stats.width;
        audit["passed"] = audit_ok;
    }

    json r;
    r["vertices"] = json::array();
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        r["vertices"].push_back({{"name", g.name(v)}, {"ecc", agg.ecc[v]}, {"total", agg.total[v]}});
    }
    r["diameter"] = diameter(agg);
    r["wiener"] = wiener_index(agg);
    r["median"] = json::array();
    for (Vertex v : median_set(agg)) {
        r["median"].push_back(g.name(v));
    }
    r["depth"] = stats.depth;
    if (opt.audit) {
        r["audit"] = audit;
    }
    emit(opt, "ecc", r, timer, [&](std::ostream& out) {
        out << "vertex ecc total\n";
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            out << g.name(v) << ' ' << agg.ecc[v] << ' ' << agg.total[v] << '\n';
        }
        out << "diameter " << diameter(agg) << "\nwiener " << wiener_index(agg) << "\nmedian";
        for (Vertex v : median_set(agg)) {
            out << ' ' << g.name(v);
        }
        out << '\n';
        if (opt.audit) {
            out << "audit " << (audit_ok ? "passed" : "FAILED") << " cuts=" << stats.cuts
                << " max_blocks=" << stats.max_cut_blocks << " distance_checks=" << stats.distance_checks << '\n';
        }
    });
    if (!audit_ok) {
        std::cerr << "error: runtime audit failed\n";
        return 2;
    }
    return 0;
}

int cmd_gen(const Options& opt, std::size_t n, int k, bool disconnected) {
    const KExpression e = random_kexpression(n, k, opt.seed, !disconnected);
    write_text(opt.output, to_string(e) + "\n");
    return 0;
}

int cmd_oracle(const Options& opt, const std::string& what) {
    Timer timer;
    const Graph g = timer.measure("load", [&] { return load_graph(opt); });
    json r;
    if (what == "apsp") {
        const DistanceMatrix m = timer.measure("apsp", [&] { return oracle::brute_apsp(g); });
        r["matrix"] = json::array();
        for (Vertex u = 0; u < m.size(); ++u) {
            json row = json::array();
            for (Vertex v = 0; v < m.size(); ++v) {
                row.push_back(dist_json(m(u, v)));
            }
            r["matrix"].push_back(std::move(row));
        }
        emit(opt, "oracle", r, timer, [&](std::ostream& out) {
            for (Vertex u = 0; u < m.size(); ++u) {
                for (Vertex v = 0; v < m.size(); ++v) {
                    out << (v ? " " : "") << dist_text(m(u, v));
                }
                out << '\n';
            }
        });
        return 0;
    }
    const oracle::EccTotals et = timer.measure("ecc", [&] { return oracle::brute_ecc_td(g); });
    Dist diam = 0;
    Dist wiener = 0;
    r["vertices"] = json::array();
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        diam = std::max(diam, et.ecc[v]);
        wiener += et.total[v];
        r["vertices"].push_back({{"name", g.name(v)}, {"ecc", et.ecc[v]}, {"total", et.total[v]}});
    }
    r["diameter"] = diam;
    r["wiener"] = wiener;
    emit(opt, "oracle", r, timer, [&](std::ostream& out) {
        out << "vertex ecc total\n";
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            out << g.name(v) << ' ' << et.ecc[v] << ' ' << et.total[v] << '\n';
        }
        out << "diameter " << diam << "\nwiener " << wiener << '\n';
    });
    return 0;
}

int cmd_bench(const Options& opt, const std::vector<std::size_t>& sizes, int k, std::size_t apsp_limit) {
    std::ostringstream csv;
    csv << "n,k,m,solve_seconds,apsp_seconds,depth,max_label_bits\n";
    for (std::size_t n : sizes) {
        const KExpression e = random_kexpression(n, k, opt.seed + n);
        const LabeledGraph lg = evaluate(e);
        const PartitionTree t = build_partition_tree(e);
        SolveConfig cfg;
        cfg.alpha = opt.alpha;
        cfg.seed = opt.seed;
        cfg.threads = opt.threads;
        SolveStats stats;
        auto t0 = std::chrono::steady_clock::now();
        solve_all(lg.graph, t, cfg, &stats);
        const double solve = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        t0 = std::chrono::steady_clock::now();
        const LabelSet labels = build_labels(lg.graph, t);
        std::string apsp = "";
        if (n <= apsp_limit) {
            apsp_via_labels(labels);
            apsp = std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        std::size_t max_bits = 0;
        for (const DistanceLabel& l : labels.labels) {
            LabelSet one;
            one.width = labels.width;
            one.labels = {l};
            std::ostringstream bytes;
            serialize_labels(bytes, one);
            max_bits = std::max(max_bits, 8 * bytes.str().size());
        }
        csv << n << ',' << k << ',' << lg.graph.edge_count() << ',' << solve << ',' << apsp << ',' << stats.depth
            << ',' << max_bits << '\n';
    }
    write_text(opt.output, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact distances, eccentricities and distance labels for graphs of bounded clique-width"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool with_input) {
        if (with_input) {
            sub->add_option("input", opt.input, "k-expression file, - for stdin")->required();
        }
        sub->add_flag("--json", opt.json, "Emit {version, command, result, timings} as JSON");
    };

    auto* parse = app.add_subcommand("parse", "Validate a k-expression and report its width and size");
    add_common(parse, true);
    parse->add_option("--max-width", opt.max_width, "Reject labels above this width");

    auto* eval = app.add_subcommand("eval", "Evaluate a k-expression into an edge list");
    add_common(eval, true);
    eval->add_option("--out,-o", opt.output, "Edge list output, - for stdout");

    auto* tree = app.add_subcommand("tree", "Print the partition tree (one block per line)");
    add_common(tree, true);

    auto* label = app.add_subcommand("label", "Build distance labels and write them in binary form");
    add_common(label, true);
    label->add_option("--out,-o", opt.output, "Label file, - for stdout");

    std::string qu;
    std::string qv;
    std::string label_path;
    auto* query = app.add_subcommand("query", "Distance between two vertices from a label file");
    query->add_option("u", qu, "Vertex name or id")->required();
    query->add_option("v", qv, "Vertex name or id")->required();
    query->add_option("--labels,-l", label_path, "Label file")->required();
    add_common(query, false);

    auto* apsp = app.add_subcommand("apsp", "All-pairs distances decoded from labels");
    add_common(apsp, true);

    auto* ecc = app.add_subcommand("ecc", "Eccentricities, total distances, diameter, Wiener index, median set");
    add_common(ecc, true);
    ecc->add_flag("--audit", opt.audit, "Run the runtime invariant audits; exit 2 on a violation");
    ecc->add_option("--alpha", opt.alpha, "Base-case scale factor")->check(CLI::PositiveNumber);
    ecc->add_option("--seed", opt.seed, "Seed for audit sampling");
    ecc->add_option("--threads", opt.threads, "Worker threads for independent branches")->check(CLI::Range(1, 256));

    std::size_t gen_n = 0;
    int gen_k = 0;
    bool disconnected = false;
    auto* gen = app.add_subcommand("gen", "Generate a random k-expression");
    gen->add_option("-n", gen_n, "Vertex count")->required()->check(CLI::PositiveNumber);
    gen->add_option("-k", gen_k, "Width")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", opt.seed, "Random seed");
    gen->add_flag("--disconnected", disconnected, "Allow disconnected output");
    gen->add_option("--out,-o", opt.output, "Output file, - for stdout");

    std::string what = "ecc";
    auto* orc = app.add_subcommand("oracle", "Brute-force reference values (k-expression or edge list input)");
    add_common(orc, true);
    orc->add_option("--what", what, "apsp or ecc")->check(CLI::IsMember({"apsp", "ecc"}));

    std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
    int bench_k = 4;
    std::size_t apsp_limit = 2000;
    auto* bench = app.add_subcommand("bench", "Time solve_all and label APSP over generated graphs, CSV output");
    bench->add_option("--sizes", sizes, "Vertex counts")->delimiter(',');
    bench->add_option("-k", bench_k, "Width")->check(CLI::Range(2, 16));
    bench->add_option("--seed", opt.seed, "Base seed");
    bench->add_option("--alpha", opt.alpha, "Base-case scale factor")->check(CLI::PositiveNumber);
    bench->add_option("--threads", opt.threads, "Worker threads")->check(CLI::Range(1, 256));
    bench->add_option("--apsp-limit", apsp_limit, "Largest n for the all-pairs decode timing");
    bench->add_option("--out,-o", opt.output, "CSV output, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*parse) {
            return cmd_parse(opt);
        }
        if (*eval) {
            return cmd_eval(opt);
        }
        if (*tree) {
            return cmd_tree(opt);
        }
        if (*label) {
            return cmd_label(opt);
        }
        if (*query) {
            return cmd_query(opt, qu, qv, label_path);
        }
        if (*apsp) {
            return cmd_apsp(opt);
        }
        if (*ecc) {
            return cmd_ecc(opt);
        }
        if (*gen) {
            return cmd_gen(opt, gen_n, gen_k, disconnected);
        }
        if (*orc) {
            return cmd_oracle(opt, what);
        }
        if (*bench) {
            return cmd_bench(opt, sizes, bench_k, apsp_limit);
        }
    } catch (const InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
