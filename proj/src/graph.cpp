#include "cgssl/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace cgssl {

using nlohmann::json;

std::vector<int> Graph::degrees() const {
    std::vector<int> d(n, 0);
    for (const auto& [u, v] : edges) {
        d[u]++;
        d[v]++;
    }
    return d;
}

std::vector<std::vector<int>> Graph::adjacency_list() const {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

bool Graph::has_edge(int u, int v) const {
    auto e = make_edge(u, v);
    return std::binary_search(edges.begin(), edges.end(), e);
}

void Graph::validate() const {
    if (n < 0) throw std::invalid_argument("graph: negative node count");
    if (features.rows() != n)
        throw std::invalid_argument("graph: features has " +
                                    std::to_string(features.rows()) +
                                    " rows, expected " + std::to_string(n));
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : edges) {
        if (u == v)
            throw std::invalid_argument("graph: self-loop at node " +
                                        std::to_string(u));
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument(
                "graph: edge endpoint out of range: (" + std::to_string(u) +
                "," + std::to_string(v) + ") with n=" + std::to_string(n));
        auto e = make_edge(u, v);
        if (!seen.insert(e).second)
            throw std::invalid_argument("graph: duplicate edge (" +
                                        std::to_string(e.first) + "," +
                                        std::to_string(e.second) + ")");
    }
    if (node_labels && static_cast<int>(node_labels->size()) != n)
        throw std::invalid_argument("graph: node label count != n");
}

void Graph::canonicalize() {
    for (auto& e : edges) e = make_edge(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

DegreeInfo degree_info(const Graph& g) {
    DegreeInfo info;
    info.degrees = g.degrees();
    if (g.n == 0) return info;
    auto [mn, mx] = std::minmax_element(info.degrees.begin(), info.degrees.end());
    info.d_min = *mn;
    info.d_max = *mx;
    return info;
}

NormalizedMatrix normalize(const Graph& g, NormalizedMatrix::Kind kind,
                           bool self_loops) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
    for (const auto& [u, v] : g.edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    if (self_loops) a.diagonal().setConstant(1.0);
    Eigen::VectorXd deg = a.rowwise().sum();
    for (int i = 0; i < g.n; ++i) {
        if (deg(i) <= 0.0)
            throw std::invalid_argument(
                "normalize: node " + std::to_string(i) +
                " has degree zero (enable self_loops or remove it)");
    }
    Eigen::VectorXd dinv = deg.array().rsqrt();
    Eigen::MatrixXd norm = dinv.asDiagonal() * a * dinv.asDiagonal();
    norm = 0.5 * (norm + norm.transpose()).eval();  // symmetrize round-off
    if (kind == NormalizedMatrix::Kind::laplacian)
        norm = Eigen::MatrixXd::Identity(g.n, g.n) - norm;
    return NormalizedMatrix{kind, std::move(norm), self_loops};
}

SubgraphResult k_hop_subgraph(const Graph& g, int v, int k) {
    if (v < 0 || v >= g.n)
        throw std::invalid_argument("k_hop_subgraph: node out of range");
    if (k < 0) throw std::invalid_argument("k_hop_subgraph: negative k");

    auto adj = g.adjacency_list();
    std::vector<int> dist(g.n, -1);
    std::deque<int> queue{v};
    dist[v] = 0;
    std::vector<int> members{v};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (dist[u] == k) continue;
        for (int w : adj[u]) {
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                members.push_back(w);
                queue.push_back(w);
            }
        }
    }
    std::sort(members.begin(), members.end());

    std::vector<int> remap(g.n, -1);
    for (int i = 0; i < static_cast<int>(members.size()); ++i)
        remap[members[i]] = i;

    SubgraphResult res;
    res.original_ids = members;
    res.graph.n = static_cast<int>(members.size());
    for (const auto& [a, b] : g.edges)
        if (remap[a] >= 0 && remap[b] >= 0)
            res.graph.edges.push_back(make_edge(remap[a], remap[b]));
    res.graph.canonicalize();
    res.graph.features.resize(res.graph.n, g.features.cols());
    for (int i = 0; i < res.graph.n; ++i)
        res.graph.features.row(i) = g.features.row(members[i]);
    if (g.node_labels) {
        std::vector<int> labels(res.graph.n);
        for (int i = 0; i < res.graph.n; ++i)
            labels[i] = (*g.node_labels)[members[i]];
        res.graph.node_labels = std::move(labels);
    }
    return res;
}

PerturbationStrength perturbation_strength(const Graph& g,
                                           const Graph& g_prime, int k) {
    if (g.n != g_prime.n)
        throw std::invalid_argument(
            "perturbation_strength: node counts differ (" +
            std::to_string(g.n) + " vs " + std::to_string(g_prime.n) + ")");
    PerturbationStrength out;
    out.k = k;
    for (int v = 0; v < g.n; ++v) {
        auto sub = k_hop_subgraph(g, v, k);
        auto sub_p = k_hop_subgraph(g_prime, v, k);
        // Edge sets in original node ids so they are comparable.
        std::set<std::pair<int, int>> e1, e2;
        for (const auto& [a, b] : sub.graph.edges)
            e1.insert(make_edge(sub.original_ids[a], sub.original_ids[b]));
        for (const auto& [a, b] : sub_p.graph.edges)
            e2.insert(make_edge(sub_p.original_ids[a], sub_p.original_ids[b]));
        if (e1.empty()) {
            out.skipped_nodes.push_back(v);
            continue;
        }
        std::size_t sym_diff = 0;
        for (const auto& e : e1)
            if (!e2.count(e)) sym_diff++;
        for (const auto& e : e2)
            if (!e1.count(e)) sym_diff++;
        double frac = static_cast<double>(sym_diff) / static_cast<double>(e1.size());
        if (frac > out.delta) {
            out.delta = frac;
            out.argmax_node = v;
        }
    }
    return out;
}

// --- JSON I/O ---------------------------------------------------------------

namespace {

Graph graph_from_json(const json& j) {
    Graph g;
    if (!j.is_object()) throw std::invalid_argument("graph json: not an object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw std::invalid_argument("graph json: field 'n' missing or not an integer");
    g.n = j["n"].get<int>();
    if (!j.contains("edges") || !j["edges"].is_array())
        throw std::invalid_argument("graph json: field 'edges' missing or not an array");
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("graph json: field 'edges' entry is not a pair");
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    if (!j.contains("features") || !j["features"].is_array())
        throw std::invalid_argument("graph json: field 'features' missing or not an array");
    const auto& feat = j["features"];
    int d0 = feat.empty() ? 0 : static_cast<int>(feat[0].size());
    g.features.resize(static_cast<int>(feat.size()), d0);
    for (int i = 0; i < static_cast<int>(feat.size()); ++i) {
        if (static_cast<int>(feat[i].size()) != d0)
            throw std::invalid_argument("graph json: field 'features' rows have uneven width");
        for (int c = 0; c < d0; ++c) g.features(i, c) = feat[i][c].get<double>();
    }
    if (j.contains("labels") && !j["labels"].is_null()) {
        const auto& lab = j["labels"];
        if (lab.is_number_integer()) {
            g.graph_label = lab.get<int>();
        } else if (lab.is_array()) {
            g.node_labels = lab.get<std::vector<int>>();
        } else {
            throw std::invalid_argument("graph json: field 'labels' must be int, array, or null");
        }
    }
    g.canonicalize();
    g.validate();
    return g;
}

json graph_to_json(const Graph& g) {
    g.validate();
    json j;
    j["n"] = g.n;
    j["edges"] = json::array();
    for (const auto& [u, v] : g.edges) j["edges"].push_back({u, v});
    j["features"] = json::array();
    for (int i = 0; i < g.n; ++i) {
        json row = json::array();
        for (int c = 0; c < g.features.cols(); ++c) row.push_back(g.features(i, c));
        j["features"].push_back(std::move(row));
    }
    if (g.node_labels)
        j["labels"] = *g.node_labels;
    else if (g.graph_label)
        j["labels"] = *g.graph_label;
    else
        j["labels"] = nullptr;
    return j;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("parse error in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

Graph load_graph(const std::string& path) {
    return graph_from_json(parse_file(path));
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << graph_to_json(g).dump(2) << "\n";
}

std::vector<Graph> load_dataset(const std::string& path) {
    json j = parse_file(path);
    if (!j.is_array())
        throw std::invalid_argument("dataset json: expected an array of graphs");
    std::vector<Graph> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(graph_from_json(item));
    return out;
}

void save_dataset(const std::vector<Graph>& graphs, const std::string& path) {
    json j = json::array();
    for (const auto& g : graphs) j.push_back(graph_to_json(g));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

// --- Generators --------------------------------------------------------------

namespace {

Eigen::MatrixXd gaussian_features(int n, const FeatureParams& feat, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, feat.dim);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < feat.dim; ++c) x(i, c) = feat.noise * normal(rng);
    return x;
}

}  // namespace

Graph generate_er(int n, double p, std::uint64_t seed, const FeatureParams& feat) {
    if (n < 1) throw std::invalid_argument("generate_er: n must be >= 1");
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("generate_er: p must be in [0,1]");
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Graph g;
    g.n = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (unif(rng) < p) g.edges.emplace_back(u, v);
    g.features = gaussian_features(n, feat, rng);
    g.validate();
    return g;
}

Graph generate_sbm(const std::vector<int>& block_sizes, double p_in,
                   double p_out, std::uint64_t seed, const FeatureParams& feat) {
    if (block_sizes.empty())
        throw std::invalid_argument("generate_sbm: no blocks");
    for (int b : block_sizes)
        if (b < 1) throw std::invalid_argument("generate_sbm: block size must be >= 1");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw std::invalid_argument("generate_sbm: probabilities must be in [0,1]");

    int n = 0;
    std::vector<int> block;
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
        for (int i = 0; i < block_sizes[b]; ++i) block.push_back(static_cast<int>(b));
        n += block_sizes[b];
    }

    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Graph g;
    g.n = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double p = block[u] == block[v] ? p_in : p_out;
            if (unif(rng) < p) g.edges.emplace_back(u, v);
        }

    std::normal_distribution<double> normal(0.0, 1.0);
    g.features.resize(n, feat.dim);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < feat.dim; ++c) {
            double s = (c == block[i] % feat.dim) ? feat.signal : 0.0;
            g.features(i, c) = s + feat.noise * normal(rng);
        }
    g.node_labels = block;
    g.validate();
    return g;
}

}  // namespace cgssl
