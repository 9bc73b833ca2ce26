#ifndef CGSSL_GRAPH_HPP
#define CGSSL_GRAPH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cgssl {

using Rng = std::mt19937_64;

/// Undirected attributed graph. Edges are stored once as sorted (u,v) pairs
/// with u < v, no self-loops, no duplicates.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    Eigen::MatrixXd features;                 // n x d0
    std::optional<std::vector<int>> node_labels;
    std::optional<int> graph_label;

    int num_edges() const { return static_cast<int>(edges.size()); }

    std::vector<int> degrees() const;
    std::vector<std::vector<int>> adjacency_list() const;
    bool has_edge(int u, int v) const;

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;

    /// Canonicalizes (sorts pairs and the edge list) and drops duplicates.
    void canonicalize();
};

inline std::pair<int, int> make_edge(int u, int v) {
    return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}

struct DegreeInfo {
    std::vector<int> degrees;
    int d_min = 0;
    int d_max = 0;
};

DegreeInfo degree_info(const Graph& g);

struct NormalizedMatrix {
    enum class Kind { adjacency, laplacian };
    Kind kind;
    Eigen::MatrixXd values;
    bool self_loops;
};

/// D^{-1/2} A D^{-1/2} (kind=adjacency) or I - D^{-1/2} A D^{-1/2}
/// (kind=laplacian). With self_loops, A+I is normalized instead.
/// Isolated nodes without self-loops are a degree-zero error.
NormalizedMatrix normalize(const Graph& g, NormalizedMatrix::Kind kind,
                           bool self_loops);

struct PerturbationStrength {
    double delta = 0.0;
    int k = 0;
    int argmax_node = -1;
    std::vector<int> skipped_nodes;  // nodes whose k-hop subgraph has no edges
};

struct SubgraphResult {
    Graph graph;
    std::vector<int> original_ids;  // new id -> original id
};

/// Induced subgraph on all nodes within shortest-path distance k of v.
SubgraphResult k_hop_subgraph(const Graph& g, int v, int k);

/// Definition of local perturbation strength: max over nodes of the
/// fraction of edge changes in the node's k-hop subgraph.
PerturbationStrength perturbation_strength(const Graph& g,
                                           const Graph& g_prime, int k);

// --- I/O ------------------------------------------------------------------

Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);
std::vector<Graph> load_dataset(const std::string& path);
void save_dataset(const std::vector<Graph>& graphs, const std::string& path);

// --- Synthetic generators --------------------------------------------------

struct FeatureParams {
    int dim = 8;
    double signal = 1.0;   // magnitude of the block-indicator component (SBM)
    double noise = 1.0;    // gaussian noise scale
};

Graph generate_er(int n, double p, std::uint64_t seed,
                  const FeatureParams& feat = {});

/// Labels are block ids.
Graph generate_sbm(const std::vector<int>& block_sizes, double p_in,
                   double p_out, std::uint64_t seed,
                   const FeatureParams& feat = {});

}  // namespace cgssl

#endif
