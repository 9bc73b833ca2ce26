#ifndef CGSSL_AUGMENT_HPP
#define CGSSL_AUGMENT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "cgssl/graph.hpp"
#include "cgssl/spectrum.hpp"

namespace cgssl {

enum class AugmentKind { drop_edge, add_edge, ppr, span, spa, identity };

AugmentKind augment_kind_from_string(const std::string& s);
std::string to_string(AugmentKind kind);

/// Tagged description of one augmentation. Only the parameters of the
/// named kind are consulted; the rest are ignored.
struct AugmentationSpec {
    AugmentKind kind = AugmentKind::identity;
    double p = 0.0;          // drop rate
    double q = 0.0;          // add rate
    double alpha = 0.15;     // PPR teleport
    int budget = 0;          // span edge flips
    int candidates = 8;      // span sampled flips per step
    double r_spa = 0.02;     // spa flip ratio
    double d_spa = 0.0;      // spa required spectral divergence
    int max_attempts = 100;  // spa rejection budget
    std::uint64_t seed = 0;
};

struct AugmentedView {
    Graph graph;
    int edges_removed = 0;
    int edges_added = 0;
    std::optional<double> achieved_spectral_divergence;
    bool target_met = true;
    int attempts = 0;
};

/// Keep each undirected edge independently with probability 1-p.
AugmentedView drop_edge(const Graph& g, double p, Rng& rng);

/// Add each absent pair independently with probability q.
AugmentedView add_edge(const Graph& g, double q, Rng& rng);

/// Personalized PageRank diffusion: S = alpha (I - (1-alpha) A~)^{-1}.
/// symmetric=true uses D^{-1/2}(A+I)D^{-1/2}; false uses the row-stochastic
/// D^{-1}(A+I) variant (rows of S then sum to 1).
Eigen::MatrixXd ppr_diffusion(const Graph& g, double alpha, bool symmetric = true);

struct SpanPairResult {
    AugmentedView view1;
    AugmentedView view2;
    std::vector<double> divergence_history;  // objective after each step
    bool warning = false;                    // no flip changed the spectrum
};

/// Greedy alternating hill-climb on ||eig(L1) - eig(L2)||_2^2. Per step the
/// active view samples `candidates` random single edge flips and keeps the
/// best non-decreasing one. candidates >= n(n-1)/2 enumerates all flips.
SpanPairResult span_pair(const Graph& g, int budget, int candidates, Rng& rng);

/// Rejection-sample ceil(r_spa |E|) random edge flips until the spectral
/// distance to the original reaches d_spa or attempts run out. On failure
/// the best candidate is returned with target_met=false.
AugmentedView spa_perturb(const Graph& g, double r_spa, double d_spa,
                          int max_attempts, Rng& rng);

/// Dispatch on spec.kind; identity returns the graph unchanged. ppr is not
/// handled here (it produces a dense matrix, see ppr_diffusion).
AugmentedView apply_augmentation(const Graph& g, const AugmentationSpec& spec, Rng& rng);

}  // namespace cgssl

#endif
