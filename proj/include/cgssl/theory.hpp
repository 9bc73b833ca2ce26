#ifndef CGSSL_THEORY_HPP
#define CGSSL_THEORY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cgssl/graph.hpp"

namespace cgssl {

/// Every symbol entering the InfoNCE bound computation.
struct BoundInputs {
    int n = 1000;          // nodes
    int d = 4096;          // embedding dimension
    int n_v = 30;          // k-hop subgraph node count
    int d_min = 10;
    int d_max = 30;
    int k = 1;             // encoder layers
    double l_w = 0.5;      // spectral-norm cap on each weight matrix
    double x_norm = 1.0;   // ||X||_2
    double p_norm = 1.0;   // ||P||_2
    double tau = 0.5;
    double delta = 0.1;    // perturbation strength, must be < 1
    double c_z = 1.0;      // lower bound on pre-normalization embedding norm

    void validate() const;
};

struct BoundResult {
    double A = 0.0;
    double B = 0.0;
    double epsilon = 0.0;
    double epsilon_prime = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// The worked numerical example configuration (n=1000, d=4096, d_min=10,
/// d_max=30, n_v=30, k=1, L_W=0.5, unit norms, tau=0.5, delta=0.1).
BoundInputs appendix_d_inputs();

/// A = sqrt(n_v d_max)/d_min, B = sqrt(delta) + delta/(1-delta)^{3/2},
/// epsilon = k A^k B L_W^k ||X||_2 ||P||_2 / c_z, epsilon' = sqrt(2 ln n / d).
BoundResult bound_params(const BoundInputs& inputs);

/// bound_params plus the InfoNCE sandwich, evaluated in log space:
///   lower = -ln(e^{1/tau} / (e^{1/tau} + (n-1) e^{-eps'/tau}))
///   upper = -ln(e^{s/tau} / (e^{s/tau} + (n-1) e^{eps'/tau})), s = 1-eps^2/2.
BoundResult infonce_bounds(const BoundInputs& inputs);

void write_bounds_csv(const std::vector<std::pair<BoundInputs, BoundResult>>& rows,
                      const std::string& path);

/// Trial configuration for lemma verification. The encoder fields only matter
/// for lemmas 4 and 5; d only matters for lemma 6.
struct TrialSpec {
    std::string family = "er";   // er | sbm
    int n = 40;
    double p = 0.2;              // er edge probability / sbm p_in
    double p_out = 0.05;         // sbm only
    double delta_target = 0.2;
    int k = 1;
    int trials = 100;
    std::uint64_t seed = 0;
    double l_w = 0.5;
    int hidden = 16;
    int proj_dim = 8;
    int feature_dim = 8;
    int d = 4096;                // lemma 6 embedding dimension
};

struct LemmaReport {
    int id = 0;
    int trials = 0;
    int passes = 0;
    double worst_margin = 0.0;   // min over trials of RHS - LHS

    double pass_fraction() const {
        return trials > 0 ? static_cast<double>(passes) / trials : 0.0;
    }
    std::string to_json(const TrialSpec& spec) const;
};

/// Empirical check of one deterministic inequality (1-5) or the negative-pair
/// concentration claim (6). Lemmas 1-5 pass per trial iff margin >= -1e-9;
/// lemma 6 counts random unit-vector pairs with |<z,z'>| <= eps'.
LemmaReport verify_lemma(int id, const TrialSpec& spec);

/// Random edge flips on g until the perturbation strength at radius k lands
/// within +-10% of the target, holding every node degree within a factor
/// delta_target of its original value. Throws after bounded retries.
Graph sample_delta_perturbation(const Graph& g, int k, double delta_target,
                                Rng& rng);

struct TheoremResult {
    double loss = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool within = false;
};

/// Builds a synthetic embedding pair meeting the bound hypotheses (positive
/// cosines >= 1 - eps^2/2, cross cosines within eps') and evaluates InfoNCE
/// against the sandwich. With violate_positive the positive cosines are pinned
/// at 1 - eps^2 instead, outside the hypothesis (negative control).
TheoremResult verify_theorem(int n, int d, double tau, double epsilon,
                             double epsilon_prime, std::uint64_t seed,
                             bool violate_positive = false);

}  // namespace cgssl

#endif
