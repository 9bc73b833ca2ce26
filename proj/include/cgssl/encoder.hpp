#ifndef CGSSL_ENCODER_HPP
#define CGSSL_ENCODER_HPP

#include <optional>
#include <string>
#include <vector>

#include "cgssl/graph.hpp"

namespace cgssl {

struct EncoderConfig {
    int k = 1;                       // GCN layer count
    std::vector<int> dims;           // [d0, d1, ..., dk]
    int proj_dim = 8;
    std::optional<double> weight_norm_cap;  // spectral-norm cap on each W
    bool self_loops = true;
    bool normalize_output = true;

    void validate() const;
};

struct EncoderState {
    std::vector<Eigen::MatrixXd> weights;  // W^(l): d_{l-1} x d_l
    Eigen::MatrixXd projection;            // P: d_k x proj_dim

    std::string to_json() const;
    static EncoderState from_json(const std::string& text);
    void save(const std::string& path) const;
    static EncoderState load(const std::string& path);
};

struct Embeddings {
    Eigen::MatrixXd Z;  // n x proj_dim
    bool normalized = false;
};

/// Largest singular value by power iteration (1e-10 relative tolerance).
double spectral_norm(const Eigen::MatrixXd& m);

/// Glorot-uniform init; weights rescaled to the cap when configured.
EncoderState init_encoder(const EncoderConfig& config, Rng& rng);

/// Rescale every W with ||W||_2 > cap by cap/||W||_2.
void spectral_norm_cap(EncoderState& state, double cap);

/// Forward pass H^(l+1) = ReLU(A~ H^(l) W^(l)), Z = H^(k) P, optional row
/// normalization. The view matrix overload accepts any dense symmetric
/// aggregation operator (e.g. PPR output).
Embeddings encode(const EncoderState& state, const EncoderConfig& config,
                  const Graph& g);
Embeddings encode(const EncoderState& state, const EncoderConfig& config,
                  const Eigen::MatrixXd& view_matrix, const Eigen::MatrixXd& features);

struct EncoderGradients {
    std::vector<Eigen::MatrixXd> weights;
    Eigen::MatrixXd projection;
};

/// Analytic backprop of dLoss/dZ through the forward recursion.
EncoderGradients encode_grad(const EncoderState& state, const EncoderConfig& config,
                             const Graph& g, const Eigen::MatrixXd& upstream);
EncoderGradients encode_grad(const EncoderState& state, const EncoderConfig& config,
                             const Eigen::MatrixXd& view_matrix,
                             const Eigen::MatrixXd& features,
                             const Eigen::MatrixXd& upstream);

}  // namespace cgssl

#endif
