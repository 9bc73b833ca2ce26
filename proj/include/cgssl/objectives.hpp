#ifndef CGSSL_OBJECTIVES_HPP
#define CGSSL_OBJECTIVES_HPP

#include <Eigen/Dense>
#include <string>

namespace cgssl {

enum class LossKind { infonce, jse, byol, barlow_twins };

LossKind loss_kind_from_string(const std::string& s);
std::string to_string(LossKind kind);

struct LossConfig {
    LossKind kind = LossKind::infonce;
    double tau = 0.5;      // infonce temperature
    double lambda = 0.005; // barlow twins off-diagonal weight

    void validate() const;
};

struct LossResult {
    double value = 0.0;
    Eigen::MatrixXd grad_z1;
    Eigen::MatrixXd grad_z2;
};

/// Value and analytic gradients of the configured contrastive loss with
/// respect to both views' embeddings.
///
/// infonce: cross-view softmax over cosine similarities at temperature tau.
/// jse:     E_neg[log(1 - sigmoid(z_v . z'_u))] - E_pos[log sigmoid(z_v . z'_v)]
///          with inner-product discriminator and all u != v as negatives.
/// byol:    mean of 2 - 2 cos(z_v, z'_v) with identity predictor.
/// barlow_twins: sum_a (1 - C_aa)^2 + lambda sum_{a!=b} C_ab^2 over the
///          cross-view column correlation matrix of standardized columns.
LossResult loss_value_and_grad(const LossConfig& config, const Eigen::MatrixXd& z1,
                               const Eigen::MatrixXd& z2);

}  // namespace cgssl

#endif
