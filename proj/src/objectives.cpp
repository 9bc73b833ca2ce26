#include "cgssl/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace cgssl {

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "infonce") return LossKind::infonce;
    if (s == "jse") return LossKind::jse;
    if (s == "byol") return LossKind::byol;
    if (s == "barlow_twins") return LossKind::barlow_twins;
    throw std::invalid_argument("unknown loss kind: " + s);
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::infonce: return "infonce";
        case LossKind::jse: return "jse";
        case LossKind::byol: return "byol";
        case LossKind::barlow_twins: return "barlow_twins";
    }
    return "?";
}

void LossConfig::validate() const {
    if (kind == LossKind::infonce && tau <= 0.0)
        throw std::invalid_argument("loss: infonce requires tau > 0");
    if (kind == LossKind::barlow_twins && lambda < 0.0)
        throw std::invalid_argument("loss: barlow_twins requires lambda >= 0");
}

namespace {

void check_shapes(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2) {
    if (z1.rows() != z2.rows() || z1.cols() != z2.cols())
        throw std::invalid_argument("loss: Z1 and Z2 shapes differ");
    if (z1.rows() < 1) throw std::invalid_argument("loss: empty embeddings");
}

// Row norms with a degenerate-input check.
Eigen::VectorXd row_norms_checked(const Eigen::MatrixXd& z, const char* which) {
    Eigen::VectorXd norms = z.rowwise().norm();
    for (int i = 0; i < norms.size(); ++i)
        if (norms(i) < 1e-300)
            throw std::invalid_argument(std::string("loss: zero-norm row in ") +
                                        which + " at node " + std::to_string(i));
    return norms;
}

// Propagate a gradient w.r.t. the unit-normalized rows back to the raw rows.
Eigen::MatrixXd denormalize_grad(const Eigen::MatrixXd& z, const Eigen::VectorXd& norms,
                                 const Eigen::MatrixXd& grad_hat) {
    Eigen::MatrixXd out(z.rows(), z.cols());
    for (int i = 0; i < z.rows(); ++i) {
        Eigen::RowVectorXd zhat = z.row(i) / norms(i);
        Eigen::RowVectorXd g = grad_hat.row(i);
        out.row(i) = (g - g.dot(zhat) * zhat) / norms(i);
    }
    return out;
}

LossResult infonce(double tau, const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2) {
    int n = static_cast<int>(z1.rows());
    Eigen::VectorXd r1 = row_norms_checked(z1, "Z1");
    Eigen::VectorXd r2 = row_norms_checked(z2, "Z2");
    Eigen::MatrixXd zh1 = r1.array().inverse().matrix().asDiagonal() * z1;
    Eigen::MatrixXd zh2 = r2.array().inverse().matrix().asDiagonal() * z2;
    Eigen::MatrixXd sim = zh1 * zh2.transpose();

    double loss = 0.0;
    Eigen::MatrixXd grad_sim(n, n);
    for (int v = 0; v < n; ++v) {
        Eigen::RowVectorXd logits = sim.row(v) / tau;
        double m = logits.maxCoeff();
        Eigen::RowVectorXd ex = (logits.array() - m).exp();
        double denom = ex.sum();
        loss += -(logits(v) - m - std::log(denom));
        grad_sim.row(v) = ex / denom / (n * tau);
        grad_sim(v, v) -= 1.0 / (n * tau);
    }
    loss /= n;

    LossResult res;
    res.value = loss;
    res.grad_z1 = denormalize_grad(z1, r1, grad_sim * zh2);
    res.grad_z2 = denormalize_grad(z2, r2, grad_sim.transpose() * zh1);
    return res;
}

LossResult jse(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2) {
    int n = static_cast<int>(z1.rows());
    Eigen::MatrixXd t = z1 * z2.transpose();
    double pos = 0.0, neg = 0.0;
    Eigen::MatrixXd grad_t(n, n);
    double neg_scale = n > 1 ? 1.0 / (n * (n - 1.0)) : 0.0;
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
            double s = 1.0 / (1.0 + std::exp(-t(v, u)));
            if (u == v) {
                pos += std::log(s);
                grad_t(v, u) = -(1.0 - s) / n;
            } else {
                neg += std::log(1.0 - s);
                grad_t(v, u) = -s * neg_scale;
            }
        }
    LossResult res;
    res.value = neg * neg_scale - pos / n;
    res.grad_z1 = grad_t * z2;
    res.grad_z2 = grad_t.transpose() * z1;
    return res;
}

LossResult byol(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2) {
    int n = static_cast<int>(z1.rows());
    Eigen::VectorXd r1 = row_norms_checked(z1, "Z1");
    Eigen::VectorXd r2 = row_norms_checked(z2, "Z2");
    LossResult res;
    res.value = 0.0;
    res.grad_z1.setZero(z1.rows(), z1.cols());
    res.grad_z2.setZero(z2.rows(), z2.cols());
    for (int v = 0; v < n; ++v) {
        Eigen::RowVectorXd a = z1.row(v) / r1(v);
        Eigen::RowVectorXd b = z2.row(v) / r2(v);
        double c = a.dot(b);
        res.value += 2.0 - 2.0 * c;
        res.grad_z1.row(v) = -2.0 / n * (b - c * a) / r1(v);
        res.grad_z2.row(v) = -2.0 / n * (a - c * b) / r2(v);
    }
    res.value /= n;
    return res;
}

LossResult barlow_twins(double lambda, const Eigen::MatrixXd& z1,
                        const Eigen::MatrixXd& z2) {
    int n = static_cast<int>(z1.rows());
    int d = static_cast<int>(z1.cols());
    if (n < 2)
        throw std::invalid_argument("loss: barlow_twins needs n >= 2 for column statistics");
    constexpr double kEps = 1e-8;

    auto standardize = [n, d](const Eigen::MatrixXd& z, Eigen::MatrixXd& zs,
                              Eigen::VectorXd& scale) {
        zs.resize(n, d);
        scale.resize(d);
        for (int a = 0; a < d; ++a) {
            double mu = z.col(a).mean();
            double var = (z.col(a).array() - mu).square().sum() / n;
            scale(a) = std::sqrt(var + kEps);
            zs.col(a) = (z.col(a).array() - mu) / scale(a);
        }
    };
    Eigen::MatrixXd zs1, zs2;
    Eigen::VectorXd s1, s2;
    standardize(z1, zs1, s1);
    standardize(z2, zs2, s2);

    Eigen::MatrixXd c = zs1.transpose() * zs2 / n;
    double loss = 0.0;
    Eigen::MatrixXd grad_c(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (a == b) {
                loss += (1.0 - c(a, a)) * (1.0 - c(a, a));
                grad_c(a, a) = -2.0 * (1.0 - c(a, a));
            } else {
                loss += lambda * c(a, b) * c(a, b);
                grad_c(a, b) = 2.0 * lambda * c(a, b);
            }
        }

    Eigen::MatrixXd g_zs1 = zs2 * grad_c.transpose() / n;
    Eigen::MatrixXd g_zs2 = zs1 * grad_c / n;

    // Backprop through per-column standardization.
    auto destandardize = [n, d](const Eigen::MatrixXd& g, const Eigen::MatrixXd& zs,
                                const Eigen::VectorXd& scale) {
        Eigen::MatrixXd out(n, d);
        for (int a = 0; a < d; ++a) {
            double gm = g.col(a).mean();
            double gz = (g.col(a).array() * zs.col(a).array()).mean();
            out.col(a) =
                (g.col(a).array() - gm - zs.col(a).array() * gz) / scale(a);
        }
        return out;
    };

    LossResult res;
    res.value = loss;
    res.grad_z1 = destandardize(g_zs1, zs1, s1);
    res.grad_z2 = destandardize(g_zs2, zs2, s2);
    return res;
}

}  // namespace

LossResult loss_value_and_grad(const LossConfig& config, const Eigen::MatrixXd& z1,
                               const Eigen::MatrixXd& z2) {
    config.validate();
    check_shapes(z1, z2);
    switch (config.kind) {
        case LossKind::infonce: return infonce(config.tau, z1, z2);
        case LossKind::jse: return jse(z1, z2);
        case LossKind::byol: return byol(z1, z2);
        case LossKind::barlow_twins: return barlow_twins(config.lambda, z1, z2);
    }
    throw std::logic_error("loss_value_and_grad: unreachable");
}

}  // namespace cgssl
