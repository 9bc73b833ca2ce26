#include "cgssl/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "cgssl/augment.hpp"
#include "cgssl/spectrum.hpp"

namespace cgssl {

namespace {

// Lentz continued fraction for the incomplete beta function.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-14;
    constexpr double kTiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("regularized_incomplete_beta: continued fraction "
                             "did not converge");
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(v.size()));
}

// OLS of y on the given design; throws on rank deficiency.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& design,
                              const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < design.cols())
        throw std::invalid_argument(
            "regression: design matrix is rank deficient (collinear columns)");
    return qr.solve(y);
}

// Shared R^2/F/p bookkeeping given residuals of a k-regressor fit.
void fill_statistics(RegressionResult& res, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& residuals, int k) {
    int n = static_cast<int>(y.size());
    double sst = (y.array() - y.mean()).square().sum();
    if (sst <= 0.0)
        throw std::invalid_argument("regression: y has zero variance");
    double ssr = residuals.squaredNorm();
    res.n = n;
    res.dof = n - k - 1;
    res.r_squared = 1.0 - ssr / sst;
    res.adj_r_squared = 1.0 - (1.0 - res.r_squared) * (n - 1.0) / res.dof;
    if (ssr <= sst * 1e-300) {
        res.f_statistic = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
        return;
    }
    res.f_statistic = (res.r_squared / k) / ((1.0 - res.r_squared) / res.dof);
    res.p_value = f_tail_p_value(res.f_statistic, k, res.dof);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0)
        throw std::invalid_argument(
            "regularized_incomplete_beta: a and b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_tail_p_value(double f, int k, int dof) {
    if (k < 1 || dof < 1)
        throw std::invalid_argument("f_tail_p_value: k and dof must be >= 1");
    if (!(f > 0.0)) return 1.0;
    if (std::isinf(f)) return 0.0;
    return regularized_incomplete_beta(dof / 2.0, k / 2.0,
                                       dof / (dof + k * f));
}

RegressionResult poly_regression(const std::vector<double>& x,
                                 const std::vector<double>& y, int order) {
    if (order < 1 || order > 2)
        throw std::invalid_argument("poly_regression: order must be 1 or 2");
    if (x.size() != y.size())
        throw std::invalid_argument("poly_regression: x and y lengths differ");
    int n = static_cast<int>(x.size());
    if (n < order + 2)
        throw std::invalid_argument("poly_regression: need at least order + 2 points");
    if (*std::max_element(x.begin(), x.end()) ==
        *std::min_element(x.begin(), x.end()))
        throw std::invalid_argument("poly_regression: x needs >= 2 distinct values");

    Eigen::VectorXd xv = to_eigen(x), yv = to_eigen(y);
    Eigen::MatrixXd design(n, order + 1);
    design.col(0).setOnes();
    for (int j = 1; j <= order; ++j)
        design.col(j) = xv.array().pow(static_cast<double>(j));

    RegressionResult res;
    Eigen::VectorXd beta = least_squares(design, yv);
    res.coefficients.assign(beta.data(), beta.data() + beta.size());
    fill_statistics(res, yv, yv - design * beta, order);
    return res;
}

RegressionResult iv2sls(const std::vector<double>& y, const std::vector<double>& x,
                        const std::vector<double>& z) {
    if (y.size() != x.size() || y.size() != z.size())
        throw std::invalid_argument("iv2sls: y, x, z lengths differ");
    int n = static_cast<int>(y.size());
    if (n < 4) throw std::invalid_argument("iv2sls: need at least 4 observations");

    Eigen::VectorXd yv = to_eigen(y), xv = to_eigen(x), zv = to_eigen(z);
    if ((zv.array() - zv.mean()).square().sum() <= 0.0)
        throw std::invalid_argument("iv2sls: degenerate instrument (zero variance)");

    // Stage 1: x on [1, z].
    Eigen::MatrixXd d1(n, 2);
    d1.col(0).setOnes();
    d1.col(1) = zv;
    Eigen::VectorXd g1 = least_squares(d1, xv);
    Eigen::VectorXd xhat = d1 * g1;
    double sst1 = (xv.array() - xv.mean()).square().sum();
    if (sst1 <= 0.0)
        throw std::invalid_argument("iv2sls: x has zero variance");
    double ssr1 = (xv - xhat).squaredNorm();
    double r1 = 1.0 - ssr1 / sst1;
    double first_f = ssr1 <= sst1 * 1e-300
                         ? std::numeric_limits<double>::infinity()
                         : r1 / ((1.0 - r1) / (n - 2.0));

    if ((xhat.array() - xhat.mean()).square().sum() <= 1e-300 * sst1)
        throw std::invalid_argument(
            "iv2sls: instrument uncorrelated with x (stage 1 slope ~ 0)");

    // Stage 2: y on [1, xhat]; residuals with the original x.
    Eigen::MatrixXd d2(n, 2);
    d2.col(0).setOnes();
    d2.col(1) = xhat;
    Eigen::VectorXd beta = least_squares(d2, yv);
    Eigen::VectorXd residuals = yv - beta(0) * Eigen::VectorXd::Ones(n) -
                                beta(1) * xv;

    RegressionResult res;
    res.coefficients.assign(beta.data(), beta.data() + beta.size());
    res.first_stage_f = first_f;
    res.weak_instrument = first_f < 10.0;
    fill_statistics(res, yv, residuals, 1);
    return res;
}

TimingRow time_benchmark(const std::string& op, const Graph& g, int repeats) {
    if (repeats < 3)
        throw std::invalid_argument("time_benchmark: repeats must be >= 3");
    g.validate();

    Rng rng(0xbe7c);
    std::function<void()> call;
    TimingRow row;
    row.n = g.n;
    row.m = g.num_edges();
    if (op == "spectrum") {
        row.method = "Spectrum calculation";
        call = [&g]() { volatile double sink = laplacian_spectrum(g).values[0]; (void)sink; };
    } else if (op == "drop_edge") {
        row.method = "DropEdge";
        call = [&g, &rng]() {
            volatile int sink = drop_edge(g, 0.2, rng).graph.num_edges();
            (void)sink;
        };
    } else if (op == "add_edge") {
        row.method = "AddEdge";
        double non_edges = g.n * (g.n - 1.0) / 2.0 - g.num_edges();
        double q = non_edges > 0.0
                       ? std::min(1.0, 0.2 * g.num_edges() / non_edges)
                       : 0.0;
        call = [&g, &rng, q]() {
            volatile int sink = add_edge(g, q, rng).graph.num_edges();
            (void)sink;
        };
    } else {
        throw std::invalid_argument(
            "time_benchmark: op must be one of spectrum, drop_edge, add_edge");
    }

    call();  // warm-up
    std::vector<double> times(repeats);
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        call();
        auto t1 = std::chrono::steady_clock::now();
        times[r] = std::chrono::duration<double>(t1 - t0).count();
    }
    auto mid = times.begin() + repeats / 2;
    std::nth_element(times.begin(), mid, times.end());
    row.seconds_per_call = *mid;
    if (row.seconds_per_call <= 0.0)
        row.seconds_per_call = std::numeric_limits<double>::min();
    return row;
}

}  // namespace cgssl
