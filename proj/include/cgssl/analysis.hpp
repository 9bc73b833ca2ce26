#ifndef CGSSL_ANALYSIS_HPP
#define CGSSL_ANALYSIS_HPP

#include <string>
#include <vector>

#include "cgssl/graph.hpp"

namespace cgssl {

struct RegressionResult {
    std::vector<double> coefficients;  // intercept first
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double f_statistic = 0.0;
    double p_value = 1.0;
    int n = 0;
    int dof = 0;                       // residual degrees of freedom
    double first_stage_f = 0.0;        // iv2sls only
    bool weak_instrument = false;      // first-stage F below 10
};

/// Upper-tail regularized incomplete beta I_x(a, b), continued fraction
/// evaluation to 1e-12 relative.
double regularized_incomplete_beta(double a, double b, double x);

/// P(F_{k, dof} > f).
double f_tail_p_value(double f, int k, int dof);

/// Least squares of y on [1, x, ..., x^order] via column-pivoted QR, with
/// R^2, adjusted R^2, and the F test against the intercept-only model.
RegressionResult poly_regression(const std::vector<double>& x,
                                 const std::vector<double>& y, int order);

/// Two-stage least squares with a single instrument: x regressed on [1, z],
/// y regressed on [1, xhat]; statistics use the IV-consistent residuals
/// y - [1, x] beta_hat.
RegressionResult iv2sls(const std::vector<double>& y, const std::vector<double>& x,
                        const std::vector<double>& z);

struct TimingRow {
    std::string method;        // Spectrum calculation | DropEdge | AddEdge
    int n = 0;
    int m = 0;
    double seconds_per_call = 0.0;
};

/// Median wallclock over repeats after one warm-up call. op is one of
/// {spectrum, drop_edge, add_edge}.
TimingRow time_benchmark(const std::string& op, const Graph& g, int repeats);

}  // namespace cgssl

#endif
