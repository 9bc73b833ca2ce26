#include "cgssl/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace cgssl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_symmetric(const Eigen::MatrixXd& m) {
    double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw std::invalid_argument("eigenvalues: matrix is not symmetric (max |M - M^T| = " +
                                    std::to_string(asym) + ")");
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double scott_bandwidth(const std::vector<double>& xs) {
    int n = static_cast<int>(xs.size());
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= n;
    double sigma = std::sqrt(var);
    double h = std::pow(static_cast<double>(n), -0.2) * sigma;
    return h > 1e-12 ? h : 0.05;  // fallback for degenerate (constant) samples
}

// One spectrum's KDE on the grid, each kernel renormalized to its mass in [0,2].
void kde_single(const std::vector<double>& xs, double bandwidth,
                const std::vector<double>& grid, std::vector<double>& out) {
    double h = bandwidth > 0.0 ? bandwidth : scott_bandwidth(xs);
    int n = static_cast<int>(xs.size());
    std::vector<double> weight(n);
    for (int i = 0; i < n; ++i) {
        double mass = std_normal_cdf((2.0 - xs[i]) / h) - std_normal_cdf((0.0 - xs[i]) / h);
        weight[i] = mass > 1e-12 ? 1.0 / mass : 0.0;
    }
    const double norm = 1.0 / (n * h * std::sqrt(2.0 * kPi));
    for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double u = (grid[gidx] - xs[i]) / h;
            acc += weight[i] * std::exp(-0.5 * u * u);
        }
        out[gidx] = acc * norm;
    }
}

DensityCurve kde_curve_impl(const std::vector<Spectrum>& spectra, double bandwidth,
                            int grid_points, bool parallel) {
    if (spectra.empty()) throw std::invalid_argument("kde_curve: no spectra given");
    if (grid_points < 16) throw std::invalid_argument("kde_curve: grid_points must be >= 16");
    for (const auto& s : spectra)
        if (s.values.empty()) throw std::invalid_argument("kde_curve: empty spectrum");

    DensityCurve curve;
    curve.grid.resize(grid_points);
    for (int i = 0; i < grid_points; ++i)
        curve.grid[i] = 2.0 * i / (grid_points - 1);

    int m = static_cast<int>(spectra.size());
    std::vector<std::vector<double>> densities(m, std::vector<double>(grid_points));
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < m; ++s)
            kde_single(spectra[s].values, bandwidth, curve.grid, densities[s]);
    } else {
        for (int s = 0; s < m; ++s)
            kde_single(spectra[s].values, bandwidth, curve.grid, densities[s]);
    }

    curve.mean.assign(grid_points, 0.0);
    curve.std.assign(grid_points, 0.0);
    for (int g = 0; g < grid_points; ++g) {
        double mean = 0.0;
        for (int s = 0; s < m; ++s) mean += densities[s][g];
        mean /= m;
        double var = 0.0;
        for (int s = 0; s < m; ++s) {
            double d = densities[s][g] - mean;
            var += d * d;
        }
        curve.mean[g] = mean;
        curve.std[g] = std::sqrt(var / m);
    }
    return curve;
}

MeanSpectrum ensemble_mean_impl(const std::vector<Spectrum>& spectra, bool parallel) {
    if (spectra.empty())
        throw std::invalid_argument("ensemble_mean_spectrum: no spectra given");
    int len = spectra[0].size();
    for (const auto& s : spectra)
        if (s.size() != len)
            throw std::invalid_argument(
                "ensemble_mean_spectrum: mixed spectrum lengths (" +
                std::to_string(s.size()) + " vs " + std::to_string(len) + ")");
    MeanSpectrum out;
    out.mean.values.assign(len, 0.0);
    out.std.assign(len, 0.0);
    int m = static_cast<int>(spectra.size());
#pragma omp parallel for if (parallel) schedule(static)
    for (int i = 0; i < len; ++i) {
        double mean = 0.0;
        for (int s = 0; s < m; ++s) mean += spectra[s].values[i];
        mean /= m;
        double var = 0.0;
        for (int s = 0; s < m; ++s) {
            double d = spectra[s].values[i] - mean;
            var += d * d;
        }
        out.mean.values[i] = mean;
        out.std[i] = std::sqrt(var / m);
    }
    return out;
}

}  // namespace

Spectrum eigenvalues(const NormalizedMatrix& matrix) {
    check_symmetric(matrix.values);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix.values,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenvalues: eigensolver did not converge");
    Spectrum s;
    s.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(s.values.begin(), s.values.end());
    return s;
}

Spectrum laplacian_spectrum(const Graph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
    for (const auto& [u, v] : g.edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    Eigen::VectorXd deg = a.rowwise().sum();
    Eigen::VectorXd dinv(g.n);
    for (int i = 0; i < g.n; ++i) dinv(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
    Eigen::MatrixXd l = -(dinv.asDiagonal() * a * dinv.asDiagonal());
    for (int i = 0; i < g.n; ++i) l(i, i) = deg(i) > 0.0 ? 1.0 : 0.0;
    l = 0.5 * (l + l.transpose()).eval();
    return eigenvalues(NormalizedMatrix{NormalizedMatrix::Kind::laplacian, l, false});
}

double spectral_distance(const Spectrum& a, const Spectrum& b) {
    if (a.size() != b.size())
        throw std::invalid_argument(
            "spectral_distance: spectra have different lengths (" +
            std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
            "); compare DensityCurves for graphs of different sizes");
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

DensityCurve kde_curve(const std::vector<Spectrum>& spectra, double bandwidth,
                       int grid_points) {
    return kde_curve_impl(spectra, bandwidth, grid_points, true);
}

DensityCurve kde_curve_serial(const std::vector<Spectrum>& spectra, double bandwidth,
                              int grid_points) {
    return kde_curve_impl(spectra, bandwidth, grid_points, false);
}

Histogram histogram(const Spectrum& spectrum, int bins) {
    if (bins < 2) throw std::invalid_argument("histogram: bins must be >= 2");
    if (spectrum.values.empty())
        throw std::invalid_argument("histogram: empty spectrum");
    Histogram h;
    double width = 2.0 / bins;
    h.bin_left.resize(bins);
    h.bin_right.resize(bins);
    h.density.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b) {
        h.bin_left[b] = b * width;
        h.bin_right[b] = (b + 1) * width;
    }
    for (double x : spectrum.values) {
        int b = static_cast<int>(x / width);
        b = std::clamp(b, 0, bins - 1);  // eigenvalue exactly 2 goes to last bin
        h.density[b] += 1.0;
    }
    double total = static_cast<double>(spectrum.values.size());
    for (int b = 0; b < bins; ++b) h.density[b] /= total * width;
    return h;
}

MeanSpectrum ensemble_mean_spectrum(const std::vector<Spectrum>& spectra) {
    return ensemble_mean_impl(spectra, true);
}

MeanSpectrum ensemble_mean_spectrum_serial(const std::vector<Spectrum>& spectra) {
    return ensemble_mean_impl(spectra, false);
}

// --- emission ----------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << std::setprecision(17);
    return out;
}

}  // namespace

void write_curve_csv(const DensityCurve& curve, const std::string& path) {
    auto out = open_out(path);
    out << "grid,mean,std\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << curve.grid[i] << "," << curve.mean[i] << "," << curve.std[i] << "\n";
}

void write_histogram_csv(const Histogram& hist, const std::string& path) {
    auto out = open_out(path);
    out << "bin_left,bin_right,density\n";
    for (std::size_t i = 0; i < hist.density.size(); ++i)
        out << hist.bin_left[i] << "," << hist.bin_right[i] << "," << hist.density[i] << "\n";
}

void write_spectrum_csv(const Spectrum& s, const std::string& path) {
    auto out = open_out(path);
    out << "eigenvalue\n";
    for (double v : s.values) out << v << "\n";
}

void write_curves_svg(const std::vector<DensityCurve>& curves,
                      const std::vector<std::string>& names,
                      const std::string& path) {
    const int width = 720, height = 420, margin = 50;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b"};
    double ymax = 1e-9;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.mean.size(); ++i)
            ymax = std::max(ymax, c.mean[i] + c.std[i]);

    auto sx = [&](double x) { return margin + x / 2.0 * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - y / ymax * (height - 2 * margin); };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& cv = curves[c];
        const char* color = palette[c % 6];
        // std band
        std::ostringstream band;
        band << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < cv.grid.size(); ++i)
            band << sx(cv.grid[i]) << "," << sy(cv.mean[i] + cv.std[i]) << " ";
        for (std::size_t i = cv.grid.size(); i-- > 0;)
            band << sx(cv.grid[i]) << "," << sy(std::max(0.0, cv.mean[i] - cv.std[i])) << " ";
        band << "\"/>";
        out << band.str() << "\n";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < cv.grid.size(); ++i)
            out << sx(cv.grid[i]) << "," << sy(cv.mean[i]) << " ";
        out << "\"/>\n";
        std::string name = c < names.size() ? names[c] : ("curve " + std::to_string(c));
        out << "<text x=\"" << width - margin - 150 << "\" y=\"" << margin + 18 * (c + 1)
            << "\" fill=\"" << color << "\" font-size=\"13\">" << name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace cgssl
