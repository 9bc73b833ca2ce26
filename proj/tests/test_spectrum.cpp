#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cgssl/spectrum.hpp"

using namespace cgssl;

namespace {

// Independent oracle: cyclic Jacobi rotations on a dense symmetric matrix.
// Intentionally distinct from the library's solver.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd m) {
    const int n = static_cast<int>(m.rows());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) < 1e-18) continue;
                double theta = 0.5 * std::atan2(2.0 * m(p, q), m(q, q) - m(p, p));
                double c = std::cos(theta), s = std::sin(theta);
                Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
                j(p, p) = c;
                j(q, q) = c;
                j(p, q) = s;
                j(q, p) = -s;
                m = j.transpose() * m * j;
            }
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = m(i, i);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Spectrum> random_spectra(int count, int n, std::uint64_t seed0) {
    std::vector<Spectrum> out;
    for (int i = 0; i < count; ++i)
        out.push_back(laplacian_spectrum(generate_er(n, 0.25, seed0 + i)));
    return out;
}

double trapezoid(const std::vector<double>& grid, const std::vector<double>& y) {
    double area = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        area += 0.5 * (y[i] + y[i - 1]) * (grid[i] - grid[i - 1]);
    return area;
}

}  // namespace

TEST_CASE("eigenvalues agree with a Jacobi rotation oracle") {
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = generate_er(4 + trial % 5, 0.5, 3100 + trial);
        if (degree_info(g).d_min == 0) continue;
        auto lap = normalize(g, NormalizedMatrix::Kind::laplacian, false);
        Spectrum s = eigenvalues(lap);
        auto oracle = jacobi_eigenvalues(lap.values);
        REQUIRE(s.size() == static_cast<int>(oracle.size()));
        for (int i = 0; i < s.size(); ++i)
            CHECK(s.values[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    }
}

TEST_CASE("eigenvalues rejects asymmetric input") {
    NormalizedMatrix m;
    m.kind = NormalizedMatrix::Kind::laplacian;
    m.values = Eigen::MatrixXd::Zero(2, 2);
    m.values(0, 1) = 1.0;
    CHECK_THROWS_AS(eigenvalues(m), std::invalid_argument);
}

TEST_CASE("K2 Laplacian spectrum is {0, 2}") {
    Graph g;
    g.n = 2;
    g.edges = {{0, 1}};
    g.features = Eigen::MatrixXd::Zero(2, 1);
    Spectrum s = laplacian_spectrum(g);
    REQUIRE(s.size() == 2);
    CHECK(std::abs(s.values[0]) <= 1e-12);
    CHECK(s.values[1] == doctest::Approx(2.0));
}

TEST_CASE("Laplacian eigenvalues stay in [0, 2] and start at 0") {
    for (int trial = 0; trial < 120; ++trial) {
        Graph g = generate_er(12 + trial % 20, 0.2 + 0.02 * (trial % 10),
                              7000 + trial);
        Spectrum s = laplacian_spectrum(g);
        CHECK(s.values.front() >= -1e-10);
        CHECK(s.values.front() <= 1e-10);
        CHECK(s.values.back() <= 2.0 + 1e-10);
        CHECK(std::is_sorted(s.values.begin(), s.values.end()));
    }
}

TEST_CASE("isolated nodes contribute zero eigenvalues") {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1}};
    g.features = Eigen::MatrixXd::Zero(3, 1);
    Spectrum s = laplacian_spectrum(g);
    REQUIRE(s.size() == 3);
    CHECK(std::abs(s.values[0]) <= 1e-12);
    CHECK(std::abs(s.values[1]) <= 1e-12);
    CHECK(s.values[2] == doctest::Approx(2.0));
}

TEST_CASE("spectral_distance is a metric on sampled spectra") {
    auto spectra = random_spectra(8, 15, 4200);
    for (const auto& a : spectra) CHECK(spectral_distance(a, a) == 0.0);
    for (std::size_t i = 0; i < spectra.size(); ++i)
        for (std::size_t j = i + 1; j < spectra.size(); ++j) {
            double dij = spectral_distance(spectra[i], spectra[j]);
            CHECK(dij == doctest::Approx(spectral_distance(spectra[j], spectra[i])));
            CHECK(dij >= 0.0);
            for (std::size_t l = 0; l < spectra.size(); ++l)
                CHECK(dij <= spectral_distance(spectra[i], spectra[l]) +
                                 spectral_distance(spectra[l], spectra[j]) + 1e-12);
        }

    Spectrum a{{0.0, 1.0}}, b{{1.0, 1.0}};
    CHECK(spectral_distance(a, b) == doctest::Approx(1.0));
    Spectrum c{{0.0}};
    CHECK_THROWS_AS(spectral_distance(a, c), std::invalid_argument);
}

TEST_CASE("single-spectrum KDE integrates to one") {
    auto spectra = random_spectra(1, 25, 91);
    for (double bw : {-1.0, 0.05, 0.2}) {
        DensityCurve c = kde_curve(spectra, bw, 2048);
        CHECK(trapezoid(c.grid, c.mean) == doctest::Approx(1.0).epsilon(1e-3));
        for (double s : c.std) CHECK(s == 0.0);
    }
}

TEST_CASE("KDE mean and std match a direct recomputation") {
    auto spectra = random_spectra(6, 20, 555);
    DensityCurve c = kde_curve(spectra, 0.1, 301);
    REQUIRE(c.grid.size() == 301);
    CHECK(c.grid.front() == doctest::Approx(0.0));
    CHECK(c.grid.back() == doctest::Approx(2.0));
    // Mean of per-spectrum curves equals the ensemble mean.
    std::vector<DensityCurve> singles;
    for (const auto& s : spectra) singles.push_back(kde_curve({s}, 0.1, 301));
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        double m = 0.0;
        for (const auto& one : singles) m += one.mean[i];
        m /= singles.size();
        CHECK(c.mean[i] == doctest::Approx(m).epsilon(1e-10));
        double var = 0.0;
        for (const auto& one : singles) var += (one.mean[i] - m) * (one.mean[i] - m);
        CHECK(c.std[i] == doctest::Approx(std::sqrt(var / singles.size()))
                              .epsilon(1e-8)
                              .scale(1.0));
    }
}

TEST_CASE("parallel and serial kernels agree exactly") {
    auto spectra = random_spectra(12, 18, 808);
    DensityCurve p = kde_curve(spectra, -1.0, 512);
    DensityCurve s = kde_curve_serial(spectra, -1.0, 512);
    REQUIRE(p.grid.size() == s.grid.size());
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        CHECK(p.mean[i] == s.mean[i]);
        CHECK(p.std[i] == s.std[i]);
    }
    MeanSpectrum mp = ensemble_mean_spectrum(spectra);
    MeanSpectrum ms = ensemble_mean_spectrum_serial(spectra);
    for (int i = 0; i < mp.mean.size(); ++i) {
        CHECK(mp.mean.values[i] == ms.mean.values[i]);
        CHECK(mp.std[i] == ms.std[i]);
    }
}

TEST_CASE("ensemble mean spectrum is the entrywise average") {
    Spectrum a{{0.0, 1.0, 2.0}}, b{{0.5, 1.5, 1.5}};
    MeanSpectrum m = ensemble_mean_spectrum({a, b});
    CHECK(m.mean.values == std::vector<double>{0.25, 1.25, 1.75});
    CHECK(m.std[0] == doctest::Approx(0.25));
    CHECK(m.std[2] == doctest::Approx(0.25));
    Spectrum c{{0.0}};
    CHECK_THROWS_AS(ensemble_mean_spectrum({a, c}), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_mean_spectrum({}), std::invalid_argument);
}

TEST_CASE("histogram densities sum to one") {
    auto spectra = random_spectra(1, 30, 17);
    Histogram h = histogram(spectra[0], 25);
    REQUIRE(h.density.size() == 25);
    double mass = 0.0;
    for (std::size_t i = 0; i < h.density.size(); ++i) {
        CHECK(h.density[i] >= 0.0);
        mass += h.density[i] * (h.bin_right[i] - h.bin_left[i]);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(h.bin_left.front() == doctest::Approx(0.0));
    CHECK(h.bin_right.back() == doctest::Approx(2.0));
    CHECK_THROWS_AS(histogram(spectra[0], 0), std::invalid_argument);
}

TEST_CASE("csv writers emit parseable files") {
    auto spectra = random_spectra(3, 10, 3);
    DensityCurve c = kde_curve(spectra, -1.0, 16);
    write_curve_csv(c, "curve_test.csv");
    std::ifstream in("curve_test.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "grid,mean,std");
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        double g, m, s;
        char c1, c2;
        std::istringstream row(line);
        REQUIRE((row >> g >> c1 >> m >> c2 >> s));
        ++rows;
    }
    CHECK(rows == 16);
    write_spectrum_csv(spectra[0], "spec_test.csv");
    write_histogram_csv(histogram(spectra[0], 8), "hist_test.csv");
    write_curves_svg({c}, {"test"}, "curve_test.svg");
    std::ifstream svg("curve_test.svg");
    std::string first;
    std::getline(svg, first);
    CHECK(first.find("<svg") != std::string::npos);
    for (const char* f : {"curve_test.csv", "spec_test.csv", "hist_test.csv",
                          "curve_test.svg"})
        std::filesystem::remove(f);
}
