// Compares the OpenMP spectrum kernels against their serial references on a
// batch of random-graph spectra and reports wallclock for both paths.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "cgssl/graph.hpp"
#include "cgssl/spectrum.hpp"

namespace {

double seconds(std::chrono::steady_clock::time_point t0,
               std::chrono::steady_clock::time_point t1) {
    return std::chrono::duration<double>(t1 - t0).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    int graphs = argc > 1 ? std::atoi(argv[1]) : 64;
    int nodes = argc > 2 ? std::atoi(argv[2]) : 200;
    int grid = argc > 3 ? std::atoi(argv[3]) : 512;
    int repeats = argc > 4 ? std::atoi(argv[4]) : 5;
    if (graphs < 1 || nodes < 2 || grid < 16 || repeats < 1) {
        std::fprintf(stderr, "usage: %s [graphs] [nodes] [grid] [repeats]\n",
                     argv[0]);
        return 2;
    }

    std::printf("preparing %d ER spectra (n=%d)\n", graphs, nodes);
    std::vector<cgssl::Spectrum> spectra;
    spectra.reserve(graphs);
    for (int i = 0; i < graphs; ++i)
        spectra.push_back(cgssl::laplacian_spectrum(
            cgssl::generate_er(nodes, 10.0 / nodes, 1234 + i)));

    auto bench = [repeats](auto&& fn) {
        double best = 1e300;
        for (int r = 0; r < repeats; ++r) {
            auto t0 = std::chrono::steady_clock::now();
            fn();
            auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, seconds(t0, t1));
        }
        return best;
    };

    cgssl::DensityCurve kde_par, kde_ser;
    double t_kde_par = bench([&] { kde_par = cgssl::kde_curve(spectra, 0.0, grid); });
    double t_kde_ser =
        bench([&] { kde_ser = cgssl::kde_curve_serial(spectra, 0.0, grid); });
    std::printf("kde_curve            parallel %.6fs  serial %.6fs  speedup %.2fx"
                "  max|diff| %.3e\n",
                t_kde_par, t_kde_ser, t_kde_ser / t_kde_par,
                max_abs_diff(kde_par.mean, kde_ser.mean));

    cgssl::MeanSpectrum ms_par, ms_ser;
    double t_ms_par =
        bench([&] { ms_par = cgssl::ensemble_mean_spectrum(spectra); });
    double t_ms_ser =
        bench([&] { ms_ser = cgssl::ensemble_mean_spectrum_serial(spectra); });
    std::printf("ensemble_mean_spectrum parallel %.6fs  serial %.6fs  speedup "
                "%.2fx  max|diff| %.3e\n",
                t_ms_par, t_ms_ser, t_ms_ser / t_ms_par,
                max_abs_diff(ms_par.mean.values, ms_ser.mean.values));

    bool same = max_abs_diff(kde_par.mean, kde_ser.mean) == 0.0 &&
                max_abs_diff(ms_par.mean.values, ms_ser.mean.values) == 0.0;
    std::printf("parallel/serial outputs identical: %s\n", same ? "yes" : "no");
    return same ? 0 : 1;
}
