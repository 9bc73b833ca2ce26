#ifndef CGSSL_SPECTRUM_HPP
#define CGSSL_SPECTRUM_HPP

#include <string>
#include <vector>

#include "cgssl/graph.hpp"

namespace cgssl {

/// Ascending eigenvalue vector of a normalized operator.
struct Spectrum {
    std::vector<double> values;
    int size() const { return static_cast<int>(values.size()); }
};

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> std;
};

struct Histogram {
    std::vector<double> bin_left;
    std::vector<double> bin_right;
    std::vector<double> density;
};

/// Full symmetric eigendecomposition; returns the sorted eigenvalues.
/// Input must be symmetric to within 1e-10.
Spectrum eigenvalues(const NormalizedMatrix& matrix);

/// Normalized-Laplacian spectrum of a graph, tolerating isolated nodes
/// (zero-degree rows contribute a zero eigenvalue). Used for spectrum
/// logging and augmentation search where edge drops may isolate nodes.
Spectrum laplacian_spectrum(const Graph& g);

/// L2 distance between two equally sized sorted spectra.
double spectral_distance(const Spectrum& a, const Spectrum& b);

/// Gaussian-kernel KDE of each spectrum on a uniform grid over [0,2],
/// then pointwise mean and std across spectra. bandwidth <= 0 selects
/// Scott's rule n^(-1/5) * sigma per spectrum. Each kernel is renormalized
/// to its mass inside [0,2] so a single-spectrum curve integrates to 1.
DensityCurve kde_curve(const std::vector<Spectrum>& spectra, double bandwidth,
                       int grid_points);

/// Serial reference for the OpenMP kernel above; identical output.
DensityCurve kde_curve_serial(const std::vector<Spectrum>& spectra,
                              double bandwidth, int grid_points);

/// Density histogram over [0,2]: sum(density * width) == 1.
Histogram histogram(const Spectrum& spectrum, int bins);

struct MeanSpectrum {
    Spectrum mean;
    std::vector<double> std;
};

/// Entrywise mean and std of equally sized sorted spectra.
MeanSpectrum ensemble_mean_spectrum(const std::vector<Spectrum>& spectra);
MeanSpectrum ensemble_mean_spectrum_serial(const std::vector<Spectrum>& spectra);

// CSV / SVG emission.
void write_curve_csv(const DensityCurve& curve, const std::string& path);
void write_histogram_csv(const Histogram& hist, const std::string& path);
void write_spectrum_csv(const Spectrum& s, const std::string& path);

/// Self-contained SVG line plot of one or more curves with optional
/// mean +- std bands.
void write_curves_svg(const std::vector<DensityCurve>& curves,
                      const std::vector<std::string>& names,
                      const std::string& path);

}  // namespace cgssl

#endif
