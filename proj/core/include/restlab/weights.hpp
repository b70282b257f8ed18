#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "restlab/fractal.hpp"

namespace restlab {

// Uniform cell grid over an axis-aligned box.  Values live at cell centers
// lo_i + (k + 1/2) h; axis 0 is the slowest index.
struct GridBox {
    int d = 0;
    std::vector<double> lo, hi;
    double h = 0.0;
    std::vector<std::size_t> n;

    std::size_t cells() const;
    std::vector<double> center(std::size_t flat) const;
    // Index of the cell containing x, or cells() when x is outside the box.
    std::size_t locate(const std::vector<double>& x) const;
    void validate() const;
};

GridBox make_grid(int d, std::vector<double> lo, std::vector<double> hi, double h);

// Nonnegative weight sampled on a grid; `alpha` is the ball-growth exponent
// the weight is intended to satisfy (mass of B(x, r) at most C r^alpha for
// r >= 1).
class SampledWeight {
  public:
    SampledWeight(GridBox grid, std::vector<double> values, double alpha);

    static SampledWeight uniform(int d, double half_extent, double h, double value = 1.0);

    const GridBox& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double alpha() const { return alpha_; }
    double cell_volume() const;

    // Nearest-cell density lookup; zero outside the box.
    double at(const std::vector<double>& x) const;
    // Riemann ball mass: h^d times the sum of values over cells whose center
    // lies in the closed ball.
    double ball_mass(const std::vector<double>& center, double r) const;
    double total_mass() const;

  private:
    GridBox grid_;
    std::vector<double> values_;
    double alpha_;
};

// Samples mass(B(x, r)) / r^alpha over the given radii and centers.  Radii
// default to {1, 2, 4, 8, 16}; centers default to a coarse lattice over the
// box.  The spacing must satisfy h <= r_min / 8 or the Riemann masses are
// not trustworthy and the check refuses to run.
FrostmanCertificate verify_weight(const SampledWeight& H, double alpha, double constant,
                                  std::vector<double> radii = {},
                                  std::vector<std::vector<double>> centers = {});

// Compactly supported C^2 bump (1 - |u/radius|^2)^3 normalized to unit
// integral; the smoothing profile for weight_from_measure.
struct BumpSpec {
    double radius = 1.0;
};

// Normalization constant making the bump integrate to 1 in dimension d.
double bump_normalizer(int d, const BumpSpec& bump = {});
double bump_value(int d, const BumpSpec& bump, const std::vector<double>& u);

// H = R^alpha * (dilated measure) convolved with the bump, sampled at cell
// centers on a grid covering the dilated support plus the bump radius.
// alpha is taken from the measure.  total integral ~ R^alpha.
SampledWeight weight_from_measure(const FractalMeasure& mu, double R, const BumpSpec& bump = {},
                                  double h = 0.25);

// Closed-form field with a declared frequency band.
struct BandedField {
    std::function<std::complex<double>(const std::vector<double>&)> eval;
    double band_radius = 1.0;
};

struct DominationReport {
    double weighted = 0.0;    // integral of |F|^p H over the box
    double unweighted = 0.0;  // integral of |F|^p
    double ratio = 0.0;
    double band_leakage = 0.0;  // out-of-band to in-band peak ratio of the DTFT
};

// Integrates |F|^p with and without the weight on H's grid (optionally at a
// finer spacing) and reports the ratio.  First verifies the declared band
// limit with a windowed discrete Fourier probe; a leakage above 2% is an
// error, not a silent pass.
DominationReport banded_domination_check(const BandedField& F, const SampledWeight& H, double p,
                                         double spacing = 0.0);

// Image of the weight under the parabolic rescaling adapted to frequency
// cap center omega0 at scale K: y' = (x' + 2 x_d omega0)/K, y_d = x_d/K^2,
// with density K^{d-alpha} H(x).  Ball masses of the image obey
// mass*(B(y, r)) <= (1 + 2K|omega0|)^{d-1} C r^alpha for r >= 1 when H has
// constant C; verify with verify_weight.
SampledWeight parabolic_rescale_weight(const SampledWeight& H, const std::vector<double>& omega0,
                                       double K);

// Binary grid file: u64 dimension, f64 lo[d], f64 hi[d], f64 spacing, then
// row-major f64 cell values (axis 0 slowest).  Cell counts are derived from
// the box and spacing and must match the payload size exactly.
void write_weight_file(const std::string& path, const SampledWeight& H);
SampledWeight read_weight_file(const std::string& path, double alpha);

}  // namespace restlab
