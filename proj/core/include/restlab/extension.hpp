#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "restlab/quadrature.hpp"
#include "restlab/rational.hpp"
#include "restlab/weights.hpp"

namespace restlab {

using ClosedForm = std::function<std::complex<double>(const std::vector<double>&)>;

// Complex density on the unit ball of frequency space (d-1 dimensions),
// sampled at midpoints -1 + (k + 1/2) h of a uniform grid over [-1,1]^{d-1}
// with m nodes per axis (h = 2/m); values are zero outside the closed unit
// ball.  `form` optionally carries the closed-form recipe the samples came
// from, which exact rescaling needs.
struct FrequencyProfile {
    int d = 2;
    int m = 0;
    double h = 0.0;
    std::vector<std::complex<double>> values;  // m^(d-1), axis 0 slowest
    ClosedForm form;

    double node(int k) const { return -1.0 + (k + 0.5) * h; }
    std::size_t count() const { return values.size(); }
};

// Samples a closed form on the midpoint grid, zeroing outside the unit ball.
FrequencyProfile sample_profile(int d, int m, ClosedForm form);

FrequencyProfile profile_constant(int d, int m);
// Smooth bump ((1 - |u|^2)^3 in the rescaled variable) supported on
// B(center, radius) intersected with the unit ball.
FrequencyProfile profile_bump(int d, int m, std::vector<double> center, double radius);
// Indicator of the cap B(center, radius).
FrequencyProfile profile_cap(int d, int m, std::vector<double> center, double radius);
// Truncated gaussian exp(-|omega-center|^2 / width^2).
FrequencyProfile profile_gaussian(int d, int m, std::vector<double> center, double width);
// Multiplies by the plane wave e^{i v . omega}, which translates the field.
FrequencyProfile profile_modulated(const FrequencyProfile& base, std::vector<double> v);
// Random trigonometric polynomial (degree `degree` per axis, coefficients
// from the seeded counter generator) under a smooth envelope.
FrequencyProfile profile_random(int d, int m, std::uint64_t seed, int degree = 3);

// Quadrature L2 norm  (sum |f|^2 h^{d-1})^{1/2}.
double profile_l2(const FrequencyProfile& f);

// Extension-field samples at scattered points of B_R.
struct FieldSample {
    int d = 2;
    double R = 0.0;
    double spacing = 0.0;      // x-grid spacing; 0 for scattered points
    double quad_spacing = 0.0; // frequency spacing used
    std::vector<std::vector<double>> points;
    std::vector<std::complex<double>> values;
};

// Midpoint-rule evaluation of the paraboloid extension
//   Ef(x) = integral of e^{i (x'.omega + x_d |omega|^2)} f(omega) d omega
// at each point.  Phase-resolution rule h <= 1/(4 max|x|) is enforced:
// violating it aliases the quadratic phase and is an error, never a silent
// wrong answer.
std::vector<std::complex<double>> extend(const FrequencyProfile& f,
                                         const std::vector<std::vector<double>>& points);

// Fast separable evaluation over one x3-plane of a product grid (d = 3).
// Matches `extend` to 1e-8; kept as the workhorse for full-grid norms.
std::vector<std::complex<double>> extend_plane3(const FrequencyProfile& f, double x3,
                                                const std::vector<double>& x1s,
                                                const std::vector<double>& x2s);

// Field on the spacing-lattice points of B_R; when `where` is given, only
// points with a positive weight value are kept (the rest contribute nothing
// to weighted norms).  Caps: d = 2 with R <= 256, d = 3 with R <= 64.
FieldSample field_on_ball(const FrequencyProfile& f, double R, double spacing = 0.5,
                          const SampledWeight* where = nullptr);

// (sum |Ef|^p H(x) spacing^d)^{1/p} over the field's points.  H must be at
// least as fine as the field grid.
double weighted_norm(const FieldSample& field, const SampledWeight& H, double p);
// Same with H == 1.
double unweighted_norm(const FieldSample& field, double p);

// Density on the unit sphere S^{d-1} sampled at quadrature nodes.
struct SphereProfile {
    int d = 2;
    std::vector<SphereNode> nodes;
    std::vector<std::complex<double>> values;
};

SphereProfile sample_sphere_profile(int d, int nodes, ClosedForm form);

// Inverse transform of g dsigma: sum of w g(sigma) e^{i x . sigma}.
// Requires the node count of the rule for max|x|.
std::vector<std::complex<double>> extend_sphere(const SphereProfile& g,
                                                const std::vector<std::vector<double>>& points);

// Affine change of variables y' = (x' + 2 x_d omega0)/K, y_d = x_d / K^2.
struct ParabolicMap {
    std::vector<double> omega0;
    double K = 1.0;

    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> inverse(const std::vector<double>& y) const;
    // |Ef(x)| = amplitude * |Eg(apply(x))| for the rescaled profile g.
    double amplitude() const;
};

// Zooms a profile supported in B(omega0, 1/K) to full scale:
// g(xi) = K^{-(d-1)/2} f(omega0 + xi/K).  Requires the closed form and
// checks the support declaration against the samples.  L2 norm is
// preserved.
struct RescaledProfile {
    FrequencyProfile g;
    ParabolicMap map;
};
RescaledProfile parabolic_rescale(const FrequencyProfile& f, std::vector<double> omega0, double K);

// Weighted-norm growth experiment: fits log(norm) against log(R) over a
// geometric R list and compares with the theorem exponent
//   p = 3, d = 3: gamma_3^0(alpha)   (weighted cube-root estimate)
//   p = 2:        1/2 - (d-alpha)/(2(d+1))   (refined L2 estimate, m = d)
struct ScalingResult {
    std::vector<double> R;
    std::vector<double> norm;
    double slope = 0.0;
    double intercept = 0.0;
    double exponent = 0.0;
    double tolerance = 0.15;
    bool pass = false;
};

ScalingResult scaling_experiment(const std::function<FrequencyProfile(double)>& f_for_R,
                                 const std::function<SampledWeight(double)>& H_for_R, double p,
                                 const Rational& alpha, const std::vector<double>& R_list,
                                 double x_spacing = 0.5, double tolerance = 0.15);

}  // namespace restlab
