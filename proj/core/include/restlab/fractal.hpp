#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "restlab/rational.hpp"

namespace restlab {

// One axis of a product construction: atoms and masses on the line.
struct AxisFactor {
    std::vector<double> atoms;
    std::vector<double> masses;
};

// Finitely supported probability measure intended to mimic an
// alpha-dimensional set at scales above `atom_scale`.
//
// When `factors` is nonempty the measure is the product of the given 1-d
// factors (atoms/masses fields still hold the expanded product) and Fourier
// evaluation uses the per-axis factorization, which turns an O(#atoms) sum
// into a sum over per-axis atom counts.
struct FractalMeasure {
    int d = 0;
    std::vector<std::vector<double>> atoms;
    std::vector<double> masses;
    double claimed_alpha = 0.0;
    double atom_scale = 0.0;  // resolution below which the measure is discrete
    std::vector<AxisFactor> factors;

    std::size_t size() const { return atoms.size(); }
    // Max coordinate-wise extent of the support (diagonal of bounding box).
    double diameter() const;
    void validate() const;
};

// One axis of a self-similar recipe: `branches` children scaled by `ratio`
// at each of `depth` generations, equally spaced in [0,1] with the first
// child flush left and the last flush right.  branches == 1 places a single
// point (axis contributes zero to the dimension).
struct AxisRecipe {
    int branches = 2;
    double ratio = 1.0 / 3.0;
    int depth = 0;
};

// Product of per-axis Cantor constructions on [0,1]^d (or centered on
// [-1/2,1/2]^d).  claimed_alpha = sum_i log(b_i) / log(1/ratio_i).
// Children must not overlap: branches * ratio <= 1.
FractalMeasure product_cantor_measure(const std::vector<AxisRecipe>& axes, bool centered = true);

// Same recipe on every axis.
FractalMeasure cantor_measure(int d, int branches, double ratio, int depth, bool centered = true);

// Unit mass at a single point (defaults to the origin).
FractalMeasure point_mass(int d, std::vector<double> where = {});

// Ball-count certificate: worst of mass(B(x,r)) / r^alpha over the probed
// centers and radii, compared against the claimed constant.
struct FrostmanCertificate {
    double alpha = 0.0;
    double constant = 0.0;
    double worst_ratio = 0.0;
    double worst_radius = 0.0;
    std::vector<double> worst_center;
    int evaluations = 0;
    bool pass = false;
};

// Probes mass/r^alpha at the given centers and radii (closed balls).  If
// either list is empty a default is used: radii run from the diameter down
// to atom_scale in halving steps, centers are the atoms (subsampled to at
// most 512) plus a coarse lattice over the bounding box.
FrostmanCertificate frostman_check(const FractalMeasure& mu, double alpha, double constant,
                                   std::vector<double> radii = {},
                                   std::vector<std::vector<double>> centers = {});

// hat{mu}(xi) = sum_j m_j exp(-i x_j . xi).
std::complex<double> fourier(const FractalMeasure& mu, const std::vector<double>& xi);

// Unnormalized spherical average  integral_{S^{d-1}} |hat{mu}(R sigma)|^2 dsigma.
// Node count defaults to spherical_node_count(R, diameter).
double spherical_average(const FractalMeasure& mu, double R, int nodes = 0);

struct DecayFit {
    std::vector<double> R;
    std::vector<double> average;
    double slope = 0.0;       // of log(average) against log(R)
    double intercept = 0.0;
    double residual = 0.0;    // rms residual of the fit
    double fitted_beta = 0.0; // -slope
};

// Least-squares decay exponent of the spherical averages over a geometric
// grid of `count` radii in [R_min, R_max].  Requires count >= 4, R_min >= 1,
// and R_max <= 0.5/atom_scale (beyond that the discreteness of the measure
// takes over and the averages stop decaying).  A dense non-dyadic grid
// matters: self-similar measures resonate at powers of 1/ratio and a sparse
// dyadic grid aliases the oscillation of the averages.
DecayFit decay_fit(const FractalMeasure& mu, double R_min, double R_max, int count,
                   int nodes = 0);

// alpha-energy  sum_{i != j} m_i m_j |x_i - x_j|^{-alpha}.
double energy(const FractalMeasure& mu, double alpha);

// integral_1^{R_max} (spherical average at R)^2 R^{d-1} dR by the composite
// trapezoid rule on a uniform grid of `steps` intervals.
double mattila_integral(const FractalMeasure& mu, double R_max, int steps = 0, int sphere_nodes = 0);

}  // namespace restlab
