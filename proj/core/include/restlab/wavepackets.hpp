#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "restlab/extension.hpp"
#include "restlab/polynomial.hpp"
#include "restlab/weights.hpp"

namespace restlab {

// Frequency cap (theta) and spatial cell (nu) indexing one packet of the
// scale-R decomposition.  nu lives on the lattice L*Z^{d-1}, L = R^{(1+delta)/2}.
struct Tile {
    std::vector<int> theta;     // cap index per frequency axis
    std::vector<double> omega;  // cap center
    std::vector<int> nu_index;  // lattice index per axis
    std::vector<double> nu;     // physical translation, L * nu_index
    double R = 0.0;
    double delta = 0.05;
};

// One decomposed piece.  Coefficients are stored on the slice of the
// frequency grid where the cap window is nonzero (lo/extent per axis).
struct WavePacket {
    Tile tile;
    double mass = 0.0;  // quadrature L2 norm of the piece
    std::vector<int> lo;
    std::vector<int> extent;
    std::vector<std::complex<double>> coef;  // axis 0 slowest
};

struct Decomposition {
    int d = 2;
    int m = 0;
    double h = 0.0;
    double R = 0.0;
    double delta = 0.05;
    int caps_per_axis = 0;
    double cap_width = 0.0;      // frequency cell width 2 R^{-1/2}; window
                                 // support is one cell on each side (overlap 2)
    double L = 0.0;              // nu lattice spacing
    double window_radius = 0.0;  // spatial window support radius, 0.65 L
    double input_l2 = 0.0;
    std::size_t dropped_count = 0;
    double dropped_mass = 0.0;  // sum of dropped piece norms
    std::vector<WavePacket> packets;  // lexicographic in (theta, nu_index)
};

// Splits f into cap x cell packets.  Cap windows chi are smooth plateau bumps
// with overlap factor 2 per axis normalized to sum to one; cell windows eta
// partition the conjugate (position) grid on the lattice L*Z.  A piece is the
// eta-filtered part of chi*f restricted to the cap support, so the packets
// sum back to f exactly up to the dropped tail (pieces below 1e-12 * |f|_2
// are dropped and counted).
Decomposition decompose(const FrequencyProfile& f, double R, double delta = 0.05);

// Sum of the selected packets as a full-grid profile (all packets if
// `which` is empty and take_all).
FrequencyProfile assemble(const Decomposition& dec, const std::vector<std::size_t>& which);
FrequencyProfile assemble_all(const Decomposition& dec);

// Unit tube direction (-2 omega, 1)/|(-2 omega, 1)|.
std::vector<double> tile_direction(const std::vector<double>& omega);

// Spatial tube of radius R^{1/2+delta} and length R carrying the packet.
struct Tube {
    Tile tile;
    double radius = 0.0;
};
Tube tube_of(const Tile& tile);

// x in B_R and |x' + 2 x_d omega - nu| <= radius.
bool tube_membership(const std::vector<double>& x, const Tube& tube);

// Number of nu lattice indices per axis whose tubes can meet B_R
// (|nu| <= R).
int shadow_count(const Decomposition& dec);

// Common zero set of rational polynomials in x1..xd.
struct Variety {
    int d = 0;
    std::vector<Polynomial> polys;

    int codim() const { return static_cast<int>(polys.size()); }
    int surface_dim() const { return d - codim(); }
    int degree_bound() const;
    void validate() const;
};

Variety make_variety(int d, const std::vector<std::string>& specs);

// Samples zeros by Gauss-Newton descent from a seed lattice on [-r, r]^d and
// checks that the gradient wedge is nonzero at each found zero.  Singular
// zeros are counted and fail the witness; descent failures are counted and
// do not.
struct WitnessReport {
    std::size_t zeros_checked = 0;
    std::size_t singular = 0;
    std::size_t descent_failures = 0;
    bool pass = false;
};
WitnessReport variety_witness(const Variety& Z, double box_radius, int seeds_per_axis = 5);

enum class Tangency { Tangent, NotTangent, Inconclusive };

// Sampled tangency check: core-line samples must descend to zeros within
// E R^{1/2}; gradient tangent spaces at nonsingular zeros near the tube must
// make angle <= E R^{-1/2} with the tube direction.  Violations are definite;
// descent failures alone give Inconclusive, never NotTangent.
struct TangencyReport {
    Tangency verdict = Tangency::Inconclusive;
    double max_core_distance = 0.0;
    double distance_bound = 0.0;
    double max_angle = 0.0;
    double angle_bound = 0.0;
    std::size_t core_samples = 0;
    std::size_t zero_samples = 0;
    std::size_t singular_skipped = 0;
    std::size_t descent_failures = 0;
};
TangencyReport tangency_test(const Tube& tube, const Variety& Z, double E);

// Partitions packet mass by tangency verdict; mass_* sum L2 norms and
// mass2_* sum their squares (the latter compare against |f|^2 through the
// near-orthogonality of the pieces).
struct ConcentrationReport {
    double mass_tangent = 0.0;
    double mass_transverse = 0.0;
    double mass_inconclusive = 0.0;
    double mass2_tangent = 0.0;
    double mass2_transverse = 0.0;
    double mass2_inconclusive = 0.0;
    std::size_t tiles_tangent = 0;
    std::size_t tiles_transverse = 0;
    std::size_t tiles_inconclusive = 0;
};
ConcentrationReport concentration_test(const Decomposition& dec, const Variety& Z, double E);

// Broad-norm parameters.  Directions are drawn from a deterministic net of
// spacing <= 1/(10K) on the upper hemisphere; the net minimum upper-bounds
// the true minimum over all 1-subspaces.  exhaustive = true enumerates all
// A-tuples instead of the prefix-cover search (test oracle; small nets only).
struct BroadParams {
    int K = 4;
    int A = 1;
    double p = 3.0;
    double net_spacing = 0.0;  // 0 -> 1/(10K)
    bool exhaustive = false;
};

struct BroadResult {
    double value = 0.0;
    std::size_t balls = 0;
    std::size_t net_size = 0;
    int caps = 0;
};

// min over A-tuples of net directions of the max over uncaptured 1/K-caps of
// the weighted p-mass, per K^2-cell of B_R (cells clipped at the boundary),
// summed and rooted.  A cap is captured by V when some sampled packet
// direction of the cap makes angle <= 1/K with V.
BroadResult broad_norm(const FrequencyProfile& f, double R, const BroadParams& params,
                       const SampledWeight& H, double spacing = 1.0);

}  // namespace restlab
