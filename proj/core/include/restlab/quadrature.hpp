#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "restlab/errors.hpp"

namespace restlab {

// Node on a unit sphere with its surface-measure weight.  Weights sum to the
// unnormalized surface area: 2 (d=1), 2*pi (d=2), 4*pi (d=3).
struct SphereNode {
    std::vector<double> x;
    double w;
};

// S^0 = {-1, +1}, counting measure.
inline std::vector<SphereNode> sphere_nodes_1d() {
    return {{{-1.0}, 1.0}, {{1.0}, 1.0}};
}

// Periodic trapezoid rule on the unit circle; exact for trigonometric
// polynomials of degree < n.
inline std::vector<SphereNode> circle_nodes(int n) {
    if (n < 4) throw precondition_error("circle_nodes: need at least 4 nodes");
    std::vector<SphereNode> out(static_cast<std::size_t>(n));
    const double step = 2.0 * M_PI / n;
    for (int k = 0; k < n; ++k) {
        const double t = step * k;
        out[static_cast<std::size_t>(k)] = {{std::cos(t), std::sin(t)}, step};
    }
    return out;
}

// Fibonacci (golden-angle) points on S^2, equal weights 4*pi/n.  Not exact
// for polynomials but the worst-case equidistribution error decays like
// n^{-1/2} or better for smooth integrands, which is enough for averages
// that are themselves fitted on log scales.
inline std::vector<SphereNode> fibonacci_sphere_nodes(int n) {
    if (n < 16) throw precondition_error("fibonacci_sphere_nodes: need at least 16 nodes");
    std::vector<SphereNode> out(static_cast<std::size_t>(n));
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const double w = 4.0 * M_PI / n;
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        out[static_cast<std::size_t>(k)] = {{r * std::cos(phi), r * std::sin(phi), z}, w};
    }
    return out;
}

// Node-count rule for averages over spheres of radius R around a set of
// diameter `diam`: the integrand e^{i R sigma . (x-y)} has angular frequency
// at most R*diam, so we keep at least 8 nodes per unit of it.
inline int spherical_node_count(double R, double diam, int min_nodes = 64) {
    if (R < 0 || diam < 0) throw precondition_error("spherical_node_count: negative scale");
    const double need = 8.0 * R * diam;
    if (need > 1e8) throw precondition_error("spherical_node_count: scale too large");
    return std::max(min_nodes, static_cast<int>(std::ceil(need)));
}

inline std::vector<SphereNode> sphere_nodes(int d, int n) {
    switch (d) {
        case 1: return sphere_nodes_1d();
        case 2: return circle_nodes(n);
        case 3: return fibonacci_sphere_nodes(n);
        default: throw precondition_error("sphere_nodes: dimension must be 1, 2, or 3");
    }
}

}  // namespace restlab
