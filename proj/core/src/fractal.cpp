#include "restlab/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "restlab/errors.hpp"
#include "restlab/quadrature.hpp"

namespace restlab {

namespace {

constexpr std::size_t kMaxAtoms = 1u << 20;
constexpr std::size_t kMaxEnergyAtoms = 20000;

double sq(double x) { return x * x; }

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
    return s;
}

// Atom positions of a 1-d recipe, uncentered (inside [0,1]).
AxisFactor axis_atoms(const AxisRecipe& r) {
    if (r.branches < 1) throw precondition_error("cantor recipe: branches must be >= 1");
    if (r.depth < 0) throw precondition_error("cantor recipe: negative depth");
    if (r.branches == 1 || r.depth == 0) return {{0.5}, {1.0}};
    if (!(r.ratio > 0.0)) throw precondition_error("cantor recipe: ratio must be positive");
    if (r.branches * r.ratio > 1.0 + 1e-12)
        throw precondition_error("cantor recipe: children overlap (branches * ratio > 1)");

    // Left endpoints after each generation; child j sits at offset
    // j*(1-ratio)/(branches-1) within its parent.
    std::vector<double> lefts{0.0};
    double width = 1.0;
    const double gap = (1.0 - r.ratio) / (r.branches - 1);
    for (int lvl = 0; lvl < r.depth; ++lvl) {
        std::vector<double> next;
        next.reserve(lefts.size() * static_cast<std::size_t>(r.branches));
        for (double L : lefts)
            for (int j = 0; j < r.branches; ++j) next.push_back(L + j * gap * width);
        lefts = std::move(next);
        width *= r.ratio;
        if (lefts.size() > kMaxAtoms) throw precondition_error("cantor recipe: too many atoms");
    }
    AxisFactor f;
    f.atoms.reserve(lefts.size());
    const double m = 1.0 / static_cast<double>(lefts.size());
    for (double L : lefts) {
        f.atoms.push_back(L + width / 2.0);
        f.masses.push_back(m);
    }
    return f;
}

}  // namespace

double FractalMeasure::diameter() const {
    if (atoms.empty()) return 0.0;
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double lo = atoms[0][static_cast<std::size_t>(i)], hi = lo;
        for (const auto& a : atoms) {
            lo = std::min(lo, a[static_cast<std::size_t>(i)]);
            hi = std::max(hi, a[static_cast<std::size_t>(i)]);
        }
        s += sq(hi - lo);
    }
    return std::sqrt(s);
}

void FractalMeasure::validate() const {
    if (d < 1 || d > 3) throw precondition_error("measure: dimension must be 1, 2, or 3");
    if (atoms.empty() || atoms.size() != masses.size())
        throw precondition_error("measure: atom/mass size mismatch");
    double total = 0.0;
    for (double m : masses) {
        if (!(m > 0.0)) throw precondition_error("measure: masses must be positive");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) throw precondition_error("measure: masses must sum to 1");
    for (const auto& a : atoms)
        if (static_cast<int>(a.size()) != d) throw precondition_error("measure: atom dimension mismatch");
    if (!factors.empty()) {
        if (static_cast<int>(factors.size()) != d)
            throw precondition_error("measure: product factor count mismatch");
        std::size_t n = 1;
        for (const auto& f : factors) n *= f.atoms.size();
        if (n != atoms.size()) throw precondition_error("measure: product factor size mismatch");
    }
}

FractalMeasure product_cantor_measure(const std::vector<AxisRecipe>& axes, bool centered) {
    if (axes.empty() || axes.size() > 3)
        throw precondition_error("product measure: need 1 to 3 axes");
    FractalMeasure mu;
    mu.d = static_cast<int>(axes.size());
    mu.atom_scale = 1.0;
    std::size_t count = 1;
    bool any_scale = false;
    for (const auto& r : axes) {
        AxisFactor f = axis_atoms(r);
        if (centered)
            for (double& a : f.atoms) a -= 0.5;
        if (r.branches > 1 && r.depth > 0) {
            mu.claimed_alpha += std::log(static_cast<double>(r.branches)) / std::log(1.0 / r.ratio);
            mu.atom_scale = std::min(mu.atom_scale, std::pow(r.ratio, r.depth));
            any_scale = true;
        }
        count *= f.atoms.size();
        if (count > kMaxAtoms) throw precondition_error("product measure: too many atoms");
        mu.factors.push_back(std::move(f));
    }
    if (!any_scale) mu.atom_scale = 0.0;

    mu.atoms.reserve(count);
    mu.masses.reserve(count);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t flat = 0; flat < count; ++flat) {
        std::vector<double> pt(axes.size());
        double m = 1.0;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            pt[i] = mu.factors[i].atoms[idx[i]];
            m *= mu.factors[i].masses[idx[i]];
        }
        mu.atoms.push_back(std::move(pt));
        mu.masses.push_back(m);
        for (std::size_t i = axes.size(); i-- > 0;) {
            if (++idx[i] < mu.factors[i].atoms.size()) break;
            idx[i] = 0;
        }
    }
    mu.validate();
    return mu;
}

FractalMeasure cantor_measure(int d, int branches, double ratio, int depth, bool centered) {
    if (d < 1 || d > 3) throw precondition_error("cantor_measure: dimension must be 1, 2, or 3");
    return product_cantor_measure(std::vector<AxisRecipe>(static_cast<std::size_t>(d),
                                                          AxisRecipe{branches, ratio, depth}),
                                  centered);
}

FractalMeasure point_mass(int d, std::vector<double> where) {
    if (d < 1 || d > 3) throw precondition_error("point_mass: dimension must be 1, 2, or 3");
    if (where.empty()) where.assign(static_cast<std::size_t>(d), 0.0);
    if (static_cast<int>(where.size()) != d) throw precondition_error("point_mass: bad position");
    FractalMeasure mu;
    mu.d = d;
    mu.atoms = {where};
    mu.masses = {1.0};
    mu.claimed_alpha = 0.0;
    mu.atom_scale = 0.0;  // a single atom has no internal resolution limit
    mu.validate();
    return mu;
}

FrostmanCertificate frostman_check(const FractalMeasure& mu, double alpha, double constant,
                                   std::vector<double> radii,
                                   std::vector<std::vector<double>> centers) {
    mu.validate();
    if (!(alpha >= 0.0)) throw precondition_error("frostman_check: negative alpha");
    if (!(constant > 0.0)) throw precondition_error("frostman_check: constant must be positive");

    const double diam = std::max(mu.diameter(), mu.atom_scale);
    if (radii.empty()) {
        const double floor_r = std::max({mu.atom_scale, diam / 4096.0, 1e-12});
        for (double r = std::max(diam, 1e-12); r >= 0.999 * floor_r; r /= 2.0)
            radii.push_back(r);
        if (radii.empty()) radii.push_back(std::max(diam, 1e-12));
    }
    for (double r : radii)
        if (!(r > 0.0)) throw precondition_error("frostman_check: radii must be positive");

    if (centers.empty()) {
        const std::size_t stride = std::max<std::size_t>(1, mu.size() / 512);
        for (std::size_t j = 0; j < mu.size(); j += stride) centers.push_back(mu.atoms[j]);
        // Coarse lattice over the bounding box catches off-atom concentration.
        std::vector<double> lo(static_cast<std::size_t>(mu.d)), hi(static_cast<std::size_t>(mu.d));
        for (int i = 0; i < mu.d; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            lo[ii] = hi[ii] = mu.atoms[0][ii];
            for (const auto& a : mu.atoms) {
                lo[ii] = std::min(lo[ii], a[ii]);
                hi[ii] = std::max(hi[ii], a[ii]);
            }
        }
        const int g = 4;
        std::size_t lattice = 1;
        for (int i = 0; i < mu.d; ++i) lattice *= g + 1;
        for (std::size_t flat = 0; flat < lattice; ++flat) {
            std::vector<double> pt(static_cast<std::size_t>(mu.d));
            std::size_t rem = flat;
            for (int i = 0; i < mu.d; ++i) {
                const std::size_t ii = static_cast<std::size_t>(i);
                pt[ii] = lo[ii] + (hi[ii] - lo[ii]) * static_cast<double>(rem % (g + 1)) / g;
                rem /= g + 1;
            }
            centers.push_back(std::move(pt));
        }
    }
    for (const auto& c : centers)
        if (static_cast<int>(c.size()) != mu.d)
            throw precondition_error("frostman_check: center dimension mismatch");

    FrostmanCertificate cert;
    cert.alpha = alpha;
    cert.constant = constant;
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end());
    std::vector<double> cutoff(rs.size()), bucket(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) cutoff[i] = rs[i] * rs[i] * (1.0 + 1e-12);
    // One pass over the atoms per center: each atom lands in the bucket of
    // the smallest radius whose ball contains it, prefix sums give the mass
    // of every ball at once.
    for (const auto& c : centers) {
        std::fill(bucket.begin(), bucket.end(), 0.0);
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double d2 = dist2(mu.atoms[j], c);
            const auto it = std::lower_bound(cutoff.begin(), cutoff.end(), d2);
            if (it != cutoff.end()) bucket[static_cast<std::size_t>(it - cutoff.begin())] += mu.masses[j];
        }
        double mass = 0.0;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            mass += bucket[i];
            const double ratio = mass / std::pow(rs[i], alpha);
            ++cert.evaluations;
            if (ratio > cert.worst_ratio) {
                cert.worst_ratio = ratio;
                cert.worst_radius = rs[i];
                cert.worst_center = c;
            }
        }
    }
    cert.pass = cert.worst_ratio <= constant;
    return cert;
}

std::complex<double> fourier(const FractalMeasure& mu, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != mu.d)
        throw precondition_error("fourier: frequency dimension mismatch");
    if (!mu.factors.empty()) {
        std::complex<double> prod(1.0, 0.0);
        for (std::size_t i = 0; i < mu.factors.size(); ++i) {
            const AxisFactor& f = mu.factors[i];
            std::complex<double> s(0.0, 0.0);
            for (std::size_t j = 0; j < f.atoms.size(); ++j) {
                const double ph = -f.atoms[j] * xi[i];
                s += f.masses[j] * std::complex<double>(std::cos(ph), std::sin(ph));
            }
            prod *= s;
        }
        return prod;
    }
    std::complex<double> s(0.0, 0.0);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double ph = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) ph -= mu.atoms[j][i] * xi[i];
        s += mu.masses[j] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return s;
}

double spherical_average(const FractalMeasure& mu, double R, int nodes) {
    mu.validate();
    if (!(R >= 0.0)) throw precondition_error("spherical_average: negative radius");
    if (nodes <= 0) nodes = spherical_node_count(R, mu.diameter());
    const auto net = sphere_nodes(mu.d, nodes);
    double acc = 0.0;
    std::vector<double> xi(static_cast<std::size_t>(mu.d));
    for (const auto& nd : net) {
        for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = R * nd.x[i];
        acc += nd.w * std::norm(fourier(mu, xi));
    }
    return acc;
}

DecayFit decay_fit(const FractalMeasure& mu, double R_min, double R_max, int count, int nodes) {
    mu.validate();
    if (count < 4) throw precondition_error("decay_fit: need at least 4 radii");
    if (!(R_min >= 1.0)) throw precondition_error("decay_fit: radii must be >= 1");
    if (!(R_max > R_min)) throw precondition_error("decay_fit: R_max must exceed R_min");
    if (mu.atom_scale > 0.0 && R_max > 0.5 / mu.atom_scale)
        throw precondition_error("decay_fit: radii exceed the resolution of the measure");

    DecayFit fit;
    fit.R.reserve(static_cast<std::size_t>(count));
    const double q = std::log(R_max / R_min) / (count - 1);
    for (int k = 0; k < count; ++k) fit.R.push_back(R_min * std::exp(q * k));
    fit.average.reserve(fit.R.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double r : fit.R) {
        const double a = spherical_average(mu, r, nodes);
        fit.average.push_back(a);
        const double x = std::log(r), y = std::log(std::max(a, 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = static_cast<double>(fit.R.size());
    const double det = n * sxx - sx * sx;
    if (!(det > 0.0)) throw precondition_error("decay_fit: radii must not be all equal");
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < fit.R.size(); ++i)
        ss += sq(std::log(std::max(fit.average[i], 1e-300)) - fit.intercept -
                 fit.slope * std::log(fit.R[i]));
    fit.residual = std::sqrt(ss / n);
    fit.fitted_beta = -fit.slope;
    return fit;
}

double energy(const FractalMeasure& mu, double alpha) {
    mu.validate();
    if (!(alpha > 0.0)) throw precondition_error("energy: alpha must be positive");
    if (mu.size() > kMaxEnergyAtoms)
        throw precondition_error("energy: too many atoms for the pairwise sum");
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
            const double d2 = dist2(mu.atoms[i], mu.atoms[j]);
            if (d2 > 0.0) acc += 2.0 * mu.masses[i] * mu.masses[j] * std::pow(d2, -alpha / 2.0);
        }
    return acc;
}

double mattila_integral(const FractalMeasure& mu, double R_max, int steps, int sphere_nodes) {
    mu.validate();
    if (!(R_max > 1.0)) throw precondition_error("mattila_integral: R_max must exceed 1");
    if (steps <= 0) steps = std::max(64, static_cast<int>(std::ceil(16.0 * (R_max - 1.0))));
    const double h = (R_max - 1.0) / steps;
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double R = 1.0 + h * k;
        const double a = spherical_average(mu, R, sphere_nodes);
        const double v = a * a * std::pow(R, mu.d - 1);
        acc += (k == 0 || k == steps) ? v / 2.0 : v;
    }
    return acc * h;
}

}  // namespace restlab
