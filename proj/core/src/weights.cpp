#include "restlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "restlab/errors.hpp"
#include "restlab/quadrature.hpp"

namespace restlab {

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 25;

double sq(double x) { return x * x; }

// integral_0^1 (1-t^2)^3 t^{d-1} dt
double radial_moment(int d) {
    return 1.0 / d - 3.0 / (d + 2) + 3.0 / (d + 4) - 1.0 / (d + 6);
}

double sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw precondition_error("weights: dimension must be 1, 2, or 3");
    }
}

}  // namespace

std::size_t GridBox::cells() const {
    std::size_t c = 1;
    for (std::size_t k : n) c *= k;
    return c;
}

std::vector<double> GridBox::center(std::size_t flat) const {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = d; i-- > 0;) {
        const std::size_t ni = n[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(i)] =
            lo[static_cast<std::size_t>(i)] + (static_cast<double>(flat % ni) + 0.5) * h;
        flat /= ni;
    }
    return x;
}

std::size_t GridBox::locate(const std::vector<double>& x) const {
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double t = (x[ii] - lo[ii]) / h;
        if (t < 0.0 || t >= static_cast<double>(n[ii])) return cells();
        flat = flat * n[ii] + static_cast<std::size_t>(t);
    }
    return flat;
}

void GridBox::validate() const {
    if (d < 1 || d > 3) throw precondition_error("grid: dimension must be 1, 2, or 3");
    if (!(h > 0.0)) throw precondition_error("grid: spacing must be positive");
    if (lo.size() != static_cast<std::size_t>(d) || hi.size() != static_cast<std::size_t>(d) ||
        n.size() != static_cast<std::size_t>(d))
        throw precondition_error("grid: corner size mismatch");
    for (int i = 0; i < d; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        if (!(hi[ii] > lo[ii]) || n[ii] == 0) throw precondition_error("grid: empty box");
        if (std::abs(lo[ii] + static_cast<double>(n[ii]) * h - hi[ii]) > 1e-6 * h)
            throw precondition_error("grid: box is not a whole number of cells");
    }
    if (cells() > kMaxCells) throw precondition_error("grid: too many cells");
}

GridBox make_grid(int d, std::vector<double> lo, std::vector<double> hi, double h) {
    GridBox g;
    g.d = d;
    g.lo = std::move(lo);
    g.hi = std::move(hi);
    g.h = h;
    if (g.lo.size() != static_cast<std::size_t>(d) || g.hi.size() != static_cast<std::size_t>(d))
        throw precondition_error("make_grid: corner size mismatch");
    if (!(h > 0.0)) throw precondition_error("make_grid: spacing must be positive");
    g.n.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double span = g.hi[ii] - g.lo[ii];
        if (!(span > 0.0)) throw precondition_error("make_grid: empty box");
        const auto k = static_cast<std::size_t>(std::llround(span / h));
        g.n[ii] = std::max<std::size_t>(1, k);
        g.hi[ii] = g.lo[ii] + static_cast<double>(g.n[ii]) * h;  // snap to whole cells
    }
    g.validate();
    return g;
}

SampledWeight::SampledWeight(GridBox grid, std::vector<double> values, double alpha)
    : grid_(std::move(grid)), values_(std::move(values)), alpha_(alpha) {
    grid_.validate();
    if (values_.size() != grid_.cells())
        throw precondition_error("weight: value count does not match the grid");
    for (double v : values_)
        if (!(v >= 0.0)) throw precondition_error("weight: negative value");
    if (!(alpha_ >= 0.0)) throw precondition_error("weight: negative alpha");
}

SampledWeight SampledWeight::uniform(int d, double half_extent, double h, double value) {
    if (!(half_extent > 0.0)) throw precondition_error("uniform weight: empty box");
    GridBox g = make_grid(d, std::vector<double>(static_cast<std::size_t>(d), -half_extent),
                          std::vector<double>(static_cast<std::size_t>(d), half_extent), h);
    return SampledWeight(g, std::vector<double>(g.cells(), value), static_cast<double>(d));
}

double SampledWeight::cell_volume() const { return std::pow(grid_.h, grid_.d); }

double SampledWeight::at(const std::vector<double>& x) const {
    const std::size_t idx = grid_.locate(x);
    return idx == grid_.cells() ? 0.0 : values_[idx];
}

double SampledWeight::ball_mass(const std::vector<double>& center, double r) const {
    if (center.size() != static_cast<std::size_t>(grid_.d))
        throw precondition_error("ball_mass: center dimension mismatch");
    if (!(r > 0.0)) throw precondition_error("ball_mass: radius must be positive");
    // Per-axis window of cells whose centers can lie in the ball.
    std::vector<std::size_t> first(static_cast<std::size_t>(grid_.d)),
        last(static_cast<std::size_t>(grid_.d));
    for (int i = 0; i < grid_.d; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double a = (center[ii] - r - grid_.lo[ii]) / grid_.h - 0.5;
        const double b = (center[ii] + r - grid_.lo[ii]) / grid_.h - 0.5;
        if (b < 0.0 || a > static_cast<double>(grid_.n[ii] - 1)) return 0.0;
        first[ii] = static_cast<std::size_t>(std::max(0.0, std::ceil(a)));
        last[ii] = static_cast<std::size_t>(
            std::min(static_cast<double>(grid_.n[ii] - 1), std::floor(b)));
        if (first[ii] > last[ii]) return 0.0;
    }
    const double r2 = r * r * (1.0 + 1e-12);
    double acc = 0.0;
    std::vector<std::size_t> idx = first;
    for (;;) {
        double d2 = 0.0;
        std::size_t flat = 0;
        for (int i = 0; i < grid_.d; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            const double c = grid_.lo[ii] + (static_cast<double>(idx[ii]) + 0.5) * grid_.h;
            d2 += sq(c - center[ii]);
            flat = flat * grid_.n[ii] + idx[ii];
        }
        if (d2 <= r2) acc += values_[flat];
        int i = grid_.d;
        while (i-- > 0) {
            const std::size_t ii = static_cast<std::size_t>(i);
            if (++idx[ii] <= last[ii]) break;
            idx[ii] = first[ii];
        }
        if (i < 0) break;
    }
    return acc * cell_volume();
}

double SampledWeight::total_mass() const {
    double acc = 0.0;
    for (double v : values_) acc += v;
    return acc * cell_volume();
}

FrostmanCertificate verify_weight(const SampledWeight& H, double alpha, double constant,
                                  std::vector<double> radii,
                                  std::vector<std::vector<double>> centers) {
    if (!(alpha >= 0.0)) throw precondition_error("verify_weight: negative alpha");
    if (!(constant > 0.0)) throw precondition_error("verify_weight: constant must be positive");
    if (radii.empty()) radii = {1.0, 2.0, 4.0, 8.0, 16.0};
    double r_min = radii[0], r_max = radii[0];
    for (double r : radii) {
        if (!(r >= 1.0)) throw precondition_error("verify_weight: radii must be >= 1");
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
    }
    const GridBox& g = H.grid();
    if (g.h > r_min / 8.0)
        throw precondition_error("verify_weight: grid too coarse for the smallest radius");

    if (centers.empty()) {
        const int per_axis = 5;
        std::size_t lattice = 1;
        for (int i = 0; i < g.d; ++i) lattice *= per_axis;
        for (std::size_t flat = 0; flat < lattice; ++flat) {
            std::vector<double> pt(static_cast<std::size_t>(g.d));
            std::size_t rem = flat;
            for (int i = 0; i < g.d; ++i) {
                const std::size_t ii = static_cast<std::size_t>(i);
                pt[ii] = g.lo[ii] + (g.hi[ii] - g.lo[ii]) *
                                        (static_cast<double>(rem % per_axis) + 0.5) / per_axis;
                rem /= per_axis;
            }
            centers.push_back(std::move(pt));
        }
    }
    for (const auto& c : centers) {
        if (c.size() != static_cast<std::size_t>(g.d))
            throw precondition_error("verify_weight: center dimension mismatch");
        for (int i = 0; i < g.d; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            if (c[ii] < g.lo[ii] - 2.0 * r_max || c[ii] > g.hi[ii] + 2.0 * r_max)
                throw precondition_error("verify_weight: center far outside the box");
        }
    }

    FrostmanCertificate cert;
    cert.alpha = alpha;
    cert.constant = constant;
    for (const auto& c : centers) {
        for (double r : radii) {
            const double ratio = H.ball_mass(c, r) / std::pow(r, alpha);
            ++cert.evaluations;
            if (ratio > cert.worst_ratio) {
                cert.worst_ratio = ratio;
                cert.worst_radius = r;
                cert.worst_center = c;
            }
        }
    }
    cert.pass = cert.worst_ratio <= constant;
    return cert;
}

double bump_normalizer(int d, const BumpSpec& bump) {
    if (!(bump.radius > 0.0)) throw precondition_error("bump: radius must be positive");
    return 1.0 / (sphere_area(d) * radial_moment(d) * std::pow(bump.radius, d));
}

double bump_value(int d, const BumpSpec& bump, const std::vector<double>& u) {
    double t2 = 0.0;
    for (double c : u) t2 += c * c;
    t2 /= sq(bump.radius);
    if (t2 >= 1.0) return 0.0;
    const double s = 1.0 - t2;
    return bump_normalizer(d, bump) * s * s * s;
}

SampledWeight weight_from_measure(const FractalMeasure& mu, double R, const BumpSpec& bump,
                                  double h) {
    mu.validate();
    if (!(R >= 1.0)) throw precondition_error("weight_from_measure: R must be >= 1");
    if (!(h > 0.0) || h > bump.radius / 2.0)
        throw precondition_error("weight_from_measure: spacing must resolve the bump");

    std::vector<double> lo(static_cast<std::size_t>(mu.d)), hi(static_cast<std::size_t>(mu.d));
    for (int i = 0; i < mu.d; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        double a = mu.atoms[0][ii], b = a;
        for (const auto& at : mu.atoms) {
            a = std::min(a, at[ii]);
            b = std::max(b, at[ii]);
        }
        lo[ii] = std::floor((R * a - bump.radius) / h - 1.0) * h;
        hi[ii] = std::ceil((R * b + bump.radius) / h + 1.0) * h;
    }
    GridBox g = make_grid(mu.d, lo, hi, h);
    std::vector<double> vals(g.cells(), 0.0);

    const double amp = std::pow(R, mu.claimed_alpha);
    const double norm = bump_normalizer(mu.d, bump);
    const double rad2 = sq(bump.radius);
    // Scatter each atom's bump over the cells within its radius.
    std::vector<std::size_t> first(static_cast<std::size_t>(mu.d)),
        last(static_cast<std::size_t>(mu.d));
    for (std::size_t j = 0; j < mu.size(); ++j) {
        bool empty = false;
        for (int i = 0; i < mu.d; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            const double c = R * mu.atoms[j][ii];
            const double a = (c - bump.radius - g.lo[ii]) / h - 0.5;
            const double b = (c + bump.radius - g.lo[ii]) / h - 0.5;
            first[ii] = static_cast<std::size_t>(std::max(0.0, std::ceil(a)));
            last[ii] = static_cast<std::size_t>(
                std::min(static_cast<double>(g.n[ii] - 1), std::floor(b)));
            if (first[ii] > last[ii]) empty = true;
        }
        if (empty) continue;
        std::vector<std::size_t> idx = first;
        for (;;) {
            double d2 = 0.0;
            std::size_t flat = 0;
            for (int i = 0; i < mu.d; ++i) {
                const std::size_t ii = static_cast<std::size_t>(i);
                const double c = g.lo[ii] + (static_cast<double>(idx[ii]) + 0.5) * h;
                d2 += sq(c - R * mu.atoms[j][ii]);
                flat = flat * g.n[ii] + idx[ii];
            }
            if (d2 < rad2) {
                const double s = 1.0 - d2 / rad2;
                vals[flat] += amp * mu.masses[j] * norm * s * s * s;
            }
            int i = mu.d;
            while (i-- > 0) {
                const std::size_t ii = static_cast<std::size_t>(i);
                if (++idx[ii] <= last[ii]) break;
                idx[ii] = first[ii];
            }
            if (i < 0) break;
        }
    }
    return SampledWeight(std::move(g), std::move(vals), mu.claimed_alpha);
}

DominationReport banded_domination_check(const BandedField& F, const SampledWeight& H, double p,
                                         double spacing) {
    if (!F.eval) throw precondition_error("banded check: missing field");
    if (!(F.band_radius > 0.0)) throw precondition_error("banded check: band must be positive");
    if (!(p >= 1.0)) throw precondition_error("banded check: p must be >= 1");
    const GridBox& hb = H.grid();
    if (spacing <= 0.0) spacing = hb.h;
    GridBox g = make_grid(hb.d, hb.lo, hb.hi, spacing);

    const std::size_t N = g.cells();
    std::vector<std::complex<double>> field(N);
    std::vector<double> window(N);
    for (std::size_t k = 0; k < N; ++k) {
        const auto x = g.center(k);
        field[k] = F.eval(x);
        double w = 1.0;
        for (int i = 0; i < g.d; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            const double t = (x[ii] - g.lo[ii]) / (g.hi[ii] - g.lo[ii]) - 0.5;
            w *= 0.5 * (1.0 + std::cos(2.0 * M_PI * t));
        }
        window[k] = w;
    }

    // Windowed DTFT probes: the in-band peak spectrum against probes past
    // the declared band edge.  A genuine band-limited field leaves only
    // window leakage outside, orders of magnitude below the peak.
    std::vector<std::vector<double>> dirs;
    if (g.d == 1) {
        dirs = {{1.0}, {-1.0}};
    } else {
        for (const auto& nd : sphere_nodes(g.d, g.d == 2 ? 16 : 26)) dirs.push_back(nd.x);
    }
    // First out-of-band probe sits half a band past the edge: the Hann
    // window smears the spectrum by ~4*pi/L, so boxes should span at least
    // ~25 wavelengths of the band edge for a clean verdict.
    const std::vector<double> in_scales = {0.0, 0.25, 0.5, 0.75, 0.95};
    const std::vector<double> out_scales = {1.5, 2.0, 2.5, 3.0};
    auto probe = [&](const std::vector<double>& xi) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            const auto x = g.center(k);
            double ph = 0.0;
            for (int i = 0; i < g.d; ++i)
                ph -= x[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
            acc += field[k] * window[k] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        return std::abs(acc);
    };
    double peak_in = 0.0, peak_out = 0.0;
    for (const auto& dir : dirs) {
        std::vector<double> xi(static_cast<std::size_t>(g.d));
        for (double s : in_scales) {
            for (int i = 0; i < g.d; ++i)
                xi[static_cast<std::size_t>(i)] = s * F.band_radius * dir[static_cast<std::size_t>(i)];
            peak_in = std::max(peak_in, probe(xi));
        }
        for (double s : out_scales) {
            for (int i = 0; i < g.d; ++i)
                xi[static_cast<std::size_t>(i)] = s * F.band_radius * dir[static_cast<std::size_t>(i)];
            peak_out = std::max(peak_out, probe(xi));
        }
    }
    DominationReport rep;
    rep.band_leakage = peak_out / std::max(peak_in, 1e-300);
    if (rep.band_leakage > 0.02)
        throw precondition_error("banded check: field violates its declared band limit");

    const double vol = std::pow(spacing, g.d);
    for (std::size_t k = 0; k < N; ++k) {
        const double m = std::pow(std::abs(field[k]), p);
        rep.weighted += m * H.at(g.center(k)) * vol;
        rep.unweighted += m * vol;
    }
    rep.ratio = rep.weighted / std::max(rep.unweighted, 1e-300);
    return rep;
}

SampledWeight parabolic_rescale_weight(const SampledWeight& H, const std::vector<double>& omega0,
                                       double K) {
    const GridBox& g = H.grid();
    if (omega0.size() + 1 != static_cast<std::size_t>(g.d))
        throw precondition_error("rescale weight: cap center must have dimension d-1");
    double w2 = 0.0;
    for (double w : omega0) w2 += w * w;
    if (w2 > 1.0) throw precondition_error("rescale weight: cap center outside the unit ball");
    if (!(K > 1.0)) throw precondition_error("rescale weight: K must exceed 1");

    const std::size_t dd = static_cast<std::size_t>(g.d);
    // Forward map y' = (x' + 2 x_d omega0)/K, y_d = x_d/K^2 applied to the
    // box corners; the image box is their axis-aligned hull.
    std::vector<double> lo(dd, 1e300), hi(dd, -1e300);
    for (std::size_t corner = 0; corner < (std::size_t{1} << dd); ++corner) {
        std::vector<double> x(dd);
        for (std::size_t i = 0; i < dd; ++i)
            x[i] = (corner >> i) & 1 ? g.hi[i] : g.lo[i];
        const double xd = x[dd - 1];
        for (std::size_t i = 0; i + 1 < dd; ++i) {
            const double y = (x[i] + 2.0 * xd * omega0[i]) / K;
            lo[i] = std::min(lo[i], y);
            hi[i] = std::max(hi[i], y);
        }
        lo[dd - 1] = std::min(lo[dd - 1], xd / (K * K));
        hi[dd - 1] = std::max(hi[dd - 1], xd / (K * K));
    }
    const double hs = g.h / (K * K);
    for (std::size_t i = 0; i < dd; ++i) {
        lo[i] = std::floor(lo[i] / hs) * hs;
        hi[i] = std::ceil(hi[i] / hs) * hs;
    }
    GridBox img = make_grid(g.d, lo, hi, hs);
    const double amp = std::pow(K, g.d - H.alpha());
    std::vector<double> vals(img.cells());
    std::vector<double> x(dd);
    for (std::size_t k = 0; k < img.cells(); ++k) {
        const auto y = img.center(k);
        const double xd = K * K * y[dd - 1];
        for (std::size_t i = 0; i + 1 < dd; ++i) x[i] = K * y[i] - 2.0 * xd * omega0[i];
        x[dd - 1] = xd;
        vals[k] = amp * H.at(x);
    }
    return SampledWeight(std::move(img), std::move(vals), H.alpha());
}

void write_weight_file(const std::string& path, const SampledWeight& H) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw precondition_error("weight file: cannot open for writing: " + path);
    const GridBox& g = H.grid();
    const std::uint64_t d64 = static_cast<std::uint64_t>(g.d);
    out.write(reinterpret_cast<const char*>(&d64), sizeof d64);
    out.write(reinterpret_cast<const char*>(g.lo.data()), static_cast<std::streamsize>(sizeof(double) * g.lo.size()));
    out.write(reinterpret_cast<const char*>(g.hi.data()), static_cast<std::streamsize>(sizeof(double) * g.hi.size()));
    out.write(reinterpret_cast<const char*>(&g.h), sizeof g.h);
    out.write(reinterpret_cast<const char*>(H.values().data()),
              static_cast<std::streamsize>(sizeof(double) * H.values().size()));
    if (!out) throw precondition_error("weight file: write failed: " + path);
}

SampledWeight read_weight_file(const std::string& path, double alpha) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw precondition_error("weight file: cannot open: " + path);
    std::uint64_t d64 = 0;
    in.read(reinterpret_cast<char*>(&d64), sizeof d64);
    if (!in || d64 < 1 || d64 > 3) throw precondition_error("weight file: bad dimension header");
    const int d = static_cast<int>(d64);
    std::vector<double> lo(d64), hi(d64);
    double h = 0.0;
    in.read(reinterpret_cast<char*>(lo.data()), static_cast<std::streamsize>(sizeof(double) * d64));
    in.read(reinterpret_cast<char*>(hi.data()), static_cast<std::streamsize>(sizeof(double) * d64));
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in) throw precondition_error("weight file: truncated header");
    GridBox g = make_grid(d, lo, hi, h);
    std::vector<double> vals(g.cells());
    in.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(sizeof(double) * vals.size()));
    if (!in) throw precondition_error("weight file: truncated payload");
    char extra;
    if (in.read(&extra, 1)) throw precondition_error("weight file: trailing bytes");
    return SampledWeight(std::move(g), std::move(vals), alpha);
}

}  // namespace restlab
