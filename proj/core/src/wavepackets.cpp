#include "restlab/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>

#include "restlab/errors.hpp"
#include "restlab/quadrature.hpp"

namespace restlab {

namespace {

using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kDropRel = 1e-12;      // relative piece-mass drop threshold
constexpr double kWedgeTol = 1e-9;      // singular-gradient cutoff
constexpr double kNuPlateau = 1.0 / 3.0;  // flat fraction of the cell window
constexpr int kDescentIters = 60;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (power_of_two(static_cast<int>(n))) {
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            double ang = sign * 2.0 * kPi / static_cast<double>(len);
            cd wl(std::cos(ang), std::sin(ang));
            for (std::size_t i = 0; i < n; i += len) {
                cd w(1.0, 0.0);
                for (std::size_t k = 0; k < len / 2; ++k) {
                    cd u = a[i + k];
                    cd v = a[i + k + len / 2] * w;
                    a[i + k] = u + v;
                    a[i + k + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
        return;
    }
    std::vector<cd> roots(n);
    for (std::size_t r = 0; r < n; ++r) {
        double ang = sign * 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n);
        roots[r] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> out(n, cd(0.0, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        cd acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) acc += a[k] * roots[(t * k) % n];
        out[t] = acc;
    }
    a = std::move(out);
}

// Plateau window: 1 for |u| <= plateau, C^3 smoothstep down to 0 at |u| = 1.
// The flat core keeps overlap regions narrow so packet energies nearly sum
// to the input energy; the C^3 junctions keep spectral tails integrable.
double plateau_window(double u, double plateau) {
    double t = std::abs(u);
    if (t >= 1.0) return 0.0;
    if (t <= plateau) return 1.0;
    double s = (1.0 - t) / (1.0 - plateau);
    return s * s * s * s * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s);
}

// Per-axis smooth cap windows summing to one on the grid, overlap factor 2
// (each window supported one full cell to either side of its center).
struct CapWindows {
    int caps = 0;
    double width = 0.0;                      // cell width
    std::vector<double> centers;
    std::vector<std::vector<double>> chi;    // [cap][node], normalized
    std::vector<int> lo, hi;                 // support node range per cap
};

CapWindows build_cap_windows(int caps, int m, double h) {
    CapWindows w;
    w.caps = caps;
    w.width = 2.0 / caps;
    w.centers.resize(static_cast<std::size_t>(caps));
    for (int j = 0; j < caps; ++j) w.centers[static_cast<std::size_t>(j)] = -1.0 + (j + 0.5) * w.width;
    std::vector<double> node(static_cast<std::size_t>(m));
    std::vector<double> den(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) node[static_cast<std::size_t>(k)] = -1.0 + (k + 0.5) * h;
    w.chi.assign(static_cast<std::size_t>(caps), std::vector<double>(static_cast<std::size_t>(m), 0.0));
    for (int j = 0; j < caps; ++j)
        for (int k = 0; k < m; ++k) {
            double v = plateau_window((node[static_cast<std::size_t>(k)] - w.centers[static_cast<std::size_t>(j)]) / w.width, 0.5);
            w.chi[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = v;
            den[static_cast<std::size_t>(k)] += v;
        }
    for (int j = 0; j < caps; ++j) {
        int lo = m, hi = -1;
        for (int k = 0; k < m; ++k) {
            auto& v = w.chi[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            if (v > 0.0) {
                v /= den[static_cast<std::size_t>(k)];
                lo = std::min(lo, k);
                hi = std::max(hi, k);
            }
        }
        w.lo.push_back(lo);
        w.hi.push_back(hi);
    }
    return w;
}

// Per-axis spatial windows on the conjugate grid, normalized to sum to one
// at every sample.  Sample t corresponds to signed index j(t) and position
// j * step.
struct NuWindows {
    double L = 0.0;
    double radius = 0.0;
    int q_min = 0, q_max = 0;
    std::vector<std::vector<std::pair<int, double>>> taps;  // [q - q_min] -> (t, eta)
};

NuWindows build_nu_windows(int m, double step, double L, double radius) {
    NuWindows w;
    w.L = L;
    w.radius = radius;
    double y_min = -(m / 2) * step;
    double y_max = (m / 2 - 1) * step;
    w.q_min = static_cast<int>(std::ceil((y_min - radius) / L));
    w.q_max = static_cast<int>(std::floor((y_max + radius) / L));
    auto den_at = [&](double y) {
        double den = 0.0;
        int q0 = static_cast<int>(std::floor(y / L));
        for (int q = q0 - 1; q <= q0 + 1; ++q) den += plateau_window((y - q * L) / radius, kNuPlateau);
        return den;
    };
    for (int q = w.q_min; q <= w.q_max; ++q) {
        std::vector<std::pair<int, double>> taps;
        int j_lo = static_cast<int>(std::ceil((q * L - radius) / step));
        int j_hi = static_cast<int>(std::floor((q * L + radius) / step));
        for (int j = std::max(j_lo, -(m / 2)); j <= std::min(j_hi, m / 2 - 1); ++j) {
            double y = j * step;
            double v = plateau_window((y - q * L) / radius, kNuPlateau);
            if (v <= 0.0) continue;
            int t = j >= 0 ? j : j + m;
            taps.emplace_back(t, v / den_at(y));
        }
        w.taps.push_back(std::move(taps));
    }
    return w;
}

int caps_per_axis_for(int, double R) {
    return static_cast<int>(std::ceil(std::sqrt(R)));
}

}  // namespace

Decomposition decompose(const FrequencyProfile& f, double R, double delta) {
    if (f.d < 2 || f.d > 3) throw precondition_error("decompose: dimension must be 2 or 3");
    if (f.m < 4) throw precondition_error("decompose: profile grid too small");
    if (!(R >= 16.0)) throw precondition_error("decompose: R below 16");
    if (!(delta > 0.0 && delta <= 1.0)) throw precondition_error("decompose: delta outside (0, 1]");

    Decomposition dec;
    dec.d = f.d;
    dec.m = f.m;
    dec.h = f.h;
    dec.R = R;
    dec.delta = delta;
    dec.caps_per_axis = caps_per_axis_for(f.d, R);
    if (dec.caps_per_axis < 4) throw precondition_error("decompose: fewer than 4 caps per axis");
    dec.L = std::pow(R, (1.0 + delta) / 2.0);
    dec.window_radius = 0.65 * dec.L;
    dec.input_l2 = profile_l2(f);

    const int m = f.m;
    const int dm = f.d - 1;
    CapWindows cw = build_cap_windows(dec.caps_per_axis, m, f.h);
    dec.cap_width = cw.width;
    if (dec.input_l2 == 0.0) return dec;
    const double threshold = kDropRel * dec.input_l2;
    const double step = 2.0 * kPi / (m * f.h);
    NuWindows nw = build_nu_windows(m, step, dec.L, dec.window_radius);

    std::vector<cd> roots(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        double ang = 2.0 * kPi * r / m;
        roots[static_cast<std::size_t>(r)] = cd(std::cos(ang), std::sin(ang));
    }
    auto root_at = [&](long long t, long long k) -> const cd& {
        return roots[static_cast<std::size_t>((t * k) % m)];
    };

    if (dm == 1) {
        const double cell_scale = f.h / m;  // |piece|_2^2 <= cell_scale * sum |eta G|^2
        for (int j = 0; j < cw.caps; ++j) {
            if (cw.lo[static_cast<std::size_t>(j)] > cw.hi[static_cast<std::size_t>(j)]) continue;
            std::vector<cd> g(static_cast<std::size_t>(m), cd(0.0, 0.0));
            for (int k = cw.lo[static_cast<std::size_t>(j)]; k <= cw.hi[static_cast<std::size_t>(j)]; ++k)
                g[static_cast<std::size_t>(k)] =
                    f.values[static_cast<std::size_t>(k)] * cw.chi[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            fft_inplace(g, -1);
            // Spectral window at y = qL carries the packet translated to
            // nu = -qL; iterate in physical order.
            for (int n = -nw.q_max; n <= -nw.q_min; ++n) {
                const int q = -n;
                const auto& taps = nw.taps[static_cast<std::size_t>(q - nw.q_min)];
                if (taps.empty()) continue;
                double energy = 0.0;
                for (const auto& [t, eta] : taps) energy += std::norm(g[static_cast<std::size_t>(t)]);
                if (std::sqrt(energy * cell_scale) < threshold) {
                    ++dec.dropped_count;
                    dec.dropped_mass += std::sqrt(energy * cell_scale);
                    continue;
                }
                int lo = cw.lo[static_cast<std::size_t>(j)], hi = cw.hi[static_cast<std::size_t>(j)];
                std::vector<cd> coef(static_cast<std::size_t>(hi - lo + 1), cd(0.0, 0.0));
                for (int k = lo; k <= hi; ++k) {
                    cd acc(0.0, 0.0);
                    for (const auto& [t, eta] : taps) acc += eta * g[static_cast<std::size_t>(t)] * root_at(t, k);
                    coef[static_cast<std::size_t>(k - lo)] = acc / static_cast<double>(m);
                }
                double mass2 = 0.0;
                for (const auto& c : coef) mass2 += std::norm(c);
                double mass = std::sqrt(mass2 * f.h);
                if (mass < threshold) {
                    ++dec.dropped_count;
                    dec.dropped_mass += mass;
                    continue;
                }
                WavePacket pk;
                pk.tile.theta = {j};
                pk.tile.omega = {cw.centers[static_cast<std::size_t>(j)]};
                pk.tile.nu_index = {n};
                pk.tile.nu = {n * dec.L};
                pk.tile.R = R;
                pk.tile.delta = delta;
                pk.mass = mass;
                pk.lo = {lo};
                pk.extent = {hi - lo + 1};
                pk.coef = std::move(coef);
                dec.packets.push_back(std::move(pk));
            }
        }
        return dec;
    }

    // d = 3: separable transforms over the m x m grid.
    const double cell_scale = (f.h * f.h) / (static_cast<double>(m) * m);
    std::vector<cd> spectrum(static_cast<std::size_t>(m) * m);
    std::vector<cd> line(static_cast<std::size_t>(m));
    for (int j1 = 0; j1 < cw.caps; ++j1) {
        if (cw.lo[static_cast<std::size_t>(j1)] > cw.hi[static_cast<std::size_t>(j1)]) continue;
        for (int j2 = 0; j2 < cw.caps; ++j2) {
            if (cw.lo[static_cast<std::size_t>(j2)] > cw.hi[static_cast<std::size_t>(j2)]) continue;
            std::fill(spectrum.begin(), spectrum.end(), cd(0.0, 0.0));
            for (int k1 = cw.lo[static_cast<std::size_t>(j1)]; k1 <= cw.hi[static_cast<std::size_t>(j1)]; ++k1) {
                std::fill(line.begin(), line.end(), cd(0.0, 0.0));
                double c1 = cw.chi[static_cast<std::size_t>(j1)][static_cast<std::size_t>(k1)];
                for (int k2 = cw.lo[static_cast<std::size_t>(j2)]; k2 <= cw.hi[static_cast<std::size_t>(j2)]; ++k2)
                    line[static_cast<std::size_t>(k2)] =
                        f.values[static_cast<std::size_t>(k1) * m + static_cast<std::size_t>(k2)] * c1 *
                        cw.chi[static_cast<std::size_t>(j2)][static_cast<std::size_t>(k2)];
                fft_inplace(line, -1);
                for (int t2 = 0; t2 < m; ++t2) spectrum[static_cast<std::size_t>(k1) * m + static_cast<std::size_t>(t2)] = line[static_cast<std::size_t>(t2)];
            }
            for (int t2 = 0; t2 < m; ++t2) {
                for (int k1 = 0; k1 < m; ++k1) line[static_cast<std::size_t>(k1)] = spectrum[static_cast<std::size_t>(k1) * m + static_cast<std::size_t>(t2)];
                fft_inplace(line, -1);
                for (int t1 = 0; t1 < m; ++t1) spectrum[static_cast<std::size_t>(t1) * m + static_cast<std::size_t>(t2)] = line[static_cast<std::size_t>(t1)];
            }
            // Column energies per nu2 window for fast mass bounds.
            std::size_t q2n = nw.taps.size();
            std::vector<std::vector<double>> col_energy(q2n, std::vector<double>(static_cast<std::size_t>(m), 0.0));
            for (std::size_t q2 = 0; q2 < q2n; ++q2)
                for (const auto& [t2, eta] : nw.taps[q2]) {
                    (void)eta;
                    for (int t1 = 0; t1 < m; ++t1)
                        col_energy[q2][static_cast<std::size_t>(t1)] += std::norm(spectrum[static_cast<std::size_t>(t1) * m + static_cast<std::size_t>(t2)]);
                }
            int lo1 = cw.lo[static_cast<std::size_t>(j1)], hi1 = cw.hi[static_cast<std::size_t>(j1)];
            int lo2 = cw.lo[static_cast<std::size_t>(j2)], hi2 = cw.hi[static_cast<std::size_t>(j2)];
            int sl1 = hi1 - lo1 + 1, sl2 = hi2 - lo2 + 1;
            std::vector<cd> partial;  // [t1 in taps1][k2 slice]
            for (int n1 = -nw.q_max; n1 <= -nw.q_min; ++n1) {
                const int q1 = -n1;
                const auto& taps1 = nw.taps[static_cast<std::size_t>(q1 - nw.q_min)];
                if (taps1.empty()) continue;
                for (int n2 = -nw.q_max; n2 <= -nw.q_min; ++n2) {
                    const int q2 = -n2;
                    const auto& taps2 = nw.taps[static_cast<std::size_t>(q2 - nw.q_min)];
                    if (taps2.empty()) continue;
                    double energy = 0.0;
                    for (const auto& [t1, eta1] : taps1) {
                        (void)eta1;
                        energy += col_energy[static_cast<std::size_t>(q2 - nw.q_min)][static_cast<std::size_t>(t1)];
                    }
                    double bound = std::sqrt(energy * cell_scale);
                    if (bound < threshold) {
                        ++dec.dropped_count;
                        dec.dropped_mass += bound;
                        continue;
                    }
                    partial.assign(taps1.size() * static_cast<std::size_t>(sl2), cd(0.0, 0.0));
                    for (std::size_t a = 0; a < taps1.size(); ++a) {
                        int t1 = taps1[a].first;
                        for (int k2 = lo2; k2 <= hi2; ++k2) {
                            cd acc(0.0, 0.0);
                            for (const auto& [t2, eta2] : taps2)
                                acc += eta2 * spectrum[static_cast<std::size_t>(t1) * m + static_cast<std::size_t>(t2)] * root_at(t2, k2);
                            partial[a * static_cast<std::size_t>(sl2) + static_cast<std::size_t>(k2 - lo2)] = acc;
                        }
                    }
                    std::vector<cd> coef(static_cast<std::size_t>(sl1) * static_cast<std::size_t>(sl2), cd(0.0, 0.0));
                    double mass2 = 0.0;
                    for (int k1 = lo1; k1 <= hi1; ++k1) {
                        for (int k2 = lo2; k2 <= hi2; ++k2) {
                            cd acc(0.0, 0.0);
                            for (std::size_t a = 0; a < taps1.size(); ++a)
                                acc += taps1[a].second * partial[a * static_cast<std::size_t>(sl2) + static_cast<std::size_t>(k2 - lo2)] *
                                       root_at(taps1[a].first, k1);
                            acc /= static_cast<double>(m) * m;
                            coef[static_cast<std::size_t>(k1 - lo1) * static_cast<std::size_t>(sl2) + static_cast<std::size_t>(k2 - lo2)] = acc;
                            mass2 += std::norm(acc);
                        }
                    }
                    double mass = std::sqrt(mass2 * f.h * f.h);
                    if (mass < threshold) {
                        ++dec.dropped_count;
                        dec.dropped_mass += mass;
                        continue;
                    }
                    WavePacket pk;
                    pk.tile.theta = {j1, j2};
                    pk.tile.omega = {cw.centers[static_cast<std::size_t>(j1)], cw.centers[static_cast<std::size_t>(j2)]};
                    pk.tile.nu_index = {n1, n2};
                    pk.tile.nu = {n1 * dec.L, n2 * dec.L};
                    pk.tile.R = R;
                    pk.tile.delta = delta;
                    pk.mass = mass;
                    pk.lo = {lo1, lo2};
                    pk.extent = {sl1, sl2};
                    pk.coef = std::move(coef);
                    dec.packets.push_back(std::move(pk));
                }
            }
        }
    }
    return dec;
}

FrequencyProfile assemble(const Decomposition& dec, const std::vector<std::size_t>& which) {
    FrequencyProfile out;
    out.d = dec.d;
    out.m = dec.m;
    out.h = dec.h;
    std::size_t total = 1;
    for (int a = 0; a < dec.d - 1; ++a) total *= static_cast<std::size_t>(dec.m);
    out.values.assign(total, cd(0.0, 0.0));
    for (std::size_t idx : which) {
        if (idx >= dec.packets.size()) throw precondition_error("assemble: packet index out of range");
        const WavePacket& pk = dec.packets[idx];
        if (dec.d == 2) {
            for (int k = 0; k < pk.extent[0]; ++k)
                out.values[static_cast<std::size_t>(pk.lo[0] + k)] += pk.coef[static_cast<std::size_t>(k)];
        } else {
            for (int k1 = 0; k1 < pk.extent[0]; ++k1)
                for (int k2 = 0; k2 < pk.extent[1]; ++k2)
                    out.values[static_cast<std::size_t>(pk.lo[0] + k1) * dec.m + static_cast<std::size_t>(pk.lo[1] + k2)] +=
                        pk.coef[static_cast<std::size_t>(k1) * static_cast<std::size_t>(pk.extent[1]) + static_cast<std::size_t>(k2)];
        }
    }
    return out;
}

FrequencyProfile assemble_all(const Decomposition& dec) {
    std::vector<std::size_t> all(dec.packets.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return assemble(dec, all);
}

std::vector<double> tile_direction(const std::vector<double>& omega) {
    std::vector<double> g;
    double norm2 = 1.0;
    for (double w : omega) {
        g.push_back(-2.0 * w);
        norm2 += 4.0 * w * w;
    }
    g.push_back(1.0);
    double inv = 1.0 / std::sqrt(norm2);
    for (double& v : g) v *= inv;
    return g;
}

Tube tube_of(const Tile& tile) {
    Tube t;
    t.tile = tile;
    t.radius = std::pow(tile.R, 0.5 + tile.delta);
    return t;
}

bool tube_membership(const std::vector<double>& x, const Tube& tube) {
    const Tile& tl = tube.tile;
    std::size_t dm = tl.omega.size();
    if (x.size() != dm + 1) throw precondition_error("tube_membership: point dimension mismatch");
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    if (r2 > tl.R * tl.R * (1.0 + 1e-12)) return false;
    double xd = x[dm];
    double dist2 = 0.0;
    for (std::size_t i = 0; i < dm; ++i) {
        double u = x[i] + 2.0 * xd * tl.omega[i] - tl.nu[i];
        dist2 += u * u;
    }
    return dist2 <= tube.radius * tube.radius * (1.0 + 1e-12);
}

int shadow_count(const Decomposition& dec) {
    return 2 * static_cast<int>(std::floor(dec.R / dec.L)) + 1;
}

int Variety::degree_bound() const {
    int deg = 0;
    for (const auto& p : polys) deg = std::max(deg, p.degree());
    return deg;
}

void Variety::validate() const {
    if (d < 2 || d > 3) throw precondition_error("variety: ambient dimension must be 2 or 3");
    if (polys.empty() || static_cast<int>(polys.size()) >= d)
        throw precondition_error("variety: codimension must be between 1 and d-1");
    for (const auto& p : polys) {
        if (p.zero()) throw precondition_error("variety: zero polynomial");
        if (p.vars() > d) throw precondition_error("variety: polynomial uses more variables than the ambient space");
    }
}

Variety make_variety(int d, const std::vector<std::string>& specs) {
    Variety z;
    z.d = d;
    for (const auto& s : specs) z.polys.push_back(Polynomial::parse(s, d));
    z.validate();
    return z;
}

namespace {

struct VarietyFrame {
    const Variety& Z;
    std::vector<std::vector<Polynomial>> grads;  // [poly][var]

    explicit VarietyFrame(const Variety& z) : Z(z) {
        for (const auto& p : z.polys) {
            std::vector<Polynomial> row;
            for (int v = 0; v < z.d; ++v) row.push_back(p.partial(v));
            grads.push_back(std::move(row));
        }
    }

    std::vector<double> values(const std::vector<double>& x) const {
        std::vector<double> out;
        for (const auto& p : Z.polys) out.push_back(p.eval(x));
        return out;
    }
    // rows = gradients
    std::vector<std::vector<double>> jacobian(const std::vector<double>& x) const {
        std::vector<std::vector<double>> J;
        for (const auto& row : grads) {
            std::vector<double> r;
            for (const auto& p : row) r.push_back(p.eval(x));
            J.push_back(std::move(r));
        }
        return J;
    }
};

bool solve_small(std::vector<std::vector<double>> M, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
        if (std::abs(M[piv][c]) < 1e-14) return false;
        std::swap(M[piv], M[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = M[r][c] / M[c][c];
            for (std::size_t k = c; k < n; ++k) M[r][k] -= f * M[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = 0; c < n; ++c) b[c] /= M[c][c];
    return true;
}

struct DescentResult {
    bool converged = false;
    bool singular = false;
    std::vector<double> z;
};

DescentResult descend(const VarietyFrame& frame, std::vector<double> x) {
    const std::size_t np = frame.Z.polys.size();
    std::vector<double> scale(np, 1.0);
    {
        auto p0 = frame.values(x);
        for (std::size_t i = 0; i < np; ++i) scale[i] = 1.0 + std::abs(p0[i]);
    }
    for (int iter = 0; iter < kDescentIters; ++iter) {
        auto P = frame.values(x);
        bool done = true;
        for (std::size_t i = 0; i < np; ++i)
            if (std::abs(P[i]) > 1e-11 * scale[i]) done = false;
        if (done) return {true, false, x};
        auto J = frame.jacobian(x);
        std::vector<std::vector<double>> M(np, std::vector<double>(np, 0.0));
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = 0; b < np; ++b)
                for (int v = 0; v < frame.Z.d; ++v) M[a][b] += J[a][static_cast<std::size_t>(v)] * J[b][static_cast<std::size_t>(v)];
        std::vector<double> u = P;
        if (!solve_small(M, u)) return {false, true, x};
        double step2 = 0.0;
        for (int v = 0; v < frame.Z.d; ++v) {
            double dv = 0.0;
            for (std::size_t a = 0; a < np; ++a) dv += J[a][static_cast<std::size_t>(v)] * u[a];
            x[static_cast<std::size_t>(v)] -= dv;
            step2 += dv * dv;
        }
        if (!(step2 < 1e18)) return {false, false, x};
    }
    return {false, false, x};
}

// Orthonormalizes gradient rows; wedge is the product of residual norms.
double normal_frame(const std::vector<std::vector<double>>& J, std::vector<std::vector<double>>& basis) {
    basis.clear();
    double wedge = 1.0;
    for (const auto& row : J) {
        std::vector<double> v = row;
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * b[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * b[i];
        }
        double n = 0.0;
        for (double vi : v) n += vi * vi;
        n = std::sqrt(n);
        wedge *= n;
        if (n > 0.0)
            for (double& vi : v) vi /= n;
        basis.push_back(std::move(v));
    }
    return wedge;
}

}  // namespace

WitnessReport variety_witness(const Variety& Z, double box_radius, int seeds_per_axis) {
    Z.validate();
    if (seeds_per_axis < 2) throw precondition_error("variety_witness: need at least 2 seeds per axis");
    VarietyFrame frame(Z);
    WitnessReport rep;
    std::vector<int> idx(static_cast<std::size_t>(Z.d), 0);
    while (true) {
        std::vector<double> seed;
        for (int a = 0; a < Z.d; ++a)
            seed.push_back(-box_radius + 2.0 * box_radius * idx[static_cast<std::size_t>(a)] / (seeds_per_axis - 1));
        auto res = descend(frame, seed);
        if (res.converged) {
            ++rep.zeros_checked;
            std::vector<std::vector<double>> basis;
            double wedge = normal_frame(frame.jacobian(res.z), basis);
            if (wedge < kWedgeTol) ++rep.singular;
        } else {
            ++rep.descent_failures;
        }
        int a = 0;
        for (; a < Z.d; ++a) {
            if (++idx[static_cast<std::size_t>(a)] < seeds_per_axis) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
        if (a == Z.d) break;
    }
    rep.pass = rep.zeros_checked > 0 && rep.singular == 0;
    return rep;
}

TangencyReport tangency_test(const Tube& tube, const Variety& Z, double E) {
    Z.validate();
    const Tile& tl = tube.tile;
    const std::size_t dm = tl.omega.size();
    if (static_cast<int>(dm) + 1 != Z.d) throw precondition_error("tangency_test: tube and variety dimensions differ");
    if (!(E > 0.0)) throw precondition_error("tangency_test: E must be positive");
    const double R = tl.R;

    TangencyReport rep;
    rep.distance_bound = E * std::sqrt(R);
    rep.angle_bound = E / std::sqrt(R);

    // Core line x(t) = (nu - 2 t omega, t) clipped to |x| <= R.
    double a = 1.0, b = 0.0, c = -R * R;
    for (std::size_t i = 0; i < dm; ++i) {
        a += 4.0 * tl.omega[i] * tl.omega[i];
        b += -4.0 * tl.nu[i] * tl.omega[i];
        c += tl.nu[i] * tl.nu[i];
    }
    double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
        rep.verdict = Tangency::Tangent;  // tube misses the ball entirely
        return rep;
    }
    double t_lo = (-b - std::sqrt(disc)) / (2.0 * a);
    double t_hi = (-b + std::sqrt(disc)) / (2.0 * a);

    auto core_point = [&](double t) {
        std::vector<double> x(dm + 1);
        for (std::size_t i = 0; i < dm; ++i) x[i] = tl.nu[i] - 2.0 * t * tl.omega[i];
        x[dm] = t;
        return x;
    };
    auto dist_to_core = [&](const std::vector<double>& z) {
        // closest point on the clipped core line
        double num = z[dm];
        for (std::size_t i = 0; i < dm; ++i) num += -2.0 * tl.omega[i] * (z[i] - tl.nu[i]);
        double t = std::clamp(num / a, t_lo, t_hi);
        auto x = core_point(t);
        double d2 = 0.0;
        for (std::size_t i = 0; i <= dm; ++i) d2 += (z[i] - x[i]) * (z[i] - x[i]);
        return std::sqrt(d2);
    };

    VarietyFrame frame(Z);
    std::vector<double> G = tile_direction(tl.omega);
    bool violation = false;

    const int n_core = 33;
    std::vector<std::vector<double>> zeros;
    auto consider_zero = [&](const std::vector<double>& z) {
        double zn = 0.0;
        for (double v : z) zn += v * v;
        if (zn > 4.0 * R * R * (1.0 + 1e-9)) return;
        if (dist_to_core(z) - tube.radius > 2.0 * rep.distance_bound * (1.0 + 1e-9)) return;
        for (const auto& w : zeros) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) d2 += (z[i] - w[i]) * (z[i] - w[i]);
            if (std::sqrt(d2) < 1e-6 * (1.0 + std::sqrt(zn))) return;
        }
        zeros.push_back(z);
        ++rep.zero_samples;
        std::vector<std::vector<double>> basis;
        double wedge = normal_frame(frame.jacobian(z), basis);
        if (wedge < kWedgeTol) {
            ++rep.singular_skipped;
            return;
        }
        double proj2 = 0.0;
        for (const auto& n : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n.size(); ++i) dot += G[i] * n[i];
            proj2 += dot * dot;
        }
        double angle = std::asin(std::min(1.0, std::sqrt(proj2)));
        rep.max_angle = std::max(rep.max_angle, angle);
        if (angle > rep.angle_bound * (1.0 + 1e-9) + 1e-12) violation = true;
    };

    for (int i = 0; i < n_core; ++i) {
        double t = t_lo + (t_hi - t_lo) * (i + 0.5) / n_core;
        auto x = core_point(t);
        ++rep.core_samples;
        auto res = descend(frame, x);
        if (!res.converged) {
            ++rep.descent_failures;
        } else {
            double d2 = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - res.z[k]) * (x[k] - res.z[k]);
            double dist = std::sqrt(d2);
            rep.max_core_distance = std::max(rep.max_core_distance, dist);
            if (dist > rep.distance_bound * (1.0 + 1e-9) + 1e-12) violation = true;
            consider_zero(res.z);
        }
        for (std::size_t axis = 0; axis <= dm; ++axis)
            for (double s : {-1.0, 1.0}) {
                auto seed = x;
                seed[axis] += s * 1.5 * rep.distance_bound;
                auto r2 = descend(frame, seed);
                if (r2.converged) consider_zero(r2.z);
            }
    }

    if (violation)
        rep.verdict = Tangency::NotTangent;
    else if (rep.descent_failures > 0)
        rep.verdict = Tangency::Inconclusive;
    else
        rep.verdict = Tangency::Tangent;
    return rep;
}

ConcentrationReport concentration_test(const Decomposition& dec, const Variety& Z, double E) {
    ConcentrationReport rep;
    for (const auto& pk : dec.packets) {
        auto t = tube_of(pk.tile);
        auto tan = tangency_test(t, Z, E);
        switch (tan.verdict) {
            case Tangency::Tangent:
                rep.mass_tangent += pk.mass;
                rep.mass2_tangent += pk.mass * pk.mass;
                ++rep.tiles_tangent;
                break;
            case Tangency::NotTangent:
                rep.mass_transverse += pk.mass;
                rep.mass2_transverse += pk.mass * pk.mass;
                ++rep.tiles_transverse;
                break;
            case Tangency::Inconclusive:
                rep.mass_inconclusive += pk.mass;
                rep.mass2_inconclusive += pk.mass * pk.mass;
                ++rep.tiles_inconclusive;
                break;
        }
    }
    return rep;
}

namespace {

// Exact test: can `need` be covered by at most `budget` of the masks?
bool coverable(std::uint64_t need, int budget, const std::vector<std::uint64_t>& masks) {
    if (need == 0) return true;
    if (budget == 0) return false;
    std::uint64_t first = need & (~need + 1);
    for (std::uint64_t msk : masks) {
        if (!(msk & first)) continue;
        if (coverable(need & ~msk, budget - 1, masks)) return true;
    }
    return false;
}

}  // namespace

BroadResult broad_norm(const FrequencyProfile& f, double R, const BroadParams& params,
                       const SampledWeight& H, double spacing) {
    if (f.d < 2 || f.d > 3) throw precondition_error("broad_norm: dimension must be 2 or 3");
    if (params.K < 2 || params.K > 8) throw precondition_error("broad_norm: K outside [2, 8]");
    if (params.A < 1 || params.A > 3) throw precondition_error("broad_norm: A outside [1, 3]");
    if (!(params.p >= 1.0)) throw precondition_error("broad_norm: p must be >= 1");
    if (!(spacing > 0.0)) throw precondition_error("broad_norm: spacing must be positive");
    const int K = params.K;
    const double cell = static_cast<double>(K) * K;
    double cells_f = 2.0 * R / cell;
    long long cells_per_axis = std::llround(cells_f);
    if (cells_per_axis < 1 || std::abs(cells_f - static_cast<double>(cells_per_axis)) > 1e-9)
        throw precondition_error("broad_norm: K^2 must tile [-R, R] exactly");
    double net_spacing = params.net_spacing > 0.0 ? params.net_spacing : 1.0 / (10.0 * K);
    if (net_spacing > 1.0 / (10.0 * K) + 1e-12)
        throw precondition_error("broad_norm: direction net spacing must be at most 1/(10K)");

    const int dm = f.d - 1;
    const int caps = dm == 1 ? K : K * K;
    if (caps > 64) throw precondition_error("broad_norm: cap count exceeds 64");
    const double cap_w = 2.0 / K;

    // Direction net on the upper hemisphere.
    std::vector<std::vector<double>> net;
    if (f.d == 2) {
        int M = static_cast<int>(std::ceil(kPi / net_spacing));
        for (int i = 0; i < M; ++i) {
            double phi = (i + 0.5) * kPi / M;
            net.push_back({std::cos(phi), std::sin(phi)});
        }
    } else {
        int n = static_cast<int>(std::ceil(10.0 / (net_spacing * net_spacing)));
        for (const auto& node : fibonacci_sphere_nodes(n))
            if (node.x[2] >= 0.0) net.push_back(node.x);
    }

    // Sampled packet directions per cap: center plus cell corners.
    auto cap_center = [&](int j) { return -1.0 + (j + 0.5) * cap_w; };
    std::vector<std::vector<std::vector<double>>> cap_dirs(static_cast<std::size_t>(caps));
    for (int cidx = 0; cidx < caps; ++cidx) {
        std::vector<int> jj(static_cast<std::size_t>(dm));
        jj[0] = dm == 1 ? cidx : cidx / K;
        if (dm == 2) jj[1] = cidx % K;
        std::vector<std::vector<double>> omegas;
        std::vector<double> center(static_cast<std::size_t>(dm));
        for (int a = 0; a < dm; ++a) center[static_cast<std::size_t>(a)] = cap_center(jj[static_cast<std::size_t>(a)]);
        omegas.push_back(center);
        for (int corner = 0; corner < (1 << dm); ++corner) {
            std::vector<double> w = center;
            for (int a = 0; a < dm; ++a) w[static_cast<std::size_t>(a)] += ((corner >> a) & 1 ? 0.5 : -0.5) * cap_w;
            omegas.push_back(std::move(w));
        }
        for (const auto& w : omegas) cap_dirs[static_cast<std::size_t>(cidx)].push_back(tile_direction(w));
    }

    const double cos_capture = std::cos(1.0 / K);
    std::vector<std::uint64_t> masks(net.size(), 0);
    for (std::size_t u = 0; u < net.size(); ++u)
        for (int cidx = 0; cidx < caps; ++cidx) {
            bool captured = false;
            for (const auto& g : cap_dirs[static_cast<std::size_t>(cidx)]) {
                double dot = 0.0;
                for (int i = 0; i < f.d; ++i) dot += net[u][static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
                if (std::abs(dot) >= cos_capture) {
                    captured = true;
                    break;
                }
            }
            if (captured) masks[u] |= 1ull << cidx;
        }
    std::vector<std::uint64_t> unique_masks = masks;
    std::sort(unique_masks.begin(), unique_masks.end());
    unique_masks.erase(std::unique(unique_masks.begin(), unique_masks.end()), unique_masks.end());

    // Per-cap weighted p-mass on each K^2 cell.
    auto cap_of_node = [&](double w) {
        int j = static_cast<int>((w + 1.0) / cap_w);
        return std::clamp(j, 0, K - 1);
    };
    std::size_t n_cells = 1;
    for (int i = 0; i < f.d; ++i) n_cells *= static_cast<std::size_t>(cells_per_axis);
    std::vector<std::vector<double>> mass(n_cells, std::vector<double>(static_cast<std::size_t>(caps), 0.0));
    double point_vol = std::pow(spacing, f.d);

    for (int cidx = 0; cidx < caps; ++cidx) {
        FrequencyProfile fc = f;
        fc.form = nullptr;
        if (dm == 1) {
            for (int k = 0; k < f.m; ++k)
                if (cap_of_node(fc.node(k)) != cidx) fc.values[static_cast<std::size_t>(k)] = cd(0.0, 0.0);
        } else {
            for (int k1 = 0; k1 < f.m; ++k1)
                for (int k2 = 0; k2 < f.m; ++k2) {
                    int j = cap_of_node(fc.node(k1)) * K + cap_of_node(fc.node(k2));
                    if (j != cidx) fc.values[static_cast<std::size_t>(k1) * f.m + static_cast<std::size_t>(k2)] = cd(0.0, 0.0);
                }
        }
        FieldSample fs = field_on_ball(fc, R, spacing);
        for (std::size_t i = 0; i < fs.points.size(); ++i) {
            double hval = H.at(fs.points[i]);
            if (hval == 0.0) continue;
            std::size_t cell_id = 0;
            for (int ax = 0; ax < f.d; ++ax) {
                long long ci = static_cast<long long>(std::floor((fs.points[i][static_cast<std::size_t>(ax)] + R) / cell));
                ci = std::clamp(ci, 0ll, cells_per_axis - 1);
                cell_id = cell_id * static_cast<std::size_t>(cells_per_axis) + static_cast<std::size_t>(ci);
            }
            mass[cell_id][static_cast<std::size_t>(cidx)] +=
                std::pow(std::abs(fs.values[i]), params.p) * hval * point_vol;
        }
    }

    double total = 0.0;
    if (!params.exhaustive) {
        std::vector<int> order(static_cast<std::size_t>(caps));
        for (auto& cm : mass) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int x, int y) { return cm[static_cast<std::size_t>(x)] > cm[static_cast<std::size_t>(y)]; });
            std::uint64_t need = 0;
            double mu = 0.0;
            for (int j = 0; j < caps; ++j) {
                double v = cm[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
                if (v <= 0.0) break;
                need |= 1ull << order[static_cast<std::size_t>(j)];
                if (!coverable(need, params.A, unique_masks)) {
                    mu = v;
                    break;
                }
            }
            total += mu;
        }
    } else {
        double combos = 1.0;
        for (int i = 0; i < params.A; ++i) combos = combos * (static_cast<double>(net.size()) + i) / (i + 1);
        if (combos > 2e6) throw precondition_error("broad_norm: exhaustive enumeration budget exceeded");
        std::vector<std::size_t> pick(static_cast<std::size_t>(params.A), 0);
        std::vector<std::uint64_t> tuple_masks;
        while (true) {
            std::uint64_t msk = 0;
            for (std::size_t i = 0; i < pick.size(); ++i) msk |= masks[pick[i]];
            tuple_masks.push_back(msk);
            int a = params.A - 1;
            for (; a >= 0; --a) {
                if (++pick[static_cast<std::size_t>(a)] < net.size()) break;
            }
            if (a < 0) break;
            for (int b2 = a + 1; b2 < params.A; ++b2) pick[static_cast<std::size_t>(b2)] = pick[static_cast<std::size_t>(a)];
        }
        std::sort(tuple_masks.begin(), tuple_masks.end());
        tuple_masks.erase(std::unique(tuple_masks.begin(), tuple_masks.end()), tuple_masks.end());
        for (auto& cm : mass) {
            double best = -1.0;
            for (std::uint64_t msk : tuple_masks) {
                double worst = 0.0;
                for (int cidx = 0; cidx < caps; ++cidx)
                    if (!(msk & (1ull << cidx))) worst = std::max(worst, cm[static_cast<std::size_t>(cidx)]);
                if (best < 0.0 || worst < best) best = worst;
                if (best == 0.0) break;
            }
            total += std::max(best, 0.0);
        }
    }

    BroadResult res;
    res.value = std::pow(total, 1.0 / params.p);
    res.balls = n_cells;
    res.net_size = net.size();
    res.caps = caps;
    return res;
}

}  // namespace restlab
