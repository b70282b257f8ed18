#include "restlab/extension.hpp"

#include <algorithm>
#include <cmath>

#include "restlab/errors.hpp"
#include "restlab/exponents.hpp"
#include "restlab/rng.hpp"

namespace restlab {

namespace {

using cplx = std::complex<double>;

// Recompute the running phasors from scratch every this many steps to stop
// rounding drift of the double recurrence.
constexpr int kResync = 4096;

cplx unit_phase(double phi) { return {std::cos(phi), std::sin(phi)}; }

double norm2(const std::vector<double>& x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return s;
}

void check_profile_shape(int d, int m) {
    if (d < 2 || d > 3) throw precondition_error("profile: dimension must be 2 or 3");
    if (m < 4) throw precondition_error("profile: need at least 4 nodes per axis");
    if (d == 2 && m > (1 << 19)) throw precondition_error("profile: too many nodes");
    if (d == 3 && m > 4096) throw precondition_error("profile: too many nodes");
}

void check_rule(const FrequencyProfile& f, double max_abs) {
    if (f.h * 4.0 * max_abs > 1.0 + 1e-12)
        throw precondition_error(
            "extend: frequency grid too coarse for these points (h > 1/(4 max|x|))");
}

// Midpoint sum over one axis with the quadratic-phase double recurrence:
// phase(k) = a*omega_k + b*omega_k^2 has constant second difference 2 b h^2.
template <typename Body>
void phase_scan(int m, double h, double a, double b, Body&& body) {
    cplx z, q;
    const cplx r = unit_phase(2.0 * b * h * h);
    for (int k = 0; k < m; ++k) {
        if (k % kResync == 0) {
            const double w = -1.0 + (k + 0.5) * h;
            z = unit_phase(a * w + b * w * w);
            q = unit_phase(a * h + b * h * (2.0 * w + h));
        }
        body(k, z);
        z *= q;
        q *= r;
    }
}

}  // namespace

FrequencyProfile sample_profile(int d, int m, ClosedForm form) {
    check_profile_shape(d, m);
    if (!form) throw precondition_error("profile: missing closed form");
    FrequencyProfile f;
    f.d = d;
    f.m = m;
    f.h = 2.0 / m;
    if (d == 2) {
        f.values.resize(static_cast<std::size_t>(m));
        std::vector<double> w(1);
        for (int k = 0; k < m; ++k) {
            w[0] = f.node(k);
            f.values[static_cast<std::size_t>(k)] = std::abs(w[0]) <= 1.0 ? form(w) : cplx{};
        }
    } else {
        f.values.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
        std::vector<double> w(2);
        std::size_t idx = 0;
        for (int j = 0; j < m; ++j) {
            w[0] = f.node(j);
            for (int k = 0; k < m; ++k, ++idx) {
                w[1] = f.node(k);
                f.values[idx] = w[0] * w[0] + w[1] * w[1] <= 1.0 ? form(w) : cplx{};
            }
        }
    }
    f.form = std::move(form);
    return f;
}

FrequencyProfile profile_constant(int d, int m) {
    return sample_profile(d, m, [](const std::vector<double>&) { return cplx(1.0, 0.0); });
}

FrequencyProfile profile_bump(int d, int m, std::vector<double> center, double radius) {
    if (center.size() + 1 != static_cast<std::size_t>(d))
        throw precondition_error("profile: center must have dimension d-1");
    if (!(radius > 0.0)) throw precondition_error("profile: radius must be positive");
    return sample_profile(d, m, [center = std::move(center), radius](const std::vector<double>& w) {
        double t2 = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = (w[i] - center[i]) / radius;
            t2 += u * u;
        }
        if (t2 >= 1.0) return cplx{};
        const double s = 1.0 - t2;
        return cplx(s * s * s, 0.0);
    });
}

FrequencyProfile profile_cap(int d, int m, std::vector<double> center, double radius) {
    if (center.size() + 1 != static_cast<std::size_t>(d))
        throw precondition_error("profile: center must have dimension d-1");
    if (!(radius > 0.0)) throw precondition_error("profile: radius must be positive");
    return sample_profile(d, m, [center = std::move(center), radius](const std::vector<double>& w) {
        double t2 = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = w[i] - center[i];
            t2 += u * u;
        }
        return t2 <= radius * radius ? cplx(1.0, 0.0) : cplx{};
    });
}

FrequencyProfile profile_gaussian(int d, int m, std::vector<double> center, double width) {
    if (center.size() + 1 != static_cast<std::size_t>(d))
        throw precondition_error("profile: center must have dimension d-1");
    if (!(width > 0.0)) throw precondition_error("profile: width must be positive");
    return sample_profile(d, m, [center = std::move(center), width](const std::vector<double>& w) {
        double t2 = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = w[i] - center[i];
            t2 += u * u;
        }
        return cplx(std::exp(-t2 / (width * width)), 0.0);
    });
}

FrequencyProfile profile_modulated(const FrequencyProfile& base, std::vector<double> v) {
    if (v.size() + 1 != static_cast<std::size_t>(base.d))
        throw precondition_error("profile: modulation vector must have dimension d-1");
    if (!base.form) throw precondition_error("profile: modulation needs a closed form");
    auto inner = base.form;
    return sample_profile(base.d, base.m, [inner, v = std::move(v)](const std::vector<double>& w) {
        double ph = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) ph += v[i] * w[i];
        return inner(w) * unit_phase(ph);
    });
}

FrequencyProfile profile_random(int d, int m, std::uint64_t seed, int degree) {
    if (degree < 0 || degree > 8) throw precondition_error("profile: degree out of range");
    SplitMix64 gen(seed);
    const int width = 2 * degree + 1;
    const int terms = d == 2 ? width : width * width;
    std::vector<cplx> coef(static_cast<std::size_t>(terms));
    for (auto& c : coef) {
        const double re = gen.next_symmetric();
        const double im = gen.next_symmetric();
        c = cplx(re, im);
    }
    return sample_profile(d, m, [coef = std::move(coef), degree, width](const std::vector<double>& w) {
        double t2 = 0.0;
        for (double c : w) t2 += c * c;
        const double r2 = t2 / (0.95 * 0.95);
        if (r2 >= 1.0) return cplx{};
        const double env0 = 1.0 - r2;
        const double env = env0 * env0 * env0;
        cplx acc{};
        if (w.size() == 1) {
            for (int k = -degree; k <= degree; ++k)
                acc += coef[static_cast<std::size_t>(k + degree)] * unit_phase(M_PI * k * w[0]);
        } else {
            for (int j = -degree; j <= degree; ++j)
                for (int k = -degree; k <= degree; ++k)
                    acc += coef[static_cast<std::size_t>((j + degree) * width + (k + degree))] *
                           unit_phase(M_PI * (j * w[0] + k * w[1]));
        }
        return env * acc;
    });
}

double profile_l2(const FrequencyProfile& f) {
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * std::pow(f.h, f.d - 1));
}

std::vector<cplx> extend(const FrequencyProfile& f, const std::vector<std::vector<double>>& points) {
    check_profile_shape(f.d, f.m);
    double max_abs = 0.0;
    for (const auto& x : points) {
        if (x.size() != static_cast<std::size_t>(f.d))
            throw precondition_error("extend: point dimension mismatch");
        max_abs = std::max(max_abs, std::sqrt(norm2(x)));
    }
    check_rule(f, max_abs);

    std::vector<cplx> out(points.size());
    const double scale = std::pow(f.h, f.d - 1);
    if (f.d == 2) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            cplx acc{};
            phase_scan(f.m, f.h, points[i][0], points[i][1],
                       [&](int k, const cplx& z) { acc += f.values[static_cast<std::size_t>(k)] * z; });
            out[i] = acc * scale;
        }
    } else {
        std::vector<cplx> inner(static_cast<std::size_t>(f.m));
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double x1 = points[i][0], x2 = points[i][1], x3 = points[i][2];
            phase_scan(f.m, f.h, x2, x3, [&](int k, const cplx& z) { inner[static_cast<std::size_t>(k)] = z; });
            cplx acc{};
            phase_scan(f.m, f.h, x1, x3, [&](int j, const cplx& zj) {
                const cplx* row = f.values.data() + static_cast<std::size_t>(j) * f.m;
                cplx rowdot{};
                for (int k = 0; k < f.m; ++k) rowdot += row[k] * inner[static_cast<std::size_t>(k)];
                acc += zj * rowdot;
            });
            out[i] = acc * scale;
        }
    }
    return out;
}

std::vector<cplx> extend_plane3(const FrequencyProfile& f, double x3,
                                const std::vector<double>& x1s, const std::vector<double>& x2s) {
    check_profile_shape(f.d, f.m);
    if (f.d != 3) throw precondition_error("extend_plane3: profile must be 3-dimensional");
    double max_abs = std::abs(x3);
    for (double a : x1s) max_abs = std::max(max_abs, std::abs(a));
    for (double a : x2s) max_abs = std::max(max_abs, std::abs(a));
    check_rule(f, std::sqrt(3.0) * max_abs);

    const std::size_t n1 = x1s.size(), n2 = x2s.size(), mm = static_cast<std::size_t>(f.m);
    // S[i1][k] = sum_j f[j,k] e^{i(x1 omega_j + x3 omega_j^2)}
    std::vector<cplx> S(n1 * mm);
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        cplx* srow = S.data() + i1 * mm;
        phase_scan(f.m, f.h, x1s[i1], x3, [&](int j, const cplx& zj) {
            const cplx* row = f.values.data() + static_cast<std::size_t>(j) * f.m;
            for (std::size_t k = 0; k < mm; ++k) srow[k] += zj * row[k];
        });
    }
    // B[i2][k] = e^{i(x2 omega_k + x3 omega_k^2)}
    std::vector<cplx> B(n2 * mm);
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
        cplx* brow = B.data() + i2 * mm;
        phase_scan(f.m, f.h, x2s[i2], x3, [&](int k, const cplx& z) { brow[static_cast<std::size_t>(k)] = z; });
    }
    std::vector<cplx> out(n1 * n2);
    const double scale = f.h * f.h;
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        const cplx* srow = S.data() + i1 * mm;
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            const cplx* brow = B.data() + i2 * mm;
            cplx acc{};
            for (std::size_t k = 0; k < mm; ++k) acc += srow[k] * brow[k];
            out[i1 * n2 + i2] = acc * scale;
        }
    }
    return out;
}

FieldSample field_on_ball(const FrequencyProfile& f, double R, double spacing,
                          const SampledWeight* where) {
    check_profile_shape(f.d, f.m);
    if (!(R >= 1.0)) throw precondition_error("field: R must be >= 1");
    if (!(spacing > 0.0)) throw precondition_error("field: spacing must be positive");
    if (f.d == 2 && R > 256.0) throw precondition_error("field: R capped at 256 for d = 2");
    if (f.d == 3 && R > 64.0) throw precondition_error("field: R capped at 64 for d = 3");
    check_rule(f, R);

    FieldSample out;
    out.d = f.d;
    out.R = R;
    out.spacing = spacing;
    out.quad_spacing = f.h;

    const long n = static_cast<long>(std::floor(R / spacing));
    std::vector<double> axis;
    for (long k = -n; k <= n; ++k) axis.push_back(static_cast<double>(k) * spacing);

    if (f.d == 2) {
        const double R2 = R * R;
        for (double a : axis) {
            for (double b : axis) {
                if (a * a + b * b > R2) continue;
                std::vector<double> x = {a, b};
                if (where && !(where->at(x) > 0.0)) continue;
                out.points.push_back(std::move(x));
            }
        }
        out.values = extend(f, out.points);
        return out;
    }

    const double R2 = R * R;
    for (double x3 : axis) {
        // Gather this plane's needed coordinates, then evaluate separably on
        // their product and keep only the requested points.
        std::vector<double> x1s, x2s;
        std::vector<std::pair<std::size_t, std::size_t>> keep;
        {
            std::vector<double> x(3);
            x[2] = x3;
            for (double a : axis) {
                for (double b : axis) {
                    if (a * a + b * b + x3 * x3 > R2) continue;
                    x[0] = a;
                    x[1] = b;
                    if (where && !(where->at(x) > 0.0)) continue;
                    const auto i1 = std::lower_bound(x1s.begin(), x1s.end(), a) - x1s.begin();
                    if (i1 == static_cast<long>(x1s.size()) || x1s[static_cast<std::size_t>(i1)] != a)
                        x1s.insert(x1s.begin() + i1, a);
                    const auto i2 = std::lower_bound(x2s.begin(), x2s.end(), b) - x2s.begin();
                    if (i2 == static_cast<long>(x2s.size()) || x2s[static_cast<std::size_t>(i2)] != b)
                        x2s.insert(x2s.begin() + i2, b);
                }
            }
            if (x1s.empty()) continue;
            for (double a : axis) {
                for (double b : axis) {
                    if (a * a + b * b + x3 * x3 > R2) continue;
                    x[0] = a;
                    x[1] = b;
                    if (where && !(where->at(x) > 0.0)) continue;
                    const std::size_t i1 = static_cast<std::size_t>(
                        std::lower_bound(x1s.begin(), x1s.end(), a) - x1s.begin());
                    const std::size_t i2 = static_cast<std::size_t>(
                        std::lower_bound(x2s.begin(), x2s.end(), b) - x2s.begin());
                    keep.emplace_back(i1, i2);
                    out.points.push_back({a, b, x3});
                }
            }
        }
        const auto plane = extend_plane3(f, x3, x1s, x2s);
        for (const auto& [i1, i2] : keep) out.values.push_back(plane[i1 * x2s.size() + i2]);
    }
    return out;
}

double weighted_norm(const FieldSample& field, const SampledWeight& H, double p) {
    if (!(p >= 1.0)) throw precondition_error("weighted_norm: p must be >= 1");
    if (!(field.spacing > 0.0)) throw precondition_error("weighted_norm: field must be on a grid");
    if (H.grid().d != field.d) throw precondition_error("weighted_norm: dimension mismatch");
    if (H.grid().h > field.spacing * (1.0 + 1e-9))
        throw precondition_error("weighted_norm: weight grid coarser than the field grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < field.points.size(); ++i) {
        const double w = H.at(field.points[i]);
        if (w > 0.0) acc += std::pow(std::abs(field.values[i]), p) * w;
    }
    return std::pow(acc * std::pow(field.spacing, field.d), 1.0 / p);
}

double unweighted_norm(const FieldSample& field, double p) {
    if (!(p >= 1.0)) throw precondition_error("unweighted_norm: p must be >= 1");
    if (!(field.spacing > 0.0)) throw precondition_error("unweighted_norm: field must be on a grid");
    double acc = 0.0;
    for (const auto& v : field.values) acc += std::pow(std::abs(v), p);
    return std::pow(acc * std::pow(field.spacing, field.d), 1.0 / p);
}

SphereProfile sample_sphere_profile(int d, int nodes, ClosedForm form) {
    if (!form) throw precondition_error("sphere profile: missing closed form");
    SphereProfile g;
    g.d = d;
    g.nodes = sphere_nodes(d, nodes);
    g.values.reserve(g.nodes.size());
    for (const auto& nd : g.nodes) g.values.push_back(form(nd.x));
    return g;
}

std::vector<cplx> extend_sphere(const SphereProfile& g,
                                const std::vector<std::vector<double>>& points) {
    if (g.nodes.empty() || g.nodes.size() != g.values.size())
        throw precondition_error("sphere profile: empty or inconsistent");
    double max_abs = 0.0;
    for (const auto& x : points) {
        if (x.size() != static_cast<std::size_t>(g.d))
            throw precondition_error("extend_sphere: point dimension mismatch");
        max_abs = std::max(max_abs, std::sqrt(norm2(x)));
    }
    if (g.d > 1 && static_cast<int>(g.nodes.size()) < spherical_node_count(max_abs, 2.0))
        throw precondition_error("extend_sphere: node count too small for these points");
    std::vector<cplx> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        cplx acc{};
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            double ph = 0.0;
            for (int c = 0; c < g.d; ++c)
                ph += points[i][static_cast<std::size_t>(c)] * g.nodes[k].x[static_cast<std::size_t>(c)];
            acc += g.nodes[k].w * g.values[k] * unit_phase(ph);
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> ParabolicMap::apply(const std::vector<double>& x) const {
    if (x.size() != omega0.size() + 1) throw precondition_error("map: dimension mismatch");
    std::vector<double> y(x.size());
    const double xd = x.back();
    for (std::size_t i = 0; i < omega0.size(); ++i) y[i] = (x[i] + 2.0 * xd * omega0[i]) / K;
    y.back() = xd / (K * K);
    return y;
}

std::vector<double> ParabolicMap::inverse(const std::vector<double>& y) const {
    if (y.size() != omega0.size() + 1) throw precondition_error("map: dimension mismatch");
    std::vector<double> x(y.size());
    const double xd = y.back() * K * K;
    for (std::size_t i = 0; i < omega0.size(); ++i) x[i] = K * y[i] - 2.0 * xd * omega0[i];
    x.back() = xd;
    return x;
}

double ParabolicMap::amplitude() const {
    return std::pow(K, -0.5 * static_cast<double>(omega0.size()));
}

RescaledProfile parabolic_rescale(const FrequencyProfile& f, std::vector<double> omega0, double K) {
    check_profile_shape(f.d, f.m);
    if (omega0.size() + 1 != static_cast<std::size_t>(f.d))
        throw precondition_error("rescale: cap center must have dimension d-1");
    if (!(K >= 2.0)) throw precondition_error("rescale: K must be >= 2");
    if (std::sqrt(norm2(omega0)) + 1.0 / K > 1.0 + 1e-12)
        throw precondition_error("rescale: cap B(omega0, 1/K) leaves the unit ball");
    if (!f.form) throw precondition_error("rescale: profile must carry its closed form");

    // The samples must confirm the declared support.
    double peak = 0.0;
    for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
    const double slack = 1.0 / K + 0.71 * f.h * (f.d - 1);
    if (f.d == 2) {
        for (int k = 0; k < f.m; ++k) {
            const double w = f.node(k) - omega0[0];
            if (std::abs(w) > slack && std::abs(f.values[static_cast<std::size_t>(k)]) > 1e-14 * peak)
                throw precondition_error("rescale: profile has mass outside B(omega0, 1/K)");
        }
    } else {
        std::size_t idx = 0;
        for (int j = 0; j < f.m; ++j)
            for (int k = 0; k < f.m; ++k, ++idx) {
                const double a = f.node(j) - omega0[0], b = f.node(k) - omega0[1];
                if (std::sqrt(a * a + b * b) > slack && std::abs(f.values[idx]) > 1e-14 * peak)
                    throw precondition_error("rescale: profile has mass outside B(omega0, 1/K)");
            }
    }

    RescaledProfile out;
    out.map.omega0 = omega0;
    out.map.K = K;
    const double amp = std::pow(K, -0.5 * static_cast<double>(f.d - 1));
    auto inner = f.form;
    out.g = sample_profile(f.d, f.m, [inner, omega0, K, amp](const std::vector<double>& xi) {
        std::vector<double> w(xi.size());
        for (std::size_t i = 0; i < xi.size(); ++i) w[i] = omega0[i] + xi[i] / K;
        return amp * inner(w);
    });
    return out;
}

ScalingResult scaling_experiment(const std::function<FrequencyProfile(double)>& f_for_R,
                                 const std::function<SampledWeight(double)>& H_for_R, double p,
                                 const Rational& alpha, const std::vector<double>& R_list,
                                 double x_spacing, double tolerance) {
    if (R_list.size() < 4) throw precondition_error("scaling: need at least 4 radii");
    for (std::size_t i = 2; i < R_list.size(); ++i) {
        const double q0 = R_list[1] / R_list[0], qi = R_list[i] / R_list[i - 1];
        if (std::abs(qi - q0) > 1e-9 * q0)
            throw precondition_error("scaling: R list must be geometric");
    }

    ScalingResult res;
    res.R = R_list;
    res.tolerance = tolerance;
    int d = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double R : R_list) {
        const FrequencyProfile f = f_for_R(R);
        d = f.d;
        const SampledWeight H = H_for_R(R);
        const FieldSample field = field_on_ball(f, R, x_spacing, &H);
        const double nrm = weighted_norm(field, H, p);
        if (!(nrm > 0.0)) throw precondition_error("scaling: weighted norm vanished");
        res.norm.push_back(nrm);
        const double x = std::log(R), y = std::log(nrm);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(R_list.size());
    res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    res.intercept = (sy * sxx - sx * sxy) / (n * sxx - sx * sx);

    if (p == 3.0 && d == 3)
        res.exponent = exponents::gamma0(3, alpha).to_double();
    else if (p == 2.0)
        res.exponent = exponents::linear_refinement_exponent(d, d, alpha).to_double();
    else
        throw precondition_error("scaling: no theorem exponent for this (d, p)");
    res.pass = res.slope <= res.exponent + res.tolerance;
    return res;
}

}  // namespace restlab
