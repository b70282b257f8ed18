#include "restlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "restlab/errors.hpp"
#include "restlab/exponents.hpp"
#include "restlab/extension.hpp"
#include "restlab/fractal.hpp"
#include "restlab/rational.hpp"
#include "restlab/wavepackets.hpp"
#include "restlab/weights.hpp"

namespace restlab {

namespace {

using nlohmann::json;

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw usage_error(what + ": trailing characters in '" + s + "'");
        return v;
    } catch (const usage_error&) {
        throw;
    } catch (const std::exception&) {
        throw usage_error(what + ": cannot parse number '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& what) {
    double v = to_number(s, what);
    if (v != std::floor(v)) throw usage_error(what + ": expected an integer, got '" + s + "'");
    return static_cast<int>(v);
}

const json& require(const json& params, const std::string& key) {
    if (!params.contains(key)) throw usage_error("config: missing parameter '" + key + "'");
    return params.at(key);
}

int int_param(const json& params, const std::string& key) {
    const json& v = require(params, key);
    if (!v.is_number_integer()) throw usage_error("config: '" + key + "' must be an integer");
    return v.get<int>();
}

int int_param_or(const json& params, const std::string& key, int dflt) {
    return params.contains(key) ? int_param(params, key) : dflt;
}

double num_param(const json& params, const std::string& key) {
    const json& v = require(params, key);
    if (!v.is_number()) throw usage_error("config: '" + key + "' must be a number");
    return v.get<double>();
}

double num_param_or(const json& params, const std::string& key, double dflt) {
    return params.contains(key) ? num_param(params, key) : dflt;
}

std::string str_param(const json& params, const std::string& key) {
    const json& v = require(params, key);
    if (!v.is_string()) throw usage_error("config: '" + key + "' must be a string");
    return v.get<std::string>();
}

std::string str_param_or(const json& params, const std::string& key, const std::string& dflt) {
    return params.contains(key) ? str_param(params, key) : dflt;
}

bool bool_param_or(const json& params, const std::string& key, bool dflt) {
    if (!params.contains(key)) return dflt;
    const json& v = params.at(key);
    if (!v.is_boolean()) throw usage_error("config: '" + key + "' must be a boolean");
    return v.get<bool>();
}

// Rationals arrive as strings ("4/3", "1.25") or plain JSON numbers.
Rational rational_param(const json& params, const std::string& key) {
    const json& v = require(params, key);
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number()) return Rational::parse(format_double(v.get<double>()));
    throw usage_error("config: '" + key + "' must be a rational string or number");
}

std::string cell(const Rational& r) { return r.decimal(12); }

// ---------------------------------------------------------------- recipes

FractalMeasure measure_from_recipe(int d, const std::string& spec) {
    auto parts = split(spec, ':');
    const std::string& name = parts[0];
    auto args = parts.size() > 1 ? split(parts[1], ',') : std::vector<std::string>{};
    if (name == "point") {
        std::vector<double> where;
        for (const auto& a : args) where.push_back(to_number(a, "recipe point"));
        if (!where.empty() && static_cast<int>(where.size()) != d)
            throw usage_error("recipe point: expected " + std::to_string(d) + " coordinates");
        return point_mass(d, where);
    }
    if (name == "cantor") {
        if (args.size() != 3) throw usage_error("recipe cantor: expected branches,ratio,depth");
        return cantor_measure(d, to_int(args[0], "cantor branches"),
                              to_number(args[1], "cantor ratio"), to_int(args[2], "cantor depth"));
    }
    if (name == "plane-cantor") {
        if (args.size() != 3)
            throw usage_error("recipe plane-cantor: expected branches,ratio,depth");
        if (d < 3) throw usage_error("recipe plane-cantor: needs d >= 3");
        AxisRecipe planar{to_int(args[0], "plane-cantor branches"),
                          to_number(args[1], "plane-cantor ratio"),
                          to_int(args[2], "plane-cantor depth")};
        std::vector<AxisRecipe> axes(static_cast<std::size_t>(d - 1), planar);
        axes.push_back(AxisRecipe{1, 0.5, 0});  // last axis collapses to a point
        return product_cantor_measure(axes);
    }
    throw usage_error("unknown measure recipe '" + name + "'");
}

SampledWeight weight_from_recipe(int d, const std::string& spec, double R, double h) {
    auto parts = split(spec, ':');
    const std::string& name = parts[0];
    auto args = parts.size() > 1 ? split(parts[1], ',') : std::vector<std::string>{};
    if (name == "uniform") {
        double value = args.empty() ? 1.0 : to_number(args[0], "uniform value");
        return SampledWeight::uniform(d, R, h, value);
    }
    return weight_from_measure(measure_from_recipe(d, spec), R, {}, h);
}

int grid_for_radius(double R) {
    int m = 8;
    while (m < 8.0 * R) m *= 2;  // phase-resolution rule h <= 1/(4R)
    return m;
}

FrequencyProfile profile_from_recipe(int d, const std::string& spec, int m,
                                     std::uint64_t seed) {
    auto parts = split(spec, ':');
    const std::string& name = parts[0];
    auto args = parts.size() > 1 ? split(parts[1], ',') : std::vector<std::string>{};
    auto center_of = [&](std::size_t extra) {
        if (args.size() != static_cast<std::size_t>(d - 1) + extra)
            throw usage_error("recipe " + name + ": expected " + std::to_string(d - 1) +
                              " center coordinates plus width");
        std::vector<double> c;
        for (int i = 0; i < d - 1; ++i) c.push_back(to_number(args[static_cast<std::size_t>(i)], name));
        return c;
    };
    if (name == "constant") return profile_constant(d, m);
    if (name == "bump") return profile_bump(d, m, center_of(1), to_number(args.back(), "bump radius"));
    if (name == "gaussian")
        return profile_gaussian(d, m, center_of(1), to_number(args.back(), "gaussian width"));
    if (name == "random") {
        int degree = args.empty() ? 3 : to_int(args[0], "random degree");
        return profile_random(d, m, seed, degree);
    }
    throw usage_error("unknown profile recipe '" + name + "'");
}

// ---------------------------------------------------------------- writers

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw precondition_error("cannot open '" + path + "' for writing");
    out << body;
}

std::string csv_text(const ExperimentResult& res) {
    std::string body;
    for (std::size_t i = 0; i < res.header.size(); ++i) {
        if (i) body += ',';
        body += res.header[i];
    }
    body += '\n';
    for (const auto& row : res.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) body += ',';
            body += row[i];
        }
        body += '\n';
    }
    return body;
}

// ---------------------------------------------------------------- exponents

void run_exponents(const ExperimentConfig& cfg, ExperimentResult& res) {
    namespace ex = restlab::exponents;
    const json& P = cfg.params;
    int d = int_param(P, "d");
    if (d < 3 || d > ex::kMaxDimension)
        throw precondition_error("exponents: d outside [3, " + std::to_string(ex::kMaxDimension) + "]");
    bool compare = bool_param_or(P, "compare_prior", true);
    bool recursion = bool_param_or(P, "check_recursion", false);

    std::vector<Rational> alphas;
    if (P.contains("alpha")) {
        alphas.push_back(rational_param(P, "alpha"));
    } else if (P.contains("table")) {
        auto parts = split(str_param(P, "table"), ':');
        if (parts.size() != 3) throw usage_error("exponents: table must be start:end:step");
        Rational a = Rational::parse(parts[0]);
        Rational end = Rational::parse(parts[1]);
        Rational step = Rational::parse(parts[2]);
        if (!(Rational(0) < step)) throw usage_error("exponents: table step must be positive");
        for (; a <= end; a = a + step) alphas.push_back(a);
    } else {
        throw usage_error("exponents: need 'alpha' or 'table'");
    }

    res.header = {"d",          "alpha",      "beta_lower",      "gamma0",
                  "gamma_broad", "mattila_ok", "best_prior",      "strictly_better",
                  "alpha_pq",   "beta_lower_pq"};
    if (recursion) res.header.push_back("recursion_ok");

    Rational half_d(d, 2);
    Rational dim(d);
    json failures = json::array();
    for (const auto& a : alphas) {
        if (!(Rational(0) < a && a <= dim)) continue;  // outside the curve domain
        double t0 = now_s();
        auto cmp = ex::compare_bounds(d, a);
        Rational g0 = ex::gamma0(d, a);
        bool rec_ok = true;
        if (recursion)
            for (int m = 3; m <= d; ++m)
                rec_ok = rec_ok && ex::gamma_closed(d, a, m) == ex::gamma_recursion(d, a, m);

        std::vector<std::string> row = {
            std::to_string(d),
            cell(a),
            cell(cmp.beta),
            cell(g0),
            d >= 4 ? cell(ex::gamma_broad(d, a)) : std::string(),
            cmp.mattila_ok ? "1" : "0",
            cmp.best_prior ? cell(*cmp.best_prior) : std::string(),
            cmp.strictly_better ? "1" : "0",
            a.str(),
            cmp.beta.str(),
        };
        if (recursion) row.push_back(rec_ok ? "1" : "0");
        res.rows.push_back(std::move(row));

        // the improvement claim covers alpha in (d/2, d) only
        bool claimed = compare && half_d < a && a < dim && cmp.best_prior;
        ExperimentRecord rec;
        rec.point = "alpha=" + a.str();
        rec.value = cmp.beta.to_double();
        rec.bound = cmp.best_prior ? cmp.best_prior->to_double() : 0.0;
        rec.pass = (!claimed || cmp.strictly_better) && rec_ok;
        rec.wall_s = now_s() - t0;
        if (!rec.pass) failures.push_back(rec.point);
        res.records.push_back(std::move(rec));
    }
    if (res.rows.empty()) throw usage_error("exponents: no alpha in (0, d]");
    res.summary["d"] = d;
    res.summary["rows"] = res.rows.size();
    res.summary["failures"] = failures;
}

// ---------------------------------------------------------------- weights

void run_weights(const ExperimentConfig& cfg, ExperimentResult& res) {
    const json& P = cfg.params;
    double constant = num_param_or(P, "constant", 4.0);
    std::vector<double> radii = {2.0, 4.0, 8.0};  // default respects h <= r_min / 8
    if (P.contains("radii")) {
        radii.clear();
        for (const auto& r : require(P, "radii")) radii.push_back(r.get<double>());
    }

    double alpha = 0.0;
    SampledWeight H = [&]() -> SampledWeight {
        if (P.contains("file")) {
            alpha = num_param(P, "alpha");
            return read_weight_file(str_param(P, "file"), alpha);
        }
        int d = int_param(P, "d");
        std::string recipe = str_param(P, "recipe");
        double R = num_param_or(P, "R", 16.0);
        double h = num_param_or(P, "weight_h", 0.25);
        auto parts = split(recipe, ':');
        if (parts[0] == "uniform") {
            alpha = num_param_or(P, "alpha", static_cast<double>(d));
            double value = parts.size() > 1 ? to_number(split(parts[1], ',')[0], "uniform value") : 1.0;
            return SampledWeight::uniform(d, R, h, value);
        }
        auto mu = measure_from_recipe(d, recipe);
        alpha = num_param_or(P, "alpha", mu.claimed_alpha);
        return weight_from_measure(mu, R, {}, h);
    }();

    double t0 = now_s();
    auto cert = verify_weight(H, alpha, constant, radii);
    double t1 = now_s();

    res.header = {"alpha", "constant", "worst_ratio", "worst_radius", "evaluations", "pass"};
    res.rows.push_back({format_double(cert.alpha), format_double(cert.constant),
                        format_double(cert.worst_ratio), format_double(cert.worst_radius),
                        std::to_string(cert.evaluations), cert.pass ? "1" : "0"});

    ExperimentRecord rec;
    rec.point = "alpha=" + format_double(alpha);
    rec.value = cert.worst_ratio;
    rec.bound = cert.constant;
    rec.pass = cert.pass;
    rec.wall_s = t1 - t0;
    res.records.push_back(rec);

    res.summary["certificate"] = {
        {"alpha", cert.alpha},           {"constant", cert.constant},
        {"worst_ratio", cert.worst_ratio}, {"worst_radius", cert.worst_radius},
        {"worst_center", cert.worst_center}, {"evaluations", cert.evaluations},
        {"pass", cert.pass},
    };
    res.summary["failures"] = cert.pass ? json::array() : json::array({rec.point});
}

// ---------------------------------------------------------------- decay

void run_decay(const ExperimentConfig& cfg, ExperimentResult& res) {
    const json& P = cfg.params;
    int d = int_param(P, "d");
    std::string recipe = str_param(P, "recipe");
    auto mu = measure_from_recipe(d, recipe);
    bool point = split(recipe, ':')[0] == "point";

    double rmin = num_param_or(P, "rmin", 4.0);
    double rmax = num_param_or(P, "rmax", 64.0);
    int count = int_param_or(P, "count", 12);
    int nodes = int_param_or(P, "quad_nodes", 0);
    double slack = num_param_or(P, "slack", 0.15);

    double t0 = now_s();
    auto fit = decay_fit(mu, rmin, rmax, count, nodes);
    double t1 = now_s();

    double bound_beta = 0.0;
    if (!point) {
        Rational alpha = P.contains("alpha_claimed")
                             ? rational_param(P, "alpha_claimed")
                             : Rational::parse(format_double(mu.claimed_alpha));
        bound_beta = d == 2 ? restlab::exponents::beta2(alpha).to_double()
                            : restlab::exponents::beta_lower(d, alpha).to_double();
        res.summary["alpha"] = alpha.str();
    }
    bool pass = point ? std::abs(fit.fitted_beta) <= 1e-6 : fit.fitted_beta >= bound_beta - slack;

    res.header = {"R", "average", "log_R", "log_average"};
    for (std::size_t i = 0; i < fit.R.size(); ++i) {
        res.rows.push_back({format_double(fit.R[i]), format_double(fit.average[i]),
                            format_double(std::log(fit.R[i])),
                            format_double(std::log(fit.average[i]))});
        ExperimentRecord rec;
        rec.point = "R=" + format_double(fit.R[i]);
        rec.value = fit.average[i];
        rec.pass = true;
        res.records.push_back(rec);
    }
    ExperimentRecord verdict;
    verdict.point = "fit";
    verdict.value = fit.fitted_beta;
    verdict.bound = bound_beta;
    verdict.pass = pass;
    verdict.wall_s = t1 - t0;
    res.records.push_back(verdict);

    res.summary["fitted_beta"] = fit.fitted_beta;
    res.summary["bound_beta"] = bound_beta;
    res.summary["residual"] = fit.residual;
    res.summary["pass"] = pass;
    res.summary["failures"] = pass ? json::array() : json::array({"fit"});
    if (bool_param_or(P, "plot", false)) res.plot_path = "decay.svg";
}

// ---------------------------------------------------------------- scaling

void run_scaling(const ExperimentConfig& cfg, ExperimentResult& res) {
    const json& P = cfg.params;
    int d = int_param(P, "d");
    double p = num_param(P, "p");
    Rational alpha = rational_param(P, "alpha");
    std::string wrecipe = str_param(P, "weight");
    std::string frecipe = str_param_or(P, "f", "constant");
    double spacing = num_param_or(P, "spacing", 0.5);
    double slack = num_param_or(P, "slack", 0.15);
    double wh = num_param_or(P, "weight_h", 0.5);

    std::vector<double> R_list;
    if (require(P, "R").is_array()) {
        for (const auto& r : P.at("R")) R_list.push_back(r.get<double>());
    } else {
        for (const auto& s : split(str_param(P, "R"), ','))
            R_list.push_back(to_number(s, "R list"));
    }

    double t0 = now_s();
    auto result = scaling_experiment(
        [&](double R) { return profile_from_recipe(d, frecipe, grid_for_radius(R), cfg.seed); },
        [&](double R) { return weight_from_recipe(d, wrecipe, R, wh); }, p, alpha, R_list, spacing,
        slack);
    double t1 = now_s();

    res.header = {"R", "norm", "log_R", "log_norm"};
    for (std::size_t i = 0; i < result.R.size(); ++i) {
        res.rows.push_back({format_double(result.R[i]), format_double(result.norm[i]),
                            format_double(std::log(result.R[i])),
                            format_double(std::log(result.norm[i]))});
        ExperimentRecord rec;
        rec.point = "R=" + format_double(result.R[i]);
        rec.value = result.norm[i];
        rec.pass = true;
        res.records.push_back(rec);
    }
    ExperimentRecord verdict;
    verdict.point = "fit";
    verdict.value = result.slope;
    verdict.bound = result.exponent + result.tolerance;
    verdict.pass = result.pass;
    verdict.wall_s = t1 - t0;
    res.records.push_back(verdict);

    res.summary["slope"] = result.slope;
    res.summary["intercept"] = result.intercept;
    res.summary["exponent"] = result.exponent;
    res.summary["tolerance"] = result.tolerance;
    res.summary["pass"] = result.pass;
    res.summary["failures"] = result.pass ? json::array() : json::array({"fit"});
    if (bool_param_or(P, "plot", false)) res.plot_path = "extend-scaling.svg";
}

// ---------------------------------------------------------------- packets

void run_wavepackets(const ExperimentConfig& cfg, ExperimentResult& res) {
    const json& P = cfg.params;
    int d = int_param_or(P, "d", 2);
    double R = num_param_or(P, "R", 64.0);
    double delta = num_param_or(P, "delta", 0.05);
    double E = num_param_or(P, "E", 2.0);
    std::string frecipe = str_param_or(P, "f", "random:5");

    auto f = profile_from_recipe(d, frecipe, grid_for_radius(R), cfg.seed);
    auto dec = decompose(f, R, delta);

    bool have_variety = P.contains("variety");
    Variety Z;
    if (have_variety) {
        std::vector<std::string> specs;
        for (const auto& s : split(str_param(P, "variety"), ';'))
            if (!s.empty()) specs.push_back(s);
        Z = make_variety(d, specs);
    }

    res.header = {"tile", "theta", "nu", "mass", "tangent"};
    json tiles = json::array();
    for (std::size_t i = 0; i < dec.packets.size(); ++i) {
        const auto& pk = dec.packets[i];
        std::string theta, nu;
        for (std::size_t a = 0; a < pk.tile.theta.size(); ++a) {
            if (a) {
                theta += '|';
                nu += '|';
            }
            theta += std::to_string(pk.tile.theta[a]);
            nu += std::to_string(pk.tile.nu_index[a]);
        }
        std::string verdict;
        if (have_variety) {
            auto t = tangency_test(tube_of(pk.tile), Z, E);
            verdict = t.verdict == Tangency::Tangent        ? "tangent"
                      : t.verdict == Tangency::NotTangent   ? "transverse"
                                                            : "inconclusive";
        }
        res.rows.push_back(
            {std::to_string(i), theta, nu, format_double(pk.mass), verdict});
        tiles.push_back({{"tile", i}, {"theta", pk.tile.theta}, {"nu", pk.tile.nu_index},
                         {"mass", pk.mass}, {"tangent", verdict}});
        ExperimentRecord rec;
        rec.point = "tile=" + std::to_string(i);
        rec.value = pk.mass;
        rec.pass = true;
        res.records.push_back(rec);
    }
    res.summary["tiles"] = tiles;
    res.summary["dropped_count"] = dec.dropped_count;
    res.summary["dropped_mass"] = dec.dropped_mass;

    if (have_variety) {
        auto conc = concentration_test(dec, Z, E);
        res.summary["concentration"] = {
            {"mass_tangent", conc.mass_tangent},
            {"mass_transverse", conc.mass_transverse},
            {"mass_inconclusive", conc.mass_inconclusive},
            {"tiles_tangent", conc.tiles_tangent},
            {"tiles_transverse", conc.tiles_transverse},
            {"tiles_inconclusive", conc.tiles_inconclusive},
        };
    }

    if (bool_param_or(P, "broad", false)) {
        BroadParams bp;
        bp.K = int_param_or(P, "K", 4);
        bp.A = int_param_or(P, "A", 1);
        bp.p = num_param_or(P, "p", 3.0);
        auto H = SampledWeight::uniform(d, R, 1.0, 1.0);
        auto b = broad_norm(f, R, bp, H, num_param_or(P, "spacing", 1.0));
        res.summary["broad"] = {{"value", b.value},
                                {"balls", b.balls},
                                {"net_size", b.net_size},
                                {"caps", b.caps},
                                {"K", bp.K},
                                {"A", bp.A},
                                {"p", bp.p}};
    }
    res.summary["failures"] = json::array();
}

// ---------------------------------------------------------------- plots

struct Series {
    std::vector<double> x, y;
};

std::string svg_header(double w, double h) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "viewBox=\"0 0 %g %g\">\n",
                  w, h, w, h);
    return buf;
}

std::string svg_line(double x1, double y1, double x2, double y2, const char* style) {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.6g\" y1=\"%.6g\" x2=\"%.6g\" y2=\"%.6g\" style=\"%s\"/>\n", x1, y1,
                  x2, y2, style);
    return buf;
}

std::string svg_circle(double x, double y, double r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.6g\" cy=\"%.6g\" r=\"%.6g\" fill=\"#205080\"/>\n",
                  x, y, r);
    return buf;
}

std::string svg_text(double x, double y, const std::string& body, const char* anchor = "start") {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.6g\" y=\"%.6g\" font-family=\"monospace\" font-size=\"12\" "
                  "text-anchor=\"%s\">%s</text>\n",
                  x, y, anchor, body.c_str());
    return buf;
}

// Maps data coordinates onto the fixed canvas.
struct Frame {
    double x0, x1, y0, y1;
    static constexpr double W = 640, H = 440, M = 64;
    double px(double x) const { return M + (x - x0) / (x1 - x0) * (W - 2 * M); }
    double py(double y) const { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); }
};

Frame frame_of(const Series& s) {
    Frame fr{};
    fr.x0 = *std::min_element(s.x.begin(), s.x.end());
    fr.x1 = *std::max_element(s.x.begin(), s.x.end());
    fr.y0 = *std::min_element(s.y.begin(), s.y.end());
    fr.y1 = *std::max_element(s.y.begin(), s.y.end());
    auto widen = [](double& a, double& b) {
        double w = b - a;
        if (w <= 0.0) w = std::max(1.0, std::abs(a));
        a -= 0.08 * w;
        b += 0.08 * w;
    };
    widen(fr.x0, fr.x1);
    widen(fr.y0, fr.y1);
    return fr;
}

std::string svg_axes(const Frame& fr, const std::string& xlab, const std::string& ylab) {
    std::string out;
    const char* ax = "stroke:#222;stroke-width:1";
    out += svg_line(Frame::M, Frame::H - Frame::M, Frame::W - Frame::M, Frame::H - Frame::M, ax);
    out += svg_line(Frame::M, Frame::M, Frame::M, Frame::H - Frame::M, ax);
    char lo[64], hi[64];
    std::snprintf(lo, sizeof lo, "%.6g", fr.x0);
    std::snprintf(hi, sizeof hi, "%.6g", fr.x1);
    out += svg_text(Frame::M, Frame::H - Frame::M + 16, lo);
    out += svg_text(Frame::W - Frame::M, Frame::H - Frame::M + 16, hi, "end");
    std::snprintf(lo, sizeof lo, "%.6g", fr.y0);
    std::snprintf(hi, sizeof hi, "%.6g", fr.y1);
    out += svg_text(Frame::M - 6, Frame::H - Frame::M, lo, "end");
    out += svg_text(Frame::M - 6, Frame::M + 10, hi, "end");
    out += svg_text(Frame::W / 2, Frame::H - 20, xlab, "middle");
    out += svg_text(20, Frame::H / 2, ylab, "middle");
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

Table read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("plot: cannot read '" + path + "'");
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (t.header.empty())
            t.header = cells;
        else
            t.rows.push_back(cells);
    }
    if (t.header.empty()) throw usage_error("plot: '" + path + "' is empty");
    if (t.rows.empty()) throw usage_error("plot: '" + path + "' has a header but no rows");
    return t;
}

std::string plot_loglog(const Table& t, int xc, int yc, const std::string& xlab,
                        const std::string& ylab) {
    Series s;
    for (const auto& row : t.rows) {
        s.x.push_back(to_number(row[static_cast<std::size_t>(xc)], "plot x"));
        s.y.push_back(to_number(row[static_cast<std::size_t>(yc)], "plot y"));
    }
    // least-squares refit; must agree with the pipeline's summary
    double n = static_cast<double>(s.x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        sx += s.x[i];
        sy += s.y[i];
        sxx += s.x[i] * s.x[i];
        sxy += s.x[i] * s.y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw usage_error("plot: degenerate abscissae");
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy * sxx - sx * sxy) / denom;

    Frame fr = frame_of(s);
    std::string out = svg_header(Frame::W, Frame::H);
    out += svg_axes(fr, xlab, ylab);
    for (std::size_t i = 0; i < s.x.size(); ++i) out += svg_circle(fr.px(s.x[i]), fr.py(s.y[i]), 3);
    out += svg_line(fr.px(fr.x0), fr.py(slope * fr.x0 + intercept), fr.px(fr.x1),
                    fr.py(slope * fr.x1 + intercept), "stroke:#b04030;stroke-width:1.5");
    out += svg_text(Frame::W - Frame::M, Frame::M + 10, "slope " + format_double(slope), "end");
    out += "</svg>\n";
    return out;
}

std::string plot_exponent_curve(const Table& t, int dc, int ac, int bc) {
    int d = to_int(t.rows.front()[static_cast<std::size_t>(dc)], "plot d");
    Series s;
    for (const auto& row : t.rows) {
        s.x.push_back(to_number(row[static_cast<std::size_t>(ac)], "plot alpha"));
        s.y.push_back(to_number(row[static_cast<std::size_t>(bc)], "plot beta"));
    }
    Frame fr = frame_of(s);
    std::string out = svg_header(Frame::W, Frame::H);
    out += svg_axes(fr, "alpha", "beta");
    // breakpoints of the exact curve as labeled markers
    auto curve = restlab::exponents::beta_lower_curve(d);
    for (const auto& b : curve.breakpoints()) {
        double x = fr.px(b.to_double());
        out += svg_line(x, Frame::M, x, Frame::H - Frame::M,
                        "stroke:#888;stroke-width:1;stroke-dasharray:4 3");
        out += svg_text(x, Frame::M - 6, b.str(), "middle");
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.6g,%.6g", i ? " " : "", fr.px(s.x[i]), fr.py(s.y[i]));
        pts += buf;
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" style=\"stroke:#205080;stroke-width:1.5\"/>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kinds = {"exponents", "weights", "decay", "extend-scaling",
                                               "wavepackets"};
    if (!kinds.count(kind)) throw usage_error("config: unknown experiment kind '" + kind + "'");
    if (format != "csv" && format != "json")
        throw usage_error("config: format must be csv or json");
    if (threads < 1) throw usage_error("config: threads must be >= 1");
    if (!params.is_object()) throw usage_error("config: params must be an object");
}

nlohmann::json ExperimentConfig::echo() const {
    return {{"kind", kind},       {"params", params}, {"out", out_dir},
            {"seed", seed},       {"threads", threads}, {"format", format}};
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("config: cannot read '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw usage_error("config: '" + path + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig cfg;
    if (j.contains("kind")) cfg.kind = j.at("kind").get<std::string>();
    if (j.contains("params")) cfg.params = j.at("params");
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    return cfg;
}

ExperimentResult run(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    res.summary = json::object();

    if (cfg.kind == "exponents")
        run_exponents(cfg, res);
    else if (cfg.kind == "weights")
        run_weights(cfg, res);
    else if (cfg.kind == "decay")
        run_decay(cfg, res);
    else if (cfg.kind == "extend-scaling")
        run_scaling(cfg, res);
    else
        run_wavepackets(cfg, res);

    res.pass = true;
    for (const auto& rec : res.records) res.pass = res.pass && rec.pass;
    res.summary["artifact_version"] = 1;
    res.summary["config_echo"] = cfg.echo();
    res.summary["pass"] = res.pass;
    if (!res.summary.contains("failures")) res.summary["failures"] = json::array();
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto& row : res.rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < res.header.size() && i < row.size(); ++i)
                obj[res.header[i]] = row[i];
            rows.push_back(std::move(obj));
        }
        res.summary["rows"] = std::move(rows);
    }

    std::filesystem::create_directories(cfg.out_dir);
    res.csv_path = cfg.out_dir + "/" + cfg.kind + ".csv";
    res.json_path = cfg.out_dir + "/" + cfg.kind + ".json";
    write_text(res.csv_path, csv_text(res));
    write_text(res.json_path, res.summary.dump(2) + "\n");
    if (!res.plot_path.empty()) {
        res.plot_path = cfg.out_dir + "/" + res.plot_path;
        emit_plot(res.csv_path, res.plot_path);
    }
    return res;
}

void emit_plot(const std::string& csv_path, const std::string& svg_path) {
    Table t = read_csv(csv_path);
    std::string body;
    if (t.col("log_R") >= 0 && t.col("log_average") >= 0)
        body = plot_loglog(t, t.col("log_R"), t.col("log_average"), "log R", "log average");
    else if (t.col("log_R") >= 0 && t.col("log_norm") >= 0)
        body = plot_loglog(t, t.col("log_R"), t.col("log_norm"), "log R", "log norm");
    else if (t.col("d") >= 0 && t.col("alpha") >= 0 && t.col("beta_lower") >= 0)
        body = plot_exponent_curve(t, t.col("d"), t.col("alpha"), t.col("beta_lower"));
    else
        throw usage_error("plot: unrecognized column set in '" + csv_path + "'");
    write_text(svg_path, body);
}

}  // namespace restlab
