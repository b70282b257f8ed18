#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "restlab/errors.hpp"
#include "restlab/experiment.hpp"

namespace {

void report(const restlab::ExperimentResult& res) {
    std::cout << "wrote " << res.csv_path << "\n";
    std::cout << "wrote " << res.json_path << "\n";
    if (!res.plot_path.empty()) std::cout << "wrote " << res.plot_path << "\n";
    std::size_t failed = 0;
    for (const auto& rec : res.records)
        if (!rec.pass) {
            if (failed < 8) std::cout << "fail at " << rec.point << "\n";
            ++failed;
        }
    if (res.pass)
        std::cout << "PASS (" << res.records.size() << " records)\n";
    else
        std::cout << "FAIL (" << failed << " of " << res.records.size() << " records)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for weighted restriction estimates"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, format;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* opt_config =
        app.add_option("--config", config_path, "JSON config file; explicit flags override it");
    auto* opt_out = app.add_option("--out", out_dir, "directory for artifacts (default .)");
    auto* opt_seed = app.add_option("--seed", seed, "RNG seed (default 1)");
    auto* opt_threads = app.add_option("--threads", threads, "worker count (must be >= 1)");
    auto* opt_format =
        app.add_option("--format", format, "table format: csv or json (default csv)");

    // exponents ------------------------------------------------------------
    auto* ex = app.add_subcommand("exponents", "exact decay/gamma exponent tables");
    ex->fallthrough();
    int ex_d = 0;
    std::string ex_alpha, ex_table;
    bool ex_compare = true, ex_recursion = false;
    auto* ex_opt_d = ex->add_option("--d", ex_d, "ambient dimension (>= 3)");
    auto* ex_opt_alpha = ex->add_option("--alpha", ex_alpha, "single alpha, rational or decimal");
    auto* ex_opt_table =
        ex->add_option("--table", ex_table, "alpha range start:end:step (rationals)");
    auto* ex_opt_cmp = ex->add_flag("--compare-prior,!--no-compare-prior", ex_compare,
                                    "judge strict improvement on alpha in (d/2, d)");
    auto* ex_opt_rec =
        ex->add_flag("--check-recursion", ex_recursion, "verify closed forms against recursion");

    // weights verify ---------------------------------------------------------
    auto* weights = app.add_subcommand("weights", "weight-function utilities");
    weights->require_subcommand(1);
    weights->fallthrough();
    auto* wv = weights->add_subcommand("verify", "check the ball-growth certificate of a weight");
    wv->fallthrough();
    std::string wv_file, wv_recipe;
    int wv_d = 0;
    double wv_alpha = 0, wv_R = 0, wv_h = 0, wv_constant = 0;
    std::vector<double> wv_radii;
    auto* wv_opt_file = wv->add_option("--file", wv_file, "weight grid file to load");
    auto* wv_opt_alpha = wv->add_option("--alpha", wv_alpha, "growth exponent to certify");
    auto* wv_opt_d = wv->add_option("--d", wv_d, "dimension (recipe mode)");
    auto* wv_opt_recipe =
        wv->add_option("--recipe", wv_recipe, "uniform[:value] | cantor:b,rho,n | point[:coords]");
    auto* wv_opt_R = wv->add_option("--R", wv_R, "half extent of the weight box (default 16)");
    auto* wv_opt_h = wv->add_option("--weight-h", wv_h, "grid spacing (default 0.25)");
    auto* wv_opt_c = wv->add_option("--constant", wv_constant, "certificate constant (default 4)");
    auto* wv_opt_radii =
        wv->add_option("--radii", wv_radii, "ball radii to probe")->delimiter(',');

    // decay ------------------------------------------------------------------
    auto* decay = app.add_subcommand("decay", "spherical-average decay of a fractal measure");
    decay->fallthrough();
    int dc_d = 0, dc_count = 0, dc_nodes = 0;
    std::string dc_recipe, dc_alpha;
    double dc_rmin = 0, dc_rmax = 0, dc_slack = 0;
    bool dc_plot = false;
    auto* dc_opt_d = decay->add_option("--d", dc_d, "ambient dimension");
    auto* dc_opt_recipe =
        decay->add_option("--recipe", dc_recipe, "point[:coords] | cantor:b,rho,n | plane-cantor:b,rho,n");
    auto* dc_opt_alpha =
        decay->add_option("--alpha-claimed", dc_alpha, "override the recipe's dimension");
    auto* dc_opt_rmin = decay->add_option("--rmin", dc_rmin, "smallest radius (default 4)");
    auto* dc_opt_rmax = decay->add_option("--rmax", dc_rmax, "largest radius (default 64)");
    auto* dc_opt_count = decay->add_option("--count", dc_count, "radii in the fit (default 12)");
    auto* dc_opt_nodes = decay->add_option("--quad-nodes", dc_nodes, "sphere quadrature nodes");
    auto* dc_opt_slack = decay->add_option("--slack", dc_slack, "fit tolerance (default 0.15)");
    auto* dc_opt_plot = decay->add_flag("--plot", dc_plot, "emit a log-log SVG");

    // extend-scaling -----------------------------------------------------------
    auto* sc = app.add_subcommand("extend-scaling", "weighted-norm growth against theorem slope");
    sc->fallthrough();
    int sc_d = 0;
    double sc_p = 0, sc_spacing = 0, sc_slack = 0, sc_h = 0;
    std::string sc_alpha, sc_weight, sc_f;
    std::vector<double> sc_R;
    bool sc_plot = false;
    auto* sc_opt_d = sc->add_option("--d", sc_d, "ambient dimension");
    auto* sc_opt_p = sc->add_option("--p", sc_p, "Lebesgue exponent (2 or 3)");
    auto* sc_opt_alpha = sc->add_option("--alpha", sc_alpha, "weight dimension, rational");
    auto* sc_opt_weight =
        sc->add_option("--weight", sc_weight, "uniform[:value] | cantor:b,rho,n | plane-cantor:b,rho,n");
    auto* sc_opt_f = sc->add_option("--f", sc_f, "profile: constant | bump:... | gaussian:... | random:deg");
    auto* sc_opt_R = sc->add_option("--R", sc_R, "radii, comma separated")->delimiter(',');
    auto* sc_opt_spacing = sc->add_option("--spacing", sc_spacing, "x sample spacing (default 0.5)");
    auto* sc_opt_slack = sc->add_option("--slack", sc_slack, "slope tolerance (default 0.15)");
    auto* sc_opt_h = sc->add_option("--weight-h", sc_h, "weight grid spacing (default 0.5)");
    auto* sc_opt_plot = sc->add_flag("--plot", sc_plot, "emit a log-log SVG");

    // wavepackets ---------------------------------------------------------------
    auto* wp = app.add_subcommand("wavepackets", "tile table, tangency split, broad norm");
    wp->fallthrough();
    int wp_d = 0, wp_K = 0, wp_A = 0;
    double wp_R = 0, wp_delta = 0, wp_E = 0, wp_p = 0, wp_spacing = 0;
    std::string wp_f, wp_variety;
    bool wp_broad = false;
    auto* wp_opt_d = wp->add_option("--d", wp_d, "ambient dimension (default 2)");
    auto* wp_opt_R = wp->add_option("--R", wp_R, "ball radius (default 64)");
    auto* wp_opt_delta = wp->add_option("--delta", wp_delta, "tile fattening exponent");
    auto* wp_opt_E = wp->add_option("--E", wp_E, "tangency margin (default 2)");
    auto* wp_opt_f = wp->add_option("--f", wp_f, "profile recipe (default random:5)");
    auto* wp_opt_variety =
        wp->add_option("--variety", wp_variety, "polynomials, ';' separated, for tangency tests");
    auto* wp_opt_broad = wp->add_flag("--broad", wp_broad, "also compute the broad norm");
    auto* wp_opt_K = wp->add_option("--K", wp_K, "angular parameter (default 4)");
    auto* wp_opt_A = wp->add_option("--A", wp_A, "prefix-cover depth (default 1)");
    auto* wp_opt_p = wp->add_option("--p", wp_p, "broad-norm exponent (default 3)");
    auto* wp_opt_spacing = wp->add_option("--spacing", wp_spacing, "x sample spacing");

    // plot -----------------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "render an artifact CSV as SVG");
    std::string plot_csv, plot_svg;
    plot->add_option("csv", plot_csv, "input table")->required();
    plot->add_option("svg", plot_svg, "output image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (plot->parsed()) {
            restlab::emit_plot(plot_csv, plot_svg);
            std::cout << "wrote " << plot_svg << "\n";
            return 0;
        }

        restlab::ExperimentConfig cfg;
        if (opt_config->count()) cfg = restlab::ExperimentConfig::from_file(config_path);
        if (opt_out->count()) cfg.out_dir = out_dir;
        if (opt_seed->count()) cfg.seed = seed;
        if (opt_threads->count()) cfg.threads = threads;
        if (opt_format->count()) cfg.format = format;

        auto& P = cfg.params;
        if (!P.is_object()) P = nlohmann::json::object();
        auto set = [&](const CLI::Option* opt, const char* key, const auto& value) {
            if (opt->count()) P[key] = value;
        };

        if (ex->parsed()) {
            cfg.kind = "exponents";
            set(ex_opt_d, "d", ex_d);
            set(ex_opt_alpha, "alpha", ex_alpha);
            set(ex_opt_table, "table", ex_table);
            set(ex_opt_cmp, "compare_prior", ex_compare);
            set(ex_opt_rec, "check_recursion", ex_recursion);
        } else if (weights->parsed()) {
            cfg.kind = "weights";
            set(wv_opt_file, "file", wv_file);
            set(wv_opt_alpha, "alpha", wv_alpha);
            set(wv_opt_d, "d", wv_d);
            set(wv_opt_recipe, "recipe", wv_recipe);
            set(wv_opt_R, "R", wv_R);
            set(wv_opt_h, "weight_h", wv_h);
            set(wv_opt_c, "constant", wv_constant);
            set(wv_opt_radii, "radii", wv_radii);
        } else if (decay->parsed()) {
            cfg.kind = "decay";
            set(dc_opt_d, "d", dc_d);
            set(dc_opt_recipe, "recipe", dc_recipe);
            set(dc_opt_alpha, "alpha_claimed", dc_alpha);
            set(dc_opt_rmin, "rmin", dc_rmin);
            set(dc_opt_rmax, "rmax", dc_rmax);
            set(dc_opt_count, "count", dc_count);
            set(dc_opt_nodes, "quad_nodes", dc_nodes);
            set(dc_opt_slack, "slack", dc_slack);
            set(dc_opt_plot, "plot", dc_plot);
        } else if (sc->parsed()) {
            cfg.kind = "extend-scaling";
            set(sc_opt_d, "d", sc_d);
            set(sc_opt_p, "p", sc_p);
            set(sc_opt_alpha, "alpha", sc_alpha);
            set(sc_opt_weight, "weight", sc_weight);
            set(sc_opt_f, "f", sc_f);
            set(sc_opt_R, "R", sc_R);
            set(sc_opt_spacing, "spacing", sc_spacing);
            set(sc_opt_slack, "slack", sc_slack);
            set(sc_opt_h, "weight_h", sc_h);
            set(sc_opt_plot, "plot", sc_plot);
        } else if (wp->parsed()) {
            cfg.kind = "wavepackets";
            set(wp_opt_d, "d", wp_d);
            set(wp_opt_R, "R", wp_R);
            set(wp_opt_delta, "delta", wp_delta);
            set(wp_opt_E, "E", wp_E);
            set(wp_opt_f, "f", wp_f);
            set(wp_opt_variety, "variety", wp_variety);
            set(wp_opt_broad, "broad", wp_broad);
            set(wp_opt_K, "K", wp_K);
            set(wp_opt_A, "A", wp_A);
            set(wp_opt_p, "p", wp_p);
            set(wp_opt_spacing, "spacing", wp_spacing);
        } else if (cfg.kind.empty()) {
            std::cerr << app.help() << "\n";
            std::cerr << "error: no experiment selected (subcommand or --config with a kind)\n";
            return 2;
        }

        auto res = restlab::run(cfg);
        report(res);
        return res.pass ? 0 : 1;
    } catch (const restlab::usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const restlab::precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
