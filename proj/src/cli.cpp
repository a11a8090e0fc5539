#include "switchkit/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "switchkit/distributions.hpp"
#include "switchkit/divisibility.hpp"
#include "switchkit/dsl.hpp"
#include "switchkit/errors.hpp"
#include "switchkit/iia.hpp"
#include "switchkit/relations.hpp"
#include "switchkit/simulation.hpp"
#include "switchkit/svg.hpp"

namespace switchkit::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string verb;
    std::string dist;
    double t_end = 5.0;
    double h = 1e-3;
    double horizon = 10.0;
    std::uint64_t seed = 1;
    std::size_t n_paths = 10000;
    unsigned workers = 1;
    double series_tol = 1e-6;
    int talbot_nodes = 32;
    int cm_max_order = 6;
    double cm_tol = 1e-7;
    double r = 2.0;
    double mu = 0.0;
    bool stationary = false;
    std::string what = "expected";
    std::string from = "covariance";
    std::string input;
    std::string covariance_source;
    std::string out;
    std::string out_cdf;
    std::string out_pdf;
    std::string plot;
};

GridSpec grid_of(const RunConfig& cfg) {
    GridSpec g{cfg.t_end, cfg.h};
    g.validate();
    return g;
}

SwitchingDistribution dist_of(const RunConfig& cfg) {
    if (cfg.dist.empty()) throw std::invalid_argument("--dist is required for " + cfg.verb);
    return parse_distribution(cfg.dist, cfg.talbot_nodes);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open for writing: " + path);
    return f;
}

// Writes to --out when given, otherwise to stdout (the summary then moves to stderr).
template <class Fn>
void emit_csv(const RunConfig& cfg, std::ostream& stdout_sink, bool& csv_on_stdout, Fn&& write) {
    if (cfg.out.empty()) {
        write(stdout_sink);
        csv_on_stdout = true;
        return;
    }
    auto f = open_out(cfg.out);
    write(f);
}

std::vector<double> times(const GridFunction& g) {
    std::vector<double> t(g.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.time(i);
    return t;
}

std::vector<double> vals(const GridFunction& g) { return {g.values().begin(), g.values().end()}; }

json verb_simulate(const RunConfig& cfg, std::ostream& sink, bool& csv_on_stdout) {
    const SwitchingDistribution dist = dist_of(cfg);
    json summary{{"verb", cfg.verb}, {"dist", dist.describe()}, {"seed", cfg.seed}, {"horizon", cfg.horizon}};
    RandomStream rng(cfg.seed);
    if (cfg.stationary) {
        const StationaryPath path = simulate_stationary(dist, cfg.horizon, rng);
        summary["stationary"] = true;
        summary["a"] = path.initial.a;
        summary["b"] = path.initial.b;
        summary["delta"] = path.initial.delta;
        summary["forward_epochs"] = path.forward.epochs.size();
        summary["backward_epochs"] = path.backward.epochs.size();
        emit_csv(cfg, sink, csv_on_stdout, [&](std::ostream& f) {
            char buf[64];
            f << "branch,index,epoch\n";
            for (std::size_t i = 0; i < path.forward.epochs.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17e", path.forward.epochs[i]);
                f << "forward," << i << ',' << buf << '\n';
            }
            for (std::size_t i = 0; i < path.backward.epochs.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17e", -path.backward.epochs[i]);
                f << "backward," << i << ',' << buf << '\n';
            }
        });
    } else {
        const SwitchTrajectory traj = simulate_switch(dist, cfg.horizon, rng);
        summary["stationary"] = false;
        summary["initial_sign"] = traj.initial_sign;
        summary["epochs"] = traj.epochs.size();
        summary["switches_within_horizon"] = traj.count_until(cfg.horizon);
        emit_csv(cfg, sink, csv_on_stdout, [&](std::ostream& f) {
            char buf[64];
            f << "index,epoch\n";
            for (std::size_t i = 0; i < traj.epochs.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17e", traj.epochs[i]);
                f << i << ',' << buf << '\n';
            }
        });
    }
    if (!cfg.out.empty()) summary["out"] = cfg.out;
    return summary;
}

json verb_estimate(const RunConfig& cfg, std::ostream& sink, bool& csv_on_stdout) {
    const SwitchingDistribution dist = dist_of(cfg);
    const GridSpec grid = grid_of(cfg);
    MonteCarloEstimate est = [&] {
        if (cfg.what == "expected") return estimate_expected_value(dist, grid, cfg.n_paths, cfg.seed, cfg.workers);
        if (cfg.what == "covariance") return estimate_covariance(dist, grid, cfg.n_paths, cfg.seed, cfg.workers);
        throw std::invalid_argument("--what must be 'expected' or 'covariance'");
    }();
    emit_csv(cfg, sink, csv_on_stdout, [&](std::ostream& f) { write_csv(f, est.value, est.standard_error); });
    return {{"verb", cfg.verb},      {"dist", dist.describe()}, {"what", cfg.what},
            {"n_paths", est.n_paths}, {"seed", cfg.seed},        {"points", est.value.size()},
            {"max_stderr", est.standard_error.max()}, {"out", cfg.out}};
}

json verb_expected_value(const RunConfig& cfg, std::ostream& sink, bool& csv_on_stdout) {
    const SwitchingDistribution dist = dist_of(cfg);
    const GridSpec grid = grid_of(cfg);
    const SeriesResult series = expected_value_series(dist, grid, {cfg.series_tol, 10000, cfg.workers});
    emit_csv(cfg, sink, csv_on_stdout, [&](std::ostream& f) { write_csv(f, series.values); });
    json summary{{"verb", cfg.verb},
                 {"dist", dist.describe()},
                 {"terms", series.terms},
                 {"truncation_bound", 2.0 * series.truncation_bound},
                 {"density_approximate", series.density_approximate},
                 {"origin_extrapolated", series.origin_extrapolated},
                 {"shape", to_json(check_expected_shape(series.values))},
                 {"out", cfg.out}};
    try {
        summary["mean_from_expected"] = mean_from_expected(series.values, 2.0 * series.truncation_bound).value;
    } catch (const numeric_error& e) {
        summary["mean_from_expected_error"] = e.what();
    }
    return summary;
}

json verb_covariance(const RunConfig& cfg, std::ostream& sink, bool& csv_on_stdout) {
    GridFunction expected = [&] {
        if (!cfg.input.empty()) return read_csv_file(cfg.input);
        const SwitchingDistribution dist = dist_of(cfg);
        return expected_value_series(dist, grid_of(cfg), {cfg.series_tol, 10000, cfg.workers}).values;
    }();
    double mu = cfg.mu;
    if (mu <= 0.0) {
        if (!cfg.input.empty()) throw std::invalid_argument("--mu is required with --from-expected");
        mu = dist_of(cfg).mean();
    }
    const GridFunction c = covariance_from_expected(expected, mu);
    emit_csv(cfg, sink, csv_on_stdout, [&](std::ostream& f) { write_csv(f, c); });
    return {{"verb", cfg.verb}, {"mu", mu}, {"shape", to_json(check_covariance_shape(c))}, {"out", cfg.out}};
}

json verb_gd_check(const RunConfig& cfg) {
    const SwitchingDistribution dist = dist_of(cfg);
    CMConfig cm;
    cm.max_order = cfg.cm_max_order;
    cm.tol = cfg.cm_tol;
    json j = to_json(gd_check(dist, cfg.r, cm));
    j["dist"] = dist.describe();
    return j;
}

void write_divisor(const RunConfig& cfg, const DivisorRecovery& rec) {
    if (!cfg.out_cdf.empty()) write_csv_file(cfg.out_cdf, rec.cdf);
    if (!cfg.out_pdf.empty()) write_csv_file(cfg.out_pdf, rec.pdf);
}

json verb_recover(const RunConfig& cfg) {
    if (cfg.input.empty()) throw std::invalid_argument("--in is required for recover");
    const GridFunction input = read_csv_file(cfg.input);
    json summary{{"verb", cfg.verb}, {"from", cfg.from}};
    DivisorRecovery rec = [&] {
        if (cfg.from == "expected") {
            summary["shape"] = to_json(check_expected_shape(input));
            return divisor_from_expected(input);
        }
        if (cfg.from == "covariance") {
            summary["shape"] = to_json(check_covariance_shape(input));
            return divisor_from_covariance(input);
        }
        throw std::invalid_argument("--from must be 'expected' or 'covariance'");
    }();
    write_divisor(cfg, rec);
    const GeometricCompound law = switching_law_from_divisor(make_tabulated(rec.pdf), cfg.talbot_nodes);
    if (cfg.from == "covariance") {
        summary["mu"] = rec.mu;
        summary["mu_cross_check"] = rec.mu_cross_check;
    }
    summary["divisor_mean"] = law.divisor().mean();
    summary["switching_law_mean"] = law.mean();
    summary["divisor_raw_mass"] = rec.raw_mass;
    summary["out_cdf"] = cfg.out_cdf;
    summary["out_pdf"] = cfg.out_pdf;
    return summary;
}

GaussianCovariance covariance_source(const std::string& name) {
    if (name == "diffusion2d" || name == "builtin") return diffusion2d_covariance();
    if (name == "exp") return exponential_covariance();
    if (name == "damped-cos") return damped_cosine_covariance();
    return tabulated_covariance(read_csv_file(name), name);
}

json verb_iia(const RunConfig& cfg) {
    const GaussianCovariance r = covariance_source(cfg.covariance_source);
    IIAConfig config;
    config.talbot_nodes = cfg.talbot_nodes;
    const GridSpec grid = grid_of(cfg);
    const IIAResult result = iia_pipeline(r, grid, config);
    json j = to_json(result);
    j["verb"] = cfg.verb;
    j["r"] = r.name;
    if (result.divisor) {
        write_divisor(cfg, *result.divisor);
        j["out_cdf"] = cfg.out_cdf;
        j["out_pdf"] = cfg.out_pdf;
    }
    if (!cfg.plot.empty()) {
        const GridFunction c = clip_covariance(r, grid);
        std::vector<svg::Panel> panels{{"clipped covariance C(t)", {{"C", times(c), vals(c)}}}};
        if (result.divisor) {
            panels.push_back({"divisor CDF", {{"F~", times(result.divisor->cdf), vals(result.divisor->cdf), "#d62728"}}});
            panels.push_back({"divisor density", {{"f~", times(result.divisor->pdf), vals(result.divisor->pdf), "#2ca02c"}}});
        }
        svg::write_file(cfg.plot, svg::render(panels));
        j["plot"] = cfg.plot;
    }
    return j;
}

json verb_figure1(const RunConfig& cfg) {
    const SwitchingDistribution dist = dist_of(cfg);
    const GridSpec grid = grid_of(cfg);
    const SwitchTrajectory traj = simulate_switch(dist, grid.t_end, cfg.seed);
    std::vector<double> px{0.0}, py{static_cast<double>(traj.initial_sign)};
    for (double e : traj.epochs) {
        if (e > grid.t_end) break;
        px.push_back(e);
        py.push_back(static_cast<double>(traj.value_at(e)));
    }
    px.push_back(grid.t_end);
    py.push_back(static_cast<double>(traj.value_at(grid.t_end)));
    const SeriesResult e = expected_value_series(dist, grid, {cfg.series_tol, 10000, cfg.workers});
    const GridFunction c = covariance_from_expected(e.values, dist.mean());
    const std::string path = cfg.plot.empty() ? "figure1.svg" : cfg.plot;
    svg::write_file(path, svg::render({
                              {"sample path X(t), " + dist.describe(), {{"X", px, py, "#1f77b4", true}}},
                              {"expected value E(t)", {{"E", times(e.values), vals(e.values), "#d62728"}}},
                              {"stationary covariance C(t)", {{"C", times(c), vals(c), "#2ca02c"}}},
                          }));
    return {{"verb", cfg.verb}, {"dist", dist.describe()}, {"seed", cfg.seed}, {"plot", path},
            {"switches", traj.count_until(grid.t_end)}, {"terms", e.terms}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"switchkit: switch processes, their expected value and stationary covariance", "switchkit"};
    app.set_help_flag("--help", "print help");  // -h would clash with --h
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers, "worker threads");
        sub->add_option("--talbot-nodes", cfg.talbot_nodes, "fixed-Talbot node count")->check(CLI::Range(2, 512));
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--t-end", cfg.t_end, "grid end (seconds)");
        sub->add_option("--h", cfg.h, "grid step (seconds)");
    };
    auto add_dist = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--dist", cfg.dist, "switching-time law, e.g. gamma(shape=2,scale=2)");
        if (required) o->required();
    };

    auto* simulate = app.add_subcommand("simulate", "simulate one switch (or stationary) trajectory");
    add_dist(simulate, true);
    add_common(simulate);
    simulate->add_option("--horizon", cfg.horizon, "time horizon");
    simulate->add_option("--seed", cfg.seed, "random seed");
    simulate->add_flag("--stationary", cfg.stationary, "simulate the stationary process");
    simulate->add_option("--out", cfg.out, "epoch CSV output");

    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of E(t) or C(t)");
    add_dist(estimate, true);
    add_grid(estimate);
    add_common(estimate);
    estimate->add_option("--seed", cfg.seed, "random seed");
    estimate->add_option("--n-paths", cfg.n_paths, "number of paths");
    estimate->add_option("--what", cfg.what, "expected | covariance");
    estimate->add_option("--out", cfg.out, "CSV output (t,value,stderr)");

    auto* expected = app.add_subcommand("expected-value", "E(t) from the alternating convolution series");
    add_dist(expected, true);
    add_grid(expected);
    add_common(expected);
    expected->add_option("--tol", cfg.series_tol, "series truncation tolerance");
    expected->add_option("--out", cfg.out, "CSV output");

    auto* covariance = app.add_subcommand("covariance", "stationary covariance C(t) from E(t)");
    add_dist(covariance, false);
    add_grid(covariance);
    add_common(covariance);
    covariance->add_option("--tol", cfg.series_tol, "series truncation tolerance");
    covariance->add_option("--from-expected", cfg.input, "E(t) CSV instead of --dist");
    covariance->add_option("--mu", cfg.mu, "mean switching time (required with --from-expected)");
    covariance->add_option("--out", cfg.out, "CSV output");

    auto* gd = app.add_subcommand("gd-check", "screen r-geometric divisibility");
    add_dist(gd, true);
    add_common(gd);
    gd->add_option("--r", cfg.r, "order r > 1");
    gd->add_option("--cm-max-order", cfg.cm_max_order, "highest derivative order screened")->check(CLI::Range(0, 8));
    gd->add_option("--cm-tol", cfg.cm_tol, "complete-monotonicity tolerance");

    auto* recover = app.add_subcommand("recover", "recover the GD(2) divisor from E(t) or C(t)");
    add_common(recover);
    recover->add_option("--from", cfg.from, "expected | covariance");
    recover->add_option("--in", cfg.input, "input CSV (t,value)")->required();
    recover->add_option("--out-cdf", cfg.out_cdf, "divisor CDF CSV");
    recover->add_option("--out-pdf", cfg.out_pdf, "divisor density CSV");

    auto* iia = app.add_subcommand("iia", "independent interval approximation for a clipped Gaussian process");
    add_grid(iia);
    add_common(iia);
    iia->add_option("--r", cfg.covariance_source, "diffusion2d | exp | damped-cos | table.csv")->required();
    iia->add_option("--out-cdf", cfg.out_cdf, "divisor CDF CSV");
    iia->add_option("--out-pdf", cfg.out_pdf, "divisor density CSV");
    iia->add_option("--plot", cfg.plot, "SVG output");

    auto* figure = app.add_subcommand("figure1", "sample path, E(t) and C(t) panels as SVG");
    add_dist(figure, true);
    add_grid(figure);
    add_common(figure);
    figure->add_option("--seed", cfg.seed, "random seed");
    figure->add_option("--tol", cfg.series_tol, "series truncation tolerance");
    figure->add_option("--plot", cfg.plot, "SVG output (default figure1.svg)");

    // per-verb grid defaults
    if (!args.empty()) {
        if (args[0] == "iia") cfg.t_end = 40.0;
        if (args[0] == "figure1") {
            cfg.t_end = 20.0;
            cfg.h = 1e-2;
        }
    }

    try {
        // CLI11 consumes the vector form back to front
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    if (const char* env = std::getenv("SWITCHKIT_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            err << "error: SWITCHKIT_SEED is not an unsigned integer\n";
            return kValidationFailure;
        }
    }
    cfg.verb = app.get_subcommands().front()->get_name();

    try {
        json summary;
        bool csv_on_stdout = false;
        if (cfg.verb == "simulate") summary = verb_simulate(cfg, out, csv_on_stdout);
        else if (cfg.verb == "estimate") summary = verb_estimate(cfg, out, csv_on_stdout);
        else if (cfg.verb == "expected-value") summary = verb_expected_value(cfg, out, csv_on_stdout);
        else if (cfg.verb == "covariance") summary = verb_covariance(cfg, out, csv_on_stdout);
        else if (cfg.verb == "gd-check") summary = verb_gd_check(cfg);
        else if (cfg.verb == "recover") summary = verb_recover(cfg);
        else if (cfg.verb == "iia") summary = verb_iia(cfg);
        else if (cfg.verb == "figure1") summary = verb_figure1(cfg);
        (csv_on_stdout ? err : out) << summary.dump(2) << '\n';
        return kOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

}  // namespace switchkit::cli
