// Command-line front end: parse a problem description, dispatch to the
// computation modules, and emit CSV tables plus a machine-readable manifest.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scalekernel/cli_io.hpp"
#include "scalekernel/config.hpp"
#include "scalekernel/scalekernel.hpp"

namespace {

using namespace scalekernel;

struct CommonArgs {
    std::string config_path;
    std::string output_override;
    int points = 0;
    double x0 = std::numeric_limits<double>::quiet_NaN();
    double exit_x = std::numeric_limits<double>::quiet_NaN();
    double exit_y = std::numeric_limits<double>::quiet_NaN();
    double exit_z = std::numeric_limits<double>::quiet_NaN();
};

std::string resolve_output(const cli::Config& cfg, const CommonArgs& args,
                           const std::string& fallback) {
    if (!args.output_override.empty()) return args.output_override;
    if (!cfg.output_path.empty()) return cfg.output_path;
    return fallback;
}

eigen::EigenPair pick_backend(const model::DiffusionSpec& spec, double q) {
    return eigen::make_eigenpair(spec, q);
}

mc::SimConfig sim_config(const cli::Config& cfg) {
    mc::SimConfig sim;
    sim.dt = cfg.dt;
    sim.horizon = cfg.horizon;
    sim.n_paths = cfg.n_paths;
    sim.seed = cfg.seed;
    return sim;
}

void finish(const cli::Config& cfg, const std::string& command,
            const std::string& output, bool stochastic, const cli::WallClock& clock) {
    cli::RunManifest manifest;
    manifest.command = command;
    manifest.config_digest = cli::config_digest(cfg);
    manifest.versions = std::string("scalekernel ") + kVersion;
    manifest.stochastic = stochastic;
    manifest.seed = cfg.seed;
    manifest.wall_time_ms = clock.elapsed_ms();
    cli::write_manifest(manifest, output);
}

int run_value_curve(const CommonArgs& args) {
    cli::WallClock clock;
    const cli::Config cfg = cli::parse_config(args.config_path);
    const auto spec = cfg.make_spec();
    scale::ScaleKernel kernel{pick_backend(spec, cfg.q)};
    valuation::BarrierProblem prob(kernel, cfg.a, cfg.kappa);

    const int n = args.points > 0 ? args.points : 101;
    const double lo = -0.5, hi = cfg.a + 0.5;
    cli::CsvWriter csv({"x", "value"});
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        csv.add_numeric_row({x, valuation::value_function(prob, x)});
    }
    const std::string out = resolve_output(cfg, args, "value_curve.csv");
    csv.write(out);
    finish(cfg, "value-curve", out, false, clock);
    return 0;
}

int run_optimal_barrier(const CommonArgs& args) {
    cli::WallClock clock;
    const cli::Config cfg = cli::parse_config(args.config_path);
    const auto spec = cfg.make_spec();
    scale::ScaleKernel kernel{pick_backend(spec, cfg.q)};

    valuation::BarrierSearchConfig search;
    search.a_max = cfg.a_max;
    const double a_star = valuation::optimal_barrier(kernel, cfg.kappa, search);
    const double residual = valuation::varsigma(kernel, cfg.kappa, a_star);

    const auto report = model::validate(spec, cfg.q, 0.0, 10.0, 201);
    const bool certified = report.p2_precondition_ok && report.sigma_constant;
    if (!certified)
        std::cerr << "warning: optimal barrier is not certified for this model "
                     "(requires constant volatility, mu <= 0 and mu' < q)\n";

    cli::CsvWriter csv(
        {"a_star", "varsigma_residual", "certified", "p2_precondition_ok", "sigma_constant"});
    csv.add_row({cli::format_number(a_star), cli::format_number(residual),
                 certified ? "1" : "0", report.p2_precondition_ok ? "1" : "0",
                 report.sigma_constant ? "1" : "0"});
    const std::string out = resolve_output(cfg, args, "optimal_barrier.csv");
    csv.write(out);
    finish(cfg, "optimal-barrier", out, false, clock);
    return 0;
}

int run_exit_prob(const CommonArgs& args) {
    cli::WallClock clock;
    const cli::Config cfg = cli::parse_config(args.config_path);
    const auto spec = cfg.make_spec();
    scale::ScaleKernel kernel{pick_backend(spec, cfg.q)};

    const double x = std::isnan(args.exit_x) ? 0.0 : args.exit_x;
    const double z = std::isnan(args.exit_z) ? cfg.a : args.exit_z;
    const double y = std::isnan(args.exit_y) ? 0.5 * (x + z) : args.exit_y;
    const auto exits = scale::exit_functionals(kernel, x, y, z);

    cli::CsvWriter csv({"x", "y", "z", "up", "down"});
    csv.add_numeric_row({x, y, z, exits.up, exits.down});
    const std::string out = resolve_output(cfg, args, "exit_prob.csv");
    csv.write(out);
    finish(cfg, "exit-prob", out, false, clock);
    return 0;
}

int run_scale_table(const CommonArgs& args) {
    cli::WallClock clock;
    const cli::Config cfg = cli::parse_config(args.config_path);
    const auto spec = cfg.make_spec();
    scale::ScaleKernel kernel{pick_backend(spec, cfg.q)};

    const int n = args.points > 0 ? args.points : 21;
    const double lo = -0.5, hi = cfg.a + 0.5;
    cli::CsvWriter csv({"x", "y", "W", "W1", "W12"});
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double y = lo + (hi - lo) * j / (n - 1);
            csv.add_numeric_row({x, y, scale::eval_W(kernel, x, y, scale::WOrder::W),
                                 scale::eval_W(kernel, x, y, scale::WOrder::W1),
                                 scale::eval_W(kernel, x, y, scale::WOrder::W12)});
        }
    }
    const std::string out = resolve_output(cfg, args, "scale_table.csv");
    csv.write(out);
    finish(cfg, "scale-table", out, false, clock);
    return 0;
}

int run_verify(const CommonArgs& args) {
    cli::WallClock clock;
    const cli::Config cfg = cli::parse_config(args.config_path);
    const auto spec = cfg.make_spec();
    scale::ScaleKernel kernel{pick_backend(spec, cfg.q)};
    valuation::BarrierProblem prob(kernel, cfg.a, cfg.kappa);

    const double x0 = std::isnan(args.x0) ? 0.5 * cfg.a : args.x0;
    const double closed_form = valuation::value_function(prob, x0);
    const auto est = mc::estimate_value(spec, cfg.a, x0, cfg.q, cfg.kappa, sim_config(cfg));
    const double zscore = (est.mean - closed_form) / est.std_error;

    cli::CsvWriter csv({"x0", "closed_form", "mc_mean", "mc_stderr", "z_score"});
    csv.add_numeric_row({x0, closed_form, est.mean, est.std_error, zscore});
    const std::string out = resolve_output(cfg, args, "verify.csv");
    csv.write(out);
    finish(cfg, "verify", out, true, clock);
    if (!(std::fabs(zscore) <= 3.0)) {
        std::cerr << "verification failed: |z| = " << std::fabs(zscore) << " > 3\n";
        return 2;
    }
    return 0;
}

int run_simulate(const CommonArgs& args) {
    cli::WallClock clock;
    const cli::Config cfg = cli::parse_config(args.config_path);
    const auto spec = cfg.make_spec();
    const double x0 = std::isnan(args.x0) ? 0.5 * cfg.a : args.x0;
    const mc::SimConfig sim = sim_config(cfg);

    cli::CsvWriter csv({"path", "pv_dividends", "pv_injections", "total_dividends",
                        "total_injections", "switches", "final_state"});
    for (long p = 0; p < sim.n_paths; ++p) {
        const auto r = mc::simulate_path(spec, cfg.a, x0, cfg.q, sim, p);
        csv.add_numeric_row({static_cast<double>(p), r.pv_dividends, r.pv_injections,
                             r.total_dividends, r.total_injections,
                             static_cast<double>(r.switches), r.final_state});
    }
    const std::string out = resolve_output(cfg, args, "simulate.csv");
    csv.write(out);
    finish(cfg, "simulate", out, true, clock);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bivariate q-scale functions and double barrier valuations"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&args](CLI::App* sub, bool with_points, bool with_x0,
                              bool with_exit) {
        sub->add_option("--config", args.config_path, "problem description file")
            ->required();
        sub->add_option("--output", args.output_override, "output CSV path override");
        if (with_points)
            sub->add_option("--points", args.points, "grid points per axis");
        if (with_x0) sub->add_option("--x0", args.x0, "initial surplus (default a/2)");
        if (with_exit) {
            sub->add_option("--x", args.exit_x, "lower exit level (default 0)");
            sub->add_option("--y", args.exit_y, "start level (default midpoint)");
            sub->add_option("--z", args.exit_z, "upper exit level (default a)");
        }
    };

    auto* value_curve = app.add_subcommand("value-curve", "tabulate V^a(x)");
    add_common(value_curve, true, false, false);
    auto* optimal = app.add_subcommand("optimal-barrier", "locate a*");
    add_common(optimal, false, false, false);
    auto* exit_prob = app.add_subcommand("exit-prob", "two-sided exit transforms");
    add_common(exit_prob, false, false, true);
    auto* scale_table = app.add_subcommand("scale-table", "tabulate W, W1, W12");
    add_common(scale_table, true, false, false);
    auto* verify = app.add_subcommand("verify", "closed form vs Monte Carlo");
    add_common(verify, false, true, false);
    auto* simulate = app.add_subcommand("simulate", "per-path summaries");
    add_common(simulate, false, true, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (value_curve->parsed()) return run_value_curve(args);
        if (optimal->parsed()) return run_optimal_barrier(args);
        if (exit_prob->parsed()) return run_exit_prob(args);
        if (scale_table->parsed()) return run_scale_table(args);
        if (verify->parsed()) return run_verify(args);
        if (simulate->parsed()) return run_simulate(args);
    } catch (const scalekernel::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
