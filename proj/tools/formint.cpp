#include <CLI11.hpp>

#include "formint/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"formint: forced formation-control integrators and diagnostics"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // keep --h free for the step override

    formint::cli::RunOpts run;
    auto add_run_opts = [&](CLI::App* sub, bool needs_workers) {
        sub->set_help_flag("--help", "print help");
        sub->add_option("--config", run.config_path, "configuration file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", run.out_dir, "output directory")->required();
        sub->add_option("--h", run.h_override, "override the configured step size");
        sub->add_option("--kappa", run.kappa_override, "override the configured damping gain");
        if (needs_workers)
            sub->add_option("--workers", run.workers,
                            "parallel worker count (also FORMINT_WORKERS)");
    };

    auto* sim = app.add_subcommand("simulate", "run one integrator and write trajectory/energy");
    add_run_opts(sim, false);
    auto* cmp = app.add_subcommand("compare", "run several integrator/step combos side by side");
    add_run_opts(cmp, false);
    auto* ord = app.add_subcommand("order", "estimate empirical convergence orders");
    add_run_opts(ord, false);
    auto* roa = app.add_subcommand("roa", "sweep initial positions of one displaced agent");
    add_run_opts(roa, true);

    formint::cli::AlphaOpts alpha;
    auto* alp = app.add_subcommand("alpha", "conservative step-size bound report");
    alp->add_option("--radius", alpha.radius, "confinement radius R")->required();
    alp->add_option("--momentum-bound", alpha.momentum_bound, "momentum bound c")->required();
    alp->add_option("--kappa", alpha.kappa, "damping gain")->required();
    alp->add_option("--agents", alpha.agents, "number of agents")->required();
    alp->add_option("--edges", alpha.edges, "number of edges")->required();
    alp->add_option("--max-d", alpha.max_desired_distance, "largest desired distance")
        ->required();
    alp->add_option("--h", alpha.h, "report the guaranteed step budget for this step size");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return formint::cli::cmd_simulate(run);
    if (cmp->parsed()) return formint::cli::cmd_compare(run);
    if (ord->parsed()) return formint::cli::cmd_order(run);
    if (roa->parsed()) return formint::cli::cmd_roa(run);
    if (alp->parsed()) return formint::cli::cmd_alpha(alpha);
    return 1;
}
