#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "qnm/errors.hpp"
#include "run_config.hpp"

namespace {

using qnm::cli::ConfigLayer;

// Flags shared by every subcommand. Values land in `flags` only when given.
struct SharedFlags {
    std::string channel, state, out, config;
    double omega = 0, tc = 0, t_end = 0, a = 0, b = 0, c = 0;
    std::size_t steps = 0, samples = 0, refine_iters = 0;
    std::uint64_t seed = 0;
    bool gnuplot = false;

    void attach(CLI::App* app) {
        app->add_option("--channel", channel, "Dynamical map (gad)");
        app->add_option("--omega", omega, "Mixing frequency");
        app->add_option("--tc", tc, "Critical time after which the dynamics freezes");
        app->add_option("--t-end", t_end, "End of the time grid");
        app->add_option("--steps", steps, "Grid intervals");
        app->add_option("--state", state, "Initial state: bell, paper or custom");
        app->add_option("--a", a, "Custom state amplitude of |up,up>");
        app->add_option("--b", b, "Custom state amplitude of |up,down>");
        app->add_option("--c", c, "Custom state amplitude of |down,up>");
        app->add_option("--seed", seed, "Random seed");
        app->add_option("--out", out, "Output path");
        app->add_option("--config", config, "key=value configuration file");
        app->add_flag("--gnuplot", gnuplot, "Also write a gnuplot script next to each CSV");
        app->add_option("--samples", samples, "Haar samples in the N_I search");
        app->add_option("--refine-iters", refine_iters, "Local refinement rounds in the N_I search");
    }

    qnm::cli::RunConfig resolve(const CLI::App* app) const {
        ConfigLayer layer;
        auto given = [&](const char* name) { return app->count(name) > 0; };
        if (given("--channel")) layer.channel = channel;
        if (given("--omega")) layer.omega = omega;
        if (given("--tc")) layer.t_c = tc;
        if (given("--t-end")) layer.t_end = t_end;
        if (given("--steps")) layer.steps = steps;
        if (given("--state")) layer.state = qnm::cli::parse_state(state);
        if (given("--a")) layer.a = a;
        if (given("--b")) layer.b = b;
        if (given("--c")) layer.c = c;
        if (given("--seed")) layer.seed = seed;
        if (given("--out")) layer.output_path = out;
        if (given("--gnuplot")) layer.gnuplot = gnuplot;
        if (given("--samples")) layer.samples = samples;
        if (given("--refine-iters")) layer.refine_iters = refine_iters;
        const ConfigLayer file = config.empty() ? ConfigLayer{} : qnm::cli::load_config_file(config);
        return qnm::cli::resolve(file, layer);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlation-based non-Markovianity of single-qubit dynamics"};
    app.require_subcommand(1);

    SharedFlags traj_flags, measure_flags, repro_flags, check_flags;

    auto* traj = app.add_subcommand("trajectory", "Write the correlation trajectories as CSV");
    traj_flags.attach(traj);

    auto* measure = app.add_subcommand("measure", "Compute N_E and/or N_I");
    measure_flags.attach(measure);
    std::string which = "both";
    measure->add_option("--which", which, "ne, ni or both");

    auto* repro = app.add_subcommand("reproduce", "Write the data behind a figure (fig1, fig2, fig3)");
    repro_flags.attach(repro);
    std::string figure;
    repro->add_option("figure", figure, "fig1, fig2 or fig3")->required();

    auto* check = app.add_subcommand("check", "Run the CPTP and factorization validators");
    check_flags.attach(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qnm::cli::kExitUsage;
    }

    try {
        if (traj->parsed()) return qnm::cli::cmd_trajectory(traj_flags.resolve(traj), std::cout);
        if (measure->parsed()) {
            return qnm::cli::cmd_measure(measure_flags.resolve(measure), qnm::cli::parse_which(which), std::cout);
        }
        if (repro->parsed()) {
            const qnm::cli::RunConfig cfg = repro_flags.resolve(repro);
            const std::string dir = cfg.output_path.empty() ? "." : cfg.output_path;
            return qnm::cli::cmd_reproduce(cfg, figure, dir, std::cout);
        }
        if (check->parsed()) return qnm::cli::cmd_check(check_flags.resolve(check), std::cout);
    } catch (const qnm::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qnm::cli::kExitUsage;
    } catch (const qnm::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qnm::cli::kExitUsage;
    } catch (const qnm::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qnm::cli::kExitUsage;
    } catch (const qnm::InvariantError& e) {
        std::cerr << "numerical invariant violated: " << e.what() << '\n';
        return qnm::cli::kExitNumerical;
    }
    return qnm::cli::kExitUsage;
}
