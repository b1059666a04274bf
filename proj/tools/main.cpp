// Command-line front end: bounds, simulate, gamma, report.

#include <CLI11.hpp>
#include <string>

#include "lldos/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Restricted density of states of a disorder-broadened Landau level"};
    app.require_subcommand(1);

    struct Args {
        lldos::CommandOptions opts;
        std::string out;
        std::uint64_t seed = 0;
        bool has_out = false, has_seed = false;
    };

    auto add_common = [](CLI::App* sub, Args& args) {
        sub->add_option("--config", args.opts.config_path, "experiment config file")->required();
        auto* out = sub->add_option("--out", args.out, "output directory override");
        auto* seed = sub->add_option("--seed", args.seed, "seed override");
        sub->add_option("--workers", args.opts.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->callback([&args, out, seed]() {
            args.has_out = out->count() > 0;
            args.has_seed = seed->count() > 0;
        });
    };

    Args args;
    const char* names[] = {"bounds", "simulate", "gamma", "report"};
    const char* blurbs[] = {"analytic bound curves and derived constants",
                            "Monte Carlo density-of-states histogram",
                            "variational decay energy",
                            "join histogram with bounds; verdicts and moments"};
    for (int i = 0; i < 4; ++i) add_common(app.add_subcommand(names[i], blurbs[i]), args);

    CLI11_PARSE(app, argc, argv);

    if (args.has_out) args.opts.out_dir = args.out;
    if (args.has_seed) args.opts.seed = args.seed;
    return lldos::run_command(app.get_subcommands().front()->get_name(), args.opts);
}
