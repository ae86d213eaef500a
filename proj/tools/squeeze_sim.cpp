#include <CLI11.hpp>

#include "squeeze/cli.hpp"

int main(int argc, char** argv) {
    using squeeze::cli::Options;
    CLI::App app{"squeeze_sim: squeeze-film plate simulation and estimate verification"};
    app.require_subcommand(1);

    Options o;
    auto common = [&](CLI::App* sub, const char* config_help) {
        sub->add_option("--config", o.config, config_help)->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "override [verify] seed");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--window", o.window, "Picard window length (0 marches step by step)");
        sub->add_flag("--quiet", o.quiet, "suppress progress output");
    };
    auto* sim = app.add_subcommand("simulate", "run a simulation");
    auto* ver = app.add_subcommand("verify", "run the estimate suite");
    auto* con = app.add_subcommand("constants", "print the constants ledger");
    auto* swp = app.add_subcommand("sweep", "run a parameter sweep");
    common(sim, "config file");
    common(ver, "config file");
    common(con, "config file");
    common(swp, "sweep file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : squeeze::cli::ExitCode::error;
    }
    if (*sim) return squeeze::cli::cmd_simulate(o);
    if (*ver) return squeeze::cli::cmd_verify(o);
    if (*con) return squeeze::cli::cmd_constants(o);
    return squeeze::cli::cmd_sweep(o);
}
