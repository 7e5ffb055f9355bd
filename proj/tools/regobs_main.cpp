#include <string>

#include "CLI11.hpp"

#include "regobs/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"regobs: regional boundary gradient observer toolkit"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = "./out";
    std::string record_path;
    int nx = 9, ny = 9;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "scenario config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (default ./out)");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "rank, strategic and detectability reports");
    add_common(analyze);
    CLI::App* simulate = app.add_subcommand("simulate", "observer simulation trajectory");
    add_common(simulate);
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "initial boundary gradient from an output record");
    add_common(reconstruct);
    reconstruct->add_option("--record", record_path, "output record CSV (t,y0,...)")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "strategic margin over a sensor-location grid");
    add_common(sweep);
    sweep->add_option("--nx", nx, "grid cells along xi1");
    sweep->add_option("--ny", ny, "grid cells along xi2");
    CLI::App* compare = app.add_subcommand("compare-regions", "omega_r vs Gamma* verdicts");
    add_common(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : regobs::cli::kValidation;
    }

    if (analyze->parsed()) return regobs::cli::cmd_analyze(config, out_dir);
    if (simulate->parsed()) return regobs::cli::cmd_simulate(config, out_dir);
    if (reconstruct->parsed()) return regobs::cli::cmd_reconstruct(config, record_path, out_dir);
    if (sweep->parsed()) return regobs::cli::cmd_sweep(config, nx, ny, out_dir);
    if (compare->parsed()) return regobs::cli::cmd_compare_regions(config, out_dir);
    return regobs::cli::kValidation;
}
