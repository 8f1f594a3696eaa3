#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scicli/commands.hpp"

using scicli::RunConfig;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::string schedule;
    std::string solver;
    std::string denoiser;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "Run-config JSON file");
    cmd->add_option("--out", flags.out, "Output directory");
    cmd->add_option("--schedule", flags.schedule,
                    "step | exponential | constant | schedule JSON file");
    cmd->add_option("--solver", flags.solver, "admm | gap | gap-accel");
    cmd->add_option("--denoiser", flags.denoiser, "gaussian-blend | haar");
    cmd->add_option("--seed", flags.seed, "Random seed")->each([&](const std::string&) {
        flags.seed_set = true;
    });
}

RunConfig make_config(const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config.empty()) cfg = scicli::load_config(flags.config);
    if (!flags.out.empty()) cfg.out = flags.out;
    if (!flags.schedule.empty()) cfg.schedule = flags.schedule;
    if (!flags.solver.empty())
        cfg.solver.variant = sci::solver_variant_from_string(flags.solver);
    if (!flags.denoiser.empty())
        cfg.denoiser.kind = sci::denoiser_kind_from_string(flags.denoiser);
    if (flags.seed_set) cfg.seed = flags.seed;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Video snapshot compressive imaging: simulation, plug-and-play "
                 "reconstruction, and noise-level schedule training"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::vector<std::string> videos;
    std::string mask_path, manifest, recon_dir, report_out = "report.csv";
    std::vector<std::string> report_inputs;
    double density = -1.0, noise_std = -1.0;
    int iterations = -1, epochs = -1, minibatch = -1;

    CLI::App* simulate = app.add_subcommand("simulate", "Build a dataset from cubes and a mask");
    add_common(simulate, flags);
    simulate->add_option("--video", videos, "Cube tensor file or PGM frame directory");
    simulate->add_option("--mask", mask_path, "Mask tensor file (omit to generate)");
    simulate->add_option("--density", density, "Bernoulli density of a generated mask");
    simulate->add_option("--noise-std", noise_std, "Measurement noise standard deviation");

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "Reconstruct every dataset sample");
    add_common(reconstruct, flags);
    reconstruct->add_option("--manifest", manifest, "Dataset manifest JSON");
    reconstruct->add_option("--iterations", iterations, "Solver iterations");

    CLI::App* train = app.add_subcommand("train", "Train the noise-level schedule");
    add_common(train, flags);
    train->add_option("--manifest", manifest, "Dataset manifest JSON");
    train->add_option("--iterations", iterations, "Unrolled iterations");
    train->add_option("--epochs", epochs, "Training epochs");
    train->add_option("--minibatch", minibatch, "Minibatch size");

    CLI::App* eval = app.add_subcommand("eval", "Quality reports for reconstructions");
    add_common(eval, flags);
    eval->add_option("--manifest", manifest, "Dataset manifest JSON");
    eval->add_option("--recon", recon_dir, "Directory holding recon_####.sci");

    CLI::App* report = app.add_subcommand("report", "Aggregate quality reports into a CSV table");
    report->add_option("inputs", report_inputs, "Per-video report JSON files");
    report->add_option("--out", report_out, "Output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = make_config(flags);
        if (!manifest.empty()) cfg.manifest = manifest;
        if (!recon_dir.empty()) cfg.recon_dir = recon_dir;
        if (!videos.empty()) cfg.videos = videos;
        if (!mask_path.empty()) cfg.mask_path = mask_path;
        if (density >= 0.0) cfg.mask_density = density;
        if (noise_std >= 0.0) cfg.noise_std = noise_std;
        if (iterations > 0) cfg.solver.iterations = iterations;
        if (epochs > 0) cfg.epochs = epochs;
        if (minibatch > 0) cfg.minibatch = minibatch;

        if (simulate->parsed()) scicli::cmd_simulate(cfg);
        else if (reconstruct->parsed()) scicli::cmd_reconstruct(cfg);
        else if (train->parsed()) scicli::cmd_train(cfg);
        else if (eval->parsed()) scicli::cmd_eval(cfg);
        else if (report->parsed()) scicli::cmd_report(report_inputs, report_out);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << std::endl;
        return 1;
    }
    return 0;
}
