#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sci/data_io.hpp"
#include "sci/denoise.hpp"
#include "sci/solver.hpp"
#include "sci/unfold.hpp"

namespace scicli {

/// Declarative run configuration. Loaded from a JSON document; CLI flags
/// override individual fields.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out = "out";

    sci::SolverConfig solver;
    sci::DenoiserSpec denoiser;
    /// "step" | "exponential" | "constant" | path to a schedule JSON file.
    std::string schedule = "step";

    std::string manifest;
    std::string recon_dir; // eval: directory holding recon_####.sci

    // simulate inputs
    std::vector<std::string> videos; // cube tensor files or directories of PGM frames
    std::string mask_path;           // empty -> generate a Bernoulli mask
    double mask_density = 0.5;
    double noise_std = 0.01;
    sci::PrepareOptions prepare; // applied to PGM frame directories

    // training
    int epochs = 10;
    int minibatch = 5;
    int checkpoint_segment = 0;
    bool shuffle = true;
    double lr = 0.01;
};

RunConfig load_config(const std::string& path);

/// Resolves a named conventional schedule or loads a schedule JSON file
/// ({"sigma": [...]} or a bare array) and checks its length.
sci::NoiseSchedule resolve_schedule(const std::string& source, int iterations);

/// Builds a dataset from prepared cubes (or PGM frame directories) and a
/// mask, writes tensors and the manifest under cfg.out.
void cmd_simulate(const RunConfig& cfg);

/// Runs the configured solver on every manifest sample; writes reconstructed
/// cubes, per-iteration trace CSVs and quality reports (when truth exists).
void cmd_reconstruct(const RunConfig& cfg);

/// Trains the noise-level schedule; writes schedule.json, loss_log.csv and
/// train_meta.json under cfg.out.
void cmd_train(const RunConfig& cfg);

/// Recomputes quality reports for previously written reconstructions.
void cmd_eval(const RunConfig& cfg);

/// Aggregates per-video quality reports into a CSV table with an average row.
void cmd_report(const std::vector<std::string>& report_paths, const std::string& out_csv);

/// Parallelism cap from SCI_UNFOLD_THREADS (default: hardware concurrency).
int thread_cap();

} // namespace scicli
