// Experiment configuration files: JSON parsing with field-path diagnostics,
// codebook resolution, round-trip serialization, and batch execution with
// per-experiment CSV output plus a run manifest.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "csim/simharness.hpp"

namespace csim::experiment {

struct ConfigError : std::runtime_error {
    std::string field_path;
    ConfigError(const std::string& msg, std::string path)
        : std::runtime_error(msg + " (at " + path + ")"), field_path(std::move(path)) {}
};

// distinguished from ConfigError so the CLI can map it to its own exit code
struct CodebookFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CodebookSpec {
    codebook::Family family = codebook::Family::cyclic_chirp;
    // zadoff_chu
    int length_L = 0;
    std::vector<int> roots;
    // cyclic_chirp
    int spreading_factor = 0;
    int oversampling_P = 1;
    // file
    std::string path;

    codebook::SpreadingCodebook build(int count_Nc) const;
};

struct Experiment {
    std::string name;
    modem::Scheme scheme = modem::Scheme::sm_cim;
    int nt = 0, nr = 0, nc = 0, m = 0;
    CodebookSpec codebook;
    channel::ChannelConfig channel;
    std::vector<double> snr_grid_db;
    long max_blocks = 1000000;
    long target_errors = 500;
    uint64_t seed = 1;
    sim::DetectorChoice detector = sim::DetectorChoice::lc;
    double symbol_duration_s = 1.0;
    bool analytic_overlay = true;
    std::string output; // CSV file name relative to the output directory

    sim::ExperimentSpec to_spec() const; // resolves the codebook; may throw CodebookFileError
};

struct ExperimentFile {
    std::vector<Experiment> experiments;
};

ExperimentFile parse_experiment_file(const std::string& json_text);
ExperimentFile load_experiment_file(const std::string& path);
std::string serialize_experiment_file(const ExperimentFile& file);

struct RunOutcome {
    std::string name;
    std::string csv_path;
    uint64_t spec_digest = 0;
    size_t rows = 0;
    double wall_seconds = 0.0;
};

// executes every experiment, writes CSVs and a manifest under output_dir
std::vector<RunOutcome> run_experiments(const ExperimentFile& file, const std::string& output_dir,
                                        int workers, const uint64_t* seed_override);

} // namespace csim::experiment
