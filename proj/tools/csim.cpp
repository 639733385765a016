// Command line front end: experiment execution, config validation, published
// comparison tables, and horizontal SNR gap measurements between saved curves.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
// 3 missing codebook file.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "csim/experiment.hpp"
#include "csim/results.hpp"
#include "csim/tables.hpp"
#include "csim/version.hpp"

namespace {

void print_error(const std::string& kind, const std::string& message, const std::string& field) {
    nlohmann::json err;
    err["error"] = kind;
    err["message"] = message;
    if (!field.empty()) err["field"] = field;
    std::cerr << err.dump() << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers,
            bool has_seed, uint64_t seed, bool validate_only) {
    csim::experiment::ExperimentFile file;
    try {
        file = csim::experiment::load_experiment_file(config_path);
        if (!validate_only) {
            // resolving codebooks up front surfaces bad parameter combinations
            for (const auto& e : file.experiments) e.to_spec().validate();
        }
    } catch (const csim::experiment::ConfigError& e) {
        print_error("invalid_config", e.what(), e.field_path);
        return 2;
    } catch (const csim::experiment::CodebookFileError& e) {
        print_error("codebook_file", e.what(), "");
        return 3;
    } catch (const std::exception& e) {
        print_error("invalid_config", e.what(), "");
        return 2;
    }
    if (validate_only) {
        std::cout << "config ok: " << file.experiments.size() << " experiment(s)\n";
        return 0;
    }
    try {
        const auto outcomes = csim::experiment::run_experiments(
            file, out_dir, workers, has_seed ? &seed : nullptr);
        for (const auto& oc : outcomes) {
            std::printf("%-24s %6zu rows  %8.2fs  %s\n", oc.name.c_str(), oc.rows,
                        oc.wall_seconds, oc.csv_path.c_str());
        }
        return 0;
    } catch (const csim::experiment::CodebookFileError& e) {
        print_error("codebook_file", e.what(), "");
        return 3;
    } catch (const std::exception& e) {
        print_error("runtime", e.what(), "");
        return 1;
    }
}

int cmd_tables(const std::string& which, const std::string& out_dir,
               const csim::analysis::ComplexityParams& params) {
    try {
        std::string text, csv, csv_name;
        if (which == "rate") {
            const auto rows = csim::tables::rate_table();
            text = csim::tables::render_rate_table(rows);
            csv = csim::tables::rate_table_csv(rows);
            csv_name = "table_rate.csv";
        } else if (which == "energy") {
            const auto rows = csim::tables::energy_table();
            text = csim::tables::render_energy_table(rows);
            csv = csim::tables::energy_table_csv(rows);
            csv_name = "table_energy.csv";
        } else if (which == "complexity") {
            const auto rows = csim::tables::complexity_table(params);
            text = csim::tables::render_complexity_table(rows);
            csv = csim::tables::complexity_table_csv(rows);
            csv_name = "table_complexity.csv";
        } else {
            print_error("invalid_config", "unknown table '" + which + "'", "--which");
            return 2;
        }
        std::cout << text;
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            csim::results::write_file_atomic(
                (std::filesystem::path(out_dir) / csv_name).string(), csv);
        }
        return 0;
    } catch (const std::exception& e) {
        print_error("runtime", e.what(), "");
        return 1;
    }
}

int cmd_gap(const std::string& a, const std::string& b, double level, const std::string& det_a,
            const std::string& det_b) {
    try {
        const double gap = csim::results::gap_from_files(a, b, level, det_a, det_b);
        std::printf("%.6f\n", gap);
        return 0;
    } catch (const std::exception& e) {
        print_error("runtime", e.what(), "");
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"link-level simulator for code-spatial index modulation"};
    app.set_version_flag("--version", csim::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = "results";
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    uint64_t seed = 0;
    bool has_seed = false;

    CLI::App* run = app.add_subcommand("run", "execute the experiments in a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--workers", workers, "worker thread count");
    run->add_option("--seed", seed, "override every experiment's seed")
        ->each([&](const std::string&) { has_seed = true; });

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("--config", config_path, "experiment config (JSON)")->required();

    std::string which;
    csim::analysis::ComplexityParams params{252, 4, 4, 4, 0, 4, 0.0};
    std::string tables_out;
    CLI::App* tables = app.add_subcommand("tables", "print a published comparison table");
    tables->add_option("--which", which, "rate | energy | complexity")->required();
    tables->add_option("--out", tables_out, "also write the table CSV into this directory");
    tables->add_option("--L", params.L, "sequence length (complexity table)");
    tables->add_option("--Nc", params.Nc, "sequence count (complexity table)");
    tables->add_option("--Nr", params.Nr, "receive antennas (complexity table)");
    tables->add_option("--Nt", params.Nt, "transmit antennas (complexity table)");
    tables->add_option("--M", params.M, "constellation size (complexity table)");

    std::string csv_a, csv_b, det_a, det_b;
    double ber_level = 1e-3;
    CLI::App* gap = app.add_subcommand("gap", "horizontal dB gap between two result curves");
    gap->add_option("csv_a", csv_a, "first results CSV")->required();
    gap->add_option("csv_b", csv_b, "second results CSV")->required();
    gap->add_option("--ber-level", ber_level, "BER level to compare at");
    gap->add_option("--detector-a", det_a, "detector rows to use from the first file");
    gap->add_option("--detector-b", det_b, "detector rows to use from the second file");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_dir, workers, has_seed, seed, false);
    if (validate->parsed()) return cmd_run(config_path, "", 1, false, 0, true);
    if (tables->parsed()) return cmd_tables(which, tables_out, params);
    if (gap->parsed()) return cmd_gap(csv_a, csv_b, ber_level, det_a, det_b);
    return 1;
}
