// Results CSV schema (one row per experiment/detector/SNR/source) plus the
// reader used for horizontal-gap measurements between saved curves.

#pragma once

#include <string>
#include <vector>

#include "csim/simharness.hpp"

namespace csim::results {

inline constexpr const char* kSchemaLine = "# schema csim-results-1";
inline constexpr const char* kHeaderLine =
    "experiment,scheme,detector,Nt,Nr,Nc,M,snr_db,ber,ber_sci,ci95,bits_simulated,source,seed,"
    "spec_digest";

struct Row {
    std::string experiment;
    std::string scheme;
    std::string detector;
    int nt = 0, nr = 0, nc = 0, m = 0;
    double snr_db = 0.0;
    double ber = 0.0;
    double ci95 = 0.0;
    long long bits_simulated = 0;
    std::string source; // "sim" or "analytic"
    uint64_t seed = 0;
    uint64_t spec_digest = 0;
};

std::string format_row(const Row& row);

std::vector<Row> rows_from_curve(const std::string& experiment, const sim::ExperimentSpec& spec,
                                 const sim::BerCurve& curve);

// full file body (schema line, header, rows) for a set of curves
std::string render_csv(const std::vector<Row>& rows);

void write_file_atomic(const std::string& path, const std::string& body);

std::vector<Row> read_csv(const std::string& path);

// horizontal SNR gap between two saved curves at a BER level; filters rows by
// detector (empty = require a single detector present) and source "sim".
double gap_from_files(const std::string& path_a, const std::string& path_b, double ber_level,
                      const std::string& detector_a, const std::string& detector_b);

} // namespace csim::results
