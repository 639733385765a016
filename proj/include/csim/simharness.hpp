// Seeded Monte-Carlo BER engine. Every block derives its bit, channel and
// noise streams from (master_seed, snr_index, block_index), so sweeps are
// bit-reproducible for any worker count and ML/LC comparisons consume
// identical realizations per block.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csim/analysis.hpp"
#include "csim/channel.hpp"
#include "csim/modem.hpp"

namespace csim::sim {

enum class DetectorChoice { ml, lc, both };

const char* detector_choice_name(DetectorChoice d);
DetectorChoice detector_choice_from_name(const std::string& name);

struct ExperimentSpec {
    modem::SchemeConfig scheme;
    channel::ChannelConfig channel;
    std::vector<double> snr_grid_db;
    long max_blocks = 1'000'000;
    long target_errors = 500; // early stop once every active detector has this many bit errors
    uint64_t master_seed = 1;
    DetectorChoice detector = DetectorChoice::lc;
    double symbol_duration_Ts = 1.0;
    bool analytic_overlay = true;

    void validate() const; // throws std::invalid_argument
    uint64_t digest() const;
};

struct BerPoint {
    double snr_db = 0.0;
    long long bit_errors = 0;
    long long bits_simulated = 0;
    long long blocks = 0;
    long long block_errors = 0;
    double ber = 0.0;
    double ci95_halfwidth = 0.0;
    bool ci_reliable = false; // needs >= 100 bit errors
    uint64_t stream_digest = 0;
};

struct BerCurve {
    uint64_t spec_digest = 0;
    modem::Detector detector = modem::Detector::lc;
    std::vector<BerPoint> points;
    std::vector<double> analytic_pb; // empty when no overlay is available
    bool has_analytic = false;
};

struct PairedPoint {
    BerPoint ml;
    BerPoint lc;
};

// One SNR grid entry; detector choice both produces a paired run on shared
// realizations.
PairedPoint run_point(const ExperimentSpec& spec, int snr_index, DetectorChoice detector,
                      int workers);

struct SweepResult {
    std::optional<BerCurve> ml;
    std::optional<BerCurve> lc;
};

SweepResult run_sweep(const ExperimentSpec& spec, int workers);

struct DetectorComparison {
    BerCurve ml;
    BerCurve lc;
};

DetectorComparison compare_detectors(const ExperimentSpec& spec, int workers);

// SNR (dB) at which the curve crosses the BER level, by log-linear
// interpolation; throws when the level is not bracketed.
double snr_at_ber(const BerCurve& curve, double ber_level);

// positive when curve a reaches the level at lower SNR than curve b
double gap_db_at_ber(const BerCurve& a, const BerCurve& b, double ber_level);

} // namespace csim::sim
