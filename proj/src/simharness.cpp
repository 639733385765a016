#include "csim/simharness.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace csim::sim {

namespace {

constexpr long kChunkBlocks = 4096; // early-stop granularity, worker independent

struct BlockTally {
    long long bit_errors_ml = 0;
    long long bit_errors_lc = 0;
    long long block_errors_ml = 0;
    long long block_errors_lc = 0;
    uint64_t digest_sum = 0; // wrap-around sum of per-block realization digests

    void merge(const BlockTally& o) {
        bit_errors_ml += o.bit_errors_ml;
        bit_errors_lc += o.bit_errors_lc;
        block_errors_ml += o.block_errors_ml;
        block_errors_lc += o.block_errors_lc;
        digest_sum += o.digest_sum;
    }
};

void simulate_block(const ExperimentSpec& spec, const channel::ChannelModel& model,
                    int snr_index, long block_index, double n0, bool do_ml, bool do_lc,
                    BlockTally& tally) {
    const modem::SchemeConfig& cfg = spec.scheme;
    const int n_bits = cfg.block_bits();

    RandomStream bit_stream(spec.master_seed, static_cast<uint64_t>(snr_index),
                            static_cast<uint64_t>(block_index), StreamTag::payload_bits);
    RandomStream chan_stream(spec.master_seed, static_cast<uint64_t>(snr_index),
                             static_cast<uint64_t>(block_index), StreamTag::channel);
    RandomStream noise_stream(spec.master_seed, static_cast<uint64_t>(snr_index),
                              static_cast<uint64_t>(block_index), StreamTag::noise);

    const uint64_t raw = bit_stream.next_u64();
    BitVec tx_bits(static_cast<size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) tx_bits[static_cast<size_t>(i)] = static_cast<uint8_t>((raw >> i) & 1u);

    const modem::BitFields fields = modem::split_bits(cfg, tx_bits);
    const modem::TransmitFrame frame = modem::transmit(cfg, fields);
    const channel::ChannelRealization ch = model.draw(chan_stream);

    CMat y = modem::apply_channel(ch.H_true, frame);
    Fnv1a digest;
    digest.absorb_u64(raw);
    for (const cd& v : ch.H_true.a) digest.absorb_cd(v);
    for (const cd& v : ch.H_est.a) digest.absorb_cd(v);
    if (n0 > 0.0) {
        const double sigma = std::sqrt(n0);
        for (int r = 0; r < y.rows; ++r)
            for (int c = 0; c < y.cols; ++c) {
                const cd n = sigma * noise_stream.next_cn();
                digest.absorb_cd(n);
                y(r, c) += n;
            }
    }
    tally.digest_sum += digest.value();

    if (do_ml) {
        const modem::DetectionResult res = modem::detect_ml(cfg, y, ch.H_est);
        const long long errs = static_cast<long long>(hamming_distance(tx_bits, res.decoded_bits));
        tally.bit_errors_ml += errs;
        tally.block_errors_ml += errs > 0 ? 1 : 0;
    }
    if (do_lc) {
        const modem::DetectionResult res = modem::detect_lc(cfg, y, ch.H_est);
        const long long errs = static_cast<long long>(hamming_distance(tx_bits, res.decoded_bits));
        tally.bit_errors_lc += errs;
        tally.block_errors_lc += errs > 0 ? 1 : 0;
    }
}

BerPoint finish_point(const ExperimentSpec& spec, double snr_db, long long blocks,
                      long long bit_errors, long long block_errors, uint64_t digest) {
    BerPoint p;
    p.snr_db = snr_db;
    p.blocks = blocks;
    p.block_errors = block_errors;
    p.bit_errors = bit_errors;
    p.bits_simulated = blocks * spec.scheme.block_bits();
    p.ber = p.bits_simulated > 0 ? static_cast<double>(bit_errors) / p.bits_simulated : 0.0;
    p.ci95_halfwidth =
        p.bits_simulated > 0 ? 1.96 * std::sqrt(p.ber * (1.0 - p.ber) / p.bits_simulated) : 0.0;
    p.ci_reliable = bit_errors >= 100;
    p.stream_digest = digest;
    return p;
}

} // namespace

const char* detector_choice_name(DetectorChoice d) {
    switch (d) {
        case DetectorChoice::ml: return "ml";
        case DetectorChoice::lc: return "lc";
        case DetectorChoice::both: return "both";
    }
    return "lc";
}

DetectorChoice detector_choice_from_name(const std::string& name) {
    if (name == "ml") return DetectorChoice::ml;
    if (name == "lc") return DetectorChoice::lc;
    if (name == "both") return DetectorChoice::both;
    throw std::invalid_argument("unknown detector choice: " + name);
}

void ExperimentSpec::validate() const {
    for (size_t i = 1; i < snr_grid_db.size(); ++i)
        if (snr_grid_db[i] <= snr_grid_db[i - 1])
            throw std::invalid_argument("snr_grid_db must be strictly increasing");
    if (snr_grid_db.empty()) throw std::invalid_argument("snr_grid_db must not be empty");
    if (max_blocks < 1000) throw std::invalid_argument("max_blocks must be >= 1000");
    if (target_errors < 100) throw std::invalid_argument("target_errors must be >= 100");
    if (symbol_duration_Ts <= 0.0) throw std::invalid_argument("symbol_duration_Ts must be positive");
    if (channel.num_rx_Nr != scheme.num_rx_Nr || channel.num_tx_Nt != scheme.num_tx_Nt)
        throw std::invalid_argument("channel antenna counts must match the scheme config");
    if (channel.corr_r < 0.0 || channel.corr_r > 1.0)
        throw std::invalid_argument("channel.corr_r must be in [0, 1]");
    if (channel.csi_error_var < 0.0)
        throw std::invalid_argument("channel.csi_error_var must be nonnegative");
    if (scheme.block_bits() > 62)
        throw std::invalid_argument("block size exceeds the 62-bit payload draw");
}

uint64_t ExperimentSpec::digest() const {
    Fnv1a h;
    h.absorb_u64(static_cast<uint64_t>(scheme.scheme));
    h.absorb_u64(static_cast<uint64_t>(scheme.num_tx_Nt));
    h.absorb_u64(static_cast<uint64_t>(scheme.num_rx_Nr));
    h.absorb_u64(static_cast<uint64_t>(scheme.num_codes_Nc));
    h.absorb_u64(static_cast<uint64_t>(scheme.modulation_order_M));
    h.absorb_u64(static_cast<uint64_t>(scheme.cb.family));
    h.absorb_u64(static_cast<uint64_t>(scheme.cb.length_L));
    for (const cvec& col : scheme.cb.columns)
        for (const cd& v : col) h.absorb_cd(v);
    h.absorb_double(channel.corr_r);
    h.absorb_double(channel.csi_error_var);
    for (const double s : snr_grid_db) h.absorb_double(s);
    h.absorb_u64(static_cast<uint64_t>(max_blocks));
    h.absorb_u64(static_cast<uint64_t>(target_errors));
    h.absorb_u64(master_seed);
    h.absorb_u64(static_cast<uint64_t>(detector));
    h.absorb_double(symbol_duration_Ts);
    return h.value();
}

PairedPoint run_point(const ExperimentSpec& spec, int snr_index, DetectorChoice detector,
                      int workers) {
    spec.validate();
    if (snr_index < 0 || snr_index >= static_cast<int>(spec.snr_grid_db.size()))
        throw std::invalid_argument("run_point: snr_index out of range");
    if (workers < 1) workers = 1;
    const double snr_db = spec.snr_grid_db[static_cast<size_t>(snr_index)];
    const channel::NoiseConfig noise{snr_db, spec.scheme.cb.symbol_energy_Es};
    const double n0 = noise.n0();
    const channel::ChannelModel model(spec.channel);
    const bool do_ml = detector != DetectorChoice::lc;
    const bool do_lc = detector != DetectorChoice::ml;

    BlockTally total;
    long blocks_done = 0;
    while (blocks_done < spec.max_blocks) {
        const long chunk = std::min<long>(kChunkBlocks, spec.max_blocks - blocks_done);
        std::vector<BlockTally> partial(static_cast<size_t>(workers));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t]() {
                BlockTally& tally = partial[static_cast<size_t>(t)];
                for (long b = t; b < chunk; b += workers)
                    simulate_block(spec, model, snr_index, blocks_done + b, n0, do_ml, do_lc,
                                   tally);
            });
        }
        for (std::thread& th : pool) th.join();
        for (const BlockTally& tally : partial) total.merge(tally);
        blocks_done += chunk;

        // stop after a full chunk once every active detector crossed the target
        const long long worst = std::min(do_ml ? total.bit_errors_ml : LLONG_MAX,
                                         do_lc ? total.bit_errors_lc : LLONG_MAX);
        if (worst >= spec.target_errors) break;
    }

    PairedPoint out;
    out.ml = finish_point(spec, snr_db, blocks_done, total.bit_errors_ml, total.block_errors_ml,
                          total.digest_sum);
    out.lc = finish_point(spec, snr_db, blocks_done, total.bit_errors_lc, total.block_errors_lc,
                          total.digest_sum);
    return out;
}

SweepResult run_sweep(const ExperimentSpec& spec, int workers) {
    spec.validate();
    SweepResult out;
    const bool do_ml = spec.detector != DetectorChoice::lc;
    const bool do_lc = spec.detector != DetectorChoice::ml;
    if (do_ml) out.ml = BerCurve{spec.digest(), modem::Detector::ml, {}, {}, false};
    if (do_lc) out.lc = BerCurve{spec.digest(), modem::Detector::lc, {}, {}, false};

    for (int i = 0; i < static_cast<int>(spec.snr_grid_db.size()); ++i) {
        const PairedPoint p = run_point(spec, i, spec.detector, workers);
        if (do_ml) out.ml->points.push_back(p.ml);
        if (do_lc) out.lc->points.push_back(p.lc);
    }

    // analytic overlay only where the closed forms model the channel
    if (spec.analytic_overlay && spec.channel.corr_r == 0.0 && spec.channel.csi_error_var == 0.0) {
        std::vector<double> pb;
        bool ok = true;
        for (const double snr : spec.snr_grid_db) {
            try {
                pb.push_back(analysis::abep(spec.scheme, snr).pb_total);
            } catch (const analysis::HypothesisCapExceeded&) {
                ok = false;
                break;
            }
        }
        if (ok) {
            if (out.ml) {
                out.ml->analytic_pb = pb;
                out.ml->has_analytic = true;
            }
            if (out.lc) {
                out.lc->analytic_pb = pb;
                out.lc->has_analytic = true;
            }
        }
    }
    return out;
}

DetectorComparison compare_detectors(const ExperimentSpec& spec, int workers) {
    if (spec.detector != DetectorChoice::both)
        throw std::invalid_argument("compare_detectors: spec.detector must be 'both'");
    ExperimentSpec paired = spec;
    SweepResult sweep = run_sweep(paired, workers);
    DetectorComparison out;
    out.ml = *sweep.ml;
    out.lc = *sweep.lc;
    for (size_t i = 0; i < out.ml.points.size(); ++i)
        if (out.ml.points[i].stream_digest != out.lc.points[i].stream_digest)
            throw std::logic_error("compare_detectors: paired stream digests diverged");
    return out;
}

double snr_at_ber(const BerCurve& curve, double ber_level) {
    if (ber_level <= 0.0) throw std::invalid_argument("snr_at_ber: level must be positive");
    for (size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const BerPoint& a = curve.points[i];
        const BerPoint& b = curve.points[i + 1];
        if (a.ber >= ber_level && b.ber <= ber_level && a.ber > 0.0 && b.ber > 0.0) {
            if (a.ber == b.ber) return a.snr_db;
            const double la = std::log10(a.ber);
            const double lb = std::log10(b.ber);
            const double lt = std::log10(ber_level);
            return a.snr_db + (b.snr_db - a.snr_db) * (la - lt) / (la - lb);
        }
    }
    throw std::runtime_error("snr_at_ber: BER level not bracketed by the curve");
}

double gap_db_at_ber(const BerCurve& a, const BerCurve& b, double ber_level) {
    return snr_at_ber(b, ber_level) - snr_at_ber(a, ber_level);
}

} // namespace csim::sim
