// Transceivers for the three code-spatial index-modulation schemes:
// bit segmentation, Gray-labelled PSK mapping, transmit-matrix construction,
// and the two detector families (exhaustive ML and despreading-based LC).
//
// All bit lists are MSB-first; blocks carry b_t bits (single-interval scheme)
// or 2*b_t bits (two-interval schemes). Plain SM / Alamouti-pair baselines
// are the Nc = 1 degenerate configurations.

#pragma once

#include <optional>
#include <vector>

#include "csim/bits.hpp"
#include "csim/codebook.hpp"
#include "csim/mat.hpp"
#include "csim/spacetime.hpp"

namespace csim::modem {

enum class Scheme { sm_cim, stbc_sm_cim, estbc_sm_cim };
enum class Detector { ml, lc };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct SchemeConfig {
    Scheme scheme = Scheme::sm_cim;
    int num_tx_Nt = 0;
    int num_rx_Nr = 0;
    int num_codes_Nc = 0;
    int modulation_order_M = 0;
    codebook::SpreadingCodebook cb;
    std::optional<spacetime::StbcSmCodebook> spatial; // both Alamouti schemes
    std::optional<codebook::SequencePairSet> pairs;   // dual-sequence scheme only

    // validates the parameter combination and builds spatial/pair tables
    static SchemeConfig make(Scheme scheme, int nt, int nr, int nc, int m,
                             codebook::SpreadingCodebook cb);

    int intervals() const { return scheme == Scheme::sm_cim ? 1 : 2; }
    int span() const { return cb.length_L * intervals(); }
    double power_scale() const;

    // per-block bit allocation (b1 index, b2 symbol, b3 code bits)
    int bits_b1() const;
    int bits_b2() const;
    int bits_b3() const;
    int block_bits() const { return bits_b1() + bits_b2() + bits_b3(); }
    double bits_per_interval() const {
        return static_cast<double>(block_bits()) / intervals();
    }
    int symbols_per_block() const;
};

struct BitFields {
    BitVec b1_index_bits;
    BitVec b2_symbol_bits;
    BitVec b3_code_bits;
};

BitFields split_bits(const SchemeConfig& cfg, const BitVec& block);

// Gray-labelled M-PSK: bits -> exp(j*2*pi*k/M), k the Gray-decoded integer
cd psk_map(const BitVec& bits, int m);
cd psk_symbol(int k, int m); // exp(j*2*pi*k/M)
BitVec psk_demap_index(int k, int m);

struct TransmitFrame {
    CMat matrix; // Nt x span, unscaled
    double power_scale = 1.0;
    std::vector<int> active_rows; // 0-based antenna rows carrying energy
};

TransmitFrame tx_sm_cim(const SchemeConfig& cfg, const BitFields& fields);
TransmitFrame tx_stbc_sm_cim(const SchemeConfig& cfg, const BitFields& fields);
TransmitFrame tx_estbc_sm_cim(const SchemeConfig& cfg, const BitFields& fields);
TransmitFrame transmit(const SchemeConfig& cfg, const BitFields& fields);

// scale * H * X exploiting the frame's sparse row structure
CMat apply_channel(const CMat& h, const TransmitFrame& frame);

struct DetectionResult {
    int code_index = 0;                    // n_c, or the pair index n_s, 1-based
    std::pair<int, int> code_pair{0, 0};   // dual-sequence scheme only
    int antenna_index = 0;                 // n_t or n_z, 1-based
    std::vector<int> symbol_indices;       // constellation indices in block order
    std::vector<cd> symbol_estimates;
    BitVec decoded_bits;
    long hypotheses_evaluated = 0;
};

DetectionResult detect_ml(const SchemeConfig& cfg, const CMat& y, const CMat& h);
DetectionResult detect_lc(const SchemeConfig& cfg, const CMat& y, const CMat& h);

// scheme-specific LC entry points (the two-interval ones take Y split in time)
DetectionResult detect_lc_sm_cim(const SchemeConfig& cfg, const CMat& y, const CMat& h);
DetectionResult detect_lc_stbc_sm_cim(const SchemeConfig& cfg, const CMat& y1, const CMat& y2,
                                      const CMat& h);
DetectionResult detect_lc_estbc_sm_cim(const SchemeConfig& cfg, const CMat& y1, const CMat& y2,
                                       const CMat& h);

BitVec assemble_bits(const DetectionResult& result, const SchemeConfig& cfg);

// 2Nr x 2 conjugate-interleaved Alamouti combining matrix for the antenna
// pair (a, b) with rotation factor theta; columns are orthogonal.
CMat equivalent_channel(const CMat& h, int a1based, int b1based, cd theta);

} // namespace csim::modem
