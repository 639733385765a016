#include "csim/modem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csim::modem {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// W(r, i) = sum_l Y(r, l) * conj(z_i[l])
CMat despread(const CMat& y, const codebook::SpreadingCodebook& cb, int col_offset) {
    CMat w(y.rows, cb.count_Nc);
    for (int r = 0; r < y.rows; ++r) {
        for (int i = 0; i < cb.count_Nc; ++i) {
            const cvec& z = cb.sequence(i);
            cd acc(0.0, 0.0);
            for (int l = 0; l < cb.length_L; ++l) acc += y(r, col_offset + l) * std::conj(z[l]);
            w(r, i) = acc;
        }
    }
    return w;
}

cvec column(const CMat& m, int c) {
    cvec out(m.rows);
    for (int r = 0; r < m.rows; ++r) out[r] = m(r, c);
    return out;
}

// per-antenna channel caches used by the algebraic ML metrics
struct ChannelCache {
    std::vector<double> col_norm2;        // ||h_j||^2
    CMat cross;                           // cross(i, j) = h_i^H h_j
    explicit ChannelCache(const CMat& h) : col_norm2(h.cols), cross(h.cols, h.cols) {
        for (int i = 0; i < h.cols; ++i) {
            for (int j = 0; j < h.cols; ++j) {
                cd acc(0.0, 0.0);
                for (int r = 0; r < h.rows; ++r) acc += std::conj(h(r, i)) * h(r, j);
                cross(i, j) = acc;
            }
            col_norm2[i] = cross(i, i).real();
        }
    }
};

// dots(i, j) = w_i^H h_j for despread matrix W (Nr x Nc) and channel H
CMat despread_channel_dots(const CMat& w, const CMat& h) {
    CMat dots(w.cols, h.cols);
    for (int i = 0; i < w.cols; ++i)
        for (int j = 0; j < h.cols; ++j) {
            cd acc(0.0, 0.0);
            for (int r = 0; r < w.rows; ++r) acc += std::conj(w(r, i)) * h(r, j);
            dots(i, j) = acc;
        }
    return dots;
}

} // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::sm_cim: return "sm_cim";
        case Scheme::stbc_sm_cim: return "stbc_sm_cim";
        case Scheme::estbc_sm_cim: return "estbc_sm_cim";
    }
    return "sm_cim";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "sm_cim") return Scheme::sm_cim;
    if (name == "stbc_sm_cim") return Scheme::stbc_sm_cim;
    if (name == "estbc_sm_cim") return Scheme::estbc_sm_cim;
    throw std::invalid_argument("unknown scheme: " + name);
}

SchemeConfig SchemeConfig::make(Scheme scheme, int nt, int nr, int nc, int m,
                                codebook::SpreadingCodebook cb) {
    require(nr >= 1, "config: Nr must be >= 1");
    require(m >= 2 && is_power_of_two(static_cast<uint64_t>(m)), "config: M must be a power of two >= 2");
    require(nc >= 1, "config: Nc must be >= 1");
    require(cb.count_Nc == nc, "config: codebook size differs from Nc");

    SchemeConfig cfg;
    cfg.scheme = scheme;
    cfg.num_tx_Nt = nt;
    cfg.num_rx_Nr = nr;
    cfg.num_codes_Nc = nc;
    cfg.modulation_order_M = m;
    cfg.cb = std::move(cb);
    switch (scheme) {
        case Scheme::sm_cim:
            require(nt >= 1 && is_power_of_two(static_cast<uint64_t>(nt)),
                    "config: sm_cim needs Nt a power of two");
            require(is_power_of_two(static_cast<uint64_t>(nc)),
                    "config: sm_cim needs Nc a power of two");
            break;
        case Scheme::stbc_sm_cim:
            require(is_power_of_two(static_cast<uint64_t>(nc)),
                    "config: stbc_sm_cim needs Nc a power of two");
            cfg.spatial = spacetime::build_stbc_sm_codebook(nt, m);
            break;
        case Scheme::estbc_sm_cim:
            require(nc >= 2, "config: estbc_sm_cim needs Nc >= 2");
            cfg.spatial = spacetime::build_stbc_sm_codebook(nt, m);
            cfg.pairs = codebook::enumerate_sequence_pairs(nc);
            break;
    }
    return cfg;
}

double SchemeConfig::power_scale() const {
    switch (scheme) {
        case Scheme::sm_cim: return 1.0;
        case Scheme::stbc_sm_cim: return std::sqrt(0.5);
        case Scheme::estbc_sm_cim: return 0.5;
    }
    return 1.0;
}

int SchemeConfig::bits_b1() const {
    return scheme == Scheme::sm_cim ? int_log2(static_cast<uint64_t>(num_tx_Nt))
                                    : int_log2(static_cast<uint64_t>(spatial->codeword_count_Nz));
}

int SchemeConfig::bits_b2() const { return symbols_per_block() * int_log2(static_cast<uint64_t>(modulation_order_M)); }

int SchemeConfig::bits_b3() const {
    if (scheme == Scheme::estbc_sm_cim) return int_log2(static_cast<uint64_t>(pairs->pair_count_Ns));
    return int_log2(static_cast<uint64_t>(num_codes_Nc));
}

int SchemeConfig::symbols_per_block() const {
    switch (scheme) {
        case Scheme::sm_cim: return 1;
        case Scheme::stbc_sm_cim: return 2;
        case Scheme::estbc_sm_cim: return 4;
    }
    return 1;
}

BitFields split_bits(const SchemeConfig& cfg, const BitVec& block) {
    if (static_cast<int>(block.size()) != cfg.block_bits())
        throw std::invalid_argument("split_bits: block length mismatch");
    const size_t n1 = static_cast<size_t>(cfg.bits_b1());
    const size_t n2 = static_cast<size_t>(cfg.bits_b2());
    BitFields f;
    f.b1_index_bits.assign(block.begin(), block.begin() + n1);
    f.b2_symbol_bits.assign(block.begin() + n1, block.begin() + n1 + n2);
    f.b3_code_bits.assign(block.begin() + n1 + n2, block.end());
    return f;
}

cd psk_symbol(int k, int m) {
    const double phase = 2.0 * kPi * k / m;
    return {std::cos(phase), std::sin(phase)};
}

cd psk_map(const BitVec& bits, int m) {
    const int nbits = int_log2(static_cast<uint64_t>(m));
    if (static_cast<int>(bits.size()) != nbits)
        throw std::invalid_argument("psk_map: bit count does not match log2(M)");
    const uint32_t g = static_cast<uint32_t>(bits_to_uint(bits, 0, bits.size()));
    return psk_symbol(static_cast<int>(gray_decode(g)), m);
}

BitVec psk_demap_index(int k, int m) {
    return uint_to_bits(gray_encode(static_cast<uint32_t>(k)), int_log2(static_cast<uint64_t>(m)));
}

TransmitFrame tx_sm_cim(const SchemeConfig& cfg, const BitFields& fields) {
    const int nt0 = static_cast<int>(bits_to_uint(fields.b1_index_bits, 0, fields.b1_index_bits.size()));
    const int nc0 = static_cast<int>(bits_to_uint(fields.b3_code_bits, 0, fields.b3_code_bits.size()));
    const cd x = psk_map(fields.b2_symbol_bits, cfg.modulation_order_M);
    const cvec& z = cfg.cb.sequence(nc0);

    TransmitFrame frame;
    frame.power_scale = cfg.power_scale();
    frame.matrix = CMat(cfg.num_tx_Nt, cfg.cb.length_L);
    frame.active_rows = {nt0};
    for (int l = 0; l < cfg.cb.length_L; ++l) frame.matrix(nt0, l) = z[l] * x;
    return frame;
}

TransmitFrame tx_stbc_sm_cim(const SchemeConfig& cfg, const BitFields& fields) {
    const auto& sp = *cfg.spatial;
    const int nz0 = static_cast<int>(bits_to_uint(fields.b1_index_bits, 0, fields.b1_index_bits.size()));
    const int nc0 = static_cast<int>(bits_to_uint(fields.b3_code_bits, 0, fields.b3_code_bits.size()));
    const int mbits = int_log2(static_cast<uint64_t>(cfg.modulation_order_M));
    const cd x1 = psk_map(BitVec(fields.b2_symbol_bits.begin(), fields.b2_symbol_bits.begin() + mbits),
                          cfg.modulation_order_M);
    const cd x2 = psk_map(BitVec(fields.b2_symbol_bits.begin() + mbits, fields.b2_symbol_bits.end()),
                          cfg.modulation_order_M);
    const auto [a, b] = sp.antenna_pairs[static_cast<size_t>(nz0)];
    const cd theta = sp.rotation_factor(nz0 + 1);
    const cvec& z = cfg.cb.sequence(nc0);
    const int L = cfg.cb.length_L;

    TransmitFrame frame;
    frame.power_scale = cfg.power_scale();
    frame.matrix = CMat(cfg.num_tx_Nt, 2 * L);
    frame.active_rows = {a - 1, b - 1};
    for (int l = 0; l < L; ++l) {
        const cd zl = theta * z[l];
        frame.matrix(a - 1, l) = zl * x1;
        frame.matrix(b - 1, l) = zl * x2;
        frame.matrix(a - 1, L + l) = zl * -std::conj(x2);
        frame.matrix(b - 1, L + l) = zl * std::conj(x1);
    }
    return frame;
}

TransmitFrame tx_estbc_sm_cim(const SchemeConfig& cfg, const BitFields& fields) {
    const auto& sp = *cfg.spatial;
    const int nz0 = static_cast<int>(bits_to_uint(fields.b1_index_bits, 0, fields.b1_index_bits.size()));
    const int ns0 = static_cast<int>(bits_to_uint(fields.b3_code_bits, 0, fields.b3_code_bits.size()));
    const int mbits = int_log2(static_cast<uint64_t>(cfg.modulation_order_M));
    cd sym[4]; // x1^1, x2^1, x1^2, x2^2
    for (int s = 0; s < 4; ++s)
        sym[s] = psk_map(BitVec(fields.b2_symbol_bits.begin() + s * mbits,
                                fields.b2_symbol_bits.begin() + (s + 1) * mbits),
                         cfg.modulation_order_M);
    const auto [a, b] = sp.antenna_pairs[static_cast<size_t>(nz0)];
    const cd theta = sp.rotation_factor(nz0 + 1);
    const auto [u1, v1] = cfg.pairs->pairs[static_cast<size_t>(ns0)];
    const cvec& zu = cfg.cb.sequence(u1 - 1);
    const cvec& zv = cfg.cb.sequence(v1 - 1);
    const int L = cfg.cb.length_L;

    TransmitFrame frame;
    frame.power_scale = cfg.power_scale();
    frame.matrix = CMat(cfg.num_tx_Nt, 2 * L);
    frame.active_rows = {a - 1, b - 1};
    for (int l = 0; l < L; ++l) {
        const cd zul = theta * zu[l];
        const cd zvl = theta * zv[l];
        frame.matrix(a - 1, l) = zul * sym[0] + zvl * sym[2];
        frame.matrix(b - 1, l) = zul * sym[1] + zvl * sym[3];
        frame.matrix(a - 1, L + l) = -(zul * std::conj(sym[1]) + zvl * std::conj(sym[3]));
        frame.matrix(b - 1, L + l) = zul * std::conj(sym[0]) + zvl * std::conj(sym[2]);
    }
    return frame;
}

TransmitFrame transmit(const SchemeConfig& cfg, const BitFields& fields) {
    switch (cfg.scheme) {
        case Scheme::sm_cim: return tx_sm_cim(cfg, fields);
        case Scheme::stbc_sm_cim: return tx_stbc_sm_cim(cfg, fields);
        case Scheme::estbc_sm_cim: return tx_estbc_sm_cim(cfg, fields);
    }
    throw std::logic_error("transmit: unknown scheme");
}

CMat apply_channel(const CMat& h, const TransmitFrame& frame) {
    if (h.cols != frame.matrix.rows) throw std::invalid_argument("apply_channel: shape mismatch");
    CMat y(h.rows, frame.matrix.cols);
    for (const int j : frame.active_rows) {
        for (int r = 0; r < h.rows; ++r) {
            const cd hrj = frame.power_scale * h(r, j);
            for (int l = 0; l < frame.matrix.cols; ++l) y(r, l) += hrj * frame.matrix(j, l);
        }
    }
    return y;
}

CMat equivalent_channel(const CMat& h, int a1based, int b1based, cd theta) {
    CMat eq(2 * h.rows, 2);
    for (int r = 0; r < h.rows; ++r) {
        const cd ha = h(r, a1based - 1) * theta;
        const cd hb = h(r, b1based - 1) * theta;
        eq(2 * r, 0) = ha;
        eq(2 * r, 1) = hb;
        eq(2 * r + 1, 0) = std::conj(hb);
        eq(2 * r + 1, 1) = -std::conj(ha);
    }
    return eq;
}

DetectionResult detect_ml(const SchemeConfig& cfg, const CMat& y, const CMat& h) {
    if (y.rows != cfg.num_rx_Nr || y.cols != cfg.span())
        throw std::invalid_argument("detect_ml: received matrix shape mismatch");
    if (h.rows != cfg.num_rx_Nr || h.cols != cfg.num_tx_Nt)
        throw std::invalid_argument("detect_ml: channel matrix shape mismatch");

    const int L = cfg.cb.length_L;
    const double es = cfg.cb.symbol_energy_Es;
    const double s = cfg.power_scale();
    const int m = cfg.modulation_order_M;
    const int mbits = int_log2(static_cast<uint64_t>(m));
    const int n_b = cfg.block_bits();

    if (n_b > 26) throw std::invalid_argument("detect_ml: hypothesis space exceeds 2^26");

    const ChannelCache cache(h);
    std::vector<cd> constellation(m);
    for (int k = 0; k < m; ++k) constellation[k] = psk_symbol(k, m);
    // Gray labels enumerate hypotheses in bit order; map slice value -> symbol
    std::vector<cd> by_bits(m);
    for (int g = 0; g < m; ++g) by_bits[g] = constellation[gray_decode(static_cast<uint32_t>(g))];

    DetectionResult best;
    double best_metric = std::numeric_limits<double>::infinity();
    uint64_t best_v = 0;
    const uint64_t count = 1ULL << n_b;

    if (cfg.scheme == Scheme::sm_cim) {
        const CMat w = despread(y, cfg.cb, 0);
        const CMat dots = despread_channel_dots(w, h); // w_i^H h_j
        const int n3 = cfg.bits_b3();
        for (uint64_t v = 0; v < count; ++v) {
            const int nt0 = static_cast<int>(v >> (mbits + n3));
            const int g = static_cast<int>((v >> n3) & static_cast<uint64_t>(m - 1));
            const int nc0 = static_cast<int>(v & ((1ULL << n3) - 1));
            const cd x = by_bits[g];
            const double metric =
                s * s * es * cache.col_norm2[static_cast<size_t>(nt0)] -
                2.0 * s * (x * dots(nc0, nt0)).real();
            if (metric < best_metric) {
                best_metric = metric;
                best_v = v;
            }
        }
        best.hypotheses_evaluated = static_cast<long>(count);
        const int n3mask = (1 << n3) - 1;
        best.antenna_index = static_cast<int>(best_v >> (mbits + n3)) + 1;
        best.code_index = static_cast<int>(best_v & static_cast<uint64_t>(n3mask)) + 1;
        best.symbol_indices = {static_cast<int>(gray_decode(static_cast<uint32_t>((best_v >> n3) & (m - 1))))};
    } else {
        const CMat w1 = despread(y, cfg.cb, 0);
        const CMat w2 = despread(y, cfg.cb, L);
        const CMat dots1 = despread_channel_dots(w1, h);
        const CMat dots2 = despread_channel_dots(w2, h);
        const auto& sp = *cfg.spatial;
        const int n3 = cfg.bits_b3();

        if (cfg.scheme == Scheme::stbc_sm_cim) {
            for (uint64_t v = 0; v < count; ++v) {
                const int nz0 = static_cast<int>(v >> (2 * mbits + n3));
                const int g1 = static_cast<int>((v >> (mbits + n3)) & (m - 1));
                const int g2 = static_cast<int>((v >> n3) & (m - 1));
                const int nc0 = static_cast<int>(v & ((1ULL << n3) - 1));
                const cd x1 = by_bits[g1];
                const cd x2 = by_bits[g2];
                const auto [a, b] = sp.antenna_pairs[static_cast<size_t>(nz0)];
                const cd theta = sp.rotation_factor(nz0 + 1);
                const int ia = a - 1, ib = b - 1;
                const cd hab = cache.cross(ia, ib);
                double metric = 0.0;
                // interval 1 coefficients (x1, x2); interval 2 (-x2*, x1*)
                {
                    const double cn = cache.col_norm2[ia] + cache.col_norm2[ib] +
                                      2.0 * (std::conj(x1) * x2 * hab).real();
                    const cd corr = theta * (x1 * dots1(nc0, ia) + x2 * dots1(nc0, ib));
                    metric += s * s * es * cn - 2.0 * s * corr.real();
                }
                {
                    const cd a2 = -std::conj(x2), b2 = std::conj(x1);
                    const double cn = cache.col_norm2[ia] + cache.col_norm2[ib] +
                                      2.0 * (std::conj(a2) * b2 * hab).real();
                    const cd corr = theta * (a2 * dots2(nc0, ia) + b2 * dots2(nc0, ib));
                    metric += s * s * es * cn - 2.0 * s * corr.real();
                }
                if (metric < best_metric) {
                    best_metric = metric;
                    best_v = v;
                }
            }
            best.hypotheses_evaluated = static_cast<long>(count);
            best.antenna_index = static_cast<int>(best_v >> (2 * mbits + n3)) + 1;
            best.code_index = static_cast<int>(best_v & ((1ULL << n3) - 1)) + 1;
            best.symbol_indices = {
                static_cast<int>(gray_decode(static_cast<uint32_t>((best_v >> (mbits + n3)) & (m - 1)))),
                static_cast<int>(gray_decode(static_cast<uint32_t>((best_v >> n3) & (m - 1))))};
        } else {
            // dual-sequence scheme; cross terms keep the metric exact for
            // quasi-orthogonal codebooks
            const auto& ps = *cfg.pairs;
            std::vector<cd> pair_gram(ps.pairs.size());
            for (size_t p = 0; p < ps.pairs.size(); ++p)
                pair_gram[p] = vdot(cfg.cb.sequence(ps.pairs[p].first - 1),
                                    cfg.cb.sequence(ps.pairs[p].second - 1));
            for (uint64_t v = 0; v < count; ++v) {
                const int nz0 = static_cast<int>(v >> (4 * mbits + n3));
                const int g11 = static_cast<int>((v >> (3 * mbits + n3)) & (m - 1));
                const int g21 = static_cast<int>((v >> (2 * mbits + n3)) & (m - 1));
                const int g12 = static_cast<int>((v >> (mbits + n3)) & (m - 1));
                const int g22 = static_cast<int>((v >> n3) & (m - 1));
                const int ns0 = static_cast<int>(v & ((1ULL << n3) - 1));
                const cd x11 = by_bits[g11], x21 = by_bits[g21];
                const cd x12 = by_bits[g12], x22 = by_bits[g22];
                const auto [a, b] = sp.antenna_pairs[static_cast<size_t>(nz0)];
                const cd theta = sp.rotation_factor(nz0 + 1);
                const int ia = a - 1, ib = b - 1;
                const cd hab = cache.cross(ia, ib);
                const auto [u1, v1] = ps.pairs[static_cast<size_t>(ns0)];
                const int iu = u1 - 1, iv = v1 - 1;
                const cd kuv = pair_gram[static_cast<size_t>(ns0)]; // z_u^H z_v
                double metric = 0.0;
                for (int tau = 0; tau < 2; ++tau) {
                    cd a1c, b1c, a2c, b2c; // stream coefficients on antennas a, b
                    if (tau == 0) {
                        a1c = x11; b1c = x21;
                        a2c = x12; b2c = x22;
                    } else {
                        a1c = -std::conj(x21); b1c = std::conj(x11);
                        a2c = -std::conj(x22); b2c = std::conj(x12);
                    }
                    const double cn1 = std::norm(a1c) * cache.col_norm2[ia] +
                                       std::norm(b1c) * cache.col_norm2[ib] +
                                       2.0 * (std::conj(a1c) * b1c * hab).real();
                    const double cn2 = std::norm(a2c) * cache.col_norm2[ia] +
                                       std::norm(b2c) * cache.col_norm2[ib] +
                                       2.0 * (std::conj(a2c) * b2c * hab).real();
                    const cd c1hc2 = std::conj(a1c) * a2c * cache.col_norm2[ia] +
                                     std::conj(b1c) * b2c * cache.col_norm2[ib] +
                                     std::conj(a1c) * b2c * hab +
                                     std::conj(b1c) * a2c * std::conj(hab);
                    const double energy = es * (cn1 + cn2) + 2.0 * (c1hc2 * kuv).real();
                    const CMat& dots = tau == 0 ? dots1 : dots2;
                    const cd corr = theta * (a1c * dots(iu, ia) + b1c * dots(iu, ib) +
                                             a2c * dots(iv, ia) + b2c * dots(iv, ib));
                    metric += s * s * energy - 2.0 * s * corr.real();
                }
                if (metric < best_metric) {
                    best_metric = metric;
                    best_v = v;
                }
            }
            best.hypotheses_evaluated = static_cast<long>(count);
            best.antenna_index = static_cast<int>(best_v >> (4 * mbits + n3)) + 1;
            best.code_index = static_cast<int>(best_v & ((1ULL << n3) - 1)) + 1;
            best.code_pair = ps.pairs[static_cast<size_t>(best.code_index - 1)];
            best.symbol_indices.resize(4);
            for (int sidx = 0; sidx < 4; ++sidx) {
                const int shift = (3 - sidx) * mbits + n3;
                best.symbol_indices[sidx] =
                    static_cast<int>(gray_decode(static_cast<uint32_t>((best_v >> shift) & (m - 1))));
            }
        }
    }

    best.symbol_estimates.clear();
    for (const int k : best.symbol_indices) best.symbol_estimates.push_back(psk_symbol(k, m));
    best.decoded_bits = assemble_bits(best, cfg);
    return best;
}

namespace {

// min over the constellation of ||d - kappa * col * x||^2; returns metric and index
struct SymbolDecision {
    double metric;
    int index;
};

SymbolDecision min_over_psk(const cvec& d, const cvec& col, double kappa, int m) {
    SymbolDecision best{std::numeric_limits<double>::infinity(), 0};
    for (int k = 0; k < m; ++k) {
        const cd x = psk_symbol(k, m);
        double metric = 0.0;
        for (size_t r = 0; r < d.size(); ++r) metric += std::norm(d[r] - kappa * col[r] * x);
        if (metric < best.metric) best = {metric, k};
    }
    return best;
}

} // namespace

DetectionResult detect_lc_sm_cim(const SchemeConfig& cfg, const CMat& y, const CMat& h) {
    const double es = cfg.cb.symbol_energy_Es;
    const int m = cfg.modulation_order_M;
    const CMat w = despread(y, cfg.cb, 0);

    int nc0 = 0;
    double best_energy = -1.0;
    for (int i = 0; i < cfg.num_codes_Nc; ++i) {
        double e = 0.0;
        for (int r = 0; r < w.rows; ++r) e += std::norm(w(r, i));
        if (e > best_energy) {
            best_energy = e;
            nc0 = i;
        }
    }

    const cvec d = column(w, nc0);
    DetectionResult res;
    double best_metric = std::numeric_limits<double>::infinity();
    for (int nt0 = 0; nt0 < cfg.num_tx_Nt; ++nt0) {
        const cvec hcol = column(h, nt0);
        const SymbolDecision dec = min_over_psk(d, hcol, es, m);
        if (dec.metric < best_metric) {
            best_metric = dec.metric;
            res.antenna_index = nt0 + 1;
            res.symbol_indices = {dec.index};
        }
    }
    res.code_index = nc0 + 1;
    res.hypotheses_evaluated = cfg.num_codes_Nc + static_cast<long>(cfg.num_tx_Nt) * m;
    res.symbol_estimates = {psk_symbol(res.symbol_indices[0], m)};
    res.decoded_bits = assemble_bits(res, cfg);
    return res;
}

DetectionResult detect_lc_stbc_sm_cim(const SchemeConfig& cfg, const CMat& y1, const CMat& y2,
                                      const CMat& h) {
    const double es = cfg.cb.symbol_energy_Es;
    const double kappa = cfg.power_scale() * es;
    const int m = cfg.modulation_order_M;
    const auto& sp = *cfg.spatial;
    const CMat w1 = despread(y1, cfg.cb, 0);
    const CMat w2 = despread(y2, cfg.cb, 0);

    int nc0 = 0;
    double best_energy = -1.0;
    for (int i = 0; i < cfg.num_codes_Nc; ++i) {
        double e = 0.0;
        for (int r = 0; r < w1.rows; ++r) e += std::norm(w1(r, i)) + std::norm(w2(r, i));
        if (e > best_energy) {
            best_energy = e;
            nc0 = i;
        }
    }

    // d = vec([d_1 | conj(d_2)]^T): per receive antenna, (interval 1, conj interval 2)
    cvec d(2 * static_cast<size_t>(cfg.num_rx_Nr));
    for (int r = 0; r < cfg.num_rx_Nr; ++r) {
        d[2 * r] = w1(r, nc0);
        d[2 * r + 1] = std::conj(w2(r, nc0));
    }

    DetectionResult res;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int nz0 = 0; nz0 < sp.codeword_count_Nz; ++nz0) {
        const auto [a, b] = sp.antenna_pairs[static_cast<size_t>(nz0)];
        const CMat eq = equivalent_channel(h, a, b, sp.rotation_factor(nz0 + 1));
        const SymbolDecision d1 = min_over_psk(d, column(eq, 0), kappa, m);
        const SymbolDecision d2 = min_over_psk(d, column(eq, 1), kappa, m);
        const double sum = d1.metric + d2.metric;
        if (sum < best_sum) {
            best_sum = sum;
            res.antenna_index = nz0 + 1;
            res.symbol_indices = {d1.index, d2.index};
        }
    }
    res.code_index = nc0 + 1;
    res.hypotheses_evaluated =
        cfg.num_codes_Nc + static_cast<long>(sp.codeword_count_Nz) * 2 * m;
    res.symbol_estimates = {psk_symbol(res.symbol_indices[0], m), psk_symbol(res.symbol_indices[1], m)};
    res.decoded_bits = assemble_bits(res, cfg);
    return res;
}

DetectionResult detect_lc_estbc_sm_cim(const SchemeConfig& cfg, const CMat& y1, const CMat& y2,
                                       const CMat& h) {
    if (cfg.num_codes_Nc < 2)
        throw std::invalid_argument("detect_lc_estbc_sm_cim: needs Nc >= 2");
    const double es = cfg.cb.symbol_energy_Es;
    const double kappa = cfg.power_scale() * es;
    const int m = cfg.modulation_order_M;
    const auto& sp = *cfg.spatial;
    const auto& ps = *cfg.pairs;
    const CMat w1 = despread(y1, cfg.cb, 0);
    const CMat w2 = despread(y2, cfg.cb, 0);

    std::vector<double> energy(static_cast<size_t>(cfg.num_codes_Nc), 0.0);
    for (int i = 0; i < cfg.num_codes_Nc; ++i)
        for (int r = 0; r < cfg.num_rx_Nr; ++r)
            energy[static_cast<size_t>(i)] += std::norm(w1(r, i)) + std::norm(w2(r, i));
    std::vector<int> ranked(static_cast<size_t>(cfg.num_codes_Nc));
    for (int i = 0; i < cfg.num_codes_Nc; ++i) ranked[static_cast<size_t>(i)] = i;
    std::stable_sort(ranked.begin(), ranked.end(), [&](int i, int j) {
        return energy[static_cast<size_t>(i)] > energy[static_cast<size_t>(j)];
    });

    // top-two columns, resolved against the truncated pair set
    const int first = ranked[0];
    int second = ranked[1];
    auto sorted1 = [](int i0, int j0) {
        return std::make_pair(std::min(i0, j0) + 1, std::max(i0, j0) + 1);
    };
    auto pr = sorted1(first, second);
    if (ps.index_of(pr.first, pr.second) < 0) {
        bool found = false;
        for (size_t k = 1; k < ranked.size() && !found; ++k) {
            const auto cand = sorted1(first, ranked[k]);
            if (ps.index_of(cand.first, cand.second) >= 0) {
                second = ranked[k];
                pr = cand;
                found = true;
            }
        }
        if (!found) {
            // re-anchor on the second-ranked column
            const int anchor = ranked[1];
            for (size_t k = 0; k < ranked.size(); ++k) {
                if (ranked[k] == anchor) continue;
                const auto cand = sorted1(anchor, ranked[k]);
                if (ps.index_of(cand.first, cand.second) >= 0) {
                    pr = cand;
                    break;
                }
            }
        }
    }
    const int ns0 = ps.index_of(pr.first, pr.second);
    if (ns0 < 0) throw std::runtime_error("detect_lc_estbc_sm_cim: no valid sequence pair");

    // stream tau uses the tau-th index of the sorted pair
    cvec d[2];
    const int seq_idx0[2] = {pr.first - 1, pr.second - 1};
    for (int tau = 0; tau < 2; ++tau) {
        d[tau].resize(2 * static_cast<size_t>(cfg.num_rx_Nr));
        for (int r = 0; r < cfg.num_rx_Nr; ++r) {
            d[tau][2 * r] = w1(r, seq_idx0[tau]);
            d[tau][2 * r + 1] = std::conj(w2(r, seq_idx0[tau]));
        }
    }

    DetectionResult res;
    double best_sum = std::numeric_limits<double>::infinity();
    for (int nz0 = 0; nz0 < sp.codeword_count_Nz; ++nz0) {
        const auto [a, b] = sp.antenna_pairs[static_cast<size_t>(nz0)];
        const CMat eq = equivalent_channel(h, a, b, sp.rotation_factor(nz0 + 1));
        const cvec col1 = column(eq, 0);
        const cvec col2 = column(eq, 1);
        double sum = 0.0;
        int idx[4];
        for (int tau = 0; tau < 2; ++tau) {
            const SymbolDecision s1 = min_over_psk(d[tau], col1, kappa, m);
            const SymbolDecision s2 = min_over_psk(d[tau], col2, kappa, m);
            sum += s1.metric + s2.metric;
            idx[2 * tau] = s1.index;
            idx[2 * tau + 1] = s2.index;
        }
        if (sum < best_sum) {
            best_sum = sum;
            res.antenna_index = nz0 + 1;
            res.symbol_indices = {idx[0], idx[1], idx[2], idx[3]};
        }
    }
    res.code_index = ns0 + 1;
    res.code_pair = pr;
    res.hypotheses_evaluated =
        cfg.num_codes_Nc + static_cast<long>(sp.codeword_count_Nz) * 4 * m;
    for (const int k : res.symbol_indices) res.symbol_estimates.push_back(psk_symbol(k, m));
    res.decoded_bits = assemble_bits(res, cfg);
    return res;
}

DetectionResult detect_lc(const SchemeConfig& cfg, const CMat& y, const CMat& h) {
    if (y.rows != cfg.num_rx_Nr || y.cols != cfg.span())
        throw std::invalid_argument("detect_lc: received matrix shape mismatch");
    if (h.rows != cfg.num_rx_Nr || h.cols != cfg.num_tx_Nt)
        throw std::invalid_argument("detect_lc: channel matrix shape mismatch");
    if (cfg.scheme == Scheme::sm_cim) return detect_lc_sm_cim(cfg, y, h);
    const int L = cfg.cb.length_L;
    CMat y1(y.rows, L), y2(y.rows, L);
    for (int r = 0; r < y.rows; ++r)
        for (int l = 0; l < L; ++l) {
            y1(r, l) = y(r, l);
            y2(r, l) = y(r, L + l);
        }
    return cfg.scheme == Scheme::stbc_sm_cim ? detect_lc_stbc_sm_cim(cfg, y1, y2, h)
                                             : detect_lc_estbc_sm_cim(cfg, y1, y2, h);
}

BitVec assemble_bits(const DetectionResult& result, const SchemeConfig& cfg) {
    BitVec out;
    out.reserve(static_cast<size_t>(cfg.block_bits()));
    append_bits(out, static_cast<uint64_t>(result.antenna_index - 1),
                static_cast<size_t>(cfg.bits_b1()));
    const int mbits = int_log2(static_cast<uint64_t>(cfg.modulation_order_M));
    if (static_cast<int>(result.symbol_indices.size()) != cfg.symbols_per_block())
        throw std::invalid_argument("assemble_bits: symbol count mismatch");
    for (const int k : result.symbol_indices)
        append_bits(out, gray_encode(static_cast<uint32_t>(k)), static_cast<size_t>(mbits));
    append_bits(out, static_cast<uint64_t>(result.code_index - 1),
                static_cast<size_t>(cfg.bits_b3()));
    return out;
}

} // namespace csim::modem
