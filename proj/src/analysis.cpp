#include "csim/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "csim/eig.hpp"
#include "csim/quad.hpp"

namespace csim::analysis {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double clamp01_half(double v) { return std::clamp(v, 0.0, 0.5); }

// e^{-z} * sum_{k<D} z^k / k!  (regularized upper incomplete gamma at integer D)
double gamma_tail(int d, double z) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < d; ++k) {
        term *= z / k;
        sum += term;
    }
    return std::exp(-z + std::log(sum));
}

// closed-form E[Q(sqrt(2*c*chi))] over a unit-mean 2Nr-dof chi-square:
// alpha^Nr * sum_{p<Nr} C(Nr-1+p, p) (1-alpha)^p with alpha from c
double rayleigh_pep_closed_form(double c, int nr) {
    const double alpha = 0.5 * (1.0 - std::sqrt(c / (1.0 + c)));
    double sum = 0.0;
    double binom = 1.0; // C(Nr-1+p, p), p = 0
    double pw = 1.0;    // (1-alpha)^p
    for (int p = 0; p < nr; ++p) {
        sum += binom * pw;
        binom *= static_cast<double>(nr - 1 + p + 1) / (p + 1);
        pw *= 1.0 - alpha;
    }
    return std::pow(alpha, nr) * sum;
}

std::vector<double> nonzero_spectrum(const CMat& stacked) {
    const CMat gram = matmul(hermitian_transpose(stacked), stacked);
    HermitianEig e = hermitian_eig(gram);
    double lmax = 0.0;
    for (const double l : e.eigenvalues) lmax = std::max(lmax, l);
    std::vector<double> out;
    for (const double l : e.eigenvalues)
        if (l > 1e-12 * std::max(1.0, lmax)) out.push_back(l);
    return out;
}

} // namespace

double despreading_error(double avg_branch_snr, int diversity_order, int num_codes_Nc) {
    if (avg_branch_snr < 0.0) throw std::invalid_argument("despreading_error: SNR must be >= 0");
    if (diversity_order < 1) throw std::invalid_argument("despreading_error: D must be >= 1");
    if (num_codes_Nc < 2) throw std::invalid_argument("despreading_error: Nc must be >= 2");

    const int d = diversity_order;
    const int nc = num_codes_Nc;
    const double theta = 1.0 + avg_branch_snr;
    const double log_norm = -d * std::log(theta) - std::lgamma(static_cast<double>(d));

    double zeta = std::max(4.0 * d, 40.0);
    while (gamma_tail(d, zeta) > 1e-16) zeta *= 2.0;
    const double upper = theta * zeta;

    const auto integrand = [&](double x) -> double {
        const double logf =
            (d - 1) * (x > 0.0 ? std::log(x) : 0.0) - x / theta + log_norm;
        const double cdf = 1.0 - gamma_tail(d, x);
        if (cdf <= 0.0) return 0.0;
        return std::exp(logf + (nc - 1) * std::log(cdf));
    };

    QuadResult q = integrate_adaptive(integrand, 0.0, upper, 1e-10);
    if (!q.converged)
        throw std::runtime_error("despreading_error: quadrature did not reach 1e-10 tolerance");
    return std::clamp(1.0 - q.value, 0.0, 1.0);
}

double abep_despreading_bits(double pe, int num_codes_Nc) {
    if (pe < 0.0 || pe > 1.0) throw std::invalid_argument("abep_despreading_bits: pe outside [0,1]");
    if (num_codes_Nc < 2) throw std::invalid_argument("abep_despreading_bits: Nc must be >= 2");
    return static_cast<double>(num_codes_Nc) / (2.0 * num_codes_Nc - 2.0) * pe;
}

double abep_sm_union_bound(const modem::SchemeConfig& cfg, double es_over_n0_linear) {
    if (cfg.scheme != modem::Scheme::sm_cim)
        throw std::invalid_argument("abep_sm_union_bound: single-antenna-scheme config required");
    const int m = cfg.modulation_order_M;
    const int nr = cfg.num_rx_Nr;
    const int mbits = int_log2(static_cast<uint64_t>(m));
    const int bits = cfg.bits_b1() + cfg.bits_b2(); // detection-stage hypothesis bits
    const uint64_t count = 1ULL << bits;

    std::vector<cd> by_bits(m);
    for (int g = 0; g < m; ++g)
        by_bits[static_cast<size_t>(g)] = modem::psk_symbol(static_cast<int>(gray_decode(g)), m);

    double sum = 0.0;
    for (uint64_t i = 0; i < count; ++i) {
        const int ant_i = static_cast<int>(i >> mbits);
        const cd xi = by_bits[i & static_cast<uint64_t>(m - 1)];
        for (uint64_t q = 0; q < count; ++q) {
            if (q == i) continue;
            const int ant_q = static_cast<int>(q >> mbits);
            const cd xq = by_bits[q & static_cast<uint64_t>(m - 1)];
            const double dist2 =
                ant_i == ant_q ? std::norm(xi - xq) : std::norm(xi) + std::norm(xq);
            const double gamma_bar = 0.5 * es_over_n0_linear * dist2;
            const int e = static_cast<int>(std::popcount(i ^ q));
            sum += e * rayleigh_pep_closed_form(0.5 * gamma_bar, nr);
        }
    }
    return clamp01_half(sum / (static_cast<double>(bits) * static_cast<double>(count)));
}

PepSpectrum gram_spectrum(const CMat& xa, const CMat& xb) {
    if (!xa.same_shape(xb)) throw std::invalid_argument("gram_spectrum: shape mismatch");
    if (xa.cols != 2) throw std::invalid_argument("gram_spectrum: codewords must have 2 columns");
    const CMat d = xa - xb;
    // 2x2 Gram D^H D shares the nonzero spectrum of the Nt x Nt Gram
    cd g00(0, 0), g01(0, 0), g11(0, 0);
    for (int r = 0; r < d.rows; ++r) {
        g00 += std::conj(d(r, 0)) * d(r, 0);
        g01 += std::conj(d(r, 0)) * d(r, 1);
        g11 += std::conj(d(r, 1)) * d(r, 1);
    }
    const double tr = g00.real() + g11.real();
    // (a-b)^2 + 4|c|^2 form avoids the cancellation that tr^2 - 4 det suffers
    // for twin eigenvalues (every same-pair Alamouti difference)
    const double gap = g00.real() - g11.real();
    const double disc = std::sqrt(gap * gap + 4.0 * std::norm(g01));
    PepSpectrum s;
    s.eigenvalues[0] = std::max(0.0, 0.5 * (tr + disc));
    s.eigenvalues[1] = std::max(0.0, 0.5 * (tr - disc));
    s.rank = (s.eigenvalues[0] > 1e-12 ? 1 : 0) + (s.eigenvalues[1] > 1e-12 ? 1 : 0);
    return s;
}

double pep_exact_general(const std::vector<double>& lambdas, double es_over_n0_linear,
                         int num_rx_Nr) {
    if (lambdas.empty()) throw std::invalid_argument("pep_exact: rank-0 pair is undefined");
    const auto integrand = [&](double t) -> double {
        const double s2 = std::sin(t) * std::sin(t);
        double v = 1.0;
        for (const double lam : lambdas)
            v *= std::pow(1.0 + es_over_n0_linear * lam / (4.0 * s2), -num_rx_Nr);
        return v;
    };
    QuadResult q = integrate_adaptive(integrand, 0.0, 0.5 * kPi, 1e-12);
    if (!q.converged) throw std::runtime_error("pep_exact: quadrature did not converge");
    return q.value / kPi;
}

double pep_exact(const PepSpectrum& spectrum, double es_over_n0_linear, int num_rx_Nr) {
    std::vector<double> lams(spectrum.eigenvalues.begin(),
                             spectrum.eigenvalues.begin() + spectrum.rank);
    return pep_exact_general(lams, es_over_n0_linear, num_rx_Nr);
}

double pep_approx_general(const std::vector<double>& lambdas, double es_over_n0_linear,
                          int num_rx_Nr) {
    if (lambdas.empty()) throw std::invalid_argument("pep_approx: rank-0 pair is undefined");
    double p4 = 1.0, p3 = 1.0;
    for (const double lam : lambdas) {
        p4 *= std::pow(1.0 + es_over_n0_linear * lam / 4.0, -num_rx_Nr);
        p3 *= std::pow(1.0 + es_over_n0_linear * lam / 3.0, -num_rx_Nr);
    }
    return p4 / 12.0 + p3 / 4.0;
}

double pep_approx(const PepSpectrum& spectrum, double es_over_n0_linear, int num_rx_Nr) {
    std::vector<double> lams(spectrum.eigenvalues.begin(),
                             spectrum.eigenvalues.begin() + spectrum.rank);
    return pep_approx_general(lams, es_over_n0_linear, num_rx_Nr);
}

namespace {

// per-stream Nt x 2 Alamouti coefficient matrix (rotation included)
CMat stream_codeword(const spacetime::StbcSmCodebook& sp, int nz0, cd x1, cd x2) {
    return spacetime::make_codeword(sp, nz0 + 1, x1, x2).matrix;
}

double stbc_union_bound_single(const modem::SchemeConfig& cfg, double es_eff, bool use_exact,
                               long pair_cap) {
    const auto& sp = *cfg.spatial;
    const int m = cfg.modulation_order_M;
    const int mbits = int_log2(static_cast<uint64_t>(m));
    const int bits = cfg.bits_b1() + cfg.bits_b2();
    const uint64_t count = 1ULL << bits;
    if (static_cast<long double>(count) * (count - 1) > static_cast<long double>(pair_cap))
        throw HypothesisCapExceeded("union bound hypothesis pair count exceeds the cap");

    std::vector<CMat> words(count);
    for (uint64_t v = 0; v < count; ++v) {
        const int nz0 = static_cast<int>(v >> (2 * mbits));
        const int g1 = static_cast<int>((v >> mbits) & (m - 1));
        const int g2 = static_cast<int>(v & static_cast<uint64_t>(m - 1));
        words[v] = stream_codeword(sp, nz0,
                                   modem::psk_symbol(static_cast<int>(gray_decode(g1)), m),
                                   modem::psk_symbol(static_cast<int>(gray_decode(g2)), m));
    }

    const int nr = cfg.num_rx_Nr;
    // identical spectra repeat across symmetric codeword pairs; aggregate the
    // bit-error weights per exact (lambda1, lambda2) key before integrating
    std::map<std::pair<double, double>, double> classes;
    for (uint64_t i = 0; i < count; ++i) {
        for (uint64_t q = 0; q < count; ++q) {
            if (q == i) continue;
            const PepSpectrum s = gram_spectrum(words[i], words[q]);
            if (s.rank == 0) continue;
            classes[{s.eigenvalues[0], s.eigenvalues[1]}] +=
                static_cast<double>(std::popcount(i ^ q));
        }
    }
    double sum = 0.0;
    for (const auto& [key, weight] : classes) {
        PepSpectrum s;
        s.eigenvalues = {key.first, key.second};
        s.rank = (key.first > 1e-12 ? 1 : 0) + (key.second > 1e-12 ? 1 : 0);
        const double pep = use_exact ? pep_exact(s, es_eff, nr) : pep_approx(s, es_eff, nr);
        sum += weight * pep;
    }
    return clamp01_half(sum / (static_cast<double>(bits) * static_cast<double>(count)));
}

double stbc_union_bound_dual(const modem::SchemeConfig& cfg, double es_eff, bool use_exact,
                             long pair_cap) {
    const auto& sp = *cfg.spatial;
    const auto& ps = *cfg.pairs;
    const int m = cfg.modulation_order_M;
    const int mbits = int_log2(static_cast<uint64_t>(m));
    const int n3 = cfg.bits_b3();
    const int bits = cfg.block_bits();
    const uint64_t count = 1ULL << bits;
    if (static_cast<long double>(count) * (count - 1) > static_cast<long double>(pair_cap))
        throw HypothesisCapExceeded("union bound hypothesis pair count exceeds the cap");

    struct Hypothesis {
        int seq[2];   // 0-based sequence indices
        CMat word[2]; // per-stream Nt x 2 coefficients
    };
    std::vector<Hypothesis> hyps(count);
    for (uint64_t v = 0; v < count; ++v) {
        const int nz0 = static_cast<int>(v >> (4 * mbits + n3));
        int g[4];
        for (int sidx = 0; sidx < 4; ++sidx)
            g[sidx] = static_cast<int>((v >> ((3 - sidx) * mbits + n3)) & (m - 1));
        const int ns0 = static_cast<int>(v & ((1ULL << n3) - 1));
        Hypothesis& h = hyps[v];
        h.seq[0] = ps.pairs[static_cast<size_t>(ns0)].first - 1;
        h.seq[1] = ps.pairs[static_cast<size_t>(ns0)].second - 1;
        for (int stream = 0; stream < 2; ++stream)
            h.word[stream] = stream_codeword(
                sp, nz0, modem::psk_symbol(static_cast<int>(gray_decode(g[2 * stream])), m),
                modem::psk_symbol(static_cast<int>(gray_decode(g[2 * stream + 1])), m));
    }

    const int nt = cfg.num_tx_Nt;
    const int nr = cfg.num_rx_Nr;
    double sum = 0.0;
    for (uint64_t i = 0; i < count; ++i) {
        for (uint64_t q = 0; q < count; ++q) {
            if (q == i) continue;
            const Hypothesis& hi = hyps[i];
            const Hypothesis& hq = hyps[q];
            // per-sequence coefficient differences, orthogonal sequences assumed
            int seqs[4];
            int nseq = 0;
            const auto add_seq = [&](int s0) {
                for (int k = 0; k < nseq; ++k)
                    if (seqs[k] == s0) return;
                seqs[nseq++] = s0;
            };
            add_seq(hi.seq[0]);
            add_seq(hi.seq[1]);
            add_seq(hq.seq[0]);
            add_seq(hq.seq[1]);
            CMat stacked(nt, 2 * nseq);
            for (int k = 0; k < nseq; ++k) {
                for (int stream = 0; stream < 2; ++stream) {
                    const CMat* plus = hi.seq[stream] == seqs[k] ? &hi.word[stream] : nullptr;
                    const CMat* minus = hq.seq[stream] == seqs[k] ? &hq.word[stream] : nullptr;
                    if (!plus && !minus) continue;
                    for (int r = 0; r < nt; ++r)
                        for (int c = 0; c < 2; ++c) {
                            cd val = stacked(r, 2 * k + c);
                            if (plus) val += (*plus)(r, c);
                            if (minus) val -= (*minus)(r, c);
                            stacked(r, 2 * k + c) = val;
                        }
                }
            }
            const std::vector<double> lams = nonzero_spectrum(stacked);
            if (lams.empty()) continue;
            const double pep = use_exact ? pep_exact_general(lams, es_eff, nr)
                                         : pep_approx_general(lams, es_eff, nr);
            sum += static_cast<double>(std::popcount(i ^ q)) * pep;
        }
    }
    return clamp01_half(sum / (static_cast<double>(bits) * static_cast<double>(count)));
}

} // namespace

double abep_stbc_sm_union_bound(const modem::SchemeConfig& cfg, double es_over_n0_linear,
                                bool use_exact_pep, long pair_cap) {
    const double es_eff = cfg.power_scale() * cfg.power_scale() * es_over_n0_linear;
    switch (cfg.scheme) {
        case modem::Scheme::stbc_sm_cim:
            return stbc_union_bound_single(cfg, es_eff, use_exact_pep, pair_cap);
        case modem::Scheme::estbc_sm_cim:
            return stbc_union_bound_dual(cfg, es_eff, use_exact_pep, pair_cap);
        case modem::Scheme::sm_cim: break;
    }
    throw std::invalid_argument("abep_stbc_sm_union_bound: two-interval-scheme config required");
}

AbepBreakdown abep_total(double p1, double p2, double weight_detection_bits,
                         double weight_despreading_bits) {
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw std::invalid_argument("abep_total: probabilities outside [0,1]");
    const double bt = weight_detection_bits + weight_despreading_bits;
    AbepBreakdown out;
    out.p1_detection = p1;
    out.p2_despreading = p2;
    out.weight_detection = weight_detection_bits / bt;
    out.weight_despreading = weight_despreading_bits / bt;
    out.pb_total = out.weight_detection * p1 + out.weight_despreading * p2;
    return out;
}

AbepBreakdown abep(const modem::SchemeConfig& cfg, double es_over_n0_db, bool use_exact_pep,
                   long pair_cap) {
    const auto clamp_total = [](AbepBreakdown b) {
        b.pb_total = clamp01_half(b.pb_total);
        return b;
    };
    const double lin = std::pow(10.0, es_over_n0_db / 10.0);
    const int nc = cfg.num_codes_Nc;
    // After a despreading slip the second detection stage works on a
    // noise-only statistic, so its estimates are independent of the
    // transmitted indices and symbols: those bits flip with probability
    // exactly 1/2. Folding Pe/2 into the detection term keeps the combined
    // expression an upper bound on the simulated bit error rate.
    switch (cfg.scheme) {
        case modem::Scheme::sm_cim: {
            double p1 = abep_sm_union_bound(cfg, lin);
            double p2 = 0.0;
            if (nc >= 2) {
                const double pe = despreading_error(lin, cfg.num_rx_Nr, nc);
                p2 = abep_despreading_bits(pe, nc);
                p1 = std::min(1.0, p1 + 0.5 * pe);
            }
            return clamp_total(abep_total(p1, p2, cfg.bits_b1() + cfg.bits_b2(), cfg.bits_b3()));
        }
        case modem::Scheme::stbc_sm_cim: {
            double p1 = abep_stbc_sm_union_bound(cfg, lin, use_exact_pep, pair_cap);
            double p2 = 0.0;
            if (nc >= 2) {
                const double pe = despreading_error(lin, 2 * cfg.num_rx_Nr, nc);
                p2 = abep_despreading_bits(pe, nc);
                p1 = std::min(1.0, p1 + 0.5 * pe);
            }
            return clamp_total(abep_total(p1, p2, cfg.bits_b1() + cfg.bits_b2(), cfg.bits_b3()));
        }
        case modem::Scheme::estbc_sm_cim: {
            // bounded over the full hypothesis space, pair bits included
            const double pb = abep_stbc_sm_union_bound(cfg, lin, use_exact_pep, pair_cap);
            return clamp_total(abep_total(pb, 0.0, cfg.block_bits(), 0.0));
        }
    }
    throw std::logic_error("abep: unknown scheme");
}

double data_rate(double bits_per_interval, double pb, double symbol_duration_s) {
    if (pb < 0.0 || pb > 1.0) throw std::invalid_argument("data_rate: Pb outside [0,1]");
    if (symbol_duration_s <= 0.0) throw std::invalid_argument("data_rate: Ts must be positive");
    return (1.0 - pb) * bits_per_interval / symbol_duration_s;
}

double energy_saving(double b2, double bt) {
    if (b2 < 0.0 || b2 > bt) throw std::invalid_argument("energy_saving: need 0 <= b2 <= bt");
    return (1.0 - b2 / bt) * 100.0;
}

long long complexity_count(modem::Scheme scheme, modem::Detector det, const ComplexityParams& p) {
    const long long pow_bt = std::llround(std::exp2(p.bt));
    switch (scheme) {
        case modem::Scheme::sm_cim:
            if (det == modem::Detector::ml)
                return 4 * p.L + (4 * p.L * p.Nr * p.Nt + 4 * p.L * p.Nr) * pow_bt;
            return 4 * p.L + 8 * p.L * p.Nc * p.Nr + 8 * p.Nr * p.Nt * p.M;
        case modem::Scheme::stbc_sm_cim:
            if (det == modem::Detector::ml)
                return 8 * p.L + (4 * p.L * p.Nr * p.Nt + 4 * p.L * p.Nr) * pow_bt;
            return 8 * p.L + 4 * p.L * p.Nc * p.Nr + 4 * p.Nc * p.Nr + 16 * p.Nr * p.Nz * p.M;
        case modem::Scheme::estbc_sm_cim:
            if (det == modem::Detector::ml)
                return 16 * p.L + (4 * p.L * p.Nt * p.Nr + 4 * p.L * p.Nr) * pow_bt;
            return 16 * p.L + 4 * p.L * p.Nc * p.Nr + 4 * p.Nc * p.Nr + 32 * p.Nr * p.Nz * p.M;
    }
    throw std::invalid_argument("complexity_count: unknown scheme");
}

std::string complexity_formula(modem::Scheme scheme, modem::Detector det) {
    switch (scheme) {
        case modem::Scheme::sm_cim:
            return det == modem::Detector::ml ? "4L + (4LNrNt + 4LNr)2^bt"
                                              : "4L + 8LNcNr + 8NrNtM";
        case modem::Scheme::stbc_sm_cim:
            return det == modem::Detector::ml ? "8L + (4LNrNt + 4LNr)2^bt"
                                              : "8L + 4LNcNr + 4NcNr + 16NrNzM";
        case modem::Scheme::estbc_sm_cim:
            return det == modem::Detector::ml ? "16L + (4LNtNr + 4LNr)2^bt"
                                              : "16L + 4LNcNr + 4NcNr + 32NrNzM";
    }
    throw std::invalid_argument("complexity_formula: unknown scheme");
}

} // namespace csim::analysis
