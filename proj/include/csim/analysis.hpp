// Closed-form performance computations: the despreading error integral,
// union-bound average bit error probabilities with exact (numeric theta
// integral) or two-term approximate pairwise error probabilities, data rate,
// energy saving, and detector multiplication counts.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "csim/mat.hpp"
#include "csim/modem.hpp"

namespace csim::analysis {

struct AbepBreakdown {
    double p1_detection = 0.0;
    double p2_despreading = 0.0;
    double pb_total = 0.0;
    double weight_detection = 1.0;   // (b1+b2)/bt share of the block
    double weight_despreading = 0.0; // b3/bt share
};

// Probability that noise-only despreading branches beat the signal branch:
// Pe = 1 - int_0^inf gamma-density(D, 1+gc) * P(max of Nc-1 noise branches < x) dx
// evaluated by adaptive quadrature to 1e-10 absolute tolerance.
double despreading_error(double avg_branch_snr, int diversity_order, int num_codes_Nc);

// P2 = Nc/(2Nc-2) * Pe
double abep_despreading_bits(double pe, int num_codes_Nc);

// Union bound on the antenna+symbol detection stage of the single-antenna
// scheme (closed-form Rayleigh pairwise terms), clamped to [0, 0.5].
double abep_sm_union_bound(const modem::SchemeConfig& cfg, double es_over_n0_linear);

struct PepSpectrum {
    std::array<double, 2> eigenvalues{0.0, 0.0}; // descending
    int rank = 0;
    int hamming_errors = 0;
};

// Nonzero spectrum of (Xa-Xb)^H (Xa-Xb) for Nt x 2 codewords.
PepSpectrum gram_spectrum(const CMat& xa, const CMat& xb);

// (1/pi) * int_0^{pi/2} prod_m (1 + es_over_n0*lambda_m/(4 sin^2 t))^{-Nr} dt
double pep_exact(const PepSpectrum& spectrum, double es_over_n0_linear, int num_rx_Nr);
double pep_exact_general(const std::vector<double>& lambdas, double es_over_n0_linear,
                         int num_rx_Nr);

// (1/12) prod (1 + es*l/4)^{-Nr} + (1/4) prod (1 + es*l/3)^{-Nr}
double pep_approx(const PepSpectrum& spectrum, double es_over_n0_linear, int num_rx_Nr);
double pep_approx_general(const std::vector<double>& lambdas, double es_over_n0_linear,
                          int num_rx_Nr);

// Union bound over the codeword hypothesis space of the two-interval schemes.
// For the single-sequence scheme this is the antenna+symbol stage (sequence
// errors are covered by the despreading term); the dual-sequence scheme is
// bounded over its full hypothesis space including the pair choice. Refuses
// (throws HypothesisCapExceeded) beyond pair_cap ordered codeword pairs.
struct HypothesisCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
double abep_stbc_sm_union_bound(const modem::SchemeConfig& cfg, double es_over_n0_linear,
                                bool use_exact_pep, long pair_cap = 1L << 20);

AbepBreakdown abep_total(double p1, double p2, double weight_detection_bits,
                         double weight_despreading_bits);

// Full analytic ABEP for a configuration at one SNR (perfect CSI, i.i.d.
// Rayleigh assumptions). For the despreading-based schemes the detection
// term includes the Pe/2 slip-propagation contribution, making pb_total an
// upper bound on the low-complexity detector's bit error rate.
AbepBreakdown abep(const modem::SchemeConfig& cfg, double es_over_n0_db,
                   bool use_exact_pep = true, long pair_cap = 1L << 20);

// R_t = (1 - Pb) * bt / Ts
double data_rate(double bits_per_interval, double pb, double symbol_duration_s);

// (1 - b2/bt) * 100
double energy_saving(double b2, double bt);

struct ComplexityParams {
    long long L = 0, Nr = 0, Nt = 0, Nc = 0, Nz = 0, M = 0;
    double bt = 0.0;
};
long long complexity_count(modem::Scheme scheme, modem::Detector det, const ComplexityParams& p);
std::string complexity_formula(modem::Scheme scheme, modem::Detector det);

} // namespace csim::analysis
