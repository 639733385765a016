#include "csim/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "csim/bits.hpp"
#include "csim/eig.hpp"

namespace csim::spacetime {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

using PairList = std::vector<std::pair<int, int>>;

// Published antenna-pair assignments; pairs map to codeword indices in
// left-to-right order.
const PairList& pair_table(int nt) {
    static const PairList t3 = {{1, 2}, {2, 3}};
    static const PairList t4 = {{1, 2}, {3, 4}, {2, 3}, {4, 1}};
    static const PairList t5 = {{1, 2}, {3, 4}, {2, 3}, {4, 5}, {1, 3}, {2, 4}, {3, 5}, {4, 1}};
    static const PairList t6 = {{1, 2}, {3, 4}, {5, 6}, {2, 3}, {4, 5}, {6, 1}, {1, 3}, {2, 4}};
    static const PairList t7 = {{1, 2}, {3, 4}, {5, 6}, {2, 3}, {4, 5}, {6, 7}, {1, 3}, {2, 4},
                                {5, 7}, {1, 4}, {2, 5}, {3, 6}, {1, 5}, {2, 6}, {3, 7}, {1, 6}};
    static const PairList t8 = {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {2, 3}, {4, 5}, {6, 7}, {8, 1},
                                {1, 3}, {2, 4}, {5, 7}, {6, 8}, {1, 5}, {2, 6}, {3, 7}, {4, 8}};
    switch (nt) {
        case 3: return t3;
        case 4: return t4;
        case 5: return t5;
        case 6: return t6;
        case 7: return t7;
        case 8: return t8;
    }
    throw std::invalid_argument("antenna pair table covers Nt in 3..8 only");
}

double case1_angle(int m) {
    switch (m) {
        case 2: return 1.57;
        case 4: return 0.61;
        case 8: return 0.30;
        case 16: return 0.15;
    }
    throw std::invalid_argument("rotation angles are defined for M in {2,4,8,16} only");
}

int case2_divisor(int m) {
    switch (m) {
        case 2: return 1;
        case 4: return 2;
        case 8: return 4;
        case 16: return 8;
    }
    throw std::invalid_argument("rotation angles are defined for M in {2,4,8,16} only");
}

cd psk_point(int k, int m) {
    const double phase = 2.0 * kPi * k / m;
    return {std::cos(phase), std::sin(phase)};
}

} // namespace

cd StbcSmCodebook::rotation_factor(int nz1based) const {
    const int q = codebook_of_pair(nz1based);
    const double phi = rotation_angles_phi[static_cast<size_t>(q - 1)];
    return {std::cos(phi), std::sin(phi)};
}

int StbcSmCodebook::codebook_of_pair(int nz1based) const {
    if (nz1based < 1 || nz1based > codeword_count_Nz)
        throw std::invalid_argument("pair index out of range");
    return (nz1based - 1) / per_codebook_Nv + 1;
}

StbcSmCodebook build_stbc_sm_codebook(int num_tx_Nt, int modulation_order_M) {
    const PairList& pairs = pair_table(num_tx_Nt);

    StbcSmCodebook cb;
    cb.num_tx_Nt = num_tx_Nt;
    cb.modulation_order_M = modulation_order_M;
    // Nz = 2^floor(log2 C(Nt,2)), Nv = floor(Nt/2), Nb = ceil(Nz/Nv)
    const int comb = num_tx_Nt * (num_tx_Nt - 1) / 2;
    int nz = 1;
    while (nz * 2 <= comb) nz *= 2;
    cb.codeword_count_Nz = nz;
    cb.per_codebook_Nv = num_tx_Nt / 2;
    cb.codebook_count_Nb = (nz + cb.per_codebook_Nv - 1) / cb.per_codebook_Nv;
    cb.antenna_pairs = pairs;
    if (static_cast<int>(pairs.size()) != nz)
        throw std::logic_error("pair table inconsistent with codeword count");
    // sanity: no antenna repeats inside one codebook block
    for (int q = 0; q < cb.codebook_count_Nb; ++q) {
        int seen_mask = 0;
        for (int k = q * cb.per_codebook_Nv;
             k < std::min(nz, (q + 1) * cb.per_codebook_Nv); ++k) {
            const int bit_a = 1 << pairs[k].first;
            const int bit_b = 1 << pairs[k].second;
            if ((seen_mask & bit_a) || (seen_mask & bit_b))
                throw std::logic_error("antenna reused inside one codebook block");
            seen_mask |= bit_a | bit_b;
        }
    }

    cb.rotation_angles_phi.resize(cb.codebook_count_Nb, 0.0);
    if (num_tx_Nt <= 4) {
        cb.rotation_angles_phi[1] = case1_angle(modulation_order_M);
    } else {
        const int div = case2_divisor(modulation_order_M);
        for (int k = 1; k <= cb.codebook_count_Nb; ++k)
            cb.rotation_angles_phi[static_cast<size_t>(k - 1)] =
                (k - 1) * kPi / (div * cb.codebook_count_Nb);
    }
    return cb;
}

SpaceTimeCodeword make_codeword(const StbcSmCodebook& cb, int nz1based, cd x1, cd x2) {
    if (nz1based < 1 || nz1based > cb.codeword_count_Nz)
        throw std::invalid_argument("make_codeword: pair index out of range");
    const auto [a, b] = cb.antenna_pairs[static_cast<size_t>(nz1based - 1)];
    const cd theta = cb.rotation_factor(nz1based);

    SpaceTimeCodeword cw;
    cw.pair_index_nz = nz1based;
    cw.rotation_factor = theta;
    cw.matrix = CMat(cb.num_tx_Nt, 2);
    cw.matrix(a - 1, 0) = theta * x1;
    cw.matrix(a - 1, 1) = theta * -std::conj(x2);
    cw.matrix(b - 1, 0) = theta * x2;
    cw.matrix(b - 1, 1) = theta * std::conj(x1);
    return cw;
}

double cgd(const CMat& xa, const CMat& xb) {
    if (!xa.same_shape(xb)) throw std::invalid_argument("cgd: shape mismatch");
    const CMat d = xa - xb;
    // Gram over the smaller side carries the nonzero spectrum
    const CMat g = d.rows <= d.cols ? matmul(d, hermitian_transpose(d))
                                    : matmul(hermitian_transpose(d), d);
    HermitianEig e = hermitian_eig(g);
    int rank = 0;
    double product = 1.0;
    for (const double lam : e.eigenvalues) {
        if (lam > 1e-12) {
            ++rank;
            product *= lam;
        }
    }
    return rank >= 2 ? product : 0.0;
}

double min_cross_codebook_cgd(int num_tx_Nt, int modulation_order_M, double phi) {
    if (num_tx_Nt > 4)
        throw std::invalid_argument("single-angle CGD scan applies to Nt <= 4 only");
    StbcSmCodebook cb = build_stbc_sm_codebook(num_tx_Nt, modulation_order_M);
    cb.rotation_angles_phi[1] = phi;
    const int m = modulation_order_M;
    const int nv = cb.per_codebook_Nv;

    std::vector<CMat> first, second;
    for (int nz = 1; nz <= cb.codeword_count_Nz; ++nz) {
        auto& dst = nz <= nv ? first : second;
        for (int k1 = 0; k1 < m; ++k1)
            for (int k2 = 0; k2 < m; ++k2)
                dst.push_back(make_codeword(cb, nz, psk_point(k1, m), psk_point(k2, m)).matrix);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const CMat& xa : first)
        for (const CMat& xb : second) best = std::min(best, cgd(xa, xb));
    return best;
}

double optimize_rotation_over(int num_tx_Nt, int modulation_order_M,
                              const std::vector<double>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("optimize_rotation: empty candidate set");
    std::vector<double> values(candidates.size());
    double best_value = -1.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        values[i] = min_cross_codebook_cgd(num_tx_Nt, modulation_order_M, candidates[i]);
        best_value = std::max(best_value, values[i]);
    }
    // The objective can sit on an exact plateau (the two-symbol alphabet does
    // for Nt = 4), where strict argmax degenerates into a rounding lottery.
    // Collect candidates tied with the maximum and return the midpoint of the
    // longest consecutive run; ties between runs keep the earlier one.
    const double tol = std::max(1e-9 * std::abs(best_value), 1e-12);
    size_t best_run_start = 0, best_run_len = 0;
    size_t run_start = 0, run_len = 0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (values[i] >= best_value - tol) {
            if (run_len == 0) run_start = i;
            ++run_len;
            if (run_len > best_run_len) {
                best_run_len = run_len;
                best_run_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    return 0.5 * (candidates[best_run_start] + candidates[best_run_start + best_run_len - 1]);
}

double optimize_rotation(int num_tx_Nt, int modulation_order_M, double grid_step) {
    if (grid_step <= 0.0 || grid_step > 0.01)
        throw std::invalid_argument("optimize_rotation: grid step must be in (0, 0.01]");
    // the codeword set is invariant under rotations by multiples of 2*pi/M,
    // so one constellation period covers every distinct codebook
    const double period = 2.0 * kPi / modulation_order_M;
    std::vector<double> grid;
    for (double phi = 0.0; phi < period; phi += grid_step) grid.push_back(phi);
    return optimize_rotation_over(num_tx_Nt, modulation_order_M, grid);
}

std::vector<std::pair<double, double>> rotation_scan(int num_tx_Nt, int modulation_order_M,
                                                     double grid_step) {
    std::vector<std::pair<double, double>> out;
    for (double phi = 0.0; phi < kPi; phi += grid_step)
        out.emplace_back(phi, min_cross_codebook_cgd(num_tx_Nt, modulation_order_M, phi));
    return out;
}

void write_rotation_scan_csv(const std::vector<std::pair<double, double>>& scan,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "angle_rad,min_cgd\n";
    char line[80];
    for (const auto& [phi, v] : scan) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", phi, v);
        out << line;
    }
}

} // namespace csim::spacetime
