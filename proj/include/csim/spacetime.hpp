// Alamouti-over-antenna-pair spatial codebooks: the published antenna-pair
// tables for 3..8 transmit antennas, per-codebook rotation angles, the
// coding-gain-distance metric, and the exhaustive rotation-angle search.
//
// Codewords are stored antennas x intervals (Nt x 2) everywhere.

#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "csim/mat.hpp"

namespace csim::spacetime {

struct StbcSmCodebook {
    int num_tx_Nt = 0;
    int modulation_order_M = 0;
    int codeword_count_Nz = 0;
    int per_codebook_Nv = 0;
    int codebook_count_Nb = 0;
    std::vector<std::pair<int, int>> antenna_pairs; // 1-based, published order
    std::vector<double> rotation_angles_phi;        // Nb entries, first is 0

    // e^{j phi_q} for pair index nz in 1..Nz, q = ceil(nz / Nv)
    cd rotation_factor(int nz1based) const;
    int codebook_of_pair(int nz1based) const; // q in 1..Nb
};

// Nt in 3..8, M in {2, 4, 8, 16}
StbcSmCodebook build_stbc_sm_codebook(int num_tx_Nt, int modulation_order_M);

struct SpaceTimeCodeword {
    CMat matrix; // Nt x 2
    int pair_index_nz = 0;
    cd rotation_factor{1.0, 0.0};
};

SpaceTimeCodeword make_codeword(const StbcSmCodebook& cb, int nz1based, cd x1, cd x2);

// Product of the nonzero eigenvalues of (Xa-Xb)^H (Xa-Xb) when the difference
// has rank 2, else 0.
double cgd(const CMat& xa, const CMat& xb);

// Minimum CGD over all cross-codebook codeword pairs when the second-codebook
// rotation angle is phi (Nt <= 4 layouts only).
double min_cross_codebook_cgd(int num_tx_Nt, int modulation_order_M, double phi);

// Exhaustive search over one constellation period [0, 2*pi/M) with the given
// step; exact plateaus resolve to the midpoint of the tied run. Requires
// Nt <= 4 and grid_step <= 0.01.
double optimize_rotation(int num_tx_Nt, int modulation_order_M, double grid_step);
double optimize_rotation_over(int num_tx_Nt, int modulation_order_M,
                              const std::vector<double>& candidates);

// (angle, min cross-codebook CGD) samples for inspection
std::vector<std::pair<double, double>> rotation_scan(int num_tx_Nt, int modulation_order_M,
                                                     double grid_step);
void write_rotation_scan_csv(const std::vector<std::pair<double, double>>& scan,
                             const std::string& path);

} // namespace csim::spacetime
